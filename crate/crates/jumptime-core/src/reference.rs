//! Dense brute-force oracles.
//!
//! Everything here works on full real-space matrices with no knowledge of
//! the momentum-block structure, which is exactly what makes these solvers
//! usable as independent cross-checks for the momentum-space machinery:
//!
//! - [`integrate_master`]: adaptive Dormand–Prince integration of the
//!   Lindblad master equation,
//! - [`jumptime_map`]: the exact between-jump map
//!   `ρ_{n+1} = ∫₀^∞ γ dτ Σ_j L_j e^{−iH_eff τ} ρ_n e^{iH_eff† τ} L_j†`,
//!   evaluated in the biorthogonal eigenbasis of `H_eff` (the τ-integral is
//!   a resolvent identity, so no time stepping enters),
//! - [`steady_state_blocks`] / [`steady_state_numeric`]: null vectors of the
//!   vectorized per-momentum Liouvillian.

use crate::bloch::ModelSpec;
use crate::dissipator::{DissipatorSpec, Sublattice};
use crate::error::CoreError;
use crate::grid::MomentumGrid;
use crate::linalg::{c, C64, Mat2};
use crate::propagator::DensityKernel;
use crate::Result;
use ndarray::{Array1, Array2};
use ndarray_linalg::{Eig, Eigh, Inverse, SVD, UPLO};

/// Dense density matrix over (cell, sublattice), index `2·cell + s`.
#[derive(Clone, Debug)]
pub struct DenseDensityMatrix {
    pub matrix: Array2<C64>,
}

impl DenseDensityMatrix {
    pub fn new(matrix: Array2<C64>) -> Self {
        DenseDensityMatrix { matrix }
    }

    /// `|j₀⟩⟨j₀| ⊗ |s⟩⟨s|` on a lattice of `dims` cells.
    pub fn localized(dims: &[usize], cell: &[usize], sublattice: usize) -> Self {
        let n_cells: usize = dims.iter().product();
        let mut m = Array2::zeros((2 * n_cells, 2 * n_cells));
        let flat = match dims.len() {
            1 => cell[0],
            _ => cell[0] * dims[1] + cell[1],
        };
        m[[2 * flat + sublattice, 2 * flat + sublattice]] = c(1.0, 0.0);
        DenseDensityMatrix { matrix: m }
    }

    pub fn trace(&self) -> C64 {
        self.matrix.diag().sum()
    }

    pub fn hermiticity_defect(&self) -> f64 {
        let n = self.matrix.nrows();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.matrix[[i, j]] - self.matrix[[j, i]].conj()).norm());
            }
        }
        worst
    }

    /// Eigenvalues of the Hermitized matrix, ascending.
    pub fn eigenvalues(&self) -> Result<Vec<f64>> {
        let herm = hermitize(&self.matrix);
        let (vals, _) = herm
            .eigh(UPLO::Upper)
            .map_err(|e| CoreError::Decomposition(format!("eigh failed: {e}")))?;
        Ok(vals.to_vec())
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        Ok(self
            .eigenvalues()?
            .first()
            .copied()
            .unwrap_or(0.0))
    }

    /// Mean displacement per axis in the window centered on `center`.
    pub fn mean_displacement(&self, dims: &[usize], center: &[i64]) -> Vec<f64> {
        let n_axes = dims.len();
        let mut mean = vec![0.0; n_axes];
        let n_cells: usize = dims.iter().product();
        for flat in 0..n_cells {
            let idx = match n_axes {
                1 => [flat, 0],
                _ => [flat / dims[1], flat % dims[1]],
            };
            let occ = self.matrix[[2 * flat, 2 * flat]].re
                + self.matrix[[2 * flat + 1, 2 * flat + 1]].re;
            for a in 0..n_axes {
                let l = dims[a] as i64;
                let m = (idx[a] as i64 - center[a]).rem_euclid(l);
                let off = if m > l / 2 { m - l } else { m };
                mean[a] += occ * (center[a] + off) as f64;
            }
        }
        mean
    }
}

pub fn hermitize(m: &Array2<C64>) -> Array2<C64> {
    let mut out = m.clone();
    let n = m.nrows();
    for i in 0..n {
        for j in 0..n {
            out[[i, j]] = (m[[i, j]] + m[[j, i]].conj()) * 0.5;
        }
    }
    out
}

/// Trace distance `½ Σ |eig(a − b)|` between two Hermitian matrices.
pub fn trace_distance(a: &Array2<C64>, b: &Array2<C64>) -> Result<f64> {
    let diff = hermitize(&(a - b));
    let (vals, _) = diff
        .eigh(UPLO::Upper)
        .map_err(|e| CoreError::Decomposition(format!("eigh failed: {e}")))?;
    Ok(0.5 * vals.iter().map(|v| v.abs()).sum::<f64>())
}

/// Dense Lindblad operators `(γ_j, L_j)` of the dissipator on a finite
/// lattice. Kick families expand into one operator per grid momentum with
/// rate `γ·G(q)Δq`.
pub fn dense_lindblad_ops(
    dissipator: &DissipatorSpec,
    dims: &[usize],
) -> Result<Vec<(f64, Array2<C64>)>> {
    dissipator.validate()?;
    let n_cells: usize = dims.iter().product();
    let n = 2 * n_cells;
    let grid = MomentumGrid::new(dims);
    let cell_idx = |flat: usize| -> [usize; 2] {
        match dims.len() {
            1 => [flat, 0],
            _ => [flat / dims[1], flat % dims[1]],
        }
    };
    let mut ops = Vec::new();
    for comp in dissipator.components() {
        match comp {
            DissipatorSpec::Collective { target, gamma } => {
                let mut l = Array2::zeros((n, n));
                for j in 0..n_cells {
                    l[[2 * j + target.index(), 2 * j + target.other().index()]] = c(1.0, 0.0);
                }
                ops.push((*gamma, l));
            }
            DissipatorSpec::SublatticeProjector { target, gamma } => {
                let mut l = Array2::zeros((n, n));
                for j in 0..n_cells {
                    l[[2 * j + target.index(), 2 * j + target.index()]] = c(1.0, 0.0);
                }
                ops.push((*gamma, l));
            }
            DissipatorSpec::Kick { g, gamma } => {
                let masses = g.masses(&grid)?;
                for (q, w) in masses.iter().enumerate() {
                    if *w == 0.0 {
                        continue;
                    }
                    let qk = grid.momentum(q);
                    let mut l = Array2::zeros((n, n));
                    for j in 0..n_cells {
                        let idx = cell_idx(j);
                        let phase: f64 =
                            (0..dims.len()).map(|a| qk[a] * idx[a] as f64).sum();
                        l[[2 * j, 2 * j + 1]] = c(phase.cos(), phase.sin());
                    }
                    ops.push((*gamma * *w, l));
                }
            }
            DissipatorSpec::DirectionalHop { gamma } => {
                let mut l = Array2::zeros((n, n));
                for j in 0..n_cells {
                    let idx = cell_idx(j);
                    let shifted = [(idx[0] + 1) % dims[0], idx[1]];
                    let to = match dims.len() {
                        1 => shifted[0],
                        _ => shifted[0] * dims[1] + shifted[1],
                    };
                    for s in 0..2 {
                        l[[2 * to + s, 2 * j + s]] = c(1.0, 0.0);
                    }
                }
                ops.push((*gamma, l));
            }
            DissipatorSpec::Mixture { .. } => unreachable!("components are flat"),
        }
    }
    Ok(ops)
}

/// Dense `H_eff = H − (i/2) Σ_j γ_j L_j†L_j`.
pub fn dense_effective_hamiltonian(
    model: &ModelSpec,
    dissipator: &DissipatorSpec,
    dims: &[usize],
) -> Result<Array2<C64>> {
    let mut h = model.real_space_hamiltonian(dims)?;
    for (gamma, l) in dense_lindblad_ops(dissipator, dims)? {
        let ldl = l.t().mapv(|v| v.conj()).dot(&l);
        h = h + ldl.mapv(|v| v * c(0.0, -0.5 * gamma));
    }
    Ok(h)
}

fn lindblad_rhs(
    h: &Array2<C64>,
    ops: &[(f64, Array2<C64>)],
    rho: &Array2<C64>,
) -> Array2<C64> {
    let mut out = h.dot(rho) - rho.dot(h);
    out.mapv_inplace(|v| v * c(0.0, -1.0));
    for (gamma, l) in ops {
        let ldag = l.t().mapv(|v| v.conj());
        let lr = l.dot(rho);
        let ldl = ldag.dot(l);
        let gain = lr.dot(&ldag);
        let loss = ldl.dot(rho) + rho.dot(&ldl);
        out = out + gain.mapv(|v| v * gamma) - loss.mapv(|v| v * (0.5 * gamma));
    }
    out
}

/// Adaptive Dormand–Prince 5(4) integration of the master equation from a
/// dense initial state to time `t` with local tolerance `tol`. The trace is
/// preserved to `10·tol`.
pub fn integrate_master(
    rho0: &DenseDensityMatrix,
    model: &ModelSpec,
    dissipator: &DissipatorSpec,
    dims: &[usize],
    t: f64,
    tol: f64,
) -> Result<DenseDensityMatrix> {
    let h = model.real_space_hamiltonian(dims)?;
    let ops = dense_lindblad_ops(dissipator, dims)?;
    let f = |rho: &Array2<C64>| lindblad_rhs(&h, &ops, rho);

    // Dormand–Prince coefficients.
    const A: [[f64; 6]; 6] = [
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    const B5: [f64; 7] = [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
        0.0,
    ];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];

    let mut rho = rho0.matrix.clone();
    let trace0 = rho.diag().sum();
    let mut time = 0.0;
    let mut dt = (t / 100.0).min(0.1).max(1e-6);
    let mut k: Vec<Array2<C64>> = Vec::with_capacity(7);
    let mut steps = 0usize;
    while time < t {
        if steps > 2_000_000 {
            return Err(CoreError::Integration("step budget exhausted".into()));
        }
        steps += 1;
        dt = dt.min(t - time);
        k.clear();
        k.push(f(&rho));
        for stage in 0..6 {
            let mut y = rho.clone();
            for (j, kj) in k.iter().enumerate() {
                let a = A[stage][j];
                if a != 0.0 {
                    y = y + kj.mapv(|v| v * (a * dt));
                }
            }
            k.push(f(&y));
        }
        let mut y5 = rho.clone();
        let mut y4 = rho.clone();
        for (j, kj) in k.iter().enumerate() {
            if B5[j] != 0.0 {
                y5 = y5 + kj.mapv(|v| v * (B5[j] * dt));
            }
            if B4[j] != 0.0 {
                y4 = y4 + kj.mapv(|v| v * (B4[j] * dt));
            }
        }
        let scale = tol * (1.0 + rho.iter().map(|v| v.norm()).fold(0.0, f64::max));
        let err = (&y5 - &y4).iter().map(|v| v.norm()).fold(0.0, f64::max) / scale;
        if err <= 1.0 {
            time += dt;
            rho = y5;
        }
        let factor = if err > 0.0 {
            (0.9 * err.powf(-0.2)).clamp(0.2, 5.0)
        } else {
            5.0
        };
        dt *= factor;
        if dt < 1e-14 * t.max(1.0) {
            return Err(CoreError::Integration("step size underflow".into()));
        }
    }
    let drift = (rho.diag().sum() - trace0).norm();
    if drift > 10.0 * tol {
        return Err(CoreError::Integration(format!(
            "trace drift {drift:.3e} exceeds 10×tol"
        )));
    }
    Ok(DenseDensityMatrix::new(rho))
}

/// Result of one application of the jumptime map.
#[derive(Clone, Debug)]
pub struct JumptimeMapResult {
    pub rho: DenseDensityMatrix,
    pub trace: f64,
    /// Trace lost to dark states in this application.
    pub trace_deficit: f64,
    /// True when the eigenbasis was too ill-conditioned and the integral
    /// fell back to adaptive quadrature.
    pub used_fallback: bool,
}

/// Eigenvector condition number above which the eigenbasis route is
/// abandoned.
const EIG_COND_LIMIT: f64 = 1e8;

/// One exact application of the jumptime evolution map.
pub fn jumptime_map(
    rho_n: &DenseDensityMatrix,
    model: &ModelSpec,
    dissipator: &DissipatorSpec,
    dims: &[usize],
) -> Result<JumptimeMapResult> {
    let h_eff = dense_effective_hamiltonian(model, dissipator, dims)?;
    let ops = dense_lindblad_ops(dissipator, dims)?;
    let trace_in = rho_n.trace().re;
    let scale = model.energy_scale().max(dissipator.total_gamma());
    let dark_tol = 1e-10 * scale;

    let (vals, vecs) = h_eff
        .eig()
        .map_err(|e| CoreError::Decomposition(format!("eig failed: {e}")))?;
    let vinv = vecs
        .inv()
        .map_err(|e| CoreError::Decomposition(format!("eigenbasis not invertible: {e}")))?;
    let cond = fro_norm(&vecs) * fro_norm(&vinv) / vals.len() as f64;
    let (x, used_fallback) = if cond <= EIG_COND_LIMIT {
        let vinv_dag = vinv.t().mapv(|v| v.conj());
        let rho_tilde = vinv.dot(&rho_n.matrix).dot(&vinv_dag);
        let support_tol = 1e-12 * rho_tilde.iter().map(|v| v.norm()).fold(0.0, f64::max);
        // Jump capacity of each eigenmode: Σ_j γ_j‖L_j v_k‖²/‖v_k‖². An
        // undamped eigenvalue only makes the map diverge when the state
        // overlaps it AND some jump operator has nonzero image on it; modes
        // annihilated by every L_j are dark states and leak trace instead.
        let jump_capacity: Vec<f64> = (0..vals.len())
            .map(|k| {
                let col = vecs.column(k).to_owned();
                let ns = col.iter().map(|v| v.norm_sqr()).sum::<f64>().max(1e-300);
                ops.iter()
                    .map(|(gamma, l)| {
                        gamma * l.dot(&col).iter().map(|v| v.norm_sqr()).sum::<f64>()
                    })
                    .sum::<f64>()
                    / ns
            })
            .collect();
        // ∫₀^∞ e^{−i(λ_k − λ_l*)τ} dτ = −i/(λ_k − λ_l*).
        let mut x_tilde = rho_tilde;
        for (i, li) in vals.iter().enumerate() {
            for (j, lj) in vals.iter().enumerate() {
                let denom = li - lj.conj();
                if denom.im > -dark_tol {
                    let weight = x_tilde[[i, j]].norm()
                        * (jump_capacity[i] * jump_capacity[j]).sqrt();
                    if weight > support_tol.max(1e-10 * scale) {
                        return Err(CoreError::DarkDivergence {
                            lambda: (li.re, li.im),
                            im_abs: li.im.abs(),
                        });
                    }
                    // Dark pair: no jumps from it, only trace deficit.
                    x_tilde[[i, j]] = c(0.0, 0.0);
                } else {
                    x_tilde[[i, j]] *= -crate::linalg::I / denom;
                }
            }
        }
        let vdag = vecs.t().mapv(|v| v.conj());
        (vecs.dot(&x_tilde).dot(&vdag), false)
    } else {
        (
            jumptime_integral_quadrature(&h_eff, &rho_n.matrix, &vals, dark_tol)?,
            true,
        )
    };
    let mut rho_out: Array2<C64> = Array2::zeros(rho_n.matrix.raw_dim());
    for (gamma, l) in &ops {
        let ldag = l.t().mapv(|v| v.conj());
        rho_out = rho_out + l.dot(&x).dot(&ldag).mapv(|v| v * *gamma);
    }
    let trace = rho_out.diag().sum().re;
    Ok(JumptimeMapResult {
        rho: DenseDensityMatrix::new(rho_out),
        trace,
        trace_deficit: trace_in - trace,
        used_fallback,
    })
}

fn fro_norm(m: &Array2<C64>) -> f64 {
    m.iter().map(|v| v.norm_sqr()).sum::<f64>().sqrt()
}

/// Fallback for ill-conditioned eigenbases: adaptive composite-Simpson
/// quadrature of `X = ∫₀^T E(τ) ρ E(τ)† dτ` with `E` built by repeated
/// multiplication of a scaling-and-squaring short-time exponential.
fn jumptime_integral_quadrature(
    h_eff: &Array2<C64>,
    rho: &Array2<C64>,
    vals: &Array1<C64>,
    dark_tol: f64,
) -> Result<Array2<C64>> {
    let slowest = vals
        .iter()
        .map(|l| -l.im)
        .fold(f64::INFINITY, f64::min);
    if slowest < dark_tol {
        return Err(CoreError::DarkDivergence {
            lambda: (0.0, -slowest),
            im_abs: slowest.abs(),
        });
    }
    // Integrand decays like e^{−2·slowest·τ}.
    let t_end = (36.0f64.ln() + 36.0) / (2.0 * slowest);
    let tol = 1e-10;
    let mut n = 64usize;
    let mut prev: Option<Array2<C64>> = None;
    loop {
        let h = t_end / n as f64;
        let e_h = expm(&h_eff.mapv(|v| v * c(0.0, -h)));
        let mut e = Array2::eye(h_eff.nrows());
        let mut sum: Array2<C64> = Array2::zeros(rho.raw_dim());
        for node in 0..=n {
            let w = if node == 0 || node == n {
                1.0
            } else if node % 2 == 1 {
                4.0
            } else {
                2.0
            };
            let edag = e.t().mapv(|v: C64| v.conj());
            sum = sum + e.dot(rho).dot(&edag).mapv(|v| v * (w * h / 3.0));
            e = e.dot(&e_h);
        }
        if let Some(p) = &prev {
            let diff = (&sum - p).iter().map(|v| v.norm()).fold(0.0, f64::max);
            if diff < tol {
                return Ok(sum);
            }
        }
        prev = Some(sum);
        n *= 2;
        if n > 1 << 16 {
            return Err(CoreError::Integration(
                "jumptime quadrature failed to converge".into(),
            ));
        }
    }
}

/// Matrix exponential by scaling and squaring with a Taylor kernel.
pub fn expm(m: &Array2<C64>) -> Array2<C64> {
    let norm = m.iter().map(|v| v.norm()).fold(0.0, f64::max) * m.nrows() as f64;
    let s = norm.log2().ceil().max(0.0) as u32 + 1;
    let scaled = m.mapv(|v| v / (1u64 << s) as f64);
    let mut term: Array2<C64> = Array2::eye(m.nrows());
    let mut sum = term.clone();
    for k in 1..=24 {
        term = term.dot(&scaled).mapv(|v| v / k as f64);
        sum = sum + &term;
    }
    let mut out = sum;
    for _ in 0..s {
        out = out.dot(&out);
    }
    out
}

/// Per-momentum steady-state blocks of a momentum-block-diagonal
/// dissipator: the null vector of each vectorized 4×4 Liouvillian,
/// Hermitized and trace-normalized.
///
/// Degenerate manifolds (second singular value below `1e−8·σ_max`) fall
/// back to the maximally mixed block if that is stationary — the natural
/// representative for a unital block channel — and error otherwise.
pub fn steady_state_blocks(
    model: &ModelSpec,
    dissipator: &DissipatorSpec,
    grid: &MomentumGrid,
) -> Result<Vec<Mat2>> {
    dissipator.validate()?;
    // Kick families couple momentum blocks; they have no per-block steady
    // state decomposition.
    for comp in dissipator.components() {
        if matches!(comp, DissipatorSpec::Kick { .. }) {
            return Err(CoreError::Scope(
                "kick families are not momentum-block-diagonal; use integrate_master".into(),
            ));
        }
    }
    let mut blocks = Vec::with_capacity(grid.len());
    for (i, k) in grid.iter() {
        let h = model.bloch_vector(&k);
        let hm = Mat2::from_pauli(c(h.h0, 0.0), c(h.hx, 0.0), c(h.hy, 0.0), c(h.hz, 0.0));
        // Intracell Lindblad operators; the directional hop contributes a
        // momentum-dependent unitary phase, which cancels in ρ ↦ LρL†, so
        // its block Liouvillian terms vanish identically.
        let mut liouvillian: Array2<C64> = Array2::zeros((4, 4));
        let vec_idx = |r: usize, cidx: usize| 2 * r + cidx;
        let add_superop =
            |a: &Mat2, b: &Mat2, w: f64, lv: &mut Array2<C64>| {
                // w · A ρ B contributes A_{ik} B_{lj} at [(i,j),(k,l)].
                for i in 0..2 {
                    for j in 0..2 {
                        for kk in 0..2 {
                            for l in 0..2 {
                                lv[[vec_idx(i, j), vec_idx(kk, l)]] +=
                                    w * a.0[i][kk] * b.0[l][j];
                            }
                        }
                    }
                }
            };
        let id = Mat2::identity();
        // −i[H, ρ]
        let mut tmp: Array2<C64> = Array2::zeros((4, 4));
        add_superop(&hm, &id, 1.0, &mut tmp);
        add_superop(&id, &hm, -1.0, &mut tmp);
        liouvillian = liouvillian + tmp.mapv(|v| v * c(0.0, -1.0));
        for comp in dissipator.components() {
            let (gamma, l_op) = match comp {
                DissipatorSpec::Collective { target, gamma } => (
                    *gamma,
                    Mat2::transfer(target.index(), target.other().index()),
                ),
                DissipatorSpec::SublatticeProjector { target, gamma } => {
                    (*gamma, Mat2::projector(target.index()))
                }
                DissipatorSpec::DirectionalHop { gamma } => {
                    let phase = c((-k[0]).cos(), (-k[0]).sin());
                    (*gamma, Mat2::identity().scale(phase))
                }
                _ => unreachable!(),
            };
            let ldag = l_op.adjoint();
            let ldl = ldag.mul(&l_op);
            let mut term: Array2<C64> = Array2::zeros((4, 4));
            add_superop(&l_op, &ldag, 1.0, &mut term);
            add_superop(&ldl, &id, -0.5, &mut term);
            add_superop(&id, &ldl, -0.5, &mut term);
            liouvillian = liouvillian + term.mapv(|v| v * gamma);
        }
        let (_, sv, vt) = liouvillian
            .svd(false, true)
            .map_err(|e| CoreError::Decomposition(format!("svd failed: {e}")))?;
        let vt = vt.expect("requested Vt");
        let sigma_max = sv[0].max(1e-300);
        let null_vec = vt.row(3);
        let second = sv[2];
        let mut rho = Mat2([
            [null_vec[0].conj(), null_vec[1].conj()],
            [null_vec[2].conj(), null_vec[3].conj()],
        ]);
        if second < 1e-8 * sigma_max {
            // Degenerate manifold: accept the maximally mixed block when
            // stationary (e.g. the directional hop, which is unital).
            let mixed = Mat2::identity().scale(c(0.5, 0.0));
            let residual = apply_superop(&liouvillian, &mixed).max_abs();
            if residual <= 1e-10 * sigma_max.max(1.0) {
                rho = mixed;
            } else {
                return Err(CoreError::DegenerateSteadyState {
                    second_sv: second,
                    candidates: vec![
                        vt.row(3).iter().map(|v| (v.re, v.im)).collect(),
                        vt.row(2).iter().map(|v| (v.re, v.im)).collect(),
                    ],
                });
            }
        }
        // Hermitize and normalize the trace.
        let rho_h = rho.add(&rho.adjoint()).scale(c(0.5, 0.0));
        let tr = rho_h.trace();
        if tr.norm() < 1e-10 {
            return Err(CoreError::Decomposition(format!(
                "traceless steady-state candidate at grid index {i}"
            )));
        }
        let rho_n = rho_h.scale(c(1.0, 0.0) / tr);
        let residual = apply_superop(&liouvillian, &rho_n).max_abs();
        if residual > 1e-10 * sigma_max.max(1.0) {
            return Err(CoreError::Consistency(format!(
                "steady-state residual {residual:.3e} at grid index {i}"
            )));
        }
        blocks.push(rho_n);
    }
    Ok(blocks)
}

fn apply_superop(superop: &Array2<C64>, rho: &Mat2) -> Mat2 {
    let v = [rho.0[0][0], rho.0[0][1], rho.0[1][0], rho.0[1][1]];
    let mut out = [c(0.0, 0.0); 4];
    for (i, o) in out.iter_mut().enumerate() {
        for (j, vj) in v.iter().enumerate() {
            *o += superop[[i, j]] * vj;
        }
    }
    Mat2([[out[0], out[1]], [out[2], out[3]]])
}

/// Dense steady state with a uniform external momentum distribution
/// (localized initial state), in the real-space basis.
pub fn steady_state_numeric(
    model: &ModelSpec,
    dissipator: &DissipatorSpec,
    dims: &[usize],
) -> Result<DenseDensityMatrix> {
    let grid = MomentumGrid::new(dims);
    let blocks = steady_state_blocks(model, dissipator, &grid)?;
    let n = grid.len();
    let mut mom: Array2<C64> = Array2::zeros((2 * n, 2 * n));
    for (k, b) in blocks.iter().enumerate() {
        for s in 0..2 {
            for sp in 0..2 {
                mom[[2 * k + s, 2 * k + sp]] = b.0[s][sp] / n as f64;
            }
        }
    }
    Ok(DenseDensityMatrix::new(momentum_to_real(&mom, dims)))
}

/// Unitary change of basis |k⟩ → |j⟩: `U[(j,s),(k,s)] = e^{+i k·j}/√N`.
fn basis_matrix(dims: &[usize]) -> Array2<C64> {
    let grid = MomentumGrid::new(dims);
    let n = grid.len();
    let mut u = Array2::zeros((2 * n, 2 * n));
    let scale = 1.0 / (n as f64).sqrt();
    for j in 0..n {
        let idx = grid.unflatten(j);
        for (k, kv) in grid.iter() {
            let phase: f64 = (0..dims.len()).map(|a| kv[a] * idx[a] as f64).sum();
            let val = c(phase.cos(), phase.sin()) * scale;
            for s in 0..2 {
                u[[2 * j + s, 2 * k + s]] = val;
            }
        }
    }
    u
}

/// Momentum-basis dense matrix → real-space dense matrix.
pub fn momentum_to_real(rho_mom: &Array2<C64>, dims: &[usize]) -> Array2<C64> {
    let u = basis_matrix(dims);
    let udag = u.t().mapv(|v| v.conj());
    u.dot(rho_mom).dot(&udag)
}

/// Real-space dense matrix → momentum-basis dense matrix.
pub fn real_to_momentum(rho_real: &Array2<C64>, dims: &[usize]) -> Array2<C64> {
    let u = basis_matrix(dims);
    let udag = u.t().mapv(|v| v.conj());
    udag.dot(rho_real).dot(&u)
}

/// Embed a reduced sublattice kernel as a dense momentum-basis matrix
/// (continuum samples → discrete masses).
pub fn kernel_to_dense_momentum(kernel: &DensityKernel, sublattice: Sublattice) -> Array2<C64> {
    let grid = kernel.grid();
    let n = grid.len();
    let dv = grid.cell_volume();
    let s = sublattice.index();
    let mut out = Array2::zeros((2 * n, 2 * n));
    for i in 0..n {
        for j in 0..n {
            out[[2 * i + s, 2 * j + s]] = kernel.data()[[i, j]] * dv;
        }
    }
    out
}

/// Extract the reduced sublattice kernel from a dense momentum-basis matrix.
pub fn dense_momentum_to_kernel(
    dense: &Array2<C64>,
    grid: &MomentumGrid,
    sublattice: Sublattice,
) -> DensityKernel {
    let n = grid.len();
    let dv = grid.cell_volume();
    let s = sublattice.index();
    let mut data = Array2::zeros((n, n));
    for i in 0..n {
        for j in 0..n {
            data[[i, j]] = dense[[2 * i + s, 2 * j + s]] / dv;
        }
    }
    DensityKernel::from_parts(grid.clone(), data)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dissipator::KickDistribution;
    use approx::assert_abs_diff_eq;

    #[test]
    fn unitary_evolution_preserves_purity() {
        // γ → 0 limit: evolve with a tiny-rate dissipator absent by passing
        // a projector with negligible rate, and check purity conservation.
        let model = ModelSpec::ssh(0.4, 0.8);
        let dims = [8usize];
        let rho0 = DenseDensityMatrix::localized(&dims, &[2], 0);
        let weak = DissipatorSpec::SublatticeProjector {
            target: Sublattice::A,
            gamma: 1e-12,
        };
        let out = integrate_master(&rho0, &model, &weak, &dims, 2.0, 1e-10).unwrap();
        let purity = out.matrix.dot(&out.matrix).diag().sum().re;
        assert_abs_diff_eq!(purity, 1.0, epsilon = 1e-6);
        assert_abs_diff_eq!(out.trace().re, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn directional_hop_current() {
        // ⟨x⟩_t = a j₀ + a γ t for the dissipative directional hop. The
        // lattice must be large enough that the Poisson tail of the jump
        // count does not wrap the ring within tolerance.
        let model = ModelSpec::directional_chain(0.3);
        let dims = [32usize];
        let hop = DissipatorSpec::DirectionalHop { gamma: 1.0 };
        let rho0 = DenseDensityMatrix::localized(&dims, &[2], 0);
        let t = 2.0;
        let out = integrate_master(&rho0, &model, &hop, &dims, t, 1e-9).unwrap();
        let x = out.mean_displacement(&dims, &[2]);
        assert_abs_diff_eq!(x[0], 2.0 + t, epsilon = 1e-4);
    }

    #[test]
    fn jumptime_map_matches_kernel_on_ssh() {
        let model = ModelSpec::ssh(0.2, 0.5);
        let dims = [16usize];
        let grid = MomentumGrid::new(&dims);
        let cc = DissipatorSpec::collective(1.0);

        let dense0 = DenseDensityMatrix::localized(&dims, &[0], 0);
        let step1 = jumptime_map(&dense0, &model, &cc, &dims).unwrap();
        assert!(!step1.used_fallback);
        assert_abs_diff_eq!(step1.trace, 1.0, epsilon = 1e-9);
        assert!(step1.rho.hermiticity_defect() < 1e-10);
        assert!(step1.rho.min_eigenvalue().unwrap() > -1e-10);

        // Momentum-space closed form: one kernel step.
        let kernel0 = DensityKernel::localized(&grid, &[0]);
        let kernel1 = crate::propagator::evolve_kernel(&kernel0, &model, &cc, 1).unwrap();
        let dense_from_kernel =
            momentum_to_real(&kernel_to_dense_momentum(&kernel1, Sublattice::A), &dims);
        let max_diff = (&step1.rho.matrix - &dense_from_kernel)
            .iter()
            .map(|v| v.norm())
            .fold(0.0, f64::max);
        assert!(max_diff < 1e-9, "max elementwise difference {max_diff:.2e}");
    }

    #[test]
    fn jumptime_map_terminates_on_all_dark_hamiltonian() {
        // H = h_z σ_z with collective collapse: the first application keeps
        // only the A-population reachable from B, the second returns zero.
        let model = ModelSpec::from_pauli_harmonics(
            1,
            &[([1, 0], [c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.4, 0.0)])],
            crate::bloch::Lattice::OneD { a: 1.0 },
        )
        .unwrap();
        let dims = [8usize];
        let cc = DissipatorSpec::collective(1.0);
        let rho0 = DenseDensityMatrix::localized(&dims, &[0], 1); // on B
        let step1 = jumptime_map(&rho0, &model, &cc, &dims).unwrap();
        // All B-weight converts; the output lives on A (dark), so the next
        // application loses everything.
        assert_abs_diff_eq!(step1.trace, 1.0, epsilon = 1e-9);
        let step2 = jumptime_map(&step1.rho, &model, &cc, &dims).unwrap();
        assert!(step2.trace < 1e-9, "trace must vanish, got {}", step2.trace);
        assert_abs_diff_eq!(step2.trace_deficit, 1.0, epsilon = 1e-9);
    }

    #[test]
    fn mixture_first_jump_assumes_invariant_state() {
        // Collective (γ_cc) + B-projector (γ_B) applied to a B-localized
        // state: the intracell output is (γ_cc/γ)|A⟩⟨A| + (γ_B/γ)|B⟩⟨B|.
        let model = ModelSpec::ssh(0.2, 0.5);
        let dims = [8usize];
        let (gcc, gb) = (0.6, 0.2);
        let mix = DissipatorSpec::Mixture {
            components: vec![
                DissipatorSpec::collective(gcc),
                DissipatorSpec::SublatticeProjector {
                    target: Sublattice::B,
                    gamma: gb,
                },
            ],
        };
        let rho0 = DenseDensityMatrix::localized(&dims, &[0], 1);
        let out = jumptime_map(&rho0, &model, &mix, &dims).unwrap();
        let g = gcc + gb;
        let mut pa = 0.0;
        let mut pb = 0.0;
        for j in 0..8 {
            pa += out.rho.matrix[[2 * j, 2 * j]].re;
            pb += out.rho.matrix[[2 * j + 1, 2 * j + 1]].re;
        }
        assert_abs_diff_eq!(pa, gcc / g, epsilon = 1e-9);
        assert_abs_diff_eq!(pb, gb / g, epsilon = 1e-9);
    }

    #[test]
    fn steady_state_directional_hop_is_maximally_mixed() {
        let model = ModelSpec::directional_chain(0.3);
        let dims = [8usize];
        let hop = DissipatorSpec::DirectionalHop { gamma: 1.0 };
        let out = steady_state_numeric(&model, &hop, &dims).unwrap();
        // Uniform momentum + maximally mixed intracell = 1/(2N) identity.
        for i in 0..16 {
            assert_abs_diff_eq!(out.matrix[[i, i]].re, 1.0 / 16.0, epsilon = 1e-10);
        }
    }

    #[test]
    fn kick_steady_state_is_out_of_scope() {
        let model = ModelSpec::ssh(0.2, 0.5);
        let kick = DissipatorSpec::Kick {
            g: KickDistribution::Uniform,
            gamma: 1.0,
        };
        assert!(matches!(
            steady_state_blocks(&model, &kick, &MomentumGrid::one_d(8)),
            Err(CoreError::Scope(_))
        ));
    }

    #[test]
    fn expm_agrees_with_block_closed_form() {
        let m = Mat2::from_pauli(c(0.3, -0.2), c(0.7, 0.0), c(-0.1, 0.0), c(0.0, -0.4));
        let mut dense: Array2<C64> = Array2::zeros((2, 2));
        for i in 0..2 {
            for j in 0..2 {
                dense[[i, j]] = m.0[i][j] * c(0.0, -1.3);
            }
        }
        let e_dense = expm(&dense);
        let e_block = m.exp_minus_i_tau(1.3);
        for i in 0..2 {
            for j in 0..2 {
                assert!((e_dense[[i, j]] - e_block.0[i][j]).norm() < 1e-12);
            }
        }
    }
}
