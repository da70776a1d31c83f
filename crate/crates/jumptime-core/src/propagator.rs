//! Closed-form jumptime propagators and deterministic kernel evolution.
//!
//! Once the collapse family fixes an invariant intracell state, one jump
//! advances the reduced momentum kernel `ρ(p, p′)` by a scalar propagator.
//! With `h⊥² = hx² + hy²` and the dissipation rate `γ` (`ħ = 1`):
//!
//! ```text
//! A(p,p′) = h⊥²(p) − h⊥²(p′) + hz²(p) − hz²(p′) + iγ[hz(p) + hz(p′)]/2
//! B(p,p′) = h⊥²(p) + h⊥²(p′) + hz²(p) + hz²(p′) + iγ[hz(p) − hz(p′)]/2
//!
//! K_cc(p,p′) = 2γ² (hx(p) + i hy(p)) (hx(p′) − i hy(p′)) / (2A² + γ²B)
//!
//! K_A(p,p′)  = γ² (h⊥²(p) + h⊥²(p′))
//!            / (2(h⊥²(p) − h⊥²(p′))² + γ²(h⊥²(p) + h⊥²(p′)))
//! ```
//!
//! `K_B` is identical to `K_A`, and the collective+B-projector mixture uses
//! the convex combination `(γ_cc K_cc + γ_B K_B)/γ`. The same expressions
//! hold verbatim in two dimensions with vector momenta. Every propagator
//! satisfies `K(p,p) = 1`: the momentum distribution is a constant of
//! motion under collective collapse.
//!
//! Kernels for dissipators without a printed closed form (e.g. the
//! collective + A-projector mixture) are assembled exactly from the 2×2
//! resolvent of the effective Hamiltonian; those are labeled *empirical*.

use crate::bloch::{BlochVector, ModelSpec, DARK_CONTACT_REL_TOL};
use crate::dissipator::{DissipatorSpec, Sublattice};
use crate::error::CoreError;
use crate::grid::MomentumGrid;
use crate::linalg::{c, C64, Mat2};
use crate::Result;
use ndarray::Array2;

/// Check the dark-contact tolerance and evaluate the Bloch vector.
fn bloch_checked(model: &ModelSpec, k: &[f64; 2]) -> Result<BlochVector> {
    let h = model.bloch_vector(k);
    let tol = DARK_CONTACT_REL_TOL * model.energy_scale();
    if h.h_perp() <= tol {
        return Err(CoreError::DarkContact {
            momentum: k[..model.dimension()].to_vec(),
            h_perp: h.h_perp(),
        });
    }
    Ok(h)
}

/// Collective-collapse propagator from precomputed Bloch vectors.
pub fn k_cc_from_bloch(h: &BlochVector, hp: &BlochVector, gamma: f64) -> C64 {
    let g2 = gamma * gamma;
    let a = c(
        h.h_perp_sq - hp.h_perp_sq + h.hz * h.hz - hp.hz * hp.hz,
        gamma * (h.hz + hp.hz) / 2.0,
    );
    let b = c(
        h.h_perp_sq + hp.h_perp_sq + h.hz * h.hz + hp.hz * hp.hz,
        gamma * (h.hz - hp.hz) / 2.0,
    );
    let num = 2.0 * g2 * c(h.hx, h.hy) * c(hp.hx, -hp.hy);
    num / (2.0 * a * a + g2 * b)
}

/// Sublattice-projector propagator (identical for A and B).
pub fn k_sublattice_from_bloch(h: &BlochVector, hp: &BlochVector, gamma: f64) -> f64 {
    let g2 = gamma * gamma;
    let diff = h.h_perp_sq - hp.h_perp_sq;
    let sum = h.h_perp_sq + hp.h_perp_sq;
    g2 * sum / (2.0 * diff * diff + g2 * sum)
}

/// Collective-collapse propagator; errors at dark contacts.
pub fn k_cc(model: &ModelSpec, gamma: f64, k: &[f64; 2], kp: &[f64; 2]) -> Result<C64> {
    Ok(k_cc_from_bloch(
        &bloch_checked(model, k)?,
        &bloch_checked(model, kp)?,
        gamma,
    ))
}

/// Two-dimensional collective-collapse propagator: the one-dimensional
/// expression with vector momenta.
pub fn k_cc_2d(model: &ModelSpec, gamma: f64, k: &[f64; 2], kp: &[f64; 2]) -> Result<C64> {
    k_cc(model, gamma, k, kp)
}

/// Sublattice-projector propagator for either target.
pub fn k_sublattice(
    model: &ModelSpec,
    _target: Sublattice,
    gamma: f64,
    k: &[f64; 2],
    kp: &[f64; 2],
) -> Result<C64> {
    let h = bloch_checked(model, k)?;
    let hp = bloch_checked(model, kp)?;
    Ok(c(k_sublattice_from_bloch(&h, &hp, gamma), 0.0))
}

/// Collective + B-projector mixture propagator at total rate
/// `γ = γ_cc + γ_B`.
pub fn k_mixture(
    model: &ModelSpec,
    gamma_cc: f64,
    gamma_b: f64,
    k: &[f64; 2],
    kp: &[f64; 2],
) -> Result<C64> {
    let h = bloch_checked(model, k)?;
    let hp = bloch_checked(model, kp)?;
    let gamma = gamma_cc + gamma_b;
    let cc = k_cc_from_bloch(&h, &hp, gamma);
    let b = k_sublattice_from_bloch(&h, &hp, gamma);
    Ok(cc * (gamma_cc / gamma) + c(gamma_b / gamma * b, 0.0))
}

/// Which scalar propagator a topology computation refers to.
#[derive(Clone, Debug, PartialEq)]
pub enum PropagatorKind {
    Cc { gamma: f64 },
    SublatticeA { gamma: f64 },
    SublatticeB { gamma: f64 },
    MixtureCcB { gamma_cc: f64, gamma_b: f64 },
    /// Exact numerically assembled one-step kernel for a catalog dissipator
    /// with a pure invariant intracell state (reported as "empirical").
    Empirical(DissipatorSpec),
}

impl PropagatorKind {
    pub fn label(&self) -> String {
        match self {
            PropagatorKind::Cc { .. } => "collective".into(),
            PropagatorKind::SublatticeA { .. } => "sublattice_A".into(),
            PropagatorKind::SublatticeB { .. } => "sublattice_B".into(),
            PropagatorKind::MixtureCcB { .. } => "mixture_cc_B".into(),
            PropagatorKind::Empirical(_) => "empirical".into(),
        }
    }

    pub fn evaluate(&self, model: &ModelSpec, k: &[f64; 2], kp: &[f64; 2]) -> Result<C64> {
        match self {
            PropagatorKind::Cc { gamma } => k_cc(model, *gamma, k, kp),
            PropagatorKind::SublatticeA { gamma } => {
                k_sublattice(model, Sublattice::A, *gamma, k, kp)
            }
            PropagatorKind::SublatticeB { gamma } => {
                k_sublattice(model, Sublattice::B, *gamma, k, kp)
            }
            PropagatorKind::MixtureCcB { gamma_cc, gamma_b } => {
                k_mixture(model, *gamma_cc, *gamma_b, k, kp)
            }
            PropagatorKind::Empirical(d) => empirical_kernel(model, d, k, kp),
        }
    }
}

/// Post-jump intracell state of a leaf component, if pure.
fn leaf_output(comp: &DissipatorSpec) -> Option<Sublattice> {
    match comp {
        DissipatorSpec::Collective { target, .. } => Some(*target),
        DissipatorSpec::SublatticeProjector { target, .. } => Some(*target),
        DissipatorSpec::Kick { .. } => Some(Sublattice::A),
        DissipatorSpec::DirectionalHop { .. } | DissipatorSpec::Mixture { .. } => None,
    }
}

fn leaf_intracell_matrix(comp: &DissipatorSpec) -> Mat2 {
    match comp {
        DissipatorSpec::Collective { target, .. } => {
            Mat2::transfer(target.index(), target.other().index())
        }
        DissipatorSpec::SublatticeProjector { target, .. } => Mat2::projector(target.index()),
        DissipatorSpec::Kick { .. } => Mat2::transfer(0, 1),
        _ => unreachable!("checked by empirical_kernel"),
    }
}

fn leaf_gamma(comp: &DissipatorSpec) -> f64 {
    match comp {
        DissipatorSpec::Collective { gamma, .. }
        | DissipatorSpec::SublatticeProjector { gamma, .. }
        | DissipatorSpec::Kick { gamma, .. }
        | DissipatorSpec::DirectionalHop { gamma } => *gamma,
        DissipatorSpec::Mixture { .. } => unreachable!(),
    }
}

/// Amplitudes `c_α = ⟨s| l_j P_α |s⟩` and eigenvalues of one momentum block.
fn resolvent_amplitudes(
    model: &ModelSpec,
    dissipator: &DissipatorSpec,
    s: usize,
    k: &[f64; 2],
) -> Result<Vec<(C64, Vec<C64>)>> {
    let h = bloch_checked(model, k)?;
    let block = Mat2::from_pauli(c(h.h0, 0.0), c(h.hx, 0.0), c(h.hy, 0.0), c(h.hz, 0.0))
        .add(&dissipator.decay_matrix().scale(c(0.0, -0.5)));
    let pairs = block.spectral_projectors(1e-9).ok_or_else(|| {
        CoreError::Decomposition(format!(
            "effective Hamiltonian block at k = {:?} is (near-)defective",
            &k[..model.dimension()]
        ))
    })?;
    let mut out = Vec::with_capacity(2);
    for (lambda, proj) in pairs {
        if lambda.im >= -1e-14 * model.energy_scale().max(1.0) {
            return Err(CoreError::DarkDivergence {
                lambda: (lambda.re, lambda.im),
                im_abs: lambda.im.abs(),
            });
        }
        let amps = dissipator
            .components()
            .iter()
            .map(|comp| {
                let l = leaf_intracell_matrix(comp);
                let m = l.mul(&proj);
                m.0[s][s]
            })
            .collect();
        out.push((lambda, amps));
    }
    Ok(out)
}

/// Exact one-step scalar kernel
/// `K(p,p′) = Σ_j γ_j ∫₀^∞ ⟨s|L_j e^{−iH_eff(p)τ}|s⟩ ⟨s|L_j e^{−iH_eff(p′)τ}|s⟩* dτ`
/// for any catalog dissipator whose components all output the same pure
/// intracell state `|s⟩` and are momentum-preserving.
pub fn empirical_kernel(
    model: &ModelSpec,
    dissipator: &DissipatorSpec,
    k: &[f64; 2],
    kp: &[f64; 2],
) -> Result<C64> {
    let comps = dissipator.components();
    let mut out_subl: Option<Sublattice> = None;
    for comp in &comps {
        if matches!(comp, DissipatorSpec::Kick { .. }) {
            return Err(CoreError::Scope(
                "kick families shift momentum; use the convolution evolution instead".into(),
            ));
        }
        let s = leaf_output(comp).ok_or_else(|| {
            CoreError::Scope("dissipator has no pure invariant intracell state".into())
        })?;
        match out_subl {
            None => out_subl = Some(s),
            Some(prev) if prev == s => {}
            _ => {
                return Err(CoreError::Scope(
                    "mixture components output different sublattices; no scalar kernel".into(),
                ))
            }
        }
    }
    let s = out_subl
        .ok_or_else(|| CoreError::Scope("empty dissipator".into()))?
        .index();
    let left = resolvent_amplitudes(model, dissipator, s, k)?;
    let right = resolvent_amplitudes(model, dissipator, s, kp)?;
    let mut total = c(0.0, 0.0);
    for (j, comp) in comps.iter().enumerate() {
        let gamma_j = leaf_gamma(comp);
        for (la, ca) in &left {
            for (lb, cb) in &right {
                // ∫₀^∞ e^{−i(λ_α − λ_β*)τ} dτ = −i/(λ_α − λ_β*).
                total += gamma_j * ca[j] * cb[j].conj() * (-crate::linalg::I) / (la - lb.conj());
            }
        }
    }
    Ok(total)
}

/// Momentum kernel of the reduced jumptime state: continuum samples
/// `ρ(p_k, p_k′)` with the normalization `Σ_k ρ(p_k,p_k) Δp^d = 1`.
#[derive(Clone, Debug)]
pub struct DensityKernel {
    grid: MomentumGrid,
    data: Array2<C64>,
}

impl DensityKernel {
    pub fn grid(&self) -> &MomentumGrid {
        &self.grid
    }

    pub fn data(&self) -> &Array2<C64> {
        &self.data
    }

    pub fn from_parts(grid: MomentumGrid, data: Array2<C64>) -> Self {
        assert_eq!(data.shape(), &[grid.len(), grid.len()]);
        DensityKernel { grid, data }
    }

    /// Kernel of `|j₀⟩⟨j₀|`: `ρ(p,p′) = ⟨p|j₀⟩⟨j₀|p′⟩·h^d/a^d =
    /// e^{−i(k−k′)·j₀}/(2π)^d` — its momentum distribution is already
    /// homogeneous.
    pub fn localized(grid: &MomentumGrid, cell: &[i64]) -> Self {
        let n = grid.len();
        let norm = 1.0 / (2.0 * std::f64::consts::PI).powi(grid.n_axes() as i32);
        let mut data = Array2::zeros((n, n));
        for (i, k) in grid.iter() {
            for (j, kq) in grid.iter() {
                let mut phase = 0.0;
                for a in 0..grid.n_axes() {
                    phase -= (k[a] - kq[a]) * cell[a] as f64;
                }
                data[[i, j]] = c(phase.cos(), phase.sin()) * norm;
            }
        }
        DensityKernel {
            grid: grid.clone(),
            data,
        }
    }

    /// Fully dispersed kernel: diagonal `1/(2π)^d`, zero off-diagonal.
    pub fn homogeneous(grid: &MomentumGrid) -> Self {
        let n = grid.len();
        let norm = 1.0 / (2.0 * std::f64::consts::PI).powi(grid.n_axes() as i32);
        let mut data = Array2::zeros((n, n));
        for i in 0..n {
            data[[i, i]] = c(norm, 0.0);
        }
        DensityKernel {
            grid: grid.clone(),
            data,
        }
    }

    /// `Σ_k ρ(p_k, p_k) Δp^d` (1 for a dark-free normalized kernel).
    pub fn trace(&self) -> f64 {
        let dv = self.grid.cell_volume();
        (0..self.grid.len()).map(|i| self.data[[i, i]].re).sum::<f64>() * dv
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.grid.len()).map(|i| self.data[[i, i]].re).collect()
    }

    pub fn max_hermiticity_defect(&self) -> f64 {
        let n = self.grid.len();
        let mut worst = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                worst = worst.max((self.data[[i, j]] - self.data[[j, i]].conj()).norm());
            }
        }
        worst
    }

    /// Cell-space occupancy via the diagonal-shift DFT (exact on the grid).
    pub fn position_distribution(&self) -> Vec<f64> {
        let n = self.grid.len();
        let masses = self.grid.cell_volume();
        // S(Δ) = Σ_k ρ(k, k−Δ)·Δp^d, then n(j) = (1/N) Σ_Δ e^{iκ_Δ·j} S(Δ).
        let mut s: Vec<C64> = vec![c(0.0, 0.0); n];
        for (delta, sv) in s.iter_mut().enumerate() {
            let mut acc = c(0.0, 0.0);
            for k in 0..n {
                acc += self.data[[k, self.grid.unshift(k, delta)]];
            }
            *sv = acc * masses;
        }
        crate::trajectory::inverse_dft(self.grid.per_axis(), &mut s);
        s.iter().map(|v| v.re / n as f64).collect()
    }

    /// Mean displacement per axis (window centered on cell 0) and the
    /// occupancy within two cells of the periodic seam.
    pub fn mean_displacement(&self) -> (Vec<f64>, f64) {
        let occ = self.position_distribution();
        let dims = self.grid.per_axis();
        let mut mean = vec![0.0; dims.len()];
        let mut seam = 0.0;
        for (i, o) in occ.iter().enumerate() {
            let idx = self.grid.unflatten(i);
            let mut near_seam = false;
            for a in 0..dims.len() {
                let l = dims[a] as i64;
                let m = (idx[a] as i64).rem_euclid(l);
                let off = if m > l / 2 { m - l } else { m };
                mean[a] += o * off as f64;
                if off.abs() >= l / 2 - 2 {
                    near_seam = true;
                }
            }
            if near_seam {
                seam += o;
            }
        }
        (mean, seam)
    }
}

/// Build the scalar one-step kernel matrix for a dissipator, if it has one.
pub fn one_step_kernel_matrix(
    model: &ModelSpec,
    dissipator: &DissipatorSpec,
    grid: &MomentumGrid,
) -> Result<Array2<C64>> {
    let n = grid.len();
    // Precompute Bloch vectors and check dark contacts once.
    let mut hs = Vec::with_capacity(n);
    for (_, k) in grid.iter() {
        hs.push(bloch_checked(model, &k)?);
    }
    let comps = dissipator.components();
    let single = comps.len() == 1;
    let mut out = Array2::zeros((n, n));
    match (single, comps.as_slice()) {
        (true, [DissipatorSpec::Collective { target, gamma }]) => {
            let flip = *target == Sublattice::B;
            for i in 0..n {
                for j in 0..n {
                    let (mut hi, mut hj) = (hs[i], hs[j]);
                    if flip {
                        // A↔B swap conjugates the model by σx: hy, hz flip.
                        hi = BlochVector::new(hi.h0, hi.hx, -hi.hy, -hi.hz);
                        hj = BlochVector::new(hj.h0, hj.hx, -hj.hy, -hj.hz);
                    }
                    out[[i, j]] = k_cc_from_bloch(&hi, &hj, *gamma);
                }
            }
        }
        (true, [DissipatorSpec::SublatticeProjector { gamma, .. }]) => {
            for i in 0..n {
                for j in 0..n {
                    out[[i, j]] = c(k_sublattice_from_bloch(&hs[i], &hs[j], *gamma), 0.0);
                }
            }
        }
        _ => {
            // Mixtures: cc + B-projector has the printed convex combination;
            // anything else goes through the exact resolvent kernel.
            let mut cc_gamma = None;
            let mut b_gamma = None;
            let mut other = false;
            for comp in &comps {
                match comp {
                    DissipatorSpec::Collective {
                        target: Sublattice::A,
                        gamma,
                    } => cc_gamma = Some(*gamma),
                    DissipatorSpec::SublatticeProjector {
                        target: Sublattice::B,
                        gamma,
                    } => b_gamma = Some(*gamma),
                    _ => other = true,
                }
            }
            if let (Some(gcc), Some(gb), false) = (cc_gamma, b_gamma, other) {
                let gamma = gcc + gb;
                for i in 0..n {
                    for j in 0..n {
                        let cc = k_cc_from_bloch(&hs[i], &hs[j], gamma);
                        let kb = k_sublattice_from_bloch(&hs[i], &hs[j], gamma);
                        out[[i, j]] = cc * (gcc / gamma) + c(gb / gamma * kb, 0.0);
                    }
                }
            } else {
                for (i, ki) in grid.iter() {
                    for (j, kj) in grid.iter() {
                        out[[i, j]] = empirical_kernel(model, dissipator, &ki, &kj)?;
                    }
                }
            }
        }
    }
    Ok(out)
}

/// Advance the kernel by `steps` jumps.
///
/// Scalar families multiply elementwise by the one-step kernel; kick
/// families convolve with the momentum-transfer masses,
/// `ρ'(p,p′) = Σ_q G(q)Δq · K_cc(p−q, p′−q) ρ(p−q, p′−q)`, which is an
/// exact cyclic shift on the grid.
pub fn evolve_kernel(
    kernel: &DensityKernel,
    model: &ModelSpec,
    dissipator: &DissipatorSpec,
    steps: usize,
) -> Result<DensityKernel> {
    dissipator.validate()?;
    let grid = kernel.grid().clone();
    let n = grid.len();
    let comps = dissipator.components();
    let is_kick = comps.len() == 1 && matches!(comps[0], DissipatorSpec::Kick { .. });
    let mut data = kernel.data().clone();
    if is_kick {
        let DissipatorSpec::Kick { g, gamma } = comps[0] else {
            unreachable!()
        };
        let masses = g.masses(&grid)?;
        let cc = one_step_kernel_matrix(model, &DissipatorSpec::collective(*gamma), &grid)?;
        for _ in 0..steps {
            let mut next = Array2::zeros((n, n));
            for (q, w) in masses.iter().enumerate() {
                if *w == 0.0 {
                    continue;
                }
                for i in 0..n {
                    let si = grid.unshift(i, q);
                    for j in 0..n {
                        let sj = grid.unshift(j, q);
                        next[[i, j]] += *w * cc[[si, sj]] * data[[si, sj]];
                    }
                }
            }
            data = next;
        }
    } else {
        let k = one_step_kernel_matrix(model, dissipator, &grid)?;
        for _ in 0..steps {
            data = &data * &k;
        }
    }
    Ok(DensityKernel::from_parts(grid, data))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dissipator::KickDistribution;
    use approx::assert_abs_diff_eq;

    fn ssh_grid() -> (ModelSpec, MomentumGrid) {
        (ModelSpec::ssh(0.2, 0.5), MomentumGrid::one_d(64))
    }

    #[test]
    fn cc_normalization_and_hermiticity() {
        let (model, grid) = ssh_grid();
        for (_, k) in grid.iter() {
            let v = k_cc(&model, 1.0, &k, &k).unwrap();
            assert_abs_diff_eq!(v.re, 1.0, epsilon = 1e-14);
            assert_abs_diff_eq!(v.im, 0.0, epsilon = 1e-14);
        }
        for (i, k) in grid.iter().step_by(7) {
            for (j, kp) in grid.iter().step_by(11) {
                if i == j {
                    continue;
                }
                let a = k_cc(&model, 1.0, &k, &kp).unwrap();
                let b = k_cc(&model, 1.0, &kp, &k).unwrap();
                assert_abs_diff_eq!(a.re, b.conj().re, epsilon = 1e-14);
                assert_abs_diff_eq!(a.im, b.conj().im, epsilon = 1e-14);
                assert!(a.norm() <= 1.0 + 1e-12, "|K| must not exceed 1");
            }
        }
    }

    #[test]
    fn cc_reduces_to_chiral_form_when_hz_zero() {
        // For h_z ≡ 0 the general expression must reduce to the plain form
        // with A = h⊥²(p) − h⊥²(p′), B = h⊥²(p) + h⊥²(p′).
        let (model, grid) = ssh_grid();
        let gamma = 0.7;
        for (_, k) in grid.iter().step_by(5) {
            for (_, kp) in grid.iter().step_by(9) {
                let h = model.bloch_vector(&k);
                let hp = model.bloch_vector(&kp);
                let diff = h.h_perp_sq - hp.h_perp_sq;
                let plain = 2.0 * gamma * gamma * c(h.hx, h.hy) * c(hp.hx, -hp.hy)
                    / c(
                        2.0 * diff * diff + gamma * gamma * (h.h_perp_sq + hp.h_perp_sq),
                        0.0,
                    );
                let full = k_cc(&model, gamma, &k, &kp).unwrap();
                assert!((full - plain).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn sublattice_kernel_properties() {
        let (model, grid) = ssh_grid();
        for (_, k) in grid.iter().step_by(3) {
            let v = k_sublattice(&model, Sublattice::A, 1.0, &k, &k).unwrap();
            assert_abs_diff_eq!(v.re, 1.0, epsilon = 1e-14);
            for (_, kp) in grid.iter().step_by(13) {
                let a = k_sublattice(&model, Sublattice::A, 1.0, &k, &kp).unwrap();
                let b = k_sublattice(&model, Sublattice::B, 1.0, &k, &kp).unwrap();
                assert_eq!(a, b, "K_A and K_B read identically");
                assert!(a.re > 0.0 && a.im == 0.0);
            }
        }
        // Constant h⊥ makes the projector kernel identically 1.
        let flat = ModelSpec::ssh(0.8, 0.0);
        for (_, k) in grid.iter().step_by(7) {
            for (_, kp) in grid.iter().step_by(5) {
                let v = k_sublattice(&flat, Sublattice::A, 1.0, &k, &kp).unwrap();
                assert_abs_diff_eq!(v.re, 1.0, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn mixture_limits() {
        let (model, grid) = ssh_grid();
        let k = grid.momentum(3);
        let kp = grid.momentum(40);
        let cc = k_cc(&model, 1.0, &k, &kp).unwrap();
        let m = k_mixture(&model, 1.0, 0.0, &k, &kp).unwrap();
        assert!((cc - m).norm() < 1e-15);
        let kb = k_sublattice(&model, Sublattice::B, 1.0, &k, &kp).unwrap();
        let m = k_mixture(&model, 0.0, 1.0, &k, &kp).unwrap();
        assert!((kb - m).norm() < 1e-15);
    }

    #[test]
    fn two_dimensional_kernel_matches_vector_substitution() {
        // Transcribe the 2D expression literally and compare against the
        // shared implementation.
        let model = ModelSpec::torus2d(6.0, 10.0, 1.0);
        let grid = MomentumGrid::two_d(16, 16);
        let gamma = 1.0;
        for (i, k) in grid.iter().step_by(17) {
            for (j, kp) in grid.iter().step_by(23) {
                let h = model.bloch_vector(&k);
                let hp = model.bloch_vector(&kp);
                let a = c(
                    h.h_perp_sq - hp.h_perp_sq + h.hz * h.hz - hp.hz * hp.hz,
                    gamma * (h.hz + hp.hz) / 2.0,
                );
                let b = c(
                    h.h_perp_sq + hp.h_perp_sq + h.hz * h.hz + hp.hz * hp.hz,
                    gamma * (h.hz - hp.hz) / 2.0,
                );
                let lit = 2.0 * gamma * gamma * c(h.hx, h.hy) * c(hp.hx, -hp.hy)
                    / (2.0 * a * a + gamma * gamma * b);
                let shared = k_cc_2d(&model, gamma, &k, &kp).unwrap();
                assert!((lit - shared).norm() <= 1e-14, "at pair ({i},{j})");
                if i == j {
                    assert_abs_diff_eq!(shared.re, 1.0, epsilon = 1e-13);
                }
            }
        }
    }

    #[test]
    fn empirical_kernel_reproduces_closed_forms() {
        let (model, grid) = ssh_grid();
        let cc = DissipatorSpec::collective(1.0);
        let pa = DissipatorSpec::SublatticeProjector {
            target: Sublattice::A,
            gamma: 1.0,
        };
        for (_, k) in grid.iter().step_by(9) {
            for (_, kp) in grid.iter().step_by(7) {
                let emp = empirical_kernel(&model, &cc, &k, &kp).unwrap();
                let closed = k_cc(&model, 1.0, &k, &kp).unwrap();
                assert!(
                    (emp - closed).norm() < 1e-10,
                    "collective: {emp:?} vs {closed:?}"
                );
                let emp = empirical_kernel(&model, &pa, &k, &kp).unwrap();
                let closed = k_sublattice(&model, Sublattice::A, 1.0, &k, &kp).unwrap();
                assert!((emp - closed).norm() < 1e-10, "projector");
            }
        }
    }

    #[test]
    fn dark_contact_is_a_domain_error() {
        let model = ModelSpec::ssh(0.5, 0.5);
        let k = [std::f64::consts::PI, 0.0];
        let err = k_cc(&model, 1.0, &k, &[0.0, 0.0]);
        assert!(matches!(err, Err(CoreError::DarkContact { .. })));
    }

    #[test]
    fn collective_preserves_momentum_diagonal() {
        let (model, grid) = ssh_grid();
        let kernel = DensityKernel::localized(&grid, &[0]);
        let before = kernel.diagonal();
        let evolved =
            evolve_kernel(&kernel, &model, &DissipatorSpec::collective(1.0), 3).unwrap();
        let after = evolved.diagonal();
        for (a, b) in before.iter().zip(&after) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-13);
        }
        assert!(evolved.max_hermiticity_defect() < 1e-12);
        assert_abs_diff_eq!(evolved.trace(), 1.0, epsilon = 1e-10);
    }

    #[test]
    fn uniform_kick_homogenizes_in_one_step() {
        let (model, grid) = ssh_grid();
        let kick = DissipatorSpec::Kick {
            g: KickDistribution::Uniform,
            gamma: 1.0,
        };
        // Intentionally inhomogeneous initial diagonal.
        let mut data = DensityKernel::localized(&grid, &[0]).data().clone();
        data[[3, 3]] *= 2.0;
        data[[11, 11]] *= 0.25;
        let total: f64 = (0..grid.len()).map(|i| data[[i, i]].re).sum::<f64>() * grid.cell_volume();
        data.mapv_inplace(|v| v / total);
        let kernel = DensityKernel::from_parts(grid.clone(), data);
        let evolved = evolve_kernel(&kernel, &model, &kick, 1).unwrap();
        let diag = evolved.diagonal();
        let expect = 1.0 / (2.0 * std::f64::consts::PI);
        for d in diag {
            assert_abs_diff_eq!(d, expect, epsilon = 1e-12);
        }
    }

    #[test]
    fn localized_kernel_displacement() {
        let grid = MomentumGrid::one_d(64);
        let kernel = DensityKernel::localized(&grid, &[5]);
        let (mean, seam) = kernel.mean_displacement();
        assert_abs_diff_eq!(mean[0], 5.0, epsilon = 1e-10);
        assert!(seam < 1e-12);
        assert_abs_diff_eq!(kernel.trace(), 1.0, epsilon = 1e-12);
    }

    #[test]
    fn ssh_topological_transport_one_unit_per_jump() {
        let grid = MomentumGrid::one_d(64);
        let topo = ModelSpec::ssh(0.2, 0.5);
        let kernel = DensityKernel::localized(&grid, &[0]);
        for n in 1..=3 {
            let evolved =
                evolve_kernel(&kernel, &topo, &DissipatorSpec::collective(1.0), n).unwrap();
            let (mean, _) = evolved.mean_displacement();
            assert_abs_diff_eq!(mean[0], n as f64, epsilon = 1e-7);
        }
        let trivial = ModelSpec::ssh(0.5, 0.2);
        let evolved =
            evolve_kernel(&kernel, &trivial, &DissipatorSpec::collective(1.0), 3).unwrap();
        let (mean, _) = evolved.mean_displacement();
        assert_abs_diff_eq!(mean[0], 0.0, epsilon = 1e-7);
    }
}
