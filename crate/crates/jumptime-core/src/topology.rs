//! Topological invariants of the jumptime dynamics.
//!
//! The dark-Hamiltonian set of the B→A collapse families is the σz axis of
//! Bloch space, so dark-free Hamiltonians carry a winding number
//!
//! ```text
//! W = ∮ dk/2π · (∂hx·hy − hx·∂hy)/h⊥²
//! ```
//!
//! per momentum axis (with the transverse axis averaged in 2D). The
//! jumptime connection `J(k) = i [∂_k K(k,k′)]_{k′=k}` integrates to the
//! jumptime phase `T`, which decomposes as `T = W + R₁ + R₂` with residuals
//!
//! ```text
//! R₁ = −(2/γ) ∮ dk/2π ∂hz · ln(h⊥²/γ²)
//! R₂ =        ∮ dk/2π ∂hz · (16 hz² + γ²)/(4γ h⊥²)
//! ```
//!
//! that vanish under chiral/PT or time-reversal symmetry. `T` is invariant
//! under the translation-invariant kick generalization, and the
//! curvature built from the connection carries zero Chern number whenever
//! the model is dark-free.
//!
//! Connections are evaluated by Richardson-extrapolated central differences
//! of the closed-form propagators (steps `Δk/32` and `Δk/64`); the chiral
//! closed form is kept as a cross-check, not the primary path, so a single
//! code path serves every propagator kind including mixtures and 2D.

use crate::bloch::ModelSpec;
use crate::dissipator::KickDistribution;
use crate::error::CoreError;
use crate::grid::MomentumGrid;
use crate::propagator::PropagatorKind;
use crate::Result;
use std::f64::consts::PI;

/// Default starting grid for 1D phase quadrature.
pub const DEFAULT_NP_1D: usize = 512;
/// Default starting grid per axis for 2D phase quadrature.
pub const DEFAULT_NP_2D: usize = 128;
/// Successive grid doublings must agree to this before a phase is accepted.
pub const CONVERGENCE_TOL: f64 = 1e-8;
const MAX_NP_1D: usize = 1 << 14;
const MAX_NP_2D: usize = 1 << 10;

fn grid_for(model: &ModelSpec, n_p: usize) -> MomentumGrid {
    match model.dimension() {
        1 => MomentumGrid::one_d(n_p),
        _ => MomentumGrid::two_d(n_p, n_p),
    }
}

fn check_dark_free(model: &ModelSpec, grid: &MomentumGrid) -> Result<()> {
    let probe = model.h_perp_min(grid);
    if probe.dark_contact {
        return Err(CoreError::DarkContact {
            momentum: probe.argmin[..model.dimension()].to_vec(),
            h_perp: probe.min,
        });
    }
    Ok(())
}

/// Winding number about the dark-Hamiltonian axis along `axis`, plus the
/// spread of per-slice values across the transverse axis (2D only).
#[derive(Clone, Copy, Debug)]
pub struct Winding {
    pub value: f64,
    pub slice_spread: f64,
}

pub fn winding_number(model: &ModelSpec, axis: usize, n_p: usize) -> Result<Winding> {
    let grid = grid_for(model, n_p);
    check_dark_free(model, &grid)?;
    let integrand = |k: &[f64; 2]| {
        let h = model.bloch_vector(k);
        let d = model.bloch_derivative(k, axis);
        (d.hx * h.hy - h.hx * d.hy) / h.h_perp_sq
    };
    match model.dimension() {
        1 => {
            let dk = grid.spacing(0);
            let sum: f64 = grid.iter().map(|(_, k)| integrand(&k)).sum();
            Ok(Winding {
                value: sum * dk / (2.0 * PI),
                slice_spread: 0.0,
            })
        }
        _ => {
            let other = 1 - axis;
            let n = grid.per_axis()[0];
            let dk = 2.0 * PI / n as f64;
            let mut slices = Vec::with_capacity(n);
            for j in 0..n {
                let kj = 2.0 * PI * j as f64 / n as f64;
                let mut sum = 0.0;
                for i in 0..n {
                    let ki = 2.0 * PI * i as f64 / n as f64;
                    let mut k = [0.0; 2];
                    k[axis] = ki;
                    k[other] = kj;
                    sum += integrand(&k);
                }
                slices.push(sum * dk / (2.0 * PI));
            }
            let mean = slices.iter().sum::<f64>() / n as f64;
            let spread = slices.iter().fold(0.0f64, |m, s| m.max((s - mean).abs()));
            Ok(Winding {
                value: mean,
                slice_spread: spread,
            })
        }
    }
}

/// Non-topological residuals `(R₁, R₂)` along `axis` at dissipation rate
/// `gamma`; both vanish identically for chiral models and by parity for
/// time-reversal-symmetric ones.
pub fn residual_terms(
    model: &ModelSpec,
    axis: usize,
    gamma: f64,
    n_p: usize,
) -> Result<(f64, f64)> {
    let grid = grid_for(model, n_p);
    check_dark_free(model, &grid)?;
    let g2 = gamma * gamma;
    let integrands = |k: &[f64; 2]| {
        let h = model.bloch_vector(k);
        let d = model.bloch_derivative(k, axis);
        let r1 = -(2.0 / gamma) * d.hz * (h.h_perp_sq / g2).ln();
        let r2 = d.hz * (16.0 * h.hz * h.hz + g2) / (4.0 * gamma * h.h_perp_sq);
        (r1, r2)
    };
    let dv = grid.cell_volume();
    let norm = match model.dimension() {
        1 => dv / (2.0 * PI),
        _ => dv / (2.0 * PI) / (2.0 * PI),
    };
    let mut r1 = 0.0;
    let mut r2 = 0.0;
    for (_, k) in grid.iter() {
        let (a, b) = integrands(&k);
        r1 += a;
        r2 += b;
    }
    Ok((r1 * norm, r2 * norm))
}

/// Jumptime connection `J_axis(k) = i[∂_{k_axis} K(k, k′)]_{k′=k}` by
/// Richardson-extrapolated central differences of the propagator.
pub fn jumptime_connection(
    model: &ModelSpec,
    kind: &PropagatorKind,
    k: &[f64; 2],
    axis: usize,
    delta: f64,
) -> Result<f64> {
    let diff = |d: f64| -> Result<crate::linalg::C64> {
        let mut kp = *k;
        kp[axis] += d;
        let mut km = *k;
        km[axis] -= d;
        Ok((kind.evaluate(model, &kp, k)? - kind.evaluate(model, &km, k)?) / (2.0 * d))
    };
    let d1 = diff(delta)?;
    let d2 = diff(delta / 2.0)?;
    let deriv = (d2 * 4.0 - d1) / 3.0;
    // K(p,p) = 1 and Hermiticity make ∂₁K purely imaginary on the diagonal,
    // so the connection is the real part; the imaginary residue is O(δ⁴)
    // truncation and cancels from the phase.
    let j = crate::linalg::I * deriv;
    debug_assert!(
        j.im.abs() < 1e-3 * (1.0 + j.re.abs()),
        "diagonal connection developed a large imaginary part: {j:?}"
    );
    Ok(j.re)
}

/// Chiral-scope closed form of the collective-collapse connection,
/// `J(k) = (∂hx·hy − hx·∂hy)/h⊥²`; used as a cross-check of the
/// finite-difference route.
pub fn connection_closed_form_cc(model: &ModelSpec, k: &[f64; 2], axis: usize) -> f64 {
    let h = model.bloch_vector(k);
    let d = model.bloch_derivative(k, axis);
    (d.hx * h.hy - h.hx * d.hy) / h.h_perp_sq
}

/// Jumptime phase along `axis` at a fixed grid size: the zone average of
/// the connection (transverse axis averaged in 2D).
pub fn jumptime_phase_at(
    model: &ModelSpec,
    kind: &PropagatorKind,
    axis: usize,
    n_p: usize,
) -> Result<f64> {
    let grid = grid_for(model, n_p);
    check_dark_free(model, &grid)?;
    let delta = grid.spacing(axis) / 32.0;
    let mut sum = 0.0;
    for (_, k) in grid.iter() {
        sum += jumptime_connection(model, kind, &k, axis, delta)?;
    }
    let dv = grid.cell_volume();
    let norm = match model.dimension() {
        1 => dv / (2.0 * PI),
        _ => dv / (2.0 * PI) / (2.0 * PI),
    };
    Ok(sum * norm)
}

/// Direct double quadrature of the kick-family phase
/// `T_ti = ∮ dk/2π ∮ dq G(q) · J_cc(k − q)`; by cyclic reindexing this
/// equals the collective phase, so it serves as the quadrature cross-check
/// of that invariance.
pub fn ti_phase_direct(
    model: &ModelSpec,
    g: &KickDistribution,
    gamma: f64,
    axis: usize,
    n_p: usize,
) -> Result<f64> {
    let grid = grid_for(model, n_p);
    check_dark_free(model, &grid)?;
    let masses = g.masses(&grid)?;
    let kind = PropagatorKind::Cc { gamma };
    let delta = grid.spacing(axis) / 32.0;
    // Precompute the connection on the grid once.
    let mut j = vec![0.0; grid.len()];
    for (i, k) in grid.iter() {
        j[i] = jumptime_connection(model, &kind, &k, axis, delta)?;
    }
    let dv = grid.cell_volume();
    let norm = match model.dimension() {
        1 => dv / (2.0 * PI),
        _ => dv / (2.0 * PI) / (2.0 * PI),
    };
    let mut sum = 0.0;
    for i in 0..grid.len() {
        for (q, w) in masses.iter().enumerate() {
            sum += w * j[grid.unshift(i, q)];
        }
    }
    Ok(sum * norm)
}

/// Phase with automatic grid doubling until two successive refinements
/// agree to [`CONVERGENCE_TOL`].
pub fn jumptime_phase_converged(
    model: &ModelSpec,
    kind: &PropagatorKind,
    axis: usize,
    n_p_start: usize,
) -> Result<(f64, usize, Vec<(usize, f64)>)> {
    let cap = if model.dimension() == 1 {
        MAX_NP_1D
    } else {
        MAX_NP_2D
    };
    let mut n_p = n_p_start.max(8);
    let mut history = Vec::new();
    let mut prev = jumptime_phase_at(model, kind, axis, n_p)?;
    history.push((n_p, prev));
    while n_p < cap {
        n_p *= 2;
        let next = jumptime_phase_at(model, kind, axis, n_p)?;
        history.push((n_p, next));
        if (next - prev).abs() < CONVERGENCE_TOL {
            return Ok((next, n_p, history));
        }
        prev = next;
    }
    Err(CoreError::Consistency(format!(
        "jumptime phase did not converge by N_p = {n_p} (last two: {history:?})",
    )))
}

/// Per-axis invariants of one report.
#[derive(Clone, Debug)]
pub struct AxisReport {
    pub winding: f64,
    pub winding_spread: f64,
    pub phase: f64,
    pub r1: f64,
    pub r2: f64,
    /// `|T − expected|` where the expectation is `W + R₁ + R₂` for
    /// collapse-family propagators, 0 for projectors, and the rate-weighted
    /// combination for mixtures. Absent for empirical kernels.
    pub identity_defect: Option<f64>,
}

#[derive(Clone, Debug)]
pub struct TopologyReport {
    pub axes: Vec<AxisReport>,
    pub chern: Option<f64>,
    pub n_p: usize,
    /// (grid size, phase per axis) refinement history.
    pub convergence: Vec<(usize, Vec<f64>)>,
    /// True when the phase came from a numerically assembled kernel.
    pub empirical: bool,
}

impl TopologyReport {
    pub fn rounded_winding(&self, axis: usize) -> i64 {
        self.axes[axis].winding.round() as i64
    }
}

fn kind_gamma(kind: &PropagatorKind) -> f64 {
    match kind {
        PropagatorKind::Cc { gamma }
        | PropagatorKind::SublatticeA { gamma }
        | PropagatorKind::SublatticeB { gamma } => *gamma,
        PropagatorKind::MixtureCcB { gamma_cc, gamma_b } => gamma_cc + gamma_b,
        PropagatorKind::Empirical(d) => d.total_gamma(),
    }
}

/// Full per-model report: converged phases, windings, residuals, identity
/// defects, and (in 2D) the Chern diagnostic.
pub fn topology_report(
    model: &ModelSpec,
    kind: &PropagatorKind,
    n_p_start: usize,
) -> Result<TopologyReport> {
    let gamma = kind_gamma(kind);
    let mut axes = Vec::new();
    let mut n_p_final = 0;
    let mut histories: Vec<(usize, Vec<f64>)> = Vec::new();
    for axis in 0..model.dimension() {
        let (phase, n_p, history) = jumptime_phase_converged(model, kind, axis, n_p_start)?;
        n_p_final = n_p_final.max(n_p);
        for (np, t) in history {
            match histories.iter_mut().find(|(n, _)| *n == np) {
                Some((_, v)) => v.push(t),
                None => histories.push((np, vec![t])),
            }
        }
        let w = winding_number(model, axis, n_p)?;
        let (r1, r2) = residual_terms(model, axis, gamma, n_p)?;
        let identity_defect = match kind {
            PropagatorKind::Cc { .. } => Some((phase - (w.value + r1 + r2)).abs()),
            PropagatorKind::SublatticeA { .. } | PropagatorKind::SublatticeB { .. } => {
                Some(phase.abs())
            }
            PropagatorKind::MixtureCcB { gamma_cc, gamma_b } => {
                let share = gamma_cc / (gamma_cc + gamma_b);
                Some((phase - share * (w.value + r1 + r2)).abs())
            }
            PropagatorKind::Empirical(_) => None,
        };
        axes.push(AxisReport {
            winding: w.value,
            winding_spread: w.slice_spread,
            phase,
            r1,
            r2,
            identity_defect,
        });
    }
    let chern = if model.dimension() == 2 {
        Some(curvature_chern(model, kind, n_p_final.min(128))?.chern)
    } else {
        None
    };
    Ok(TopologyReport {
        axes,
        chern,
        n_p: n_p_final,
        convergence: histories,
        empirical: matches!(kind, PropagatorKind::Empirical(_)),
    })
}

/// Curvature samples and the Chern diagnostic.
#[derive(Clone, Debug)]
pub struct ChernReport {
    pub chern: f64,
    pub omega_max_abs: f64,
}

/// Curvature `Ω₁₂ = ∂₁J₂ − ∂₂J₁` sampled on the grid by central
/// differences of the connection, and its zone integral (the Chern
/// number), which vanishes for every dark-free model.
pub fn curvature_chern(
    model: &ModelSpec,
    kind: &PropagatorKind,
    n_p: usize,
) -> Result<ChernReport> {
    if model.dimension() != 2 {
        return Err(CoreError::Scope("curvature requires a 2D model".into()));
    }
    let grid = MomentumGrid::two_d(n_p, n_p);
    check_dark_free(model, &grid)?;
    let delta0 = grid.spacing(0) / 32.0;
    let delta1 = grid.spacing(1) / 32.0;
    // Connection components on the grid.
    let mut j1 = vec![0.0; grid.len()];
    let mut j2 = vec![0.0; grid.len()];
    for (i, k) in grid.iter() {
        j1[i] = jumptime_connection(model, kind, &k, 0, delta0)?;
        j2[i] = jumptime_connection(model, kind, &k, 1, delta1)?;
    }
    // On-grid central differences; the zone sum then telescopes exactly.
    let n = n_p;
    let dk = grid.spacing(0);
    let mut chern = 0.0;
    let mut omega_max = 0.0f64;
    for (i, _) in grid.iter() {
        let [a, b] = grid.unflatten(i);
        let ip = grid.flatten([(a + 1) % n, b]);
        let im = grid.flatten([(a + n - 1) % n, b]);
        let jp = grid.flatten([a, (b + 1) % n]);
        let jm = grid.flatten([a, (b + n - 1) % n]);
        let omega = (j2[ip] - j2[im]) / (2.0 * dk) - (j1[jp] - j1[jm]) / (2.0 * dk);
        omega_max = omega_max.max(omega.abs());
        chern += omega;
    }
    chern *= grid.cell_volume() / (4.0 * PI * PI);
    Ok(ChernReport {
        chern,
        omega_max_abs: omega_max,
    })
}

/// Result of checking the primitive-vector transformation law.
#[derive(Clone, Debug)]
pub struct TransformCheck {
    pub t_original: [f64; 2],
    pub t_transformed: [f64; 2],
    pub t_expected: [f64; 2],
    pub law_defect: f64,
    pub displacement_defect: f64,
}

/// Verify that re-expressing the model over `a⃗'₂ = a⃗₂ + m·a⃗₁` transforms
/// the collective-collapse phases as `T'₁ = T₁ − m·T₂`, `T'₂ = T₂`, and
/// leaves the displacement vector `T₁a⃗₁ + T₂a⃗₂` invariant. Errors with a
/// consistency failure beyond `1e−6`.
pub fn transform_phases(
    model: &ModelSpec,
    gamma: f64,
    m: i64,
    n_p_start: usize,
) -> Result<TransformCheck> {
    if model.dimension() != 2 {
        return Err(CoreError::Scope(
            "primitive-vector covariance requires a 2D model".into(),
        ));
    }
    let kind = PropagatorKind::Cc { gamma };
    let transformed = model.transform_primitive_vectors(m)?;
    let mut t = [0.0; 2];
    let mut tp = [0.0; 2];
    for axis in 0..2 {
        t[axis] = jumptime_phase_converged(model, &kind, axis, n_p_start)?.0;
        tp[axis] = jumptime_phase_converged(&transformed, &kind, axis, n_p_start)?.0;
    }
    let expected = [t[0] - m as f64 * t[1], t[1]];
    let law_defect = (tp[0] - expected[0]).abs().max((tp[1] - expected[1]).abs());

    let disp = |t: &[f64; 2], lattice: &crate::bloch::Lattice| -> [f64; 2] {
        let a1 = lattice.vector(0);
        let a2 = lattice.vector(1);
        [
            t[0] * a1[0] + t[1] * a2[0],
            t[0] * a1[1] + t[1] * a2[1],
        ]
    };
    let d0 = disp(&t, model.lattice());
    let d1 = disp(&tp, transformed.lattice());
    let displacement_defect = (d0[0] - d1[0]).abs().max((d0[1] - d1[1]).abs());
    let check = TransformCheck {
        t_original: t,
        t_transformed: tp,
        t_expected: expected,
        law_defect,
        displacement_defect,
    };
    if law_defect > 1e-6 || displacement_defect > 1e-6 {
        return Err(CoreError::Consistency(format!(
            "primitive-vector covariance violated: {check:?}"
        )));
    }
    Ok(check)
}

/// Smallest `h_perp` relative to the energy scale; used to widen grids for
/// near-dark models.
pub fn near_dark(model: &ModelSpec, n_p: usize) -> bool {
    let grid = grid_for(model, n_p);
    model.h_perp_min(&grid).min < 1e-3 * model.energy_scale()
}
