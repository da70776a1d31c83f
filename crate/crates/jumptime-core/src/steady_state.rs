//! Closed-form walltime steady state under collective collapse, and the
//! cross-section current whose smooth crossover contrasts with the sharp
//! jumptime transport step.
//!
//! Scope: chiral models (`h_z ≡ 0`). Per momentum the steady Bloch vector is
//!
//! ```text
//! r_ss(k) = (γ/2)/(h⊥² + γ²/8) · (hy, −hx, γ/4),
//! ```
//!
//! and for the SSH chain the steady cross-section current evaluates to
//!
//! ```text
//! ⟨J⟩_ss = (γ/4) (1 + (w² − v² − γ²/8)/√((w² − v² − γ²/8)² + w²γ²/2)),
//! ```
//!
//! finite for every parameter choice and stepping only in the γ → 0 limit.

use crate::bloch::ModelSpec;
use crate::error::CoreError;
use crate::grid::MomentumGrid;
use crate::Result;

/// Steady Bloch vector at one momentum. Errors when the model is outside
/// the chiral scope (`h_z` not identically zero).
pub fn bloch_steady_state(model: &ModelSpec, gamma: f64, k: &[f64; 2]) -> Result<[f64; 3]> {
    let probe = MomentumGrid::new(&vec![64; model.dimension()]);
    let sym = model.symmetry_check(&probe);
    if !sym.chiral {
        return Err(CoreError::Scope(
            "closed-form steady state requires h_z = 0 everywhere".into(),
        ));
    }
    let h = model.bloch_vector(k);
    let pref = (gamma / 2.0) / (h.h_perp_sq + gamma * gamma / 8.0);
    let r = [pref * h.hy, -pref * h.hx, pref * gamma / 4.0];
    let len = (r[0] * r[0] + r[1] * r[1] + r[2] * r[2]).sqrt();
    if len > 1.0 + 1e-12 {
        return Err(CoreError::Consistency(format!(
            "steady Bloch vector leaves the ball: |r| = {len}"
        )));
    }
    Ok(r)
}

/// Steady-state expectation of the SSH cross-section current
/// `Ĵ = −i w (|j+1,B⟩⟨j,A| − h.c.)` for a homogeneous momentum
/// distribution.
pub fn ssh_steady_current(v: f64, w: f64, gamma: f64) -> f64 {
    let d = w * w - v * v - gamma * gamma / 8.0;
    gamma / 4.0 * (1.0 + d / (d * d + w * w * gamma * gamma / 2.0).sqrt())
}

/// One row of the crossover table.
#[derive(Clone, Copy, Debug)]
pub struct CrossoverRow {
    pub v_over_w: f64,
    pub gamma: f64,
    pub j_ss: f64,
    /// Jumptime transport per jump, `a·T = a·θ(w − v)`: exactly step-like.
    pub a_times_t: f64,
}

/// Crossover sweep at fixed `w = 1`, contrasting the smooth walltime
/// current with the quantized jumptime displacement.
pub fn crossover_sweep(ratios: &[f64], gammas: &[f64]) -> Vec<CrossoverRow> {
    let mut rows = Vec::with_capacity(ratios.len() * gammas.len());
    for &gamma in gammas {
        for &ratio in ratios {
            let (v, w) = (ratio, 1.0);
            rows.push(CrossoverRow {
                v_over_w: ratio,
                gamma,
                j_ss: ssh_steady_current(v, w, gamma),
                a_times_t: if v < w { 1.0 } else { 0.0 },
            });
        }
    }
    rows
}

/// Width of the 10%–90% rise of the crossover in `v/w`, found by bisection
/// on the closed form; shrinks with γ.
pub fn crossover_width(gamma: f64) -> f64 {
    let lo_level = 0.1 * gamma / 2.0;
    let hi_level = 0.9 * gamma / 2.0;
    // J decreases in v/w; locate the two level crossings.
    let solve = |level: f64| -> f64 {
        let (mut a, mut b) = (1e-3f64, 1e3f64);
        for _ in 0..200 {
            let mid = (a * b).sqrt();
            if ssh_steady_current(mid, 1.0, gamma) > level {
                a = mid;
            } else {
                b = mid;
            }
        }
        (a * b).sqrt()
    };
    (solve(lo_level) - solve(hi_level)).abs()
}
