//! Small dense complex linear algebra: 2×2 blocks and Pauli decompositions.
//!
//! The whole momentum-space machinery runs on 2×2 intracell blocks, so these
//! operations are closed-form and allocation-free. Large dense work (full
//! lattices) lives in [`crate::reference`] on top of `ndarray`.

use num_complex::Complex64;

pub type C64 = Complex64;

pub const I: C64 = C64::new(0.0, 1.0);

#[inline]
pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

/// Dense 2×2 complex matrix, row major.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Mat2(pub [[C64; 2]; 2]);

impl Mat2 {
    pub const ZERO: Mat2 = Mat2([[C64::new(0.0, 0.0); 2]; 2]);

    pub fn identity() -> Mat2 {
        Mat2([[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]])
    }

    /// `h0·1 + hx·σx + hy·σy + hz·σz` with `σz = |A⟩⟨A| − |B⟩⟨B|`.
    pub fn from_pauli(h0: C64, hx: C64, hy: C64, hz: C64) -> Mat2 {
        Mat2([[h0 + hz, hx - I * hy], [hx + I * hy, h0 - hz]])
    }

    /// Exact inverse of [`Mat2::from_pauli`]; components may be complex for
    /// non-Hermitian input.
    pub fn pauli_components(&self) -> (C64, C64, C64, C64) {
        let m = &self.0;
        let h0 = (m[0][0] + m[1][1]) * 0.5;
        let hz = (m[0][0] - m[1][1]) * 0.5;
        let hx = (m[0][1] + m[1][0]) * 0.5;
        let hy = I * (m[0][1] - m[1][0]) * 0.5;
        (h0, hx, hy, hz)
    }

    /// Projector |s⟩⟨s| on sublattice A (`0`) or B (`1`).
    pub fn projector(s: usize) -> Mat2 {
        let mut m = Mat2::ZERO;
        m.0[s][s] = c(1.0, 0.0);
        m
    }

    /// |to⟩⟨from| intracell transfer matrix.
    pub fn transfer(to: usize, from: usize) -> Mat2 {
        let mut m = Mat2::ZERO;
        m.0[to][from] = c(1.0, 0.0);
        m
    }

    pub fn adjoint(&self) -> Mat2 {
        Mat2([
            [self.0[0][0].conj(), self.0[1][0].conj()],
            [self.0[0][1].conj(), self.0[1][1].conj()],
        ])
    }

    pub fn trace(&self) -> C64 {
        self.0[0][0] + self.0[1][1]
    }

    pub fn det(&self) -> C64 {
        self.0[0][0] * self.0[1][1] - self.0[0][1] * self.0[1][0]
    }

    pub fn scale(&self, s: C64) -> Mat2 {
        let mut out = *self;
        for row in out.0.iter_mut() {
            for v in row.iter_mut() {
                *v *= s;
            }
        }
        out
    }

    pub fn add(&self, other: &Mat2) -> Mat2 {
        let mut out = *self;
        for (r, row) in out.0.iter_mut().enumerate() {
            for (j, v) in row.iter_mut().enumerate() {
                *v += other.0[r][j];
            }
        }
        out
    }

    pub fn sub(&self, other: &Mat2) -> Mat2 {
        self.add(&other.scale(c(-1.0, 0.0)))
    }

    pub fn mul(&self, other: &Mat2) -> Mat2 {
        let a = &self.0;
        let b = &other.0;
        Mat2([
            [
                a[0][0] * b[0][0] + a[0][1] * b[1][0],
                a[0][0] * b[0][1] + a[0][1] * b[1][1],
            ],
            [
                a[1][0] * b[0][0] + a[1][1] * b[1][0],
                a[1][0] * b[0][1] + a[1][1] * b[1][1],
            ],
        ])
    }

    pub fn apply(&self, v: &[C64; 2]) -> [C64; 2] {
        [
            self.0[0][0] * v[0] + self.0[0][1] * v[1],
            self.0[1][0] * v[0] + self.0[1][1] * v[1],
        ]
    }

    pub fn max_abs(&self) -> f64 {
        self.0
            .iter()
            .flatten()
            .map(|v| v.norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self, tol: f64) -> bool {
        self.sub(&self.adjoint()).max_abs() <= tol
    }

    /// Closed-form `exp(−i·M·τ)` via the trace/traceless decomposition.
    ///
    /// With `M = m0·1 + N`, `N` traceless, `N² = δ²·1` where `δ² = −det N`:
    /// `exp(−iMτ) = e^{−i m0 τ} (cos(δτ)·1 − i·sin(δτ)/δ · N·τ/τ)`.
    /// The `sin(z)/z` factor is evaluated by series near `z = 0`, so the
    /// defective limit `δ → 0` is handled without branching on content.
    pub fn exp_minus_i_tau(&self, tau: f64) -> Mat2 {
        let m0 = self.trace() * 0.5;
        let n = self.sub(&Mat2::identity().scale(m0));
        let delta_sq = -n.det();
        let delta = delta_sq.sqrt();
        let z = delta * tau;
        let (cos_z, sinc_z) = cos_and_sinc(z);
        let phase = (-I * m0 * tau).exp();
        let mut out = Mat2::identity().scale(cos_z);
        out = out.add(&n.scale(-I * sinc_z * tau));
        out.scale(phase)
    }

    /// Eigenvalues of the (generally non-Hermitian) block: `m0 ± δ`.
    pub fn eigenvalues(&self) -> (C64, C64) {
        let m0 = self.trace() * 0.5;
        let n = self.sub(&Mat2::identity().scale(m0));
        let delta = (-n.det()).sqrt();
        (m0 + delta, m0 - delta)
    }

    /// Spectral decomposition `M = Σ_α λ_α P_α` with rank-1 (oblique)
    /// projectors. Errors by returning `None` when the block is defective
    /// (eigenvalue splitting below `tol` relative to the matrix scale).
    pub fn spectral_projectors(&self, tol: f64) -> Option<[(C64, Mat2); 2]> {
        let (l1, l2) = self.eigenvalues();
        let scale = self.max_abs().max(1e-300);
        if (l1 - l2).norm() <= tol * scale {
            return None;
        }
        let id = Mat2::identity();
        let inv_gap = c(1.0, 0.0) / (l1 - l2);
        // P1 = (M − λ2)/(λ1 − λ2), P2 = 1 − P1.
        let p1 = self.sub(&id.scale(l2)).scale(inv_gap);
        let p2 = id.sub(&p1);
        Some([(l1, p1), (l2, p2)])
    }
}

/// `(cos z, sin z / z)` for complex `z`, series-expanded near zero.
fn cos_and_sinc(z: C64) -> (C64, C64) {
    if z.norm() < 1e-3 {
        let z2 = z * z;
        let sinc = c(1.0, 0.0) - z2 / 6.0 + z2 * z2 / 120.0 - z2 * z2 * z2 / 5040.0;
        let cos = c(1.0, 0.0) - z2 / 2.0 + z2 * z2 / 24.0 - z2 * z2 * z2 / 720.0;
        (cos, sinc)
    } else {
        (z.cos(), z.sin() / z)
    }
}

pub fn norm_sq2(v: &[C64; 2]) -> f64 {
    v[0].norm_sqr() + v[1].norm_sqr()
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn mat_close(a: &Mat2, b: &Mat2, tol: f64) {
        assert!(a.sub(b).max_abs() <= tol, "{a:?} vs {b:?}");
    }

    #[test]
    fn pauli_round_trip() {
        let m = Mat2::from_pauli(c(0.3, 0.0), c(1.0, 0.0), c(-0.7, 0.0), c(0.2, 0.0));
        let (h0, hx, hy, hz) = m.pauli_components();
        assert_abs_diff_eq!(h0.re, 0.3, epsilon = 1e-15);
        assert_abs_diff_eq!(hx.re, 1.0, epsilon = 1e-15);
        assert_abs_diff_eq!(hy.re, -0.7, epsilon = 1e-15);
        assert_abs_diff_eq!(hz.re, 0.2, epsilon = 1e-15);
    }

    #[test]
    fn exp_zero_time_is_identity() {
        let m = Mat2::from_pauli(c(0.1, -0.2), c(0.5, 0.0), c(0.0, 0.0), c(0.0, -0.3));
        mat_close(&m.exp_minus_i_tau(0.0), &Mat2::identity(), 1e-15);
    }

    #[test]
    fn exp_matches_scaling_and_squaring() {
        // exp(−iMτ) = [exp(−iMτ/2^k)]^(2^k); the closed form must agree with
        // repeated squaring of its own short-time limit.
        let m = Mat2::from_pauli(c(0.3, -0.1), c(0.9, 0.2), c(-0.4, 0.0), c(0.2, -0.6));
        let tau = 1.7;
        let k = 14;
        let mut sq = m.exp_minus_i_tau(tau / (1u64 << k) as f64);
        for _ in 0..k {
            sq = sq.mul(&sq);
        }
        mat_close(&m.exp_minus_i_tau(tau), &sq, 1e-9);
    }

    #[test]
    fn exp_of_pure_decay_block() {
        // M = −i(γ/2)|B⟩⟨B|: A untouched, B damped by e^{−γτ/2}.
        let gamma = 1.3;
        let m = Mat2::projector(1).scale(c(0.0, -gamma / 2.0));
        let e = m.exp_minus_i_tau(2.0);
        assert_abs_diff_eq!(e.0[0][0].re, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(e.0[1][1].re, (-gamma).exp(), epsilon = 1e-14);
        assert!(e.0[0][1].norm() < 1e-15 && e.0[1][0].norm() < 1e-15);
    }

    #[test]
    fn spectral_projectors_reassemble() {
        let m = Mat2::from_pauli(c(0.0, -0.25), c(0.6, 0.0), c(-0.3, 0.0), c(0.0, -0.25));
        let [(l1, p1), (l2, p2)] = m.spectral_projectors(1e-12).unwrap();
        let rebuilt = p1.scale(l1).add(&p2.scale(l2));
        mat_close(&rebuilt, &m, 1e-12);
        // Projector algebra: P1² = P1, P1·P2 = 0.
        mat_close(&p1.mul(&p1), &p1, 1e-12);
        assert!(p1.mul(&p2).max_abs() < 1e-12);
    }
}
