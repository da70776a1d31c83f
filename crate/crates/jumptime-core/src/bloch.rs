//! Two-band lattice Hamiltonians in one and two dimensions.
//!
//! A model is a finite set of hopping matrices `H_r` over integer
//! translations `r`, with the Bloch Hamiltonian
//!
//! ```text
//! h(k) = Σ_r H_r e^{+i k·r},   H_r = ⟨cell j | H | cell j+r⟩,
//! ```
//!
//! decomposed onto the Pauli basis `h(k) = h0·1 + h⃗(k)·σ⃗` with
//! `σz = |A⟩⟨A| − |B⟩⟨B|`. Momentum states are `|k⟩ = L^{-1/2} Σ_j e^{ijk} |j⟩`,
//! so a positive-momentum kick shifts `k` upward and the hop `Σ_j |j+1⟩⟨j|`
//! acts as `e^{−ik}` — conventions that every other module relies on.
//!
//! Hermiticity of the hopping set (`H_{−r} = H_r†`) is enforced at
//! construction, which makes `h0, h⃗` real and derivatives analytic.

use crate::error::CoreError;
use crate::grid::MomentumGrid;
use crate::linalg::{c, C64, Mat2, I};
use crate::Result;
use ndarray::Array2;
use std::collections::BTreeMap;

/// Relative tolerance for checking symmetries of the hopping set.
pub const SYMMETRY_REL_TOL: f64 = 1e-10;
/// Relative tolerance below which `h_perp` counts as a dark contact.
pub const DARK_CONTACT_REL_TOL: f64 = 1e-9;

/// Lattice geometry: primitive translation vectors in real 2D space.
/// Only the displacement observable and primitive-vector transformations
/// look at the actual vectors; all momentum-space formulas are expressed in
/// dimensionless crystal momenta.
#[derive(Clone, Debug, PartialEq)]
pub enum Lattice {
    OneD { a: f64 },
    TwoD { a1: [f64; 2], a2: [f64; 2] },
}

impl Lattice {
    pub fn n_axes(&self) -> usize {
        match self {
            Lattice::OneD { .. } => 1,
            Lattice::TwoD { .. } => 2,
        }
    }

    /// Length of the primitive vector along `axis`.
    pub fn constant(&self, axis: usize) -> f64 {
        match self {
            Lattice::OneD { a } => *a,
            Lattice::TwoD { a1, a2 } => {
                let v = if axis == 0 { a1 } else { a2 };
                (v[0] * v[0] + v[1] * v[1]).sqrt()
            }
        }
    }

    pub fn vector(&self, axis: usize) -> [f64; 2] {
        match self {
            Lattice::OneD { a } => {
                if axis == 0 {
                    [*a, 0.0]
                } else {
                    [0.0, 0.0]
                }
            }
            Lattice::TwoD { a1, a2 } => {
                if axis == 0 {
                    *a1
                } else {
                    *a2
                }
            }
        }
    }
}

/// Real Bloch vector at one momentum. `h_perp_sq` is stored exactly as
/// `hx² + hy²`; it measures the separation from the dark-Hamiltonian axis.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BlochVector {
    pub h0: f64,
    pub hx: f64,
    pub hy: f64,
    pub hz: f64,
    pub h_perp_sq: f64,
}

impl BlochVector {
    pub fn new(h0: f64, hx: f64, hy: f64, hz: f64) -> Self {
        BlochVector {
            h0,
            hx,
            hy,
            hz,
            h_perp_sq: hx * hx + hy * hy,
        }
    }

    pub fn h_perp(&self) -> f64 {
        self.h_perp_sq.sqrt()
    }

    /// Band energies `h0 ± |h⃗|`.
    pub fn band_energies(&self) -> (f64, f64) {
        let m = (self.h_perp_sq + self.hz * self.hz).sqrt();
        (self.h0 - m, self.h0 + m)
    }
}

/// Symmetry flags evaluated on a grid. Chiral and PT symmetry are
/// equivalent for two-band Bloch Hamiltonians (both demand `h_z ≡ 0`), and
/// either of chiral/TRS forces the non-topological residual terms to vanish.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SymmetryReport {
    pub chiral: bool,
    pub pt: bool,
    pub trs: bool,
    pub inversion: bool,
    pub residual_forced_zero: bool,
}

/// Result of scanning `h_perp` over the zone.
#[derive(Clone, Debug)]
pub struct HPerpMin {
    pub min: f64,
    pub argmin: [f64; 2],
    /// True when the refined minimum is below the dark-contact tolerance.
    pub dark_contact: bool,
}

/// Finite-support two-band lattice Hamiltonian.
#[derive(Clone, Debug, PartialEq)]
pub struct ModelSpec {
    dimension: usize,
    hoppings: BTreeMap<[i64; 2], Mat2>,
    lattice: Lattice,
}

impl ModelSpec {
    /// Build from explicit hoppings; validates dimension, finite support and
    /// the Hermiticity pairing `H_{−r} = H_r†`.
    pub fn from_hoppings(
        dimension: usize,
        hoppings: impl IntoIterator<Item = ([i64; 2], Mat2)>,
        lattice: Lattice,
    ) -> Result<Self> {
        if !(1..=2).contains(&dimension) {
            return Err(CoreError::InvalidModel(format!(
                "dimension must be 1 or 2, got {dimension}"
            )));
        }
        if lattice.n_axes() != dimension {
            return Err(CoreError::InvalidModel(
                "lattice constants do not match dimension".into(),
            ));
        }
        let mut map: BTreeMap<[i64; 2], Mat2> = BTreeMap::new();
        for (r, m) in hoppings {
            if dimension == 1 && r[1] != 0 {
                return Err(CoreError::InvalidModel(format!(
                    "1D model has hopping with transverse component: {r:?}"
                )));
            }
            let e = map.entry(r).or_insert(Mat2::ZERO);
            *e = e.add(&m);
        }
        let model = ModelSpec {
            dimension,
            hoppings: map,
            lattice,
        };
        model.validate()?;
        Ok(model)
    }

    fn validate(&self) -> Result<()> {
        let scale = self.energy_scale().max(1e-300);
        for (r, m) in &self.hoppings {
            let minus = [-r[0], -r[1]];
            let partner = self.hoppings.get(&minus).copied().unwrap_or(Mat2::ZERO);
            if partner.sub(&m.adjoint()).max_abs() > 1e-12 * scale {
                return Err(CoreError::InvalidModel(format!(
                    "Hermiticity violated: H_{minus:?} != H_{:?}^dagger",
                    r
                )));
            }
        }
        Ok(())
    }

    /// Insert `H_r` together with its Hermitian partner `H_{−r} = H_r†`.
    /// For `r = 0` the matrix itself must be Hermitian.
    pub fn from_pauli_harmonics(
        dimension: usize,
        harmonics: &[([i64; 2], [C64; 4])],
        lattice: Lattice,
    ) -> Result<Self> {
        let mut hoppings: Vec<([i64; 2], Mat2)> = Vec::new();
        for (r, comps) in harmonics {
            let m = Mat2::from_pauli(comps[0], comps[1], comps[2], comps[3]);
            if *r == [0, 0] {
                if !m.is_hermitian(1e-12 * m.max_abs().max(1e-300)) {
                    return Err(CoreError::InvalidModel(
                        "on-site harmonic must be Hermitian".into(),
                    ));
                }
                hoppings.push((*r, m));
            } else {
                hoppings.push((*r, m));
                hoppings.push(([-r[0], -r[1]], m.adjoint()));
            }
        }
        Self::from_hoppings(dimension, hoppings, lattice)
    }

    /// SSH chain: `h_x = v + w cos k`, `h_y = −w sin k`, `h_z ≡ 0`.
    /// `v` is the intracell A–B bond, `w` the intercell bond.
    pub fn ssh(v: f64, w: f64) -> Self {
        let h0 = ([0, 0], Mat2::from_pauli(c(0.0, 0.0), c(v, 0.0), c(0.0, 0.0), c(0.0, 0.0)));
        // e^{+ik} coefficient of (w cos k)σx + (−w sin k)σy is (w/2)(σx + iσy).
        let hop = Mat2::transfer(0, 1).scale(c(w, 0.0));
        ModelSpec::from_hoppings(
            1,
            [h0, ([1, 0], hop), ([-1, 0], hop.adjoint())],
            Lattice::OneD { a: 1.0 },
        )
        .expect("builtin SSH model is well-formed")
    }

    /// Two-dimensional SSH generalization on a square lattice:
    /// `h_x = u + v cos k₁`, `h_y = v sin k₁ + 2w sin k₂`, `h_z = 2w cos k₂`.
    pub fn torus2d(u: f64, v: f64, w: f64) -> Self {
        let h00 = Mat2::from_pauli(c(0.0, 0.0), c(u, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        // e^{+ik₁} coefficient of v cos k₁ σx + v sin k₁ σy: (v/2)(σx − iσy).
        let h10 = Mat2::transfer(1, 0).scale(c(v, 0.0));
        // e^{+ik₂} coefficient of 2w sin k₂ σy + 2w cos k₂ σz: w(σz − iσy).
        let h01 = Mat2::from_pauli(c(0.0, 0.0), c(0.0, 0.0), c(0.0, -w), c(w, 0.0));
        ModelSpec::from_hoppings(
            2,
            [
                ([0, 0], h00),
                ([1, 0], h10),
                ([-1, 0], h10.adjoint()),
                ([0, 1], h01),
                ([0, -1], h01.adjoint()),
            ],
            Lattice::TwoD {
                a1: [1.0, 0.0],
                a2: [0.0, 1.0],
            },
        )
        .expect("builtin torus model is well-formed")
    }

    /// Single-band nearest-neighbor chain `H = 2J cos k`, embedded as the
    /// identity intracell component (`h⃗ ≡ 0`, `h0 = 2J cos k`). The identity
    /// part has no effect on jumptime evolution; the model exists to pair
    /// with the directional-hop dissipator.
    pub fn directional_chain(j_hop: f64) -> Self {
        let hop = Mat2::identity().scale(c(j_hop, 0.0));
        ModelSpec::from_hoppings(
            1,
            [([1, 0], hop), ([-1, 0], hop)],
            Lattice::OneD { a: 1.0 },
        )
        .expect("builtin chain model is well-formed")
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    pub fn lattice(&self) -> &Lattice {
        &self.lattice
    }

    pub fn hoppings(&self) -> impl Iterator<Item = (&[i64; 2], &Mat2)> {
        self.hoppings.iter()
    }

    /// Largest hopping matrix element, used to scale tolerances.
    pub fn energy_scale(&self) -> f64 {
        self.hoppings
            .values()
            .map(Mat2::max_abs)
            .fold(0.0, f64::max)
    }

    /// Maximum |r_axis| over the hopping support.
    pub fn hopping_range(&self, axis: usize) -> i64 {
        self.hoppings.keys().map(|r| r[axis].abs()).max().unwrap_or(0)
    }

    /// Raw Fourier sum `Σ_r H_r e^{ik·r}` as a 2×2 matrix.
    pub fn bloch_matrix(&self, k: &[f64; 2]) -> Mat2 {
        let mut out = Mat2::ZERO;
        for (r, m) in &self.hoppings {
            let phase = (I * c(k[0] * r[0] as f64 + k[1] * r[1] as f64, 0.0)).exp();
            out = out.add(&m.scale(phase));
        }
        out
    }

    /// Real Bloch vector `(h0, h⃗)` at dimensionless momentum `k`.
    pub fn bloch_vector(&self, k: &[f64; 2]) -> BlochVector {
        let (h0, hx, hy, hz) = self.bloch_matrix(k).pauli_components();
        debug_assert!(
            h0.im.abs() + hx.im.abs() + hy.im.abs() + hz.im.abs()
                <= 1e-10 * self.energy_scale().max(1.0),
            "Hermitian model must have real Bloch components"
        );
        BlochVector::new(h0.re, hx.re, hy.re, hz.re)
    }

    /// Analytic derivative `∂h/∂k_axis` (all four components).
    pub fn bloch_derivative(&self, k: &[f64; 2], axis: usize) -> BlochVector {
        let mut out = Mat2::ZERO;
        for (r, m) in &self.hoppings {
            let phase = (I * c(k[0] * r[0] as f64 + k[1] * r[1] as f64, 0.0)).exp();
            out = out.add(&m.scale(phase * I * r[axis] as f64));
        }
        let (h0, hx, hy, hz) = out.pauli_components();
        BlochVector {
            h0: h0.re,
            hx: hx.re,
            hy: hy.re,
            hz: hz.re,
            h_perp_sq: f64::NAN, // not meaningful for a derivative
        }
    }

    /// Minimum of `h_perp` over the grid, refined off-grid by golden-section
    /// coordinate descent before the dark-contact flag is decided.
    pub fn h_perp_min(&self, grid: &MomentumGrid) -> HPerpMin {
        let mut best = f64::INFINITY;
        let mut arg = [0.0; 2];
        for (_, k) in grid.iter() {
            let v = self.bloch_vector(&k).h_perp();
            if v < best {
                best = v;
                arg = k;
            }
        }
        // Coordinate-wise golden-section refinement within one grid cell.
        let f = |k: &[f64; 2]| self.bloch_vector(k).h_perp();
        for _ in 0..3 {
            for axis in 0..self.dimension {
                let dk = grid.spacing(axis);
                let (lo, hi) = (arg[axis] - dk, arg[axis] + dk);
                let refined = golden_section_min(
                    |x| {
                        let mut kk = arg;
                        kk[axis] = x;
                        f(&kk)
                    },
                    lo,
                    hi,
                    1e-12,
                );
                arg[axis] = refined;
            }
        }
        let refined_min = f(&arg).min(best);
        HPerpMin {
            min: refined_min,
            argmin: arg,
            dark_contact: refined_min <= DARK_CONTACT_REL_TOL * self.energy_scale(),
        }
    }

    /// Dense periodic real-space Hamiltonian on `cells` sites per axis.
    /// Index layout: `2·cell_flat + sublattice`, cells row-major.
    pub fn real_space_hamiltonian(&self, cells: &[usize]) -> Result<Array2<C64>> {
        if cells.len() != self.dimension {
            return Err(CoreError::InvalidModel(
                "cell count does not match model dimension".into(),
            ));
        }
        for axis in 0..self.dimension {
            if (cells[axis] as i64) < 2 * self.hopping_range(axis) {
                return Err(CoreError::InvalidModel(format!(
                    "lattice of {} cells along axis {axis} is below twice the hopping range {}",
                    cells[axis],
                    self.hopping_range(axis)
                )));
            }
        }
        let dims = [cells[0], *cells.get(1).unwrap_or(&1)];
        let n_cells = dims[0] * dims[1];
        let n = 2 * n_cells;
        let mut h = Array2::zeros((n, n));
        for j1 in 0..dims[0] {
            for j2 in 0..dims[1] {
                let row_cell = j1 * dims[1] + j2;
                for (r, m) in &self.hoppings {
                    let t1 = (j1 as i64 + r[0]).rem_euclid(dims[0] as i64) as usize;
                    let t2 = (j2 as i64 + r[1]).rem_euclid(dims[1] as i64) as usize;
                    let col_cell = t1 * dims[1] + t2;
                    for s in 0..2 {
                        for sp in 0..2 {
                            h[[2 * row_cell + s, 2 * col_cell + sp]] += m.0[s][sp];
                        }
                    }
                }
            }
        }
        Ok(h)
    }

    /// Test the symmetry flags on a grid: chiral/PT ⇔ `h_z ≡ 0`;
    /// TRS ⇔ `h_x` even, `h_y` odd, `h_z` even; inversion ⇔ `h_x` even,
    /// `h_y` odd, `h_z` odd.
    pub fn symmetry_check(&self, grid: &MomentumGrid) -> SymmetryReport {
        let tol = SYMMETRY_REL_TOL * self.energy_scale().max(1e-300);
        let mut chiral = true;
        let mut trs = true;
        let mut inversion = true;
        for (i, k) in grid.iter() {
            let h = self.bloch_vector(&k);
            let hm = self.bloch_vector(&grid.momentum(grid.negate(i)));
            chiral &= h.hz.abs() <= tol;
            trs &= (h.hx - hm.hx).abs() <= tol
                && (h.hy + hm.hy).abs() <= tol
                && (h.hz - hm.hz).abs() <= tol;
            inversion &= (h.hx - hm.hx).abs() <= tol
                && (h.hy + hm.hy).abs() <= tol
                && (h.hz + hm.hz).abs() <= tol;
        }
        SymmetryReport {
            chiral,
            pt: chiral,
            trs,
            inversion,
            residual_forced_zero: chiral || trs,
        }
    }

    /// Re-express a 2D model with respect to `a⃗'₁ = a⃗₁`,
    /// `a⃗'₂ = a⃗₂ + m·a⃗₁`. Hoppings relabel exactly as
    /// `r' = (r₁ − m·r₂, r₂)`, so the new Bloch vector satisfies
    /// `h'(k₁, k₂) = h(k₁, k₂ − m·k₁)`.
    pub fn transform_primitive_vectors(&self, m: i64) -> Result<ModelSpec> {
        if self.dimension != 2 {
            return Err(CoreError::Scope(
                "primitive-vector transformation requires a 2D model".into(),
            ));
        }
        let (a1, a2) = match &self.lattice {
            Lattice::TwoD { a1, a2 } => (*a1, *a2),
            _ => unreachable!(),
        };
        let new_a2 = [a2[0] + m as f64 * a1[0], a2[1] + m as f64 * a1[1]];
        let hoppings = self
            .hoppings
            .iter()
            .map(|(r, mat)| ([r[0] - m * r[1], r[1]], *mat));
        ModelSpec::from_hoppings(2, hoppings, Lattice::TwoD { a1, a2: new_a2 })
    }
}

/// Golden-section search for the minimum of a unimodal-ish 1D slice.
fn golden_section_min(mut f: impl FnMut(f64) -> f64, mut lo: f64, mut hi: f64, tol: f64) -> f64 {
    const INV_PHI: f64 = 0.618_033_988_749_894_8;
    let mut x1 = hi - INV_PHI * (hi - lo);
    let mut x2 = lo + INV_PHI * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    while hi - lo > tol {
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - INV_PHI * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + INV_PHI * (hi - lo);
            f2 = f(x2);
        }
    }
    0.5 * (lo + hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::PI;

    #[test]
    fn ssh_bloch_values() {
        let m = ModelSpec::ssh(1.0, 0.0);
        let h = m.bloch_vector(&[0.0, 0.0]);
        assert_abs_diff_eq!(h.hx, 1.0, epsilon = 1e-14);
        assert_abs_diff_eq!(h.hy, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(h.hz, 0.0, epsilon = 1e-14);

        let m = ModelSpec::ssh(0.3, 0.8);
        let h = m.bloch_vector(&[PI, 0.0]);
        assert_abs_diff_eq!(h.hx, 0.3 - 0.8, epsilon = 1e-14);
        assert_abs_diff_eq!(h.hy, 0.0, epsilon = 1e-14);
    }

    #[test]
    fn torus_bloch_at_origin() {
        let m = ModelSpec::torus2d(6.0, 10.0, 1.0);
        let h = m.bloch_vector(&[0.0, 0.0]);
        assert_abs_diff_eq!(h.hx, 16.0, epsilon = 1e-13);
        assert_abs_diff_eq!(h.hy, 0.0, epsilon = 1e-13);
        assert_abs_diff_eq!(h.hz, 2.0, epsilon = 1e-13);
    }

    #[test]
    fn torus_matches_closed_form_everywhere() {
        let (u, v, w) = (6.0, 10.0, 1.0);
        let m = ModelSpec::torus2d(u, v, w);
        let grid = MomentumGrid::two_d(13, 11);
        for (_, k) in grid.iter() {
            let h = m.bloch_vector(&k);
            assert_abs_diff_eq!(h.hx, u + v * k[0].cos(), epsilon = 1e-12);
            assert_abs_diff_eq!(h.hy, v * k[0].sin() + 2.0 * w * k[1].sin(), epsilon = 1e-12);
            assert_abs_diff_eq!(h.hz, 2.0 * w * k[1].cos(), epsilon = 1e-12);
        }
    }

    #[test]
    fn derivative_matches_finite_difference() {
        // Step = default-grid spacing / 64; agreement relative to the
        // model's energy scale.
        let m = ModelSpec::torus2d(6.0, 10.0, 1.0);
        let grid = MomentumGrid::two_d(16, 16);
        let dk = (2.0 * PI / 512.0) / 64.0;
        let tol = 1e-6 * m.energy_scale();
        for (_, k) in grid.iter() {
            for axis in 0..2 {
                let d = m.bloch_derivative(&k, axis);
                let mut kp = k;
                kp[axis] += dk;
                let mut km = k;
                km[axis] -= dk;
                let hp = m.bloch_vector(&kp);
                let hm = m.bloch_vector(&km);
                assert_abs_diff_eq!(d.hx, (hp.hx - hm.hx) / (2.0 * dk), epsilon = tol);
                assert_abs_diff_eq!(d.hy, (hp.hy - hm.hy) / (2.0 * dk), epsilon = tol);
                assert_abs_diff_eq!(d.hz, (hp.hz - hm.hz) / (2.0 * dk), epsilon = tol);
            }
        }
    }

    #[test]
    fn ssh_derivative_at_zero() {
        let m = ModelSpec::ssh(0.4, 0.9);
        let d = m.bloch_derivative(&[0.0, 0.0], 0);
        assert_abs_diff_eq!(d.hx, 0.0, epsilon = 1e-14);
        assert_abs_diff_eq!(d.hy, -0.9, epsilon = 1e-14);
    }

    #[test]
    fn constant_model_has_zero_derivative() {
        let m = ModelSpec::ssh(0.7, 0.0);
        let grid = MomentumGrid::one_d(32);
        for (_, k) in grid.iter() {
            let d = m.bloch_derivative(&k, 0);
            assert!(d.hx.abs() + d.hy.abs() + d.hz.abs() < 1e-15);
        }
    }

    #[test]
    fn h_perp_min_at_transition_and_away() {
        let crit = ModelSpec::ssh(0.5, 0.5);
        let r = crit.h_perp_min(&MomentumGrid::one_d(64));
        assert!(r.min < 1e-10);
        assert!(r.dark_contact);
        assert_abs_diff_eq!(r.argmin[0], PI, epsilon = 1e-3);

        let tame = ModelSpec::ssh(0.2, 0.5);
        let r = tame.h_perp_min(&MomentumGrid::one_d(64));
        assert_abs_diff_eq!(r.min, 0.3, epsilon = 1e-9);
        assert!(!r.dark_contact);

        let torus = ModelSpec::torus2d(6.0, 10.0, 1.0);
        let r = torus.h_perp_min(&MomentumGrid::two_d(64, 64));
        assert!(r.min > 0.5, "torus comfortably avoids dark contacts");
    }

    #[test]
    fn non_hermitian_hoppings_rejected() {
        let bad = ModelSpec::from_hoppings(
            1,
            [([1, 0], Mat2::identity()), ([-1, 0], Mat2::identity().scale(c(2.0, 0.0)))],
            Lattice::OneD { a: 1.0 },
        );
        assert!(matches!(bad, Err(CoreError::InvalidModel(_))));
    }

    #[test]
    fn ssh_real_space_bonds() {
        let (v, w) = (0.4, 0.9);
        let m = ModelSpec::ssh(v, w).real_space_hamiltonian(&[4]).unwrap();
        assert_eq!(m.shape(), &[8, 8]);
        // Intracell A-B bond.
        assert_abs_diff_eq!(m[[0, 1]].re, v, epsilon = 1e-14);
        // Intercell bond: ⟨j,A|H|j+1,B⟩ = w in this convention.
        assert_abs_diff_eq!(m[[0, 3]].re, w, epsilon = 1e-14);
        // Hermitian.
        for i in 0..8 {
            for j in 0..8 {
                assert!((m[[i, j]] - m[[j, i]].conj()).norm() < 1e-14);
            }
        }
    }

    #[test]
    fn symmetry_flags() {
        let grid = MomentumGrid::one_d(64);
        let ssh = ModelSpec::ssh(0.3, 0.9).symmetry_check(&grid);
        assert!(ssh.chiral && ssh.pt && ssh.trs && ssh.residual_forced_zero);

        let torus = ModelSpec::torus2d(6.0, 10.0, 1.0);
        let rep = torus.symmetry_check(&MomentumGrid::two_d(32, 32));
        assert!(rep.trs && !rep.chiral && rep.residual_forced_zero);

        // h_z(k) = sin k added to SSH: odd h_z breaks TRS but satisfies the
        // inversion condition (h_x even, h_y odd, h_z odd).
        let ssh_xy = [
            ([0, 0], [c(0.0, 0.0), c(0.3, 0.0), c(0.0, 0.0), c(0.0, 0.0)]),
            // w-term of SSH: e^{+ik} coefficient (w/2)(σx + iσy).
            ([1, 0], [c(0.0, 0.0), c(0.45, 0.0), c(0.0, 0.45), c(0.0, 0.0)]),
        ];
        let mut harmonics = ssh_xy.to_vec();
        // sin k = (e^{ik} − e^{−ik})/2i: e^{+ik} coefficient −i/2 on σz.
        harmonics.push(([1, 0], [c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.0, -0.5)]));
        let odd_hz = ModelSpec::from_pauli_harmonics(1, &harmonics, Lattice::OneD { a: 1.0 })
            .unwrap()
            .symmetry_check(&grid);
        assert!(!odd_hz.chiral && !odd_hz.pt && !odd_hz.trs && odd_hz.inversion);
        assert!(!odd_hz.residual_forced_zero);

        // h_z(k) = sin k + 0.3 cos k has no parity at all: every flag drops.
        let mut harmonics = ssh_xy.to_vec();
        harmonics.push(([1, 0], [c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0), c(0.15, -0.5)]));
        let broken = ModelSpec::from_pauli_harmonics(1, &harmonics, Lattice::OneD { a: 1.0 })
            .unwrap()
            .symmetry_check(&grid);
        assert!(!broken.chiral && !broken.pt && !broken.trs && !broken.inversion);
    }

    #[test]
    fn primitive_vector_transform_round_trip() {
        let m = ModelSpec::torus2d(6.0, 10.0, 1.0);
        let id = m.transform_primitive_vectors(0).unwrap();
        assert_eq!(m, id);
        let there = m.transform_primitive_vectors(-1).unwrap();
        let back = there.transform_primitive_vectors(1).unwrap();
        // Hoppings restore; the lattice vectors restore too.
        assert_eq!(m, back);
        // m = −1 moves the w-hoppings onto the (+1,+1) diagonal.
        assert!(there.hoppings().any(|(r, _)| *r == [1, 1]));
    }

    #[test]
    fn transformed_bloch_vector_obeys_substitution_rule() {
        let m = ModelSpec::torus2d(6.0, 10.0, 1.0);
        for mm in [-2i64, -1, 1, 3] {
            let t = m.transform_primitive_vectors(mm).unwrap();
            let grid = MomentumGrid::two_d(9, 7);
            for (_, k) in grid.iter() {
                let lhs = t.bloch_vector(&k);
                let rhs = m.bloch_vector(&[k[0], k[1] - mm as f64 * k[0]]);
                assert_abs_diff_eq!(lhs.hx, rhs.hx, epsilon = 1e-11);
                assert_abs_diff_eq!(lhs.hy, rhs.hy, epsilon = 1e-11);
                assert_abs_diff_eq!(lhs.hz, rhs.hz, epsilon = 1e-11);
            }
        }
    }
}
