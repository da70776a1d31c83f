//! Uniform Brillouin-zone discretization.
//!
//! A grid covers one Brillouin zone exactly once with dimensionless momenta
//! `k_n = 2π n / N` per axis, `n = 0..N−1`. Rectangle-rule sums over these
//! points are spectrally accurate for smooth periodic integrands, which is
//! what every Brillouin-zone integral in this crate relies on.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Momentum grid over one or two axes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MomentumGrid {
    per_axis: Vec<usize>,
}

impl MomentumGrid {
    pub fn new(per_axis: &[usize]) -> Self {
        assert!(
            (1..=2).contains(&per_axis.len()) && per_axis.iter().all(|&n| n >= 1),
            "grid must have 1 or 2 nonempty axes"
        );
        MomentumGrid {
            per_axis: per_axis.to_vec(),
        }
    }

    pub fn one_d(n: usize) -> Self {
        Self::new(&[n])
    }

    pub fn two_d(n1: usize, n2: usize) -> Self {
        Self::new(&[n1, n2])
    }

    pub fn n_axes(&self) -> usize {
        self.per_axis.len()
    }

    pub fn per_axis(&self) -> &[usize] {
        &self.per_axis
    }

    /// Total number of grid points.
    pub fn len(&self) -> usize {
        self.per_axis.iter().product()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Grid spacing `Δk = 2π/N` along `axis`.
    pub fn spacing(&self, axis: usize) -> f64 {
        2.0 * PI / self.per_axis[axis] as f64
    }

    /// Volume element `Πᵢ Δkᵢ`.
    pub fn cell_volume(&self) -> f64 {
        (0..self.n_axes()).map(|a| self.spacing(a)).product()
    }

    /// Multi-index of a flat index (row-major, axis 0 outermost).
    pub fn unflatten(&self, flat: usize) -> [usize; 2] {
        match self.per_axis.len() {
            1 => [flat, 0],
            _ => [flat / self.per_axis[1], flat % self.per_axis[1]],
        }
    }

    pub fn flatten(&self, idx: [usize; 2]) -> usize {
        match self.per_axis.len() {
            1 => idx[0],
            _ => idx[0] * self.per_axis[1] + idx[1],
        }
    }

    /// Dimensionless momentum of a flat index; unused axes are zero.
    pub fn momentum(&self, flat: usize) -> [f64; 2] {
        let idx = self.unflatten(flat);
        let mut k = [0.0; 2];
        for a in 0..self.n_axes() {
            k[a] = 2.0 * PI * idx[a] as f64 / self.per_axis[a] as f64;
        }
        k
    }

    /// Flat index of `−k` (exact on the grid).
    pub fn negate(&self, flat: usize) -> usize {
        let idx = self.unflatten(flat);
        let mut out = [0usize; 2];
        for a in 0..self.n_axes() {
            let n = self.per_axis[a];
            out[a] = (n - idx[a]) % n;
        }
        self.flatten(out)
    }

    /// Flat index of `k + q` where `q` is the grid point with flat index
    /// `shift` (cyclic).
    pub fn shift(&self, flat: usize, shift: usize) -> usize {
        let idx = self.unflatten(flat);
        let s = self.unflatten(shift);
        let mut out = [0usize; 2];
        for a in 0..self.n_axes() {
            let n = self.per_axis[a];
            out[a] = (idx[a] + s[a]) % n;
        }
        self.flatten(out)
    }

    /// Flat index of `k − q`.
    pub fn unshift(&self, flat: usize, shift: usize) -> usize {
        self.shift(flat, self.negate(shift))
    }

    /// Momentum centered into `(−π, π]` per axis, for kick magnitudes.
    pub fn centered_momentum(&self, flat: usize) -> [f64; 2] {
        let mut k = self.momentum(flat);
        for v in k.iter_mut() {
            if *v > PI {
                *v -= 2.0 * PI;
            }
        }
        k
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, [f64; 2])> + '_ {
        (0..self.len()).map(move |i| (i, self.momentum(i)))
    }
}
