//! Numerical laboratory for dissipative two-band lattice models under
//! quantum-jump unraveling.
//!
//! The crate simulates translation-invariant one- and two-dimensional
//! two-band Hamiltonians coupled to collapse-type Lindblad operators, and
//! computes the topological invariants that govern the ensemble dynamics
//! read out at fixed jump counts ("jumptime") rather than fixed clock time
//! ("walltime").
//!
//! Modules:
//! - [`bloch`]: lattice models, Bloch vectors, real-space matrices, symmetries
//! - [`dissipator`]: jump-operator families, effective Hamiltonians, dark sets
//! - [`trajectory`]: exact per-trajectory quantum-jump Monte Carlo
//! - [`reference`]: dense brute-force oracles (master equation, jumptime map)
//! - [`propagator`]: closed-form jumptime propagators and kernel evolution
//! - [`topology`]: winding numbers, jumptime phases, residuals, curvature
//! - [`steady_state`]: closed-form walltime steady state and currents
//!
//! Internal units: `ħ = 1`, lattice constant `a = 1` per axis, energies and
//! rates measured against the dissipation rate `γ`. Momenta are handled as
//! dimensionless crystal momenta `k = p·a/ħ ∈ [0, 2π)`.

pub mod accumulator;
pub mod bloch;
pub mod dissipator;
pub mod error;
pub mod grid;
pub mod linalg;
pub mod propagator;
pub mod reference;
pub mod steady_state;
pub mod topology;
pub mod trajectory;

pub use error::CoreError;
pub use linalg::{Mat2, C64};

/// Crate-wide result type.
pub type Result<T> = std::result::Result<T, CoreError>;
