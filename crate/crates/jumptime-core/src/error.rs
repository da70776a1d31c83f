//! Error type shared by all modules.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum CoreError {
    /// Model fails a structural invariant (non-Hermitian hopping set,
    /// wrong dimension, hopping range too large for the lattice, ...).
    #[error("invalid model: {0}")]
    InvalidModel(String),

    /// A quantity was requested at (or too close to) a dark contact,
    /// where the jumptime propagator is singular.
    #[error("dark contact at momentum {momentum:?}: h_perp = {h_perp:.3e} below tolerance")]
    DarkContact { momentum: Vec<f64>, h_perp: f64 },

    /// A trajectory stopped jumping: the survival probability stays above
    /// the drawn quantile out to the cutoff time.
    #[error("trajectory dark-trapped after {jumps_done} jumps (survival {survival:.3e} at tau_max)")]
    DarkTrapped { jumps_done: usize, survival: f64 },

    /// The jumptime-map integral does not converge because an eigenvalue of
    /// the effective Hamiltonian with vanishing decay is reachable from the
    /// input state.
    #[error("jumptime map diverges: eigenvalue {lambda:?} has |Im| = {im_abs:.3e} and overlaps the state")]
    DarkDivergence { lambda: (f64, f64), im_abs: f64 },

    /// Dense eigendecomposition is too ill-conditioned to trust.
    #[error("decomposition failed: {0}")]
    Decomposition(String),

    /// The steady-state manifold is degenerate and no canonical
    /// representative is stationary.
    #[error("degenerate steady-state manifold: second singular value {second_sv:.3e}")]
    DegenerateSteadyState { second_sv: f64, candidates: Vec<Vec<(f64, f64)>> },

    /// Adaptive integration failed (step underflow or exhausted budget).
    #[error("integration error: {0}")]
    Integration(String),

    /// An operation was called outside its stated scope.
    #[error("out of scope: {0}")]
    Scope(String),

    /// Two routes that must agree disagreed beyond tolerance.
    #[error("consistency check failed: {0}")]
    Consistency(String),

    /// All trajectories in an ensemble terminated in dark states.
    #[error("all {0} trajectories dark-trapped")]
    AllTrajectoriesTrapped(usize),

    /// Generic invalid argument.
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}
