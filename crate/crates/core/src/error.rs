//! Error types shared across the crate.

use thiserror::Error;

/// Rejected physical parameters.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("omega_b must be positive and finite, got {0}")]
    InvalidOmegaB(f64),
    #[error("coupling g must be nonnegative and finite, got {0}")]
    InvalidCoupling(f64),
    #[error("decay rate gamma must be nonnegative and finite, got {0}")]
    InvalidDecay(f64),
    #[error("drive strength Omega must be nonnegative and finite, got {0}")]
    InvalidDrive(f64),
    #[error("pulse width tau must be positive and finite, got {0}")]
    InvalidPulseWidth(f64),
}

/// Failures of the closed-form evaluators.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnergeticsError {
    #[error("time must be nonnegative and finite, got {0}")]
    InvalidTime(f64),
    #[error("the holder never charges when g = 0")]
    NoCharging,
    #[error("internal regime inconsistency between classification and rate discriminant")]
    RegimeInconsistency,
    #[error(transparent)]
    Param(#[from] ParamError),
}

/// Failures of the second-moment propagator.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MomentError {
    #[error("time grid must be ascending and nonnegative: {0}")]
    InvalidGrid(String),
    #[error("moments are unphysical: discriminant D = {d} (or negative energy)")]
    UnphysicalMoments { d: f64 },
    #[error("moment integration failed: {0}")]
    IntegrationFailure(String),
    #[error(transparent)]
    Param(#[from] ParamError),
}

/// Failures of the truncated Fock-space oracle.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("Fock cutoff must be at least 1, got {0}")]
    InvalidCutoff(usize),
    #[error("cutoff {requested} exceeds the feasible oracle limit {limit}; reduce Omega or override n_max")]
    CutoffInfeasible { requested: usize, limit: usize },
    #[error("truncation insufficient: top-level weight {weight:.3e} exceeds {limit:.1e}")]
    TruncationInsufficient { weight: f64, limit: f64 },
    #[error("time must be nonnegative and finite, got {0}")]
    InvalidTime(f64),
    #[error("time grid must be ascending and nonnegative: {0}")]
    InvalidGrid(String),
    #[error("this run mode requires a finite-width pulse")]
    ExpectedFinitePulse,
    #[error("oracle integration failed: {0}")]
    IntegrationFailure(String),
    #[error("state invariant violated: {0}")]
    StateInvariant(String),
    #[error(transparent)]
    Param(#[from] ParamError),
}
