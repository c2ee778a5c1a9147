//! Core library for the pulsed quadratic quantum battery: a lossy
//! charger mode hit by an instantaneous two-photon pulse feeds a
//! lossless holder mode through a linear coupling. The crate provides
//!
//! * [`params`]: physical parameters and exceptional-point regime
//!   classification,
//! * [`energetics`]: closed-form populations, stored energy, optimal
//!   charging time/energy and ergotropy,
//! * [`moments`]: the closed linear equations of motion for the
//!   second moments and their propagator,
//! * [`oracle`]: a brute-force Lindblad integrator on a truncated
//!   two-mode Fock space used to certify the other two routes.

pub mod energetics;
pub mod error;
pub mod linalg;
pub mod moments;
pub mod ode;
pub mod oracle;
pub mod params;

pub use energetics::{
    asymptotic_optimal_energy, asymptotic_optimal_time, ergotropy_record, excitation_fraction,
    optimal_energy, optimal_time, passive_discriminant, population_charger, population_holder,
    stored_energy, CouplingLimit, EnergyRecord, OptimalPoint,
};
pub use error::{EnergeticsError, MomentError, OracleError, ParamError};
pub use moments::{
    build_population_matrix, build_squeeze_matrix, gaussian_ergotropy_from_moments,
    post_pulse_moments, propagate_moments, DynamicalMatrix, PassiveDecomposition, SecondMoments,
};
pub use oracle::{
    build_mode_operators, certified_cutoff, extract_report, finite_width_pulse_run, integrate,
    run_delta_trace, squeeze_vacuum, DeltaTraceOptions, FinitePulseOptions, FockBasis,
    ModeOperators, OracleReport, PulseProfile, TruncatedState, MAX_ORACLE_CUTOFF,
    TRUNCATION_CERT_LIMIT,
};
pub use params::{BatteryParams, PulseShape, PulseSpec, Regime, RegimeRates};

/// Complex scalar used throughout.
pub type C64 = num_complex::Complex64;
