//! Physical parameters of the pulsed two-mode battery and the regime
//! classification around the exceptional point g = gamma/4.

use crate::error::ParamError;

/// Relative half-width (in units of gamma) of the band around g = gamma/4
/// that is classified as sitting exactly on the exceptional point.
pub const EP_REL_TOL: f64 = 1e-9;

/// A finite pulse with omega_b * tau above this value is outside the
/// delta-pulse regime and gets flagged by [`PulseSpec::delta_limit_ok`].
pub const FINITE_PULSE_WARN_THRESHOLD: f64 = 0.1;

/// Physical inputs defining one battery instance.
///
/// `omega_b` is the common level spacing of charger and holder, `g` the
/// charger-holder coupling rate, `gamma` the charger decay rate and
/// `omega_drive` the dimensionless strength of the quadratic pulse.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BatteryParams {
    pub omega_b: f64,
    pub g: f64,
    pub gamma: f64,
    pub omega_drive: f64,
}

impl BatteryParams {
    pub fn new(omega_b: f64, g: f64, gamma: f64, omega_drive: f64) -> Result<Self, ParamError> {
        if !(omega_b.is_finite() && omega_b > 0.0) {
            return Err(ParamError::InvalidOmegaB(omega_b));
        }
        if !(g.is_finite() && g >= 0.0) {
            return Err(ParamError::InvalidCoupling(g));
        }
        if !(gamma.is_finite() && gamma >= 0.0) {
            return Err(ParamError::InvalidDecay(gamma));
        }
        if !(omega_drive.is_finite() && omega_drive >= 0.0) {
            return Err(ParamError::InvalidDrive(omega_drive));
        }
        Ok(Self { omega_b, g, gamma, omega_drive })
    }

    /// Exceptional-point coupling gamma/4.
    pub fn g_ep(&self) -> f64 {
        0.25 * self.gamma
    }

    /// Discriminant g^2 - (gamma/4)^2 separating the oscillatory
    /// (positive) from the overdamped (negative) regime.
    pub fn rate_discriminant(&self) -> f64 {
        self.g * self.g - self.g_ep() * self.g_ep()
    }

    /// Hyperbolic enhancement factor sinh^2(Omega) carried by every
    /// stored-energy expression.
    pub fn enhancement_factor(&self) -> f64 {
        let s = self.omega_drive.sinh();
        s * s
    }

    /// Classify the dynamical regime and return the renormalized rate:
    /// G = sqrt(g^2 - (gamma/4)^2) when underdamped, Gamma = sqrt((gamma/4)^2 - g^2)
    /// when overdamped, zero on the exceptional point.
    pub fn classify_regime(&self) -> RegimeRates {
        let g_ep = self.g_ep();
        // Dissipationless limit: G = g, including the trivially static g = 0.
        if self.gamma == 0.0 {
            return RegimeRates { regime: Regime::Underdamped, rate: self.g, g_ep };
        }
        let detuning = self.g - g_ep;
        if detuning.abs() <= EP_REL_TOL * self.gamma {
            RegimeRates { regime: Regime::ExceptionalPoint, rate: 0.0, g_ep }
        } else if detuning > 0.0 {
            RegimeRates {
                regime: Regime::Underdamped,
                rate: self.rate_discriminant().sqrt(),
                g_ep,
            }
        } else {
            RegimeRates {
                regime: Regime::Overdamped,
                rate: (-self.rate_discriminant()).sqrt(),
                g_ep,
            }
        }
    }
}

/// Dynamical regime relative to the exceptional point.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Regime {
    Underdamped,
    ExceptionalPoint,
    Overdamped,
}

impl std::fmt::Display for Regime {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Regime::Underdamped => write!(f, "underdamped"),
            Regime::ExceptionalPoint => write!(f, "exceptional-point"),
            Regime::Overdamped => write!(f, "overdamped"),
        }
    }
}

/// Regime tag together with the renormalized rate that drives the
/// population dynamics in that regime.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeRates {
    pub regime: Regime,
    pub rate: f64,
    pub g_ep: f64,
}

/// Temporal profile of the quadratic charging pulse.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PulseShape {
    Gaussian,
    Rectangular,
}

/// Either the idealized instantaneous pulse or a finite-width profile
/// with unit time integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum PulseSpec {
    Delta,
    FiniteWidth { tau: f64, shape: PulseShape },
}

impl PulseSpec {
    pub fn validate(&self) -> Result<(), ParamError> {
        match *self {
            PulseSpec::Delta => Ok(()),
            PulseSpec::FiniteWidth { tau, .. } => {
                if tau.is_finite() && tau > 0.0 {
                    Ok(())
                } else {
                    Err(ParamError::InvalidPulseWidth(tau))
                }
            }
        }
    }

    /// True when the pulse is short enough (omega_b * tau <= 0.1) for the
    /// delta-pulse analytics to apply. Delta pulses always qualify.
    pub fn delta_limit_ok(&self, omega_b: f64) -> bool {
        match *self {
            PulseSpec::Delta => true,
            PulseSpec::FiniteWidth { tau, .. } => omega_b * tau <= FINITE_PULSE_WARN_THRESHOLD,
        }
    }
}
