//! Closed-form energetics of the pulsed battery: populations, stored
//! energy, optimal charging time/energy with asymptotics, and the
//! ergotropy through the passive-state discriminant.
//!
//! Every quantity is evaluated through regime-unified kernels in the
//! discriminant e = g^2 - (gamma/4)^2: `sin(sqrt(e) t)/sqrt(e)` and its
//! relatives continue analytically to `sinh` for e < 0 and to polynomials
//! at e = 0, so the underdamped, overdamped and exceptional-point
//! branches come out of one expression with no precision cliff at the
//! regime boundary.

use crate::error::EnergeticsError;
use crate::params::{BatteryParams, Regime};

/// |e t^2| below which the series kernels take over from the
/// trigonometric/hyperbolic forms.
const SERIES_THRESHOLD: f64 = 0.05;

/// sin(sqrt(e) x)/sqrt(e) continued through e = 0 (sinh branch for e < 0).
fn sinc_sqrt(e: f64, x: f64) -> f64 {
    let u = e * x * x;
    if u.abs() <= SERIES_THRESHOLD {
        let mut sum = 1.0;
        let mut term = 1.0;
        for k in 1..=8u32 {
            term *= -u / ((2 * k) * (2 * k + 1)) as f64;
            sum += term;
        }
        x * sum
    } else if e > 0.0 {
        let r = e.sqrt();
        (r * x).sin() / r
    } else {
        let r = (-e).sqrt();
        (r * x).sinh() / r
    }
}

/// sin(sqrt(e) x)/sqrt(e) * exp(-damp x), organized so the overdamped
/// branch never forms a large intermediate exponential. Requires
/// sqrt(-e) <= damp when e < 0, which holds for every use here
/// (sqrt(-e) <= gamma/4 and damp = gamma/4).
fn sinc_sqrt_damped(e: f64, x: f64, damp: f64) -> f64 {
    let u = e * x * x;
    if u.abs() <= SERIES_THRESHOLD || e > 0.0 {
        sinc_sqrt(e, x) * (-damp * x).exp()
    } else {
        let r = (-e).sqrt();
        0.5 * (((r - damp) * x).exp() - (-(r + damp) * x).exp()) / r
    }
}

/// arctan(sqrt(e) x)/sqrt(e) continued through e = 0 (arctanh for e < 0).
fn atan_sqrt(e: f64, x: f64) -> f64 {
    let u = e * x * x;
    if u.abs() <= SERIES_THRESHOLD {
        let mut sum = 1.0;
        let mut pow = 1.0;
        for k in 1..=12u32 {
            pow *= -u;
            sum += pow / (2 * k + 1) as f64;
        }
        x * sum
    } else if e > 0.0 {
        let r = e.sqrt();
        (r * x).atan() / r
    } else {
        let r = (-e).sqrt();
        (r * x).atanh() / r
    }
}

fn check_time(t: f64) -> Result<(), EnergeticsError> {
    if t.is_finite() && t >= 0.0 {
        Ok(())
    } else {
        Err(EnergeticsError::InvalidTime(t))
    }
}

/// Dimensionless excitation fraction P(t) = <b'b>/sinh^2(Omega): the
/// holder population normalized by the injected excitation. Independent
/// of the drive strength.
pub fn excitation_fraction(p: &BatteryParams, t: f64) -> Result<f64, EnergeticsError> {
    check_time(t)?;
    let e = p.rate_discriminant();
    let s = sinc_sqrt_damped(e, t, 0.25 * p.gamma);
    Ok((p.g * s) * (p.g * s))
}

/// Holder population <b'b>(t).
pub fn population_holder(p: &BatteryParams, t: f64) -> Result<f64, EnergeticsError> {
    Ok(p.enhancement_factor() * excitation_fraction(p, t)?)
}

/// Charger population <a'a>(t).
pub fn population_charger(p: &BatteryParams, t: f64) -> Result<f64, EnergeticsError> {
    check_time(t)?;
    let e = p.rate_discriminant();
    let gamma = p.gamma;
    let s1 = sinc_sqrt_damped(e, t, 0.25 * gamma);
    let s2 = sinc_sqrt_damped(e, 2.0 * t, 0.25 * gamma);
    let bracket = (-0.5 * gamma * t).exp()
        - (8.0 * p.g * p.g - gamma * gamma) / 8.0 * s1 * s1
        - 0.25 * gamma * s2;
    Ok(p.enhancement_factor() * bracket)
}

/// Stored energy E(t) = omega_b <b'b>(t).
pub fn stored_energy(p: &BatteryParams, t: f64) -> Result<f64, EnergeticsError> {
    Ok(p.omega_b * population_holder(p, t)?)
}

/// Passive-state discriminant D(t) = 1 + 4 sinh^2(Omega) P(1 - P) >= 1.
pub fn passive_discriminant(p: &BatteryParams, t: f64) -> Result<f64, EnergeticsError> {
    let frac = excitation_fraction(p, t)?;
    Ok(1.0 + 4.0 * p.enhancement_factor() * frac * (1.0 - frac))
}

/// Time-stamped energetic summary at one instant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyRecord {
    pub t: f64,
    /// Stored energy E.
    pub energy: f64,
    /// Passive-state energy E_beta (not extractable by unitaries).
    pub passive_energy: f64,
    /// Ergotropy E - E_beta.
    pub ergotropy: f64,
    /// Discriminant D entering the passive energy.
    pub discriminant: f64,
    /// Excitation fraction P.
    pub excitation_fraction: f64,
}

/// Full energetic record at time t: stored energy, passive energy,
/// ergotropy, discriminant and excitation fraction.
pub fn ergotropy_record(p: &BatteryParams, t: f64) -> Result<EnergyRecord, EnergeticsError> {
    let frac = excitation_fraction(p, t)?;
    let c = p.enhancement_factor();
    let energy = p.omega_b * c * frac;
    // u = D - 1; sqrt(D) - 1 = u/(sqrt(D) + 1) avoids cancellation at
    // weak drive, where the ergotropy is quadratically small.
    let u = 4.0 * c * frac * (1.0 - frac);
    let sqrt_d = (1.0 + u).sqrt();
    let passive = p.omega_b * u / (2.0 * (sqrt_d + 1.0));
    // Same record, re-expressed with only positive terms.
    let ergotropy = p.omega_b * c * frac * (sqrt_d - 1.0 + 2.0 * frac) / (sqrt_d + 1.0);
    Ok(EnergyRecord {
        t,
        energy,
        passive_energy: passive,
        ergotropy,
        discriminant: 1.0 + u,
        excitation_fraction: frac,
    })
}

/// Location and height of the global stored-energy maximum.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalPoint {
    pub t_e: f64,
    pub e_max: f64,
    pub regime: Regime,
}

/// Optimal charging time: the first stationary point of E(t), which is
/// also the global maximum (later underdamped peaks are suppressed by
/// the decay envelope; for gamma = 0 all peaks tie and the first one is
/// returned).
pub fn optimal_time(p: &BatteryParams) -> Result<f64, EnergeticsError> {
    if p.g == 0.0 {
        return Err(EnergeticsError::NoCharging);
    }
    if p.gamma == 0.0 {
        return Ok(std::f64::consts::FRAC_PI_2 / p.g);
    }
    let rates = p.classify_regime();
    match rates.regime {
        Regime::ExceptionalPoint => Ok(4.0 / p.gamma),
        Regime::Overdamped => {
            // 4*Gamma/gamma < 1 holds for every g > 0; a violation would
            // mean the regime tag and the discriminant disagree.
            if 4.0 * rates.rate >= p.gamma {
                return Err(EnergeticsError::RegimeInconsistency);
            }
            Ok(atan_sqrt(p.rate_discriminant(), 4.0 / p.gamma))
        }
        Regime::Underdamped => Ok(atan_sqrt(p.rate_discriminant(), 4.0 / p.gamma)),
    }
}

/// Optimal stored energy E(t_E). Equals omega_b sinh^2(Omega)
/// exp(-gamma t_E / 2) in every regime, because the regime factor
/// (g/G)^2 sin^2(G t_E) evaluates to one at the stationary point.
pub fn optimal_energy(p: &BatteryParams) -> Result<OptimalPoint, EnergeticsError> {
    let t_e = optimal_time(p)?;
    let rates = p.classify_regime();
    let scale = p.omega_b * p.enhancement_factor();
    let e_max = match rates.regime {
        Regime::ExceptionalPoint => scale * (-2.0f64).exp(),
        _ => scale * (-0.5 * p.gamma * t_e).exp(),
    };
    Ok(OptimalPoint { t_e, e_max, regime: rates.regime })
}

/// Coupling regime for the asymptotic expansions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CouplingLimit {
    /// g much below gamma/4.
    Weak,
    /// g much above gamma/4.
    Strong,
}

/// Asymptotic optimal charging time: (4/gamma) ln(gamma/2g) in the weak
/// limit, pi/2g - gamma/4g^2 in the strong limit.
pub fn asymptotic_optimal_time(p: &BatteryParams, limit: CouplingLimit) -> Result<f64, EnergeticsError> {
    if p.g == 0.0 {
        return Err(EnergeticsError::NoCharging);
    }
    Ok(match limit {
        CouplingLimit::Weak => 4.0 / p.gamma * (p.gamma / (2.0 * p.g)).ln(),
        CouplingLimit::Strong => {
            std::f64::consts::FRAC_PI_2 / p.g - p.gamma / (4.0 * p.g * p.g)
        }
    })
}

/// Asymptotic optimal energy: omega_b sinh^2(Omega) (2g/gamma)^2 in the
/// weak limit, omega_b sinh^2(Omega) (1 - pi gamma / 4g) in the strong
/// limit.
pub fn asymptotic_optimal_energy(p: &BatteryParams, limit: CouplingLimit) -> Result<f64, EnergeticsError> {
    if p.g == 0.0 {
        return Err(EnergeticsError::NoCharging);
    }
    let scale = p.omega_b * p.enhancement_factor();
    Ok(match limit {
        CouplingLimit::Weak => scale * (2.0 * p.g / p.gamma).powi(2),
        CouplingLimit::Strong => {
            scale * (1.0 - std::f64::consts::PI * p.gamma / (4.0 * p.g))
        }
    })
}

/// Stored energy evaluated through an explicit fourth-order expansion of
/// the regime kernel around the exceptional point. Only valid close to
/// g = gamma/4; exposed for cross-route diagnostics against
/// [`stored_energy`].
pub fn stored_energy_ep_expansion(p: &BatteryParams, t: f64) -> Result<f64, EnergeticsError> {
    check_time(t)?;
    let e = p.rate_discriminant();
    let u = e * t * t;
    // (sin(sqrt(e) t)/sqrt(e))^2 = t^2 (1 - u/3 + 2u^2/45 - u^3/315 + 2u^4/14175)
    let poly = 1.0 - u / 3.0 + 2.0 * u * u / 45.0 - u * u * u / 315.0
        + 2.0 * u * u * u * u / 14175.0;
    let b = p.g * p.g * t * t * poly;
    Ok(p.omega_b * p.enhancement_factor() * b * (-0.5 * p.gamma * t).exp())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(g: f64, gamma: f64, omega_drive: f64) -> BatteryParams {
        BatteryParams::new(1.0, g, gamma, omega_drive).unwrap()
    }

    /// Independent maximizer: coarse scan plus golden-section refinement.
    fn golden_section_max_time(p: &BatteryParams, t_hi: f64) -> f64 {
        let n = 4000usize;
        let mut best_i = 0usize;
        let mut best = f64::MIN;
        for i in 0..=n {
            let t = t_hi * i as f64 / n as f64;
            let v = stored_energy(p, t).unwrap();
            if v > best {
                best = v;
                best_i = i;
            }
        }
        let mut lo = t_hi * (best_i.saturating_sub(1)) as f64 / n as f64;
        let mut hi = t_hi * (best_i + 1).min(n) as f64 / n as f64;
        let phi = (5.0f64.sqrt() - 1.0) / 2.0;
        for _ in 0..200 {
            let m1 = hi - phi * (hi - lo);
            let m2 = lo + phi * (hi - lo);
            if stored_energy(p, m1).unwrap() < stored_energy(p, m2).unwrap() {
                lo = m1;
            } else {
                hi = m2;
            }
        }
        0.5 * (lo + hi)
    }

    #[test]
    fn charger_population_starts_at_enhancement() {
        for (g, gamma) in [(2.0, 1.0), (0.1, 1.0), (0.25, 1.0), (1.0, 0.0)] {
            let p = params(g, gamma, 1.0);
            let n0 = population_charger(&p, 0.0).unwrap();
            assert!(
                (n0 - p.enhancement_factor()).abs() < 1e-12,
                "g={g} gamma={gamma}: {n0}"
            );
        }
    }

    #[test]
    fn charger_decoupled_is_single_lossy_mode() {
        let p = params(0.0, 1.3, 1.0);
        let c = p.enhancement_factor();
        for t in [0.0, 0.4, 1.7, 6.0, 30.0, 300.0] {
            let expect = c * (-p.gamma * t).exp();
            let got = population_charger(&p, t).unwrap();
            assert!(
                (got - expect).abs() <= 1e-12 * c.max(expect),
                "t={t}: {got} vs {expect}"
            );
        }
    }

    #[test]
    fn zero_drive_stores_nothing() {
        let p = params(2.0, 1.0, 0.0);
        assert_eq!(stored_energy(&p, 1.0).unwrap(), 0.0);
        assert_eq!(population_charger(&p, 2.0).unwrap(), 0.0);
        let rec = ergotropy_record(&p, 1.0).unwrap();
        assert_eq!(rec.energy, 0.0);
        assert_eq!(rec.ergotropy, 0.0);
        assert_eq!(rec.discriminant, 1.0);
    }

    #[test]
    fn holder_starts_empty_and_vanishes_at_nodes() {
        let p = params(2.0, 1.0, 1.0);
        assert_eq!(population_holder(&p, 0.0).unwrap(), 0.0);
        let g_big = p.classify_regime().rate;
        let c = p.enhancement_factor();
        for n in 1..=3 {
            let t = n as f64 * std::f64::consts::PI / g_big;
            let v = population_holder(&p, t).unwrap();
            assert!(v < 1e-25 * c, "node n={n}: {v}");
        }
    }

    #[test]
    fn lossless_limit_oscillates_fully() {
        let p = params(0.7, 0.0, 1.0);
        let c = p.enhancement_factor();
        let t_peak = std::f64::consts::FRAC_PI_2 / p.g;
        assert!((stored_energy(&p, t_peak).unwrap() - c).abs() < 1e-12 * c);
        for i in 0..100 {
            let t = 0.13 * i as f64;
            let expect = c * (p.g * t).sin().powi(2);
            assert!((stored_energy(&p, t).unwrap() - expect).abs() < 1e-12 * c);
        }
    }

    #[test]
    fn ep_holder_value_at_optimal_time() {
        // sinh^2(1) (gamma t/4)^2 e^{-gamma t/2} at t = 4/gamma is sinh^2(1) e^-2.
        let gamma = 1.0;
        let p = params(gamma / 4.0, gamma, 1.0);
        let v = population_holder(&p, 4.0 / gamma).unwrap();
        let expect = p.enhancement_factor() * (-2.0f64).exp();
        assert!((v - expect).abs() < 1e-13 * expect);
    }

    #[test]
    fn overdamped_branch_is_stable_at_long_times() {
        let p = params(0.1, 1.0, 1.0);
        // sinh(Gamma t) alone would overflow near t = 3000/gamma.
        let v = population_holder(&p, 5e4).unwrap();
        assert!(v.is_finite());
        assert!(v >= 0.0);
        assert!(v < 1e-12);
    }

    #[test]
    fn optimal_time_matches_golden_section_oracle() {
        // The flat maximum limits the search to ~sqrt(eps) in time, so
        // the location is compared loosely and the heights tightly.
        for (g, gamma) in [(2.0, 1.0), (5.0, 1.0), (0.26, 1.0), (0.1, 1.0), (0.25, 1.0)] {
            let p = params(g, gamma, 1.0);
            let t_closed = optimal_time(&p).unwrap();
            let t_gold = golden_section_max_time(&p, 3.0 * t_closed.max(1.0));
            assert!(
                (t_closed - t_gold).abs() < 1e-6 * t_closed.max(1.0),
                "g={g}: closed {t_closed} vs golden {t_gold}"
            );
            let e_closed = stored_energy(&p, t_closed).unwrap();
            let e_gold = stored_energy(&p, t_gold).unwrap();
            assert!(e_closed >= e_gold - 1e-12 * e_closed.abs());
        }
    }

    #[test]
    fn optimal_time_frozen_value_underdamped() {
        // Golden-section verified: arctan(4G/gamma)/G at g = 2, gamma = 1.
        let p = params(2.0, 1.0, 1.0);
        let t_e = optimal_time(&p).unwrap();
        assert!((t_e - 0.728_447_650_934_714_3).abs() < 1e-12, "{t_e}");
    }

    #[test]
    fn optimal_time_exceptional_point_is_exact() {
        for gamma in [1.0, 0.7, 3.2] {
            let p = params(gamma / 4.0, gamma, 1.0);
            assert_eq!(optimal_time(&p).unwrap(), 4.0 / gamma);
        }
    }

    #[test]
    fn optimal_time_lossless_is_quarter_period() {
        let p = params(0.8, 0.0, 1.0);
        assert_eq!(optimal_time(&p).unwrap(), std::f64::consts::FRAC_PI_2 / 0.8);
    }

    #[test]
    fn optimal_time_rejects_uncoupled() {
        let p = params(0.0, 1.0, 1.0);
        assert_eq!(optimal_time(&p), Err(EnergeticsError::NoCharging));
    }

    #[test]
    fn optimal_energy_consistent_with_trace() {
        for (g, gamma) in [(2.0, 1.0), (0.1, 1.0), (0.25, 1.0), (10.0, 1.0)] {
            let p = params(g, gamma, 1.0);
            let opt = optimal_energy(&p).unwrap();
            let direct = stored_energy(&p, opt.t_e).unwrap();
            assert!(
                (opt.e_max - direct).abs() < 1e-12 * opt.e_max,
                "g={g}: {} vs {direct}",
                opt.e_max
            );
            // Neighbour points are lower (maximality).
            for delta in [1e-3, 1e-2] {
                for sign in [-1.0, 1.0] {
                    let t = (opt.t_e + sign * delta / gamma).max(0.0);
                    assert!(stored_energy(&p, t).unwrap() <= opt.e_max * (1.0 + 1e-12));
                }
            }
        }
    }

    #[test]
    fn optimal_energy_closed_forms_cross_route() {
        // Underdamped: omega C exp(-(gamma/2G) arccot(gamma/4G)), written
        // through arctan; overdamped the arccoth route.
        let p = params(2.0, 1.0, 1.0);
        let g_big = p.classify_regime().rate;
        let printed =
            p.enhancement_factor() * (-(p.gamma / (2.0 * g_big)) * (4.0 * g_big / p.gamma).atan()).exp();
        let opt = optimal_energy(&p).unwrap();
        assert!((opt.e_max - printed).abs() < 1e-14 * printed);

        let p2 = params(0.1, 1.0, 1.0);
        let big_gamma = p2.classify_regime().rate;
        let printed2 = p2.enhancement_factor()
            * (-(p2.gamma / (2.0 * big_gamma)) * (4.0 * big_gamma / p2.gamma).atanh()).exp();
        let opt2 = optimal_energy(&p2).unwrap();
        assert!((opt2.e_max - printed2).abs() < 1e-13 * printed2);
    }

    #[test]
    fn optimal_energy_ep_value() {
        let p = params(0.25, 1.0, 1.0);
        let opt = optimal_energy(&p).unwrap();
        let expect = p.enhancement_factor() * (-2.0f64).exp();
        assert!((opt.e_max - expect).abs() < 1e-15 * expect);
        assert!((expect / p.enhancement_factor() - 0.135_335_283_236_612_7).abs() < 1e-15);
    }

    #[test]
    fn weak_coupling_asymptotics() {
        let p = params(0.01, 1.0, 1.0);
        let t_asym = asymptotic_optimal_time(&p, CouplingLimit::Weak).unwrap();
        assert!((t_asym - 15.648_092_021_712_583).abs() < 1e-10);
        let t_e = optimal_time(&p).unwrap();
        assert!((t_e - t_asym).abs() / t_e < 0.05);

        let e_asym = asymptotic_optimal_energy(&p, CouplingLimit::Weak).unwrap();
        let e_max = optimal_energy(&p).unwrap().e_max;
        assert!((e_max - e_asym).abs() / e_max < 0.05);
        assert!((e_asym / p.enhancement_factor() - 4e-4).abs() < 1e-18);
    }

    #[test]
    fn strong_coupling_asymptotics() {
        let p = params(10.0, 1.0, 1.0);
        let t_asym = asymptotic_optimal_time(&p, CouplingLimit::Strong).unwrap();
        assert!((t_asym - 0.154_579_632_679_489_65).abs() < 1e-14);
        let t_e = optimal_time(&p).unwrap();
        assert!((t_e - t_asym).abs() / t_e < 0.01);

        let e_asym = asymptotic_optimal_energy(&p, CouplingLimit::Strong).unwrap();
        let e_max = optimal_energy(&p).unwrap().e_max;
        assert!((e_max - e_asym).abs() / e_max < 0.01);

        // gamma = 0 reduces the strong form to the lossless quarter period.
        let p0 = params(10.0, 0.0, 1.0);
        assert_eq!(
            asymptotic_optimal_time(&p0, CouplingLimit::Strong).unwrap(),
            std::f64::consts::FRAC_PI_2 / 10.0
        );
    }

    #[test]
    fn excitation_fraction_identity_and_peak() {
        let p = params(2.0, 1.0, 1.7);
        for t in [0.0, 0.3, 0.9, 2.2] {
            let frac = excitation_fraction(&p, t).unwrap();
            let holder = population_holder(&p, t).unwrap();
            assert!((holder - p.enhancement_factor() * frac).abs() < 1e-15 * holder.max(1e-300));
        }
        // At the optimal time, P = exp(-gamma t_E / 2).
        let t_e = optimal_time(&p).unwrap();
        let frac = excitation_fraction(&p, t_e).unwrap();
        assert!((frac - (-0.5 * p.gamma * t_e).exp()).abs() < 1e-13);
        // Lossless transfer peaks at one.
        let p0 = params(0.5, 0.0, 1.0);
        let peak = excitation_fraction(&p0, std::f64::consts::FRAC_PI_2 / 0.5).unwrap();
        assert!((peak - 1.0).abs() < 1e-14);
    }

    #[test]
    fn discriminant_limits() {
        let p = params(2.0, 1.0, 0.0);
        assert_eq!(passive_discriminant(&p, 0.7).unwrap(), 1.0);
        let p0 = params(0.5, 0.0, 1.0);
        // Full transfer: P = 1 so D = 1 (pure squeezed holder).
        let d = passive_discriminant(&p0, std::f64::consts::FRAC_PI_2 / 0.5).unwrap();
        assert!((d - 1.0).abs() < 1e-12);
        assert!(passive_discriminant(&params(2.0, 1.0, 1.5), 0.8).unwrap() >= 1.0);
    }

    #[test]
    fn ergotropy_sandwich_and_consistency() {
        let p = params(2.0, 1.0, 1.3);
        let scale = p.omega_b * p.enhancement_factor();
        for i in 0..60 {
            let t = 0.1 * i as f64;
            let rec = ergotropy_record(&p, t).unwrap();
            let frac = rec.excitation_fraction;
            assert!((rec.ergotropy - (rec.energy - rec.passive_energy)).abs() < 1e-12 * scale);
            assert!(rec.ergotropy >= scale * frac * frac - 1e-12 * scale);
            assert!(rec.ergotropy <= scale * frac + 1e-12 * scale);
            assert!(rec.energy >= 0.0 && rec.passive_energy >= 0.0);
            assert!(rec.discriminant >= 1.0);
        }
    }

    #[test]
    fn weak_drive_ergotropy_is_quadratic() {
        let p = params(2.0, 1.0, 0.01);
        let scale = p.omega_b * p.enhancement_factor();
        for i in 1..=30 {
            let t = 0.1 * i as f64;
            let rec = ergotropy_record(&p, t).unwrap();
            let quadratic = scale * rec.excitation_fraction * rec.excitation_fraction;
            let denom = rec.ergotropy.max(1e-30);
            assert!(
                (rec.ergotropy - quadratic).abs() / denom < 1e-2,
                "t={t}: {} vs {quadratic}",
                rec.ergotropy
            );
        }
    }

    #[test]
    fn strong_drive_ergotropy_approaches_energy() {
        let p = params(2.0, 1.0, 5.0);
        let t_e = optimal_time(&p).unwrap();
        let rec = ergotropy_record(&p, t_e).unwrap();
        assert!(rec.ergotropy / rec.energy > 0.99, "{}", rec.ergotropy / rec.energy);
    }

    #[test]
    fn near_ep_matches_expansion_route() {
        let gamma = 1.0;
        for sign in [-1.0, 1.0] {
            let g = gamma / 4.0 * (1.0 + sign * 1e-6);
            let p = params(g, gamma, 1.0);
            for gt in [0.5, 1.0, 4.0, 8.0] {
                let direct = stored_energy(&p, gt / gamma).unwrap();
                let expansion = stored_energy_ep_expansion(&p, gt / gamma).unwrap();
                assert!(
                    (direct - expansion).abs() < 1e-10 * direct,
                    "g={g} gt={gt}: {direct} vs {expansion}"
                );
            }
        }
    }

    #[test]
    fn rejects_negative_time() {
        let p = params(2.0, 1.0, 1.0);
        assert!(matches!(stored_energy(&p, -1.0), Err(EnergeticsError::InvalidTime(_))));
        assert!(matches!(ergotropy_record(&p, f64::NAN), Err(EnergeticsError::InvalidTime(_))));
    }
}
