//! Brute-force ground truth: the master equation integrated for the
//! density matrix on a truncated two-mode Fock space, with the squeeze
//! pulse applied either as an exact truncated unitary (delta pulse) or
//! as an explicit time-dependent drive (finite width).
//!
//! Two integration routes are provided and cross-checked against each
//! other in the tests:
//!
//! * [`run_delta_trace`]: the certification workhorse. Post-pulse
//!   dynamics conserve the bra/ket total-excitation offset, so the
//!   density matrix is evolved block-wise in the frame co-rotating with
//!   the coherent flow (see [`blocks`]); only the slow dissipative
//!   motion is integrated numerically and large squeeze cutoffs stay
//!   affordable.
//! * [`integrate`] / [`finite_width_pulse_run`]: plain lab-frame
//!   evolution of the dense matrix, for modest cutoffs and for the
//!   time-dependent pulse where no frame trick applies.

mod basis;
mod blocks;
mod full;
mod squeeze;

pub use basis::FockBasis;
pub use squeeze::{
    build_mode_operators, certified_cutoff, squeezed_vacuum_amplitudes, top_level_weight,
    ModeOperators, MAX_ORACLE_CUTOFF, TRUNCATION_CERT_LIMIT,
};

use num_complex::Complex64 as C64;

use crate::energetics::EnergyRecord;
use crate::error::OracleError;
use crate::linalg::hermitian_eigenvalues;
use crate::linalg::CMat;
use crate::moments::{gaussian_ergotropy_from_moments, SecondMoments};
use crate::ode::{integrate_adaptive, AdaptiveOptions};
use crate::params::{BatteryParams, PulseShape, PulseSpec};
use blocks::BlockState;
use full::{dense_moments, HopTable};

/// Maximum allowed trace drift of a reported state.
pub const TRACE_TOL: f64 = 1e-8;
/// Maximum allowed Hermiticity violation of a reported state.
pub const HERMITICITY_TOL: f64 = 1e-10;

/// Density matrix on a truncated two-mode Fock space.
#[derive(Debug, Clone)]
pub struct TruncatedState {
    pub basis: FockBasis,
    /// Row-major D x D matrix, D = basis.len().
    pub rho: Vec<C64>,
    pub t: f64,
}

impl TruncatedState {
    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn trace(&self) -> f64 {
        let d = self.dim();
        (0..d).map(|k| self.rho[k * d + k].re).sum()
    }

    pub fn hermiticity_error(&self) -> f64 {
        let d = self.dim();
        let mut worst = 0.0f64;
        for r in 0..d {
            for c in r..d {
                let diff = (self.rho[r * d + c] - self.rho[c * d + r].conj()).norm();
                worst = worst.max(diff);
            }
        }
        worst
    }

    /// Population resting on the highest retained Fock levels: the top
    /// total-excitation shell for a capped basis, the union of the two
    /// per-mode top shells for a rectangular one.
    pub fn truncation_weight(&self) -> f64 {
        let d = self.dim();
        let mut w = 0.0f64;
        for (k, &(na, nb)) in self.basis.states().iter().enumerate() {
            let hit = match self.basis.cap() {
                Some(cap) => (na + nb) as usize == cap,
                None => na as usize == self.basis.n_max_a() || nb as usize == self.basis.n_max_b(),
            };
            if hit {
                w += self.rho[k * d + k].re;
            }
        }
        w
    }

    /// Smallest eigenvalue of rho (positivity diagnostic); only offered
    /// for dimensions where the dense Hermitian solve is cheap.
    pub fn smallest_eigenvalue(&self) -> Option<f64> {
        let d = self.dim();
        if d > 600 {
            return None;
        }
        let mut m = CMat::zeros(d, d);
        for r in 0..d {
            for c in 0..d {
                m[(r, c)] = self.rho[r * d + c];
            }
        }
        hermitian_eigenvalues(&m).first().copied()
    }

    /// Second moments plus first moments (<a>, <b>).
    pub fn moments(&self) -> (SecondMoments, C64, C64) {
        let (m, a, b, _) = dense_moments(&self.basis, &self.rho);
        (m, a, b)
    }

    fn validate(&self) -> Result<(), OracleError> {
        let trace_err = (self.trace() - 1.0).abs();
        if trace_err > TRACE_TOL {
            return Err(OracleError::StateInvariant(format!(
                "trace drifted by {trace_err:.3e} at t = {}",
                self.t
            )));
        }
        let herm = self.hermiticity_error();
        if herm > HERMITICITY_TOL {
            return Err(OracleError::StateInvariant(format!(
                "hermiticity violated by {herm:.3e} at t = {}",
                self.t
            )));
        }
        Ok(())
    }
}

/// One reported time point of an oracle run.
#[derive(Debug, Clone)]
pub struct OracleReport {
    pub t: f64,
    pub moments: SecondMoments,
    pub mean_a: C64,
    pub mean_b: C64,
    pub energy: EnergyRecord,
    pub truncation_weight: f64,
    pub trace_error: f64,
    pub hermiticity_error: f64,
}

fn energy_record_from_moments(
    p: &BatteryParams,
    t: f64,
    m: &SecondMoments,
) -> Result<EnergyRecord, OracleError> {
    let dec = gaussian_ergotropy_from_moments(m, p.omega_b)
        .map_err(|e| OracleError::StateInvariant(e.to_string()))?;
    let enhancement = p.enhancement_factor();
    let fraction = if enhancement > 0.0 { m.n_b / enhancement } else { 0.0 };
    Ok(EnergyRecord {
        t,
        energy: dec.energy,
        passive_energy: dec.passive_energy,
        ergotropy: dec.ergotropy,
        discriminant: dec.discriminant,
        excitation_fraction: fraction,
    })
}

fn validate_grid(t_grid: &[f64]) -> Result<(), OracleError> {
    let mut prev = 0.0f64;
    for &t in t_grid {
        if !t.is_finite() || t < 0.0 || t < prev {
            return Err(OracleError::InvalidGrid(format!("offending entry {t}")));
        }
        prev = t;
    }
    Ok(())
}

/// Options for [`run_delta_trace`].
#[derive(Debug, Clone)]
pub struct DeltaTraceOptions {
    /// Per-mode cutoff; defaults to [`certified_cutoff`] of the drive.
    pub n_max: Option<usize>,
    pub rel_tol: f64,
    /// Fail with `TruncationInsufficient` when a report exceeds the
    /// certification limit. Disable to collect uncertified data.
    pub certify: bool,
    /// Drop drained top sectors as the excitation decays.
    pub shrink_window: bool,
}

impl Default for DeltaTraceOptions {
    fn default() -> Self {
        Self { n_max: None, rel_tol: 1e-8, certify: true, shrink_window: true }
    }
}

/// Evolve the delta-pulse initial state (squeezed charger, empty holder)
/// and report lab-frame moments and energetics at each grid time.
pub fn run_delta_trace(
    p: &BatteryParams,
    t_grid: &[f64],
    opts: &DeltaTraceOptions,
) -> Result<Vec<OracleReport>, OracleError> {
    validate_grid(t_grid)?;
    let n_cap = match opts.n_max {
        Some(n) => n,
        None => {
            let n = certified_cutoff(p.omega_drive);
            if n > MAX_ORACLE_CUTOFF {
                return Err(OracleError::CutoffInfeasible { requested: n, limit: MAX_ORACLE_CUTOFF });
            }
            n
        }
    };
    if n_cap < 2 {
        return Err(OracleError::InvalidCutoff(n_cap));
    }
    let psi = squeezed_vacuum_amplitudes(p.omega_drive, n_cap)?;
    if opts.certify {
        let top = top_level_weight(&psi);
        if top > TRUNCATION_CERT_LIMIT {
            return Err(OracleError::TruncationInsufficient { weight: top, limit: TRUNCATION_CERT_LIMIT });
        }
    }
    let sq: Vec<f64> = (0..=n_cap + 2).map(|k| (k as f64).sqrt()).collect();
    let mut state = BlockState::from_charger_amplitudes(&psi);
    let mut reports = Vec::with_capacity(t_grid.len());
    let mut t_prev = 0.0f64;
    let mut h_init: Option<f64> = None;
    for &t in t_grid {
        if t > t_prev {
            let layout = state.layout.clone();
            let mut y = std::mem::take(&mut state.data);
            let stats = integrate_adaptive(
                &mut y,
                t_prev,
                t,
                |tt, y, dy| BlockState::rhs(&layout, &sq, p.g, p.gamma, tt, y, dy),
                &AdaptiveOptions {
                    rel_tol: opts.rel_tol,
                    abs_tol: 1e-13,
                    h_initial: h_init,
                    ..Default::default()
                },
            )
            .map_err(|e| OracleError::IntegrationFailure(e.to_string()))?;
            state.data = y;
            if stats.accepted > 0 {
                h_init = Some(stats.h_last);
            }
        }
        t_prev = t;

        let fm = state.frame_moments();
        let trace_error = (fm.trace - 1.0).abs();
        if trace_error > TRACE_TOL {
            return Err(OracleError::StateInvariant(format!(
                "trace drifted by {trace_error:.3e} at t = {t}"
            )));
        }
        if fm.hermiticity_error > HERMITICITY_TOL {
            return Err(OracleError::StateInvariant(format!(
                "hermiticity violated by {:.3e} at t = {t}",
                fm.hermiticity_error
            )));
        }
        let report = frame_report(p, t, &fm, trace_error)?;
        if opts.certify && report.truncation_weight > TRUNCATION_CERT_LIMIT {
            return Err(OracleError::TruncationInsufficient {
                weight: report.truncation_weight,
                limit: TRUNCATION_CERT_LIMIT,
            });
        }
        reports.push(report);
        if opts.shrink_window {
            state.shrink_window(1e-14);
        }
    }
    Ok(reports)
}

/// Rotate frame moments back to the lab: the coherent flow maps the
/// modes through a beam-splitter rotation of angle g t plus the common
/// exp(-i omega_b t) phase.
fn frame_report(
    p: &BatteryParams,
    t: f64,
    fm: &blocks::FrameMoments,
    trace_error: f64,
) -> Result<OracleReport, OracleError> {
    let (c, s) = if p.g == 0.0 { (1.0, 0.0) } else { ((p.g * t).cos(), (p.g * t).sin()) };
    let (c2, s2, cs) = (c * c, s * s, c * s);
    let ics = C64::new(0.0, cs);
    let phase = C64::new(0.0, -p.omega_b * t).exp();
    let phase2 = phase * phase;

    let n_a = c2 * fm.n_a + s2 * fm.n_b + 2.0 * cs * fm.coh_ab.im;
    let n_b = s2 * fm.n_a + c2 * fm.n_b - 2.0 * cs * fm.coh_ab.im;
    let coh_ab =
        fm.coh_ab * c2 + fm.coh_ab.conj() * s2 + C64::new(0.0, cs * (fm.n_b - fm.n_a));
    let sq_aa = phase2 * (fm.sq_aa * c2 - ics * fm.sq_ab * 2.0 - fm.sq_bb * s2);
    let sq_bb = phase2 * (fm.sq_bb * c2 - ics * fm.sq_ab * 2.0 - fm.sq_aa * s2);
    let sq_ab = phase2 * (fm.sq_ab * (c2 - s2) - ics * (fm.sq_aa + fm.sq_bb));
    let mean_a = phase * (fm.mean_a * c - C64::new(0.0, s) * fm.mean_b);
    let mean_b = phase * (fm.mean_b * c - C64::new(0.0, s) * fm.mean_a);

    let moments = SecondMoments { n_a, n_b, coh_ab, sq_aa, sq_bb, sq_ab };
    let energy = energy_record_from_moments(p, t, &moments)?;
    Ok(OracleReport {
        t,
        moments,
        mean_a,
        mean_b,
        energy,
        truncation_weight: fm.top_sector_weight,
        trace_error,
        hermiticity_error: fm.hermiticity_error,
    })
}

/// Apply the instantaneous squeeze to the two-mode vacuum: the charger
/// carries exp(-i (Omega/2)(a'a' + aa)) |0>, the holder stays empty.
/// Errors when the top retained level holds more than the certification
/// limit.
pub fn squeeze_vacuum(omega_drive: f64, n_max: usize) -> Result<TruncatedState, OracleError> {
    let psi = squeezed_vacuum_amplitudes(omega_drive, n_max)?;
    let top = top_level_weight(&psi);
    if top > TRUNCATION_CERT_LIMIT {
        return Err(OracleError::TruncationInsufficient { weight: top, limit: TRUNCATION_CERT_LIMIT });
    }
    let basis = FockBasis::capped(n_max);
    let d = basis.len();
    let mut rho = vec![C64::new(0.0, 0.0); d * d];
    for (r, &(ra, rb)) in basis.states().iter().enumerate() {
        if rb != 0 {
            continue;
        }
        for (c, &(ca, cb)) in basis.states().iter().enumerate() {
            if cb != 0 {
                continue;
            }
            rho[r * d + c] = psi[ra as usize] * psi[ca as usize].conj();
        }
    }
    Ok(TruncatedState { basis, rho, t: 0.0 })
}

/// Evolve a truncated state under the coupled lossy dynamics (no drive)
/// up to `t_final` with the dense lab-frame integrator.
pub fn integrate(
    state: &TruncatedState,
    p: &BatteryParams,
    t_final: f64,
    rel_tol: f64,
) -> Result<TruncatedState, OracleError> {
    if !t_final.is_finite() || t_final < state.t {
        return Err(OracleError::InvalidTime(t_final));
    }
    let table = HopTable::new(&state.basis, p.omega_b, p.g, p.gamma);
    let mut rho = state.rho.clone();
    integrate_adaptive(
        &mut rho,
        state.t,
        t_final,
        |_, y, dy| table.rhs(0.0, y, dy),
        &AdaptiveOptions { rel_tol, abs_tol: 1e-13, ..Default::default() },
    )
    .map_err(|e| OracleError::IntegrationFailure(e.to_string()))?;
    let out = TruncatedState { basis: state.basis.clone(), rho, t: t_final };
    out.validate()?;
    Ok(out)
}

/// Report the lab-frame observables of a dense state.
pub fn extract_report(state: &TruncatedState, p: &BatteryParams) -> Result<OracleReport, OracleError> {
    let (moments, mean_a, mean_b, trace) = dense_moments(&state.basis, &state.rho);
    let energy = energy_record_from_moments(p, state.t, &moments)?;
    Ok(OracleReport {
        t: state.t,
        moments,
        mean_a,
        mean_b,
        energy,
        truncation_weight: state.truncation_weight(),
        trace_error: (trace - 1.0).abs(),
        hermiticity_error: state.hermiticity_error(),
    })
}

/// Normalized temporal profile of a finite pulse, supported on
/// [0, window]: rectangular over one width, or a Gaussian of standard
/// deviation tau truncated to eight widths and renormalized to unit
/// integral.
#[derive(Debug, Clone, Copy)]
pub struct PulseProfile {
    shape: PulseShape,
    tau: f64,
    gauss_norm: f64,
}

impl PulseProfile {
    pub fn new(pulse: &PulseSpec) -> Result<Self, OracleError> {
        pulse.validate().map_err(OracleError::Param)?;
        match *pulse {
            PulseSpec::Delta => Err(OracleError::ExpectedFinitePulse),
            PulseSpec::FiniteWidth { tau, shape } => {
                let gauss_norm = match shape {
                    PulseShape::Rectangular => 1.0,
                    PulseShape::Gaussian => {
                        // Simpson normalization of the truncated Gaussian.
                        let n = 4096usize;
                        let h = 8.0 * tau / n as f64;
                        let f = |t: f64| (-((t - 4.0 * tau) / tau).powi(2) / 2.0).exp();
                        let mut acc = f(0.0) + f(8.0 * tau);
                        for k in 1..n {
                            acc += f(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
                        }
                        acc * h / 3.0
                    }
                };
                Ok(Self { shape, tau, gauss_norm })
            }
        }
    }

    /// End of the support interval.
    pub fn window(&self) -> f64 {
        match self.shape {
            PulseShape::Rectangular => self.tau,
            PulseShape::Gaussian => 8.0 * self.tau,
        }
    }

    /// Profile value with unit time integral over the window.
    pub fn eval(&self, t: f64) -> f64 {
        if t < 0.0 || t > self.window() {
            return 0.0;
        }
        match self.shape {
            PulseShape::Rectangular => 1.0 / self.tau,
            PulseShape::Gaussian => {
                (-((t - 4.0 * self.tau) / self.tau).powi(2) / 2.0).exp() / self.gauss_norm
            }
        }
    }
}

/// Options for [`finite_width_pulse_run`].
#[derive(Debug, Clone, Default)]
pub struct FinitePulseOptions {
    pub n_max_a: Option<usize>,
    pub n_max_b: Option<usize>,
    pub rel_tol: Option<f64>,
}

/// Integrate the full master equation with the time-dependent quadratic
/// drive, starting from the two-mode vacuum before the pulse, and report
/// at each grid time.
pub fn finite_width_pulse_run(
    p: &BatteryParams,
    pulse: &PulseSpec,
    t_grid: &[f64],
    opts: &FinitePulseOptions,
) -> Result<Vec<OracleReport>, OracleError> {
    validate_grid(t_grid)?;
    let profile = PulseProfile::new(pulse)?;
    let n_a_cut = opts
        .n_max_a
        .unwrap_or_else(|| ((certified_cutoff(p.omega_drive) * 5) / 4).max(8));
    let n_b_cut = opts.n_max_b.unwrap_or(if p.g == 0.0 { 4 } else { n_a_cut });
    let basis = FockBasis::rectangular(n_a_cut, n_b_cut);
    let d = basis.len();
    let mut rho = vec![C64::new(0.0, 0.0); d * d];
    let vac = basis.index_of(0, 0).expect("vacuum is always retained");
    rho[vac * d + vac] = C64::new(1.0, 0.0);

    let table = HopTable::new(&basis, p.omega_b, p.g, p.gamma);
    let half_drive = 0.5 * p.omega_drive;
    let rel_tol = opts.rel_tol.unwrap_or(1e-8);
    let mut reports = Vec::with_capacity(t_grid.len());
    let mut t_prev = 0.0f64;
    let mut h_init = Some((profile.window() / 400.0).max(1e-12));
    for &t in t_grid {
        if t > t_prev {
            integrate_adaptive(
                &mut rho,
                t_prev,
                t,
                |tt, y, dy| table.rhs(half_drive * profile.eval(tt), y, dy),
                &AdaptiveOptions { rel_tol, abs_tol: 1e-13, h_initial: h_init, ..Default::default() },
            )
            .map_err(|e| OracleError::IntegrationFailure(e.to_string()))?;
            h_init = Some((profile.window() / 400.0).max(1e-12));
        }
        t_prev = t;
        let state = TruncatedState { basis: basis.clone(), rho: rho.clone(), t };
        state.validate()?;
        reports.push(extract_report(&state, p)?);
    }
    Ok(reports)
}
