//! Closed linear dynamics of the two-mode second moments after the
//! pulse: a four-component population block and a three-component
//! squeeze block, both propagated by matrix exponentials.
//!
//! The population block evolves as i d(psi)/dt = M psi with
//! psi = (<a'a>, <b'b>, <a'b>, <b'a>); M carries no omega_b because the
//! populations live in a frame where the common level spacing drops out.
//! The squeeze block xi = (<aa>, <bb>, <ab>) keeps the explicit
//! 2 omega_b phase rotation; its derivative matrix follows from the
//! adjoint master equation:
//!
//! d<aa>/dt = -(2 i omega_b + gamma) <aa> - 2 i g <ab>
//! d<bb>/dt = -2 i omega_b <bb> - 2 i g <ab>
//! d<ab>/dt = -(2 i omega_b + gamma/2) <ab> - i g (<aa> + <bb>)
//!
//! These coefficients are re-derived from the commutators of the mode
//! operators with the coupling Hamiltonian and the loss dissipator, and
//! cross-checked against the Fock-space oracle in the integration tests.

use num_complex::Complex64 as C64;

use crate::error::MomentError;
use crate::linalg::{expm, CMat};
use crate::params::BatteryParams;

/// The ten independent real degrees of freedom of the Gaussian state:
/// two real populations, one complex cross coherence and three complex
/// squeeze moments. Conjugate partners (<b'a>, <a'a'>, ...) are implied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SecondMoments {
    /// <a'a>
    pub n_a: f64,
    /// <b'b>
    pub n_b: f64,
    /// <a'b>
    pub coh_ab: C64,
    /// <aa>
    pub sq_aa: C64,
    /// <bb>
    pub sq_bb: C64,
    /// <ab>
    pub sq_ab: C64,
}

impl SecondMoments {
    pub fn zero() -> Self {
        let z = C64::new(0.0, 0.0);
        Self { n_a: 0.0, n_b: 0.0, coh_ab: z, sq_aa: z, sq_bb: z, sq_ab: z }
    }

    /// Scale every moment; handy for linearity checks.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            n_a: factor * self.n_a,
            n_b: factor * self.n_b,
            coh_ab: self.coh_ab * factor,
            sq_aa: self.sq_aa * factor,
            sq_bb: self.sq_bb * factor,
            sq_ab: self.sq_ab * factor,
        }
    }
}

/// The linear generators of the post-pulse moment dynamics.
#[derive(Debug, Clone, PartialEq)]
pub struct DynamicalMatrix {
    /// 4x4 block M with i d(psi)/dt = M psi.
    pub population: CMat,
    /// 3x3 block S with d(xi)/dt = S xi.
    pub squeeze: CMat,
}

impl DynamicalMatrix {
    pub fn new(p: &BatteryParams) -> Self {
        Self { population: build_population_matrix(p), squeeze: build_squeeze_matrix(p) }
    }
}

/// Population-block matrix M of i d(psi)/dt = M psi,
/// psi = (<a'a>, <b'b>, <a'b>, <b'a>).
pub fn build_population_matrix(p: &BatteryParams) -> CMat {
    let z = C64::new(0.0, 0.0);
    let g = C64::new(p.g, 0.0);
    let mig = -g;
    let d_a = C64::new(0.0, -p.gamma);
    let d_c = C64::new(0.0, -0.5 * p.gamma);
    CMat::from_rows(&[
        &[d_a, z, g, mig],
        &[z, z, mig, g],
        &[g, mig, d_c, z],
        &[mig, g, z, d_c],
    ])
}

/// Squeeze-block generator S of d(xi)/dt = S xi, xi = (<aa>, <bb>, <ab>).
pub fn build_squeeze_matrix(p: &BatteryParams) -> CMat {
    let z = C64::new(0.0, 0.0);
    let two_omega = 2.0 * p.omega_b;
    let m2ig = C64::new(0.0, -2.0 * p.g);
    let mig = C64::new(0.0, -p.g);
    CMat::from_rows(&[
        &[C64::new(-p.gamma, -two_omega), z, m2ig],
        &[z, C64::new(0.0, -two_omega), m2ig],
        &[mig, mig, C64::new(-0.5 * p.gamma, -two_omega)],
    ])
}

/// Moments immediately after the instantaneous pulse acting on the
/// two-mode vacuum: the charger holds a squeezed vacuum with
/// n_a = sinh^2(Omega) and <aa> = -i sinh(Omega) cosh(Omega); the holder
/// is empty and all cross moments vanish. The <aa> phase follows from
/// the squeeze unitary exp(-i (Omega/2)(a'a' + aa)) and is checked
/// against the oracle's matrix-exponential construction.
pub fn post_pulse_moments(omega_drive: f64) -> SecondMoments {
    let z = C64::new(0.0, 0.0);
    let sh = omega_drive.sinh();
    let ch = omega_drive.cosh();
    SecondMoments {
        n_a: sh * sh,
        n_b: 0.0,
        coh_ab: z,
        sq_aa: C64::new(0.0, -sh * ch),
        sq_bb: z,
        sq_ab: z,
    }
}

fn validate_grid(t_grid: &[f64]) -> Result<(), MomentError> {
    let mut prev = 0.0f64;
    for (i, &t) in t_grid.iter().enumerate() {
        if !t.is_finite() || t < 0.0 {
            return Err(MomentError::InvalidGrid(format!("t[{i}] = {t}")));
        }
        if t < prev {
            return Err(MomentError::InvalidGrid(format!("t[{i}] = {t} < t[{}] = {prev}", i - 1)));
        }
        prev = t;
    }
    Ok(())
}

/// Propagate `initial` (taken at t = 0) through the closed linear blocks
/// and return the moments at each grid time. Steps are taken with the
/// exact matrix exponential of each grid interval, so the only error is
/// the exponential's own roundoff.
pub fn propagate_moments(
    initial: &SecondMoments,
    p: &BatteryParams,
    t_grid: &[f64],
) -> Result<Vec<SecondMoments>, MomentError> {
    validate_grid(t_grid)?;
    let m = build_population_matrix(p);
    // Generator of the population flow: d(psi)/dt = -i M psi.
    let generator = m.scale(C64::new(0.0, -1.0));
    let squeeze = build_squeeze_matrix(p);

    let mut psi = vec![
        C64::new(initial.n_a, 0.0),
        C64::new(initial.n_b, 0.0),
        initial.coh_ab,
        initial.coh_ab.conj(),
    ];
    let mut xi = vec![initial.sq_aa, initial.sq_bb, initial.sq_ab];

    let mut out = Vec::with_capacity(t_grid.len());
    let mut t_prev = 0.0f64;
    let mut cached: Option<(f64, CMat, CMat)> = None;
    for &t in t_grid {
        let dt = t - t_prev;
        if dt > 0.0 {
            let reuse = matches!(&cached, Some((h, _, _)) if (*h - dt).abs() <= 1e-14 * dt.max(*h));
            if !reuse {
                let prop_pop = expm(&generator.scale(C64::new(dt, 0.0)));
                let prop_sq = expm(&squeeze.scale(C64::new(dt, 0.0)));
                cached = Some((dt, prop_pop, prop_sq));
            }
            let (_, prop_pop, prop_sq) = cached.as_ref().unwrap();
            psi = prop_pop.matvec(&psi);
            xi = prop_sq.matvec(&xi);
        }
        t_prev = t;

        let residue = psi[0].im.abs().max(psi[1].im.abs());
        if residue > 1e-8 * (1.0 + psi[0].norm() + psi[1].norm()) {
            return Err(MomentError::IntegrationFailure(format!(
                "population block left the real axis: imaginary residue {residue:.3e} at t = {t}"
            )));
        }
        out.push(SecondMoments {
            n_a: psi[0].re,
            n_b: psi[1].re,
            coh_ab: psi[2],
            sq_aa: xi[0],
            sq_bb: xi[1],
            sq_ab: xi[2],
        });
    }
    Ok(out)
}

/// Energetic content of a holder state described by Gaussian moments.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PassiveDecomposition {
    /// Stored energy omega_b <b'b>.
    pub energy: f64,
    /// Passive-state energy omega_b (sqrt(D) - 1)/2.
    pub passive_energy: f64,
    /// Extractable work: energy - passive_energy, clamped at zero
    /// against roundoff no larger than 1e-10 omega_b.
    pub ergotropy: f64,
    /// D = (1 + 2<b'b>)^2 - 4 |<bb>|^2.
    pub discriminant: f64,
}

/// Evaluate stored energy, passive energy and ergotropy from the holder
/// moments. Errors on discriminants below 1 - 1e-6 or clearly negative
/// populations; smaller violations are treated as roundoff.
pub fn gaussian_ergotropy_from_moments(
    m: &SecondMoments,
    omega_b: f64,
) -> Result<PassiveDecomposition, MomentError> {
    let n_b = m.n_b;
    let d = (1.0 + 2.0 * n_b) * (1.0 + 2.0 * n_b) - 4.0 * m.sq_bb.norm_sqr();
    if d < 1.0 - 1e-6 || n_b < -1e-10 {
        return Err(MomentError::UnphysicalMoments { d });
    }
    let n_b = n_b.max(0.0);
    let energy = omega_b * n_b;
    let u = (d - 1.0).max(0.0);
    let passive_energy = omega_b * u / (2.0 * ((1.0 + u).sqrt() + 1.0));
    let raw = energy - passive_energy;
    if raw < -1e-10 * omega_b {
        return Err(MomentError::UnphysicalMoments { d });
    }
    Ok(PassiveDecomposition {
        energy,
        passive_energy,
        ergotropy: raw.max(0.0),
        discriminant: d,
    })
}
