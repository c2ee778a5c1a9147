//! Squeezed-vacuum preparation on the truncated space.

use num_complex::Complex64 as C64;

use crate::error::OracleError;
use crate::linalg::{expm, CMat};

/// Weight allowed at the top retained level before a run counts as
/// truncation-certified.
pub const TRUNCATION_CERT_LIMIT: f64 = 1e-6;

/// Largest single-mode cutoff the oracle accepts by default.
pub const MAX_ORACLE_CUTOFF: usize = 200;

/// Single-mode ladder operators truncated at `n_max`.
#[derive(Debug, Clone)]
pub struct ModeOperators {
    annihilation: CMat,
}

impl ModeOperators {
    pub fn annihilation(&self) -> &CMat {
        &self.annihilation
    }

    pub fn creation(&self) -> CMat {
        self.annihilation.dagger()
    }

    pub fn number(&self) -> CMat {
        self.creation().matmul(&self.annihilation)
    }
}

/// Truncated annihilation matrix: sqrt(n) on the superdiagonal. The
/// commutator [a, a'] deviates from the identity only in the last
/// diagonal entry, which is the truncation artifact.
pub fn build_mode_operators(n_max: usize) -> Result<ModeOperators, OracleError> {
    if n_max < 1 {
        return Err(OracleError::InvalidCutoff(n_max));
    }
    let dim = n_max + 1;
    let mut a = CMat::zeros(dim, dim);
    for n in 1..dim {
        a[(n - 1, n)] = C64::new((n as f64).sqrt(), 0.0);
    }
    Ok(ModeOperators { annihilation: a })
}

/// Number-state amplitudes of exp(-i (Omega/2)(a'a' + aa)) |0> on the
/// truncated space. The truncated generator is anti-Hermitian, so the
/// amplitudes are exactly normalized; only even levels are populated.
pub fn squeezed_vacuum_amplitudes(omega_drive: f64, n_max: usize) -> Result<Vec<C64>, OracleError> {
    if n_max < 1 {
        return Err(OracleError::InvalidCutoff(n_max));
    }
    let dim = n_max + 1;
    let mut gen = CMat::zeros(dim, dim);
    let half = 0.5 * omega_drive;
    for n in 0..dim - 2 {
        // -i (Omega/2) aa: couples n+2 -> n; a'a' is the transpose.
        let k = ((n + 1) as f64 * (n + 2) as f64).sqrt();
        gen[(n, n + 2)] = C64::new(0.0, -half * k);
        gen[(n + 2, n)] = C64::new(0.0, -half * k);
    }
    let u = expm(&gen);
    let psi = u.column(0);
    let norm_sq: f64 = psi.iter().map(|z| z.norm_sqr()).sum();
    if (norm_sq - 1.0).abs() > 1e-10 {
        return Err(OracleError::StateInvariant(format!(
            "squeeze unitary lost normalization: |psi|^2 = {norm_sq}"
        )));
    }
    Ok(psi)
}

/// Weight sitting in the top two retained levels of the amplitudes;
/// the truncation certificate for the prepared state.
pub fn top_level_weight(psi: &[C64]) -> f64 {
    let n = psi.len();
    psi[n - 1].norm_sqr() + psi[n - 2].norm_sqr()
}

/// Smallest even cutoff whose squeezed-vacuum level population has
/// decayed a decade below the certification limit (the truncated
/// unitary piles a few times the ideal weight onto the edge levels),
/// never below the photon-number heuristic floor.
pub fn certified_cutoff(omega_drive: f64) -> usize {
    let sh = omega_drive.sinh();
    let ch = omega_drive.cosh();
    let floor = 20.0f64.max((10.0 * sh * sh + 6.0 * sh * ch).ceil());
    let floor = (floor as usize + 1) & !1;
    if omega_drive == 0.0 {
        return floor;
    }
    let tanh_sq = (sh / ch) * (sh / ch);
    // p_{2m} = p_{2m-2} tanh^2 (2m-1)/(2m), p_0 = 1/cosh.
    let mut p = 1.0 / ch;
    let mut n = 0usize;
    while p > 0.1 * TRUNCATION_CERT_LIMIT && n < 2 * MAX_ORACLE_CUTOFF {
        n += 2;
        let m = (n / 2) as f64;
        p *= tanh_sq * (2.0 * m - 1.0) / (2.0 * m);
    }
    n.max(floor)
}
