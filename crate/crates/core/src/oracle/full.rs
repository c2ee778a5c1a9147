//! Lab-frame Lindblad right-hand side on the full density matrix.
//!
//! This is the plain route: rho stored as a dense D x D matrix over a
//! [`FockBasis`], evolved under the commutator with
//! H = omega_b (n_a + n_b) + g (a'b + b'a) plus the charger loss
//! dissipator, and in the finite-pulse mode the time-dependent
//! quadratic drive (Omega/2) f(t) (a'a' + aa). Used directly for modest
//! cutoffs and as the independent check of the block-frame integrator.

use num_complex::Complex64 as C64;

use super::basis::FockBasis;
use crate::moments::SecondMoments;

/// Sparse action table of the lab-frame generator on one basis.
pub(crate) struct HopTable {
    dim: usize,
    /// Static off-diagonal H hops per basis point: (neighbor, weight).
    hops: Vec<Vec<(u32, f64)>>,
    /// Drive hops (a'a' + aa), scaled by the profile at call time.
    drive_hops: Vec<Vec<(u32, f64)>>,
    /// omega_b (n_a + n_b) diagonal.
    diag: Vec<f64>,
    /// Loss feed target (n_a + 1, n_b) and factor sqrt(n_a + 1), if any.
    up_a: Vec<Option<(u32, f64)>>,
    /// n_a per point.
    pops_a: Vec<f64>,
    gamma: f64,
}

impl HopTable {
    pub fn new(basis: &FockBasis, omega_b: f64, g: f64, gamma: f64) -> Self {
        let dim = basis.len();
        let mut hops = vec![Vec::new(); dim];
        let mut drive_hops = vec![Vec::new(); dim];
        let mut diag = vec![0.0; dim];
        let mut up_a = vec![None; dim];
        let mut pops_a = vec![0.0; dim];
        for (r, &(na, nb)) in basis.states().iter().enumerate() {
            let (na, nb) = (na as i64, nb as i64);
            diag[r] = omega_b * (na + nb) as f64;
            pops_a[r] = na as f64;
            if g != 0.0 {
                // a'b : |na-1, nb+1> -> |na, nb>
                if let Some(k) = basis.index_of(na - 1, nb + 1) {
                    hops[r].push((k as u32, g * ((na as f64) * (nb as f64 + 1.0)).sqrt()));
                }
                // b'a : |na+1, nb-1> -> |na, nb>
                if let Some(k) = basis.index_of(na + 1, nb - 1) {
                    hops[r].push((k as u32, g * ((na as f64 + 1.0) * (nb as f64)).sqrt()));
                }
            }
            // a'a' : |na-2, nb> -> |na, nb>; aa : |na+2, nb> -> |na, nb>
            if let Some(k) = basis.index_of(na - 2, nb) {
                drive_hops[r].push((k as u32, ((na - 1) as f64 * na as f64).sqrt()));
            }
            if let Some(k) = basis.index_of(na + 2, nb) {
                drive_hops[r].push((k as u32, ((na as f64 + 1.0) * (na as f64 + 2.0)).sqrt()));
            }
            if let Some(k) = basis.index_of(na + 1, nb) {
                up_a[r] = Some((k as u32, (na as f64 + 1.0).sqrt()));
            }
        }
        Self { dim, hops, drive_hops, diag, up_a, pops_a, gamma }
    }

    /// dy = i[y, H(t)] + dissipator(y), with `drive` the instantaneous
    /// quadratic-drive amplitude (Omega/2) f(t).
    pub fn rhs(&self, drive: f64, y: &[C64], dy: &mut [C64]) {
        let d = self.dim;
        let i_unit = C64::new(0.0, 1.0);
        for r in 0..d {
            let row = r * d;
            for c in 0..d {
                // (H y)[r,c]
                let mut h_left = self.diag[r] * y[row + c];
                for &(k, w) in &self.hops[r] {
                    h_left += w * y[k as usize * d + c];
                }
                // (y H)[r,c]; H is real symmetric in the number basis.
                let mut h_right = self.diag[c] * y[row + c];
                for &(k, w) in &self.hops[c] {
                    h_right += w * y[row + k as usize];
                }
                if drive != 0.0 {
                    for &(k, w) in &self.drive_hops[r] {
                        h_left += drive * w * y[k as usize * d + c];
                    }
                    for &(k, w) in &self.drive_hops[c] {
                        h_right += drive * w * y[row + k as usize];
                    }
                }
                let mut acc = i_unit * (h_right - h_left);
                // gamma/2 (2 a y a' - n_a y - y n_a)
                if self.gamma != 0.0 {
                    if let (Some((ka, wa)), Some((kc, wc))) = (self.up_a[r], self.up_a[c]) {
                        acc += self.gamma * wa * wc * y[ka as usize * d + kc as usize];
                    }
                    acc -= 0.5 * self.gamma * (self.pops_a[r] + self.pops_a[c]) * y[row + c];
                }
                dy[row + c] = acc;
            }
        }
    }
}

/// Expectation values of the quadratic observables from a dense rho.
pub(crate) fn dense_moments(basis: &FockBasis, rho: &[C64]) -> (SecondMoments, C64, C64, f64) {
    let d = basis.len();
    let zero = C64::new(0.0, 0.0);
    let (mut n_a, mut n_b) = (0.0f64, 0.0f64);
    let mut coh = zero;
    let (mut sq_aa, mut sq_bb, mut sq_ab) = (zero, zero, zero);
    let (mut mean_a, mut mean_b) = (zero, zero);
    let mut trace = 0.0f64;
    for (k, &(ka, kb)) in basis.states().iter().enumerate() {
        let (ka, kb) = (ka as i64, kb as i64);
        let row = k * d;
        let diag = rho[row + k];
        trace += diag.re;
        n_a += ka as f64 * diag.re;
        n_b += kb as f64 * diag.re;
        // <a'b> = sum sqrt((ka+1) kb) rho[k, (ka+1, kb-1)]
        if let Some(r) = basis.index_of(ka + 1, kb - 1) {
            coh += ((ka as f64 + 1.0) * kb as f64).sqrt() * rho[row + r];
        }
        if let Some(r) = basis.index_of(ka - 1, kb) {
            mean_a += (ka as f64).sqrt() * rho[row + r];
        }
        if let Some(r) = basis.index_of(ka, kb - 1) {
            mean_b += (kb as f64).sqrt() * rho[row + r];
        }
        if let Some(r) = basis.index_of(ka - 2, kb) {
            sq_aa += (ka as f64 * (ka as f64 - 1.0)).sqrt() * rho[row + r];
        }
        if let Some(r) = basis.index_of(ka, kb - 2) {
            sq_bb += (kb as f64 * (kb as f64 - 1.0)).sqrt() * rho[row + r];
        }
        if let Some(r) = basis.index_of(ka - 1, kb - 1) {
            sq_ab += (ka as f64 * kb as f64).sqrt() * rho[row + r];
        }
    }
    let moments = SecondMoments { n_a, n_b, coh_ab: coh, sq_aa, sq_bb, sq_ab };
    (moments, mean_a, mean_b, trace)
}
