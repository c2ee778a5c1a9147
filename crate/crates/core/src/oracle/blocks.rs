//! Coherence-block representation of the post-pulse density matrix.
//!
//! After the pulse the Hamiltonian conserves the total excitation
//! N = n_a + n_b and the loss channel lowers bra and ket sectors
//! together, so the offset delta between the ket sector N and the bra
//! sector M is a constant of motion: the blocks rho^(N, N-delta) evolve
//! independently for each delta. Every reported quantity (populations,
//! cross coherence, squeeze moments, first moments) lives in
//! delta in {0, 1, 2}, so only those diagonals are stored. This is a
//! superselection property of the generator, not a Gaussian assumption:
//! any initial state expressed in the number basis evolves identically.
//!
//! The state is additionally kept in the frame co-rotating with the
//! coherent flow, i.e. rho_tilde(t) = U'(t) rho(t) U(t) with
//! U = exp(-iHt). In that frame only the slow, loss-driven part of the
//! motion remains: the dissipator acts through the rotated mode
//! a_t = cos(gt) a - i sin(gt) b (the global exp(-i omega_b t) phase
//! cancels), and the stiff coherent oscillations disappear from the
//! integrator entirely. Lab-frame moments are recovered exactly by the
//! inverse mode rotation at readout.

use num_complex::Complex64 as C64;

/// Offsets of the stored coherence diagonals.
const DELTAS: usize = 3;

#[derive(Debug, Clone)]
pub(crate) struct BlockLayout {
    pub cap: usize,
    /// offsets[delta][n - delta] is the flat offset of block (N = n, M = n - delta).
    offsets: [Vec<usize>; 3],
    pub total: usize,
}

impl BlockLayout {
    pub fn new(cap: usize) -> Self {
        let mut offsets: [Vec<usize>; 3] = [Vec::new(), Vec::new(), Vec::new()];
        let mut total = 0usize;
        for (delta, offs) in offsets.iter_mut().enumerate() {
            for n in delta..=cap {
                offs.push(total);
                total += (n + 1) * (n - delta + 1);
            }
        }
        Self { cap, offsets, total }
    }

    /// Flat offset of block (delta, N); the block is (N+1) x (N-delta+1).
    #[inline]
    pub fn offset(&self, delta: usize, n: usize) -> usize {
        self.offsets[delta][n - delta]
    }
}

/// Density-matrix blocks in the co-rotating frame, plus bookkeeping for
/// the adaptive truncation window.
#[derive(Debug, Clone)]
pub(crate) struct BlockState {
    pub layout: BlockLayout,
    pub data: Vec<C64>,
    /// Total weight discarded by window shrinking so far.
    pub dropped_mass: f64,
    /// Original certified cap (the window may have shrunk below it).
    pub cap_initial: usize,
}

/// Rotating-frame expectation values extracted from the blocks.
#[derive(Debug, Clone, Copy)]
pub(crate) struct FrameMoments {
    pub trace: f64,
    pub n_a: f64,
    pub n_b: f64,
    pub coh_ab: C64,
    pub sq_aa: C64,
    pub sq_bb: C64,
    pub sq_ab: C64,
    pub mean_a: C64,
    pub mean_b: C64,
    pub hermiticity_error: f64,
    pub top_sector_weight: f64,
}

impl BlockState {
    /// rho(0) = |psi, 0><psi, 0| for charger amplitudes psi.
    pub fn from_charger_amplitudes(amplitudes: &[C64]) -> Self {
        let cap = amplitudes.len() - 1;
        let layout = BlockLayout::new(cap);
        let mut data = vec![C64::new(0.0, 0.0); layout.total];
        for delta in 0..DELTAS {
            for n in delta..=cap {
                let m = n - delta;
                // |n_a = N, n_b = 0> is the last row/column of the block.
                let off = layout.offset(delta, n);
                let idx = off + n * (m + 1) + m;
                data[idx] = amplitudes[n] * amplitudes[m].conj();
            }
        }
        Self { layout, data, dropped_mass: 0.0, cap_initial: cap }
    }

    /// Time derivative in the co-rotating frame at absolute time `t`:
    /// the loss dissipator with the rotated mode cos(gt) a - i sin(gt) b.
    pub fn rhs(layout: &BlockLayout, sq: &[f64], g: f64, gamma: f64, t: f64, y: &[C64], dy: &mut [C64]) {
        let (cos_gt, sin_gt) = if g == 0.0 { (1.0, 0.0) } else { ((g * t).cos(), (g * t).sin()) };
        let c2 = cos_gt * cos_gt;
        let s2 = sin_gt * sin_gt;
        let ics = C64::new(0.0, cos_gt * sin_gt);
        let half_gamma = 0.5 * gamma;
        let cap = layout.cap;

        for delta in 0..DELTAS {
            for n in delta..=cap {
                let m = n - delta;
                let cols = m + 1;
                let off = layout.offset(delta, n);
                let feed = if n < cap { Some(layout.offset(delta, n + 1)) } else { None };
                let feed_cols = cols + 1;
                for i in 0..=n {
                    let row = off + i * cols;
                    // Left-multiplication factors for K = a_t' a_t.
                    let diag_left = c2 * i as f64 + s2 * (n - i) as f64;
                    let up_left = sq[n - i] * sq[i + 1]; // (b'a rho): row i+1
                    let dn_left = sq[i] * sq[n - i + 1]; // (a'b rho): row i-1
                    for j in 0..cols {
                        let p = y[row + j];
                        // Gain term 2 a_t rho a_t' fed from sector N+1.
                        let mut acc = C64::new(0.0, 0.0);
                        if let Some(foff) = feed {
                            let frow = foff + i * feed_cols;
                            let t_aa = sq[i + 1] * sq[j + 1] * y[frow + feed_cols + j + 1];
                            let t_bb = sq[n + 1 - i] * sq[m + 1 - j] * y[frow + j];
                            let t_ab = sq[i + 1] * sq[m + 1 - j] * y[frow + feed_cols + j];
                            let t_ba = sq[n + 1 - i] * sq[j + 1] * y[frow + j + 1];
                            acc = (c2 * t_aa + s2 * t_bb) + ics * (t_ab - t_ba);
                        }
                        // K rho: c^2 n_a + s^2 n_b - ics a'b + ics b'a.
                        let mut lk = p * diag_left;
                        if i > 0 {
                            lk -= ics * (dn_left * y[row - cols + j]);
                        }
                        if i < n {
                            lk += ics * (up_left * y[row + cols + j]);
                        }
                        // rho K: conjugate-side factors on the column index.
                        let diag_right = c2 * j as f64 + s2 * (m - j) as f64;
                        let mut rk = p * diag_right;
                        if j < m {
                            rk -= ics * (sq[j + 1] * sq[m - j] * y[row + j + 1]);
                        }
                        if j > 0 {
                            rk += ics * (sq[j] * sq[m - j + 1] * y[row + j - 1]);
                        }
                        dy[row + j] = gamma * acc - half_gamma * (lk + rk);
                    }
                }
            }
        }
    }

    /// Expectation values in the rotating frame.
    pub fn frame_moments(&self) -> FrameMoments {
        let lay = &self.layout;
        let cap = lay.cap;
        let y = &self.data;
        let zero = C64::new(0.0, 0.0);
        let (mut trace, mut n_a, mut n_b) = (0.0f64, 0.0f64, 0.0f64);
        let mut coh = zero;
        let (mut sq_aa, mut sq_bb, mut sq_ab) = (zero, zero, zero);
        let (mut mean_a, mut mean_b) = (zero, zero);
        let mut herm = 0.0f64;
        let mut top = 0.0f64;

        for n in 0..=cap {
            let off = lay.offset(0, n);
            let cols = n + 1;
            for i in 0..=n {
                let d = y[off + i * cols + i];
                let pop = d.re;
                trace += pop;
                n_a += i as f64 * pop;
                n_b += (n - i) as f64 * pop;
                herm = herm.max(d.im.abs());
                if n == cap {
                    top += pop;
                }
                if i > 0 {
                    // <a'b> picks rho[i-1, i] within the sector.
                    let k = (i as f64).sqrt() * ((n - i + 1) as f64).sqrt();
                    coh += k * y[off + (i - 1) * cols + i];
                    let pair = y[off + (i - 1) * cols + i] - y[off + i * cols + (i - 1)].conj();
                    herm = herm.max(pair.norm());
                }
            }
        }
        for n in 1..=cap {
            let off = lay.offset(1, n);
            let cols = n; // m + 1 with m = n - 1
            for i in 0..n {
                let fa = (i as f64 + 1.0).sqrt();
                mean_a += fa * y[off + (i + 1) * cols + i];
                let fb = ((n - i) as f64).sqrt();
                mean_b += fb * y[off + i * cols + i];
            }
        }
        for n in 2..=cap {
            let off = lay.offset(2, n);
            let cols = n - 1; // m + 1 with m = n - 2
            for i in 0..=n - 2 {
                let faa = ((i + 1) as f64).sqrt() * ((i + 2) as f64).sqrt();
                sq_aa += faa * y[off + (i + 2) * cols + i];
                let fbb = ((n - 1 - i) as f64).sqrt() * ((n - i) as f64).sqrt();
                sq_bb += fbb * y[off + i * cols + i];
                let fab = ((i + 1) as f64).sqrt() * ((n - 1 - i) as f64).sqrt();
                sq_ab += fab * y[off + (i + 1) * cols + i];
            }
        }

        let top_weight = if lay.cap == self.cap_initial { top } else { self.dropped_mass.max(top) };
        FrameMoments {
            trace,
            n_a,
            n_b,
            coh_ab: coh,
            sq_aa,
            sq_bb,
            sq_ab,
            mean_a,
            mean_b,
            hermiticity_error: herm,
            top_sector_weight: top_weight,
        }
    }

    /// Total weight (diagonal mass and coherence magnitudes) sitting in
    /// sector N across the stored blocks.
    fn sector_mass(&self, n: usize) -> f64 {
        let lay = &self.layout;
        let mut mass = 0.0f64;
        for delta in 0..DELTAS {
            if n < delta {
                continue;
            }
            let off = lay.offset(delta, n);
            let len = (n + 1) * (n - delta + 1);
            mass += self.data[off..off + len].iter().map(|z| z.norm()).sum::<f64>();
        }
        mass
    }

    /// Drop top sectors whose cumulative mass stays below `floor`.
    /// Returns true when the window shrank.
    pub fn shrink_window(&mut self, floor: f64) -> bool {
        let mut new_cap = self.layout.cap;
        let mut dropped = 0.0f64;
        while new_cap > 4 {
            let m = self.sector_mass(new_cap);
            if dropped + m > floor {
                break;
            }
            dropped += m;
            new_cap -= 1;
        }
        if new_cap == self.layout.cap {
            return false;
        }
        let new_layout = BlockLayout::new(new_cap);
        let mut new_data = vec![C64::new(0.0, 0.0); new_layout.total];
        for delta in 0..DELTAS {
            for n in delta..=new_cap {
                let cols = n - delta + 1;
                let src = self.layout.offset(delta, n);
                let dst = new_layout.offset(delta, n);
                let len = (n + 1) * cols;
                new_data[dst..dst + len].copy_from_slice(&self.data[src..src + len]);
            }
        }
        self.layout = new_layout;
        self.data = new_data;
        self.dropped_mass += dropped;
        true
    }
}
