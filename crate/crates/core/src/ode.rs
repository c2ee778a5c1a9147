//! Adaptive embedded Runge-Kutta (Dormand-Prince 5(4)) on flat complex
//! state vectors. Used for the truncated-Fock Lindblad integrations.

use num_complex::Complex64 as C64;

#[derive(Debug, Clone)]
pub struct AdaptiveOptions {
    pub rel_tol: f64,
    pub abs_tol: f64,
    /// Step size to start with; `None` picks a fraction of the interval.
    pub h_initial: Option<f64>,
    pub max_steps: usize,
}

impl Default for AdaptiveOptions {
    fn default() -> Self {
        Self { rel_tol: 1e-8, abs_tol: 1e-12, h_initial: None, max_steps: 2_000_000 }
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct StepStats {
    pub accepted: usize,
    pub rejected: usize,
    /// Last accepted step size, a good initial step for a continuation run.
    pub h_last: f64,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum OdeError {
    #[error("step size underflow at t = {t}")]
    StepSizeUnderflow { t: f64 },
    #[error("exceeded {0} steps")]
    TooManySteps(usize),
    #[error("non-finite state encountered at t = {t}")]
    NonFinite { t: f64 },
}

// Dormand-Prince 5(4) tableau.
const C2: f64 = 1.0 / 5.0;
const C3: f64 = 3.0 / 10.0;
const C4: f64 = 4.0 / 5.0;
const C5: f64 = 8.0 / 9.0;
const A21: f64 = 1.0 / 5.0;
const A31: f64 = 3.0 / 40.0;
const A32: f64 = 9.0 / 40.0;
const A41: f64 = 44.0 / 45.0;
const A42: f64 = -56.0 / 15.0;
const A43: f64 = 32.0 / 9.0;
const A51: f64 = 19372.0 / 6561.0;
const A52: f64 = -25360.0 / 2187.0;
const A53: f64 = 64448.0 / 6561.0;
const A54: f64 = -212.0 / 729.0;
const A61: f64 = 9017.0 / 3168.0;
const A62: f64 = -355.0 / 33.0;
const A63: f64 = 46732.0 / 5247.0;
const A64: f64 = 49.0 / 176.0;
const A65: f64 = -5103.0 / 18656.0;
const B1: f64 = 35.0 / 384.0;
const B3: f64 = 500.0 / 1113.0;
const B4: f64 = 125.0 / 192.0;
const B5: f64 = -2187.0 / 6784.0;
const B6: f64 = 11.0 / 84.0;
// Error weights b - b_hat.
const E1: f64 = 71.0 / 57600.0;
const E3: f64 = -71.0 / 16695.0;
const E4: f64 = 71.0 / 1920.0;
const E5: f64 = -17253.0 / 339200.0;
const E6: f64 = 22.0 / 525.0;
const E7: f64 = -1.0 / 40.0;

fn comb2(out: &mut [C64], y: &[C64], h: f64, a1: f64, k1: &[C64]) {
    for i in 0..y.len() {
        out[i] = y[i] + h * a1 * k1[i];
    }
}

/// Integrate dy/dt = rhs(t, y) from t0 to t1 in place.
///
/// `rhs` writes the derivative of `y` into its third argument.
pub fn integrate_adaptive<F>(
    y: &mut Vec<C64>,
    t0: f64,
    t1: f64,
    mut rhs: F,
    opt: &AdaptiveOptions,
) -> Result<StepStats, OdeError>
where
    F: FnMut(f64, &[C64], &mut [C64]),
{
    let n = y.len();
    let span = t1 - t0;
    let mut stats = StepStats::default();
    if span <= 0.0 || n == 0 {
        return Ok(stats);
    }
    let mut t = t0;
    let mut h = opt.h_initial.unwrap_or(span / 100.0).min(span).max(span * 1e-12);

    let mut k1 = vec![C64::new(0.0, 0.0); n];
    let mut k2 = k1.clone();
    let mut k3 = k1.clone();
    let mut k4 = k1.clone();
    let mut k5 = k1.clone();
    let mut k6 = k1.clone();
    let mut k7 = k1.clone();
    let mut stage = k1.clone();
    let mut y_new = k1.clone();

    rhs(t, y, &mut k1);
    while t < t1 {
        if stats.accepted + stats.rejected > opt.max_steps {
            return Err(OdeError::TooManySteps(opt.max_steps));
        }
        if t + h > t1 {
            h = t1 - t;
        }

        comb2(&mut stage, y, h, A21 * 1.0, &k1);
        rhs(t + C2 * h, &stage, &mut k2);
        for i in 0..n {
            stage[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i]);
        }
        rhs(t + C3 * h, &stage, &mut k3);
        for i in 0..n {
            stage[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i]);
        }
        rhs(t + C4 * h, &stage, &mut k4);
        for i in 0..n {
            stage[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i] + A54 * k4[i]);
        }
        rhs(t + C5 * h, &stage, &mut k5);
        for i in 0..n {
            stage[i] =
                y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i] + A64 * k4[i] + A65 * k5[i]);
        }
        rhs(t + h, &stage, &mut k6);
        for i in 0..n {
            y_new[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i] + B5 * k5[i] + B6 * k6[i]);
        }
        rhs(t + h, &y_new, &mut k7);

        // Weighted RMS error of the embedded 4th-order solution.
        let mut err_sq = 0.0f64;
        for i in 0..n {
            let e = h
                * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i] + E6 * k6[i] + E7 * k7[i]);
            let scale = opt.abs_tol + opt.rel_tol * y[i].norm().max(y_new[i].norm());
            err_sq += (e.norm() / scale).powi(2);
        }
        let err = (err_sq / n as f64).sqrt();
        if !err.is_finite() {
            return Err(OdeError::NonFinite { t });
        }

        if err <= 1.0 {
            t += h;
            std::mem::swap(y, &mut y_new);
            std::mem::swap(&mut k1, &mut k7); // FSAL
            stats.accepted += 1;
            stats.h_last = h;
            let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
            h *= factor;
        } else {
            stats.rejected += 1;
            h *= (0.9 * err.powf(-0.2)).clamp(0.1, 0.9);
            if !(h.is_finite()) || h < span * 1e-14 {
                return Err(OdeError::StepSizeUnderflow { t });
            }
        }
    }
    Ok(stats)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exponential_decay() {
        let mut y = vec![C64::new(1.0, 0.0)];
        let lambda = C64::new(-2.0, 0.0);
        integrate_adaptive(&mut y, 0.0, 3.0, |_, y, dy| dy[0] = lambda * y[0], &AdaptiveOptions::default())
            .unwrap();
        let exact = (-6.0f64).exp();
        assert!((y[0].re - exact).abs() < 1e-6 * exact, "{} vs {exact}", y[0].re);
    }

    #[test]
    fn oscillator_phase_accuracy() {
        // dy/dt = i w y over many periods.
        let w = 5.0;
        let mut y = vec![C64::new(1.0, 0.0)];
        let t1 = 20.0;
        integrate_adaptive(
            &mut y,
            0.0,
            t1,
            |_, y, dy| dy[0] = C64::new(0.0, w) * y[0],
            &AdaptiveOptions { rel_tol: 1e-10, abs_tol: 1e-14, ..Default::default() },
        )
        .unwrap();
        let exact = C64::new(0.0, w * t1).exp();
        assert!((y[0] - exact).norm() < 1e-7);
    }

    #[test]
    fn time_dependent_coefficient() {
        // dy/dt = cos(t) y  =>  y(t) = exp(sin t).
        let mut y = vec![C64::new(1.0, 0.0)];
        integrate_adaptive(
            &mut y,
            0.0,
            2.5,
            |t, y, dy| dy[0] = C64::new(t.cos(), 0.0) * y[0],
            &AdaptiveOptions { rel_tol: 1e-10, abs_tol: 1e-14, ..Default::default() },
        )
        .unwrap();
        let exact = 2.5f64.sin().exp();
        assert!((y[0].re - exact).abs() < 1e-8);
    }

    #[test]
    fn zero_span_is_identity() {
        let mut y = vec![C64::new(0.3, -0.1)];
        let stats =
            integrate_adaptive(&mut y, 1.0, 1.0, |_, _, dy| dy[0] = C64::new(1.0, 0.0), &AdaptiveOptions::default())
                .unwrap();
        assert_eq!(stats.accepted, 0);
        assert_eq!(y[0], C64::new(0.3, -0.1));
    }
}
