//! Cross-module consistency: the closed forms, the moment propagator
//! and the Fock-space oracle must tell the same story.

use hyperbat_core::energetics::{ergotropy_record, population_charger, population_holder};
use hyperbat_core::moments::{post_pulse_moments, propagate_moments};
use hyperbat_core::oracle::{run_delta_trace, DeltaTraceOptions};
use hyperbat_core::params::BatteryParams;

/// Small deterministic generator for parameter draws.
struct XorShift(u64);

impl XorShift {
    fn next_f64(&mut self) -> f64 {
        let mut x = self.0;
        x ^= x << 13;
        x ^= x >> 7;
        x ^= x << 17;
        self.0 = x;
        (x >> 11) as f64 / (1u64 << 53) as f64
    }

    fn in_range(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.next_f64()
    }
}

#[test]
fn propagated_holder_population_matches_closed_form_randomized() {
    // Twenty random draws across all regimes.
    let mut rng = XorShift(0x9e3779b97f4a7c15);
    for draw in 0..20 {
        let gamma = 1.0;
        let g = gamma * rng.in_range(0.05, 10.0);
        let omega = rng.in_range(0.1, 2.0);
        let p = BatteryParams::new(1.0, g, gamma, omega).unwrap();
        let grid: Vec<f64> = (0..=60).map(|i| 5.0 * i as f64 / 60.0).collect();
        let traj = propagate_moments(&post_pulse_moments(omega), &p, &grid).unwrap();
        let peak = grid
            .iter()
            .map(|&t| population_holder(&p, t).unwrap())
            .fold(f64::MIN, f64::max);
        for (m, &t) in traj.iter().zip(&grid) {
            let expect = population_holder(&p, t).unwrap();
            assert!(
                (m.n_b - expect).abs() < 1e-8 * peak,
                "draw {draw} (g={g:.3}, omega={omega:.3}) t={t}: {} vs {expect}",
                m.n_b
            );
            let expect_a = population_charger(&p, t).unwrap();
            assert!(
                (m.n_a - expect_a).abs() < 1e-8 * peak.max(expect_a),
                "charger draw {draw} t={t}"
            );
        }
    }
}

#[test]
fn oracle_squeeze_trajectory_matches_moment_propagator() {
    // The spec-level agreement check: |<bb>| trajectories from the
    // brute-force oracle and the closed moment system within 1e-6
    // absolute at Omega <= 1 and n_max = 60.
    let p = BatteryParams::new(1.0, 2.0, 1.0, 1.0).unwrap();
    let grid: Vec<f64> = (0..=25).map(|i| 0.2 * i as f64).collect();
    let opts = DeltaTraceOptions { n_max: Some(60), ..Default::default() };
    let oracle = run_delta_trace(&p, &grid, &opts).unwrap();
    let moments = propagate_moments(&post_pulse_moments(1.0), &p, &grid).unwrap();
    for ((rep, mom), &t) in oracle.iter().zip(&moments).zip(&grid) {
        let diff = (rep.moments.sq_bb - mom.sq_bb).norm();
        assert!(diff < 1e-6, "t={t}: |d<bb>| = {diff:.3e}");
        let diff_ab = (rep.moments.sq_ab - mom.sq_ab).norm();
        assert!(diff_ab < 1e-6, "t={t}: |d<ab>| = {diff_ab:.3e}");
        let diff_aa = (rep.moments.sq_aa - mom.sq_aa).norm();
        assert!(diff_aa < 2e-6, "t={t}: |d<aa>| = {diff_aa:.3e}");
    }
}

#[test]
fn oracle_discriminant_matches_analytic_record() {
    // D from oracle moments vs the closed form 1 + 4 sinh^2 P (1 - P).
    let p = BatteryParams::new(1.0, 2.0, 1.0, 1.0).unwrap();
    let grid = [0.5, 1.0, 2.0];
    let reports = run_delta_trace(&p, &grid, &DeltaTraceOptions::default()).unwrap();
    for (rep, &t) in reports.iter().zip(&grid) {
        let analytic = ergotropy_record(&p, t).unwrap();
        assert!(
            (rep.energy.discriminant - analytic.discriminant).abs()
                < 1e-3 * analytic.discriminant,
            "t={t}: D {} vs {}",
            rep.energy.discriminant,
            analytic.discriminant
        );
        assert!(
            (rep.energy.ergotropy - analytic.ergotropy).abs()
                < 1e-3 * analytic.ergotropy.max(1e-6),
            "t={t}: ergotropy {} vs {}",
            rep.energy.ergotropy,
            analytic.ergotropy
        );
    }
}

#[test]
fn holder_population_converges_with_cutoff() {
    // Doubling the cutoff pins down the truncation ladder: the measured
    // change of n_b(t_E) is 7.6e-6 from 40 to 80 levels and drops under
    // 1e-6 once the shallow end starts at 60.
    let p = BatteryParams::new(1.0, 2.0, 1.0, 1.0).unwrap();
    let t_e = hyperbat_core::energetics::optimal_time(&p).unwrap();
    let value_at = |n: usize| {
        let opts = DeltaTraceOptions { n_max: Some(n), certify: false, ..Default::default() };
        run_delta_trace(&p, &[t_e], &opts).unwrap()[0].moments.n_b
    };
    let (v40, v60, v80) = (value_at(40), value_at(60), value_at(80));
    assert!(((v40 - v80) / v80).abs() < 1e-5, "40 -> 80: {}", ((v40 - v80) / v80).abs());
    assert!(((v60 - v80) / v80).abs() < 1e-6, "60 -> 80: {}", ((v60 - v80) / v80).abs());
}

#[test]
fn dissipationless_oracle_conserves_total_excitation() {
    let p = BatteryParams::new(1.0, 0.7, 0.0, 1.0).unwrap();
    let grid: Vec<f64> = (0..=20).map(|i| 0.3 * i as f64).collect();
    let opts = DeltaTraceOptions { n_max: Some(50), ..Default::default() };
    let reports = run_delta_trace(&p, &grid, &opts).unwrap();
    let total0 = reports[0].moments.n_a + reports[0].moments.n_b;
    for rep in &reports {
        let total = rep.moments.n_a + rep.moments.n_b;
        assert!((total - total0).abs() < 1e-9 * total0);
        assert!(rep.mean_a.norm() + rep.mean_b.norm() < 1e-10);
    }
}
