use criterion::{criterion_group, criterion_main, Criterion};
use std::hint::black_box;

use hyperbat_core::oracle::{run_delta_trace, squeeze_vacuum, DeltaTraceOptions};
use hyperbat_core::params::BatteryParams;

fn bench_squeeze_preparation(c: &mut Criterion) {
    c.bench_function("squeeze_vacuum_n60", |b| {
        b.iter(|| squeeze_vacuum(black_box(1.0), black_box(60)).unwrap())
    });
}

fn bench_delta_trace(c: &mut Criterion) {
    let p = BatteryParams::new(1.0, 2.0, 1.0, 0.5).unwrap();
    let grid: Vec<f64> = (0..=10).map(|i| 0.2 * i as f64).collect();
    let mut group = c.benchmark_group("oracle");
    group.sample_size(10);
    group.bench_function("delta_trace_omega0p5_2gamma_t2", |b| {
        b.iter(|| run_delta_trace(black_box(&p), &grid, &DeltaTraceOptions::default()).unwrap())
    });
    group.finish();
}

criterion_group!(benches, bench_squeeze_preparation, bench_delta_trace);
criterion_main!(benches);
