use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use std::hint::black_box;

use triloc::geom::Point;
use triloc::oracle::{grid_minimize_with, GridSpec};
use triloc::sim::{run_sweep_with, SweepConfig};
use triloc::taxonomy::normalize;
use triloc::Execution;

fn modes() -> Vec<(&'static str, Execution)> {
    vec![
        ("sequential", Execution::Sequential),
        #[cfg(feature = "parallel")]
        ("parallel", Execution::Parallel),
    ]
}

fn sweep(c: &mut Criterion) {
    let cfg = SweepConfig::default();
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| run_sweep_with(black_box(&cfg), exec).unwrap())
        });
    }
    group.finish();
}

fn oracle(c: &mut Criterion) {
    let z = [Point::new(0.1, 0.2), Point::new(0.9, 0.1), Point::new(0.4, 0.95)];
    let s = normalize(z, [0.1, 0.2, 0.9]).unwrap();
    let grid = GridSpec::new(GridSpec::default().bounds, 256, 2).unwrap();
    let mut group = c.benchmark_group("grid_oracle");
    group.sample_size(10);
    for (name, exec) in modes() {
        group.bench_with_input(BenchmarkId::from_parameter(name), &exec, |b, &exec| {
            b.iter(|| grid_minimize_with(black_box(&s), &grid, exec))
        });
    }
    group.finish();
}

criterion_group!(benches, sweep, oracle);
criterion_main!(benches);
