use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use qkd_resonance::par::Execution;
use qkd_resonance::sweep::{best_single_qubit_strategy, run_sweep_with, SweepSpec};

fn executions() -> Vec<(&'static str, Execution)> {
    let mut v = vec![("sequential", Execution::Sequential)];
    if qkd_resonance::par::parallel_enabled() {
        v.push(("parallel", Execution::Auto));
    }
    v
}

fn sweeps(c: &mut Criterion) {
    let mut group = c.benchmark_group("sweep");
    group.sample_size(10);
    for (name, spec) in [
        ("one-qubit", SweepSpec::one_qubit_resonance()),
        ("two-qubit", SweepSpec::two_qubit_resonance()),
    ] {
        for (mode, exec) in executions() {
            group.bench_with_input(BenchmarkId::new(name, mode), &spec, |b, spec| {
                b.iter(|| run_sweep_with(black_box(spec), exec).unwrap())
            });
        }
    }
    group.finish();
}

fn strategy_search(c: &mut Criterion) {
    let mut group = c.benchmark_group("best-strategy");
    group.sample_size(10);
    for (mode, exec) in executions() {
        group.bench_function(BenchmarkId::new("grid-500", mode), |b| {
            b.iter(|| best_single_qubit_strategy(black_box(0.1), 500, exec).unwrap())
        });
    }
    group.finish();
}

criterion_group!(benches, sweeps, strategy_search);
criterion_main!(benches);
