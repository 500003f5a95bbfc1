use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use slocc::basis::{Region, Statistics};
use slocc::check::{run_equivalence_suite, SuiteOptions};
use slocc::entanglement::{entanglement_of_formation, operational_entanglement_of_state, project_lr};
use slocc::exec::Execution;
use slocc::random::{case_rng, mode_amplitudes};
use slocc::teleport::{run_protocol_with, InputSpinor};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn monte_carlo(c: &mut Criterion) {
    let input = InputSpinor::new(0.6.into(), num_complex::Complex64::new(0.0, 0.8)).unwrap();
    let mut group = c.benchmark_group("teleport_monte_carlo");
    group.sample_size(20);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new(name, 1_000_000), &exec, |b, &exec| {
            b.iter(|| run_protocol_with(&input, Statistics::Fermion, black_box(1_000_000), 1, exec).unwrap())
        });
    }
    group.finish();
}

fn oracle_suite(c: &mut Criterion) {
    let mut group = c.benchmark_group("oracle_equivalence");
    group.sample_size(10);
    for (name, execution) in MODES {
        let opts = SuiteOptions {
            cases: 500,
            execution,
            ..SuiteOptions::default()
        };
        group.bench_with_input(BenchmarkId::new(name, opts.cases), &opts, |b, opts| {
            b.iter(|| run_equivalence_suite(black_box(opts)))
        });
    }
    group.finish();
}

fn sweep(c: &mut Criterion) {
    let (l, r) = (Region::new("L"), Region::new("R"));
    let points = 2000;
    let mut group = c.benchmark_group("entanglement_sweep");
    group.sample_size(20);
    for (name, exec) in MODES {
        group.bench_with_input(BenchmarkId::new(name, points), &exec, |b, &exec| {
            b.iter(|| {
                exec.map_range(points, |i| {
                    let state = mode_amplitudes(&mut case_rng(9, i as u64)).state(Statistics::Boson).unwrap();
                    let e = operational_entanglement_of_state(&state, &l, &r).unwrap();
                    let c = project_lr(&state, &l, &r).unwrap().concurrence().unwrap();
                    e - entanglement_of_formation(c).unwrap()
                })
            })
        });
    }
    group.finish();
}

criterion_group!(benches, monte_carlo, oracle_suite, sweep);
criterion_main!(benches);
