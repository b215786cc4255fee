use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sais_bench::{pa_graph, stressed_instance};
use sais_core::allocation::{solve_allocation, Formulation, SolverMethod, SolverOptions};

fn solvers(c: &mut Criterion) {
    let mut group = c.benchmark_group("solve_allocation");
    group.sample_size(10);
    for n in [30, 100, 200] {
        let inst = stressed_instance(&pa_graph(n, 3));
        for formulation in [Formulation::Reduced, Formulation::Full] {
            let opts = SolverOptions {
                formulation,
                record_trace: false,
                ..SolverOptions::default()
            };
            group.bench_with_input(
                BenchmarkId::new(format!("barrier_{formulation:?}"), n),
                &inst,
                |b, inst| b.iter(|| solve_allocation(black_box(inst), &opts).unwrap()),
            );
        }
    }
    // the cutting plane only converges quickly on small graphs
    let inst = stressed_instance(&pa_graph(12, 3));
    let opts = SolverOptions {
        method: SolverMethod::CuttingPlane,
        record_trace: false,
        ..SolverOptions::default()
    };
    group.bench_function("cutting_plane/12", |b| {
        b.iter(|| solve_allocation(black_box(&inst), &opts))
    });
    group.finish();
}

criterion_group!(benches, solvers);
criterion_main!(benches);
