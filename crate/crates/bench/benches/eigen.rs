use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use sais_bench::pa_graph;
use sais_core::eigen::{largest_eigenvalue, EigenOptions};

fn adjacency(c: &mut Criterion) {
    let mut group = c.benchmark_group("largest_eigenvalue");
    for n in [100, 1_000, 10_000] {
        let g = pa_graph(n, 1);
        let lanczos = EigenOptions {
            dense_limit: 0,
            ..EigenOptions::default()
        };
        group.bench_with_input(BenchmarkId::new("lanczos", n), &g, |b, g| {
            b.iter(|| largest_eigenvalue(black_box(g), &lanczos).unwrap())
        });
        if n <= 1_000 {
            let dense = g.adjacency_matrix();
            group.bench_with_input(BenchmarkId::new("dense", n), &dense, |b, m| {
                b.iter(|| largest_eigenvalue(black_box(m), &EigenOptions::default()).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, adjacency);
criterion_main!(benches);
