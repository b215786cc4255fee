use std::hint::black_box;

use criterion::{criterion_group, criterion_main, Criterion};
use sais_bench::{pa_graph, stressed_instance};
use sais_core::sais::{integrate_mean_field, MeanFieldConfig, StateVector};
use sais_core::stochastic::{ensemble_extinction, gillespie_run, seeded_infection};

fn simulation(c: &mut Criterion) {
    let g = pa_graph(200, 5);
    let params = stressed_instance(&g).params;
    let init = seeded_infection(200, &[0, 1, 2, 3, 4]);

    c.bench_function("gillespie_run/pa200", |b| {
        let mut seed = 0;
        b.iter(|| {
            seed += 1;
            gillespie_run(black_box(&g), &params, &init, 20.0, seed).unwrap()
        })
    });

    let mut group = c.benchmark_group("ensemble");
    group.sample_size(10);
    group.bench_function("200_runs/pa200", |b| {
        b.iter(|| ensemble_extinction(black_box(&g), &params, &init, 20.0, 200, 0).unwrap())
    });
    group.finish();

    let start = StateVector::uniform(200, 0.1).unwrap();
    c.bench_function("mean_field/pa200_t20", |b| {
        b.iter(|| {
            integrate_mean_field(
                black_box(&g),
                &params,
                &start,
                &MeanFieldConfig::new(20.0).recording_every(1000),
            )
            .unwrap()
        })
    });
}

criterion_group!(benches, simulation);
criterion_main!(benches);
