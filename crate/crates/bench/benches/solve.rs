//! Solve-time benchmarks on a week-scale synthetic state: baseline model,
//! one opportunity point, and a backend face-off on a small instance.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use ldesvc_core::formulate::{build_baseline_lp, build_opportunity_lp, ModelMode};
use ldesvc_core::solve::{backend_by_name, solve_optimal};
use ldesvc_core::sweep::run_baseline;
use ldesvc_core::synth::{generate, SynthConfig};

fn week_instance() -> ldesvc_core::ingest::SystemSpec {
    generate(&SynthConfig {
        horizon_h: 168,
        n_thermal: 4,
        n_ies: 5,
        with_sdes: true,
        seed: 42,
        ..SynthConfig::default()
    })
}

fn bench_baseline(c: &mut Criterion) {
    let spec = week_instance();
    let backend = backend_by_name("microlp").unwrap();
    c.bench_function("baseline_168h", |b| {
        b.iter(|| run_baseline(&spec, backend.as_ref()).unwrap())
    });
}

fn bench_opportunity_point(c: &mut Criterion) {
    let spec = week_instance();
    let backend = backend_by_name("microlp").unwrap();
    let q_star = run_baseline(&spec, backend.as_ref()).unwrap().q_star;
    let x = 0.5 * spec.thermal_capacity_mw();
    c.bench_function("opportunity_point_168h", |b| {
        b.iter(|| {
            let mode = ModelMode::opportunity(x, q_star).unwrap();
            let model = build_opportunity_lp(&spec, mode).unwrap();
            solve_optimal(&model.lp, backend.as_ref()).unwrap()
        })
    });
}

fn bench_backends(c: &mut Criterion) {
    let spec = generate(&SynthConfig { horizon_h: 24, seed: 7, ..SynthConfig::default() });
    let model = build_baseline_lp(&spec).unwrap();
    let mut group = c.benchmark_group("backends_24h");
    group.sample_size(10);
    for name in ["microlp", "simplex"] {
        let backend = backend_by_name(name).unwrap();
        group.bench_with_input(BenchmarkId::from_parameter(name), &model, |b, model| {
            b.iter(|| solve_optimal(&model.lp, backend.as_ref()).unwrap())
        });
    }
    group.finish();
}

criterion_group! {
    name = benches;
    config = Criterion::default().sample_size(20);
    targets = bench_baseline, bench_opportunity_point, bench_backends
}
criterion_main!(benches);
