use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

use presslab_core::potential::random_potential;
use presslab_core::systems::parse_system;
use presslab_core::{estimate_pressure, EstimateConfig, Exec, PressureKind, Region};

fn cover(c: &mut Criterion) {
    let mut group = c.benchmark_group("cover");
    group.sample_size(10);
    for (name, spec, n) in [("diag", "diag:2,3|3,2", 2), ("circle", "circle:2|3", 4)] {
        let system = parse_system(spec).unwrap();
        let phi = random_potential(1, 0.4, system.m(), system.domain());
        for exec in [Exec::Sequential, Exec::Parallel] {
            let cfg = EstimateConfig { exec, ..EstimateConfig::generic() };
            group.bench_with_input(BenchmarkId::new(format!("{exec:?}"), name), &cfg, |b, cfg| {
                b.iter(|| estimate_pressure(&system, &phi, &PressureKind::Amalgamated, n, 0.25, &Region::Whole, cfg).unwrap())
            });
        }
    }
    group.finish();
}

criterion_group!(benches, cover);
criterion_main!(benches);
