//! Compares sequential and thread-pool execution of the per-model
//! pipeline: validation, maximal chain extraction, and the adjoint
//! Zariski decomposition over generated models.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use foliation_core::batch::{map_ordered, ExecMode};
use foliation_core::chains;
use foliation_core::corpus::random_model;
use foliation_core::divisor::QDivisor;
use foliation_core::zariski;

fn pipeline(seed: u64) -> usize {
    let m = random_model(seed);
    let delta = QDivisor::zero();
    let mut score = usize::from(m.validate().is_valid());
    if let Ok(recs) = chains::maximal_kfd_chains(&m, &delta) {
        score += recs.len();
    }
    if let Ok(res) = zariski::zariski_adjoint(&m, &delta) {
        score += res.support.len();
    }
    score
}

fn bench_modes(c: &mut Criterion) {
    let seeds: Vec<u64> = (0..96).collect();
    let mut group = c.benchmark_group("model-pipeline");
    for mode in [ExecMode::Sequential, ExecMode::Parallel] {
        group.bench_with_input(
            BenchmarkId::from_parameter(format!("{mode:?}")),
            &mode,
            |b, &mode| b.iter(|| map_ordered(mode, seeds.clone(), pipeline)),
        );
    }
    group.finish();
}

criterion_group!(benches, bench_modes);
criterion_main!(benches);
