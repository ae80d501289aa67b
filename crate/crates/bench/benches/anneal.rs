//! End-to-end single-trial solves.

use criterion::{criterion_group, criterion_main, Criterion};
use mcpp_core::maxcut::{solve_maxkcut, Graph};
use mcpp_core::stardisc::{default_theta, solve_stardisc, PointSet};
use mcpp_core::{AnnealSchedule, StepController};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn maxcut_trial(c: &mut Criterion) {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let n = 200;
    let edges: Vec<_> = (0..n * 6)
        .map(|_| (rng.random_range(0..n), rng.random_range(0..n), 1.0))
        .filter(|(a, b, _)| a != b)
        .collect();
    let g = Graph::from_edges(n, edges).unwrap();
    let ctrl = StepController::new(1e-5, 1.1).unwrap();
    let schedule = AnnealSchedule::maxcut_default();
    let mut group = c.benchmark_group("anneal");
    group.sample_size(10);
    group.bench_function("maxcut_200", |b| {
        b.iter(|| solve_maxkcut(&g, 2, 1, &schedule, &ctrl, 0).unwrap())
    });
    let u = PointSet::new(
        (0..50)
            .map(|_| (0..3).map(|_| rng.random()).collect())
            .collect(),
    )
    .unwrap();
    let ctrl = StepController::new(default_theta(&u), 1.1).unwrap();
    let schedule = AnnealSchedule::stardisc_default();
    group.bench_function("stardisc_50x3", |b| {
        b.iter(|| solve_stardisc(&u, 1, &schedule, &ctrl, 0).unwrap())
    });
    group.finish();
}

criterion_group!(benches, maxcut_trial);
criterion_main!(benches);
