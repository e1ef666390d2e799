use std::hint::black_box;

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use condim_core::experiment::impartial_culture;
use condim_core::{
    condorcet_dimension, derive_profile, greedy_dominating_set, majority_digraph, planar_winning_set, random_spatial,
    Norm, SpatialParams,
};

fn dimension(c: &mut Criterion) {
    let mut group = c.benchmark_group("condorcet_dimension");
    for m in [6usize, 10, 14] {
        let profile = impartial_culture(m, 9, &mut ChaCha8Rng::seed_from_u64(m as u64));
        group.bench_with_input(BenchmarkId::from_parameter(m), &profile, |b, p| {
            b.iter(|| condorcet_dimension(black_box(p), p.m()).unwrap())
        });
    }
    group.finish();
}

fn greedy(c: &mut Criterion) {
    let mut group = c.benchmark_group("greedy_dominating_set");
    for m in [16usize, 64, 256] {
        let t = majority_digraph(&impartial_culture(m, 15, &mut ChaCha8Rng::seed_from_u64(m as u64)));
        group.bench_with_input(BenchmarkId::from_parameter(m), &t, |b, t| {
            b.iter(|| greedy_dominating_set(black_box(t)).unwrap())
        });
    }
    group.finish();
}

fn derive(c: &mut Criterion) {
    let mut group = c.benchmark_group("derive_profile");
    for (label, norm) in [
        ("p1", Norm::manhattan()),
        ("p2", Norm::integer(2)),
        ("inf", Norm::Infinity),
    ] {
        let e = random_spatial(&SpatialParams::new(20, 21, 2, 100, norm.clone()), 7).unwrap();
        group.bench_function(label, |b| b.iter(|| derive_profile(black_box(&e), &norm)));
    }
    group.finish();
}

fn planar(c: &mut Criterion) {
    let mut group = c.benchmark_group("planar_winning_set");
    for (label, norm) in [("l1", Norm::manhattan()), ("linf", Norm::Infinity)] {
        let e = random_spatial(&SpatialParams::new(20, 21, 2, 100, norm.clone()), 11).unwrap();
        group.bench_function(label, |b| b.iter(|| planar_winning_set(black_box(&e), &norm).unwrap()));
    }
    group.finish();
}

criterion_group!(benches, dimension, greedy, derive, planar);
criterion_main!(benches);
