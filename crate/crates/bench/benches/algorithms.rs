//! Timing comparison of the entropy algorithms on seeded random instances.
//!
//! `entropy` sweeps the sequence length at N = 8: all three algorithms are
//! O(T) in time, so the per-element throughput should be flat, with the
//! stored-lattice algorithm paying extra for its O(NT) allocations.
//! `subseq` compares window conditioning at a fixed length, where the
//! streaming algorithm keeps O(N) state against the lattice's O(NT).

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion, Throughput};
use hmm_entropy::{
    esrfb_entropy, esrfb_subseq_entropy, hernando_entropy, mann_mccallum_entropy,
    mann_mccallum_subseq_entropy, random_model, random_obs, SubseqConstraint,
};

fn entropy_scaling(c: &mut Criterion) {
    let model = random_model(8, 4, 1);
    let mut group = c.benchmark_group("entropy");
    group.sample_size(30);
    for len in [1_000usize, 10_000, 100_000] {
        let obs = random_obs(4, len, 2);
        group.throughput(Throughput::Elements(len as u64));
        group.bench_with_input(BenchmarkId::new("esrfb", len), &obs, |b, obs| {
            b.iter(|| esrfb_entropy(&model, obs).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("hernando", len), &obs, |b, obs| {
            b.iter(|| hernando_entropy(&model, obs).unwrap())
        });
        group.bench_with_input(BenchmarkId::new("mann-mccallum", len), &obs, |b, obs| {
            b.iter(|| mann_mccallum_entropy(&model, obs).unwrap())
        });
    }
    group.finish();
}

fn window_conditioning(c: &mut Criterion) {
    let model = random_model(8, 4, 3);
    let obs = random_obs(4, 10_000, 4);
    let constraint = SubseqConstraint::new(5_000, 5_002, vec![0, 1, 2]).unwrap();
    let mut group = c.benchmark_group("subseq");
    group.bench_function("esrfb", |b| {
        b.iter(|| esrfb_subseq_entropy(&model, &obs, &constraint).unwrap())
    });
    group.bench_function("mann-mccallum", |b| {
        b.iter(|| mann_mccallum_subseq_entropy(&model, &obs, &constraint).unwrap())
    });
    group.finish();
}

criterion_group!(benches, entropy_scaling, window_conditioning);
criterion_main!(benches);
