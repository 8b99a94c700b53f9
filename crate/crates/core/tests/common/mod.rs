//! Shared fixtures for the integration suites.
#![allow(dead_code)]

use hmm_entropy::{random_model, random_obs, HmmModel, ObservationSeq, SubseqConstraint};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// The symmetric two-state instance whose posterior is small enough to check
/// by hand: sticky transitions, matching emissions, two identical
/// observations.
pub fn worked_instance() -> (HmmModel, ObservationSeq) {
    let model = HmmModel::new(
        2,
        2,
        vec![0.5, 0.5],
        vec![0.9, 0.1, 0.1, 0.9],
        vec![0.9, 0.1, 0.1, 0.9],
    )
    .unwrap();
    let obs = ObservationSeq::new(vec![0, 0]).unwrap();
    (model, obs)
}

/// 100 seeded instances, N in {2, 3}, final step index in 1..=7, small
/// enough for the enumeration oracle throughout.
pub fn random_suite() -> Vec<(HmmModel, ObservationSeq)> {
    (0..100u64)
        .map(|k| {
            let n = 2 + (k as usize) % 2;
            let m = 2 + (k as usize) % 3;
            let len = 2 + (k as usize) % 7;
            (
                random_model(n, m, 10_000 + k),
                random_obs(m, len, 20_000 + k),
            )
        })
        .collect()
}

/// Cyclic two-state chain with identity emissions and the matching
/// observation sequence: exactly one state sequence is consistent.
pub fn deterministic_instance(len: usize) -> (HmmModel, ObservationSeq) {
    let model = HmmModel::new(
        2,
        2,
        vec![1.0, 0.0],
        vec![0.0, 1.0, 1.0, 0.0],
        vec![1.0, 0.0, 0.0, 1.0],
    )
    .unwrap();
    let obs = ObservationSeq::new((0..len).map(|t| t % 2).collect()).unwrap();
    (model, obs)
}

/// Uniform initial, transition, and emission distributions: observations
/// carry no information and the posterior is uniform over all N^(T+1)
/// sequences.
pub fn uninformative_model(n: usize) -> HmmModel {
    let nf = n as f64;
    HmmModel::new(
        n,
        2,
        vec![1.0 / nf; n],
        vec![1.0 / nf; n * n],
        vec![0.5; n * 2],
    )
    .unwrap()
}

/// Ten seeded constraints for one instance, windows at most four steps
/// wide. The suite models have strictly positive entries, so every
/// assignment is feasible.
pub fn random_constraints(
    instance_idx: u64,
    num_states: usize,
    t_max: usize,
) -> Vec<SubseqConstraint> {
    let mut rng = ChaCha8Rng::seed_from_u64(30_000 + instance_idx);
    (0..10)
        .map(|_| {
            let from = rng.gen_range(0..=t_max);
            let to = from + rng.gen_range(0..=(t_max - from).min(3));
            let states = (from..=to).map(|_| rng.gen_range(0..num_states)).collect();
            SubseqConstraint::new(from, to, states).unwrap()
        })
        .collect()
}

pub fn assert_close(a: f64, b: f64, tol: f64) {
    assert!(
        (a - b).abs() <= tol,
        "{a} vs {b} (difference {}, tolerance {tol})",
        (a - b).abs()
    );
}
