//! State-sequence entropy algorithms.
//!
//! Every entry point here answers the same question: given a model and an
//! observation sequence, how much Shannon entropy is left in the posterior
//! over hidden state sequences. The implementations differ in what they keep
//! in memory and which conditional queries they support:
//!
//! - [`esrfb_entropy`] sweeps the entropy semiring forward once, keeping one
//!   (z, h) pair per state. [`esrfb_subseq_entropy`] adds a backward sweep to
//!   condition on a fixed window of states.
//! - [`hernando_entropy`] carries one prefix entropy per state next to the
//!   filtered posteriors, also in constant memory per step.
//! - [`mann_mccallum_entropy`] stores the full forward-backward lattice and
//!   computes per-state entropies on top of it; memory grows with the
//!   sequence, but conditional windows come almost for free once the lattice
//!   exists ([`mann_mccallum_subseq_entropy`]).
//!
//! All of them are tested against the enumeration oracle in
//! [`crate::oracle`], and [`esrfb_hernando_bridge_check`] verifies the exact
//! algebraic correspondence between the first two while they run.

mod esrfb;
mod hernando;
mod mann_mccallum;

pub use esrfb::{
    esr_backward, esrfb_entropy, esrfb_subseq_entropy, esrfb_subseq_enumerate,
    esrfb_subseq_enumerate_with_cap, EsrBackwardColumn, EsrForwardState,
};
pub use hernando::{hernando_entropy, HernandoState};
pub use mann_mccallum::{
    mann_mccallum_entropy, mann_mccallum_subseq_entropy, mann_mccallum_subseq_enumerate,
    mann_mccallum_subseq_enumerate_with_cap, MmLattice,
};

use crate::error::{Error, Result};
use crate::model::{HmmModel, ObservationSeq};

/// Largest number of window assignments an enumeration call will expand
/// before refusing with [`crate::error::Error::CapExceeded`].
pub const DEFAULT_ASSIGNMENT_CAP: u64 = 1_000_000;

pub(crate) fn check_symbol(model: &HmmModel, symbol: usize) -> Result<()> {
    if symbol >= model.num_symbols() {
        return Err(Error::Malformed(format!(
            "observation symbol {symbol} out of range for {} symbols",
            model.num_symbols()
        )));
    }
    Ok(())
}

pub(crate) fn check_window(obs: &ObservationSeq, from: usize, to: usize) -> Result<()> {
    if from > to {
        return Err(Error::Malformed(format!(
            "window start {from} is after window end {to}"
        )));
    }
    if to > obs.t_max() {
        return Err(Error::Malformed(format!(
            "window end {to} is past the final step {}",
            obs.t_max()
        )));
    }
    Ok(())
}

pub(crate) fn underflow_error() -> Error {
    Error::malformed(
        "window probability underflows f64; the constraint is feasible but its \
         posterior mass is below ~1e-308",
    )
}

/// Outcome of a full-sequence entropy run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EntropyResult {
    /// Entropy of the posterior over complete state sequences, in nats.
    pub entropy: f64,
    /// ln p(observations) under the model, accumulated during the same pass.
    pub log_likelihood: f64,
    /// Number of f64 cells the algorithm retained between steps, measured
    /// from the actual containers. Outputs and per-step scratch do not
    /// count; this is the footprint that separates the constant-memory
    /// algorithms from the stored-lattice one.
    pub peak_state_elems: usize,
}

/// Outcome of an entropy run conditioned on a fixed window of states.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SubseqEntropyResult {
    /// Entropy, in nats, of the posterior over the unconstrained states
    /// given the observations and the fixed window.
    pub h_cond: f64,
    /// Posterior probability of the fixed window given the observations.
    pub p_constraint: f64,
    /// Sum of p ln p over the state sequences that match the window, where p
    /// is each sequence's posterior probability. Always <= 0; equals
    /// p_constraint * (ln p_constraint - h_cond).
    pub h_joint_term: f64,
    /// ln p(observations), unconditioned.
    pub log_likelihood: f64,
    /// Retained f64 cells between steps, as in [`EntropyResult`].
    pub peak_state_elems: usize,
}

/// One window assignment from an enumeration call.
#[derive(Debug, Clone, PartialEq)]
pub struct SubseqEnumRow {
    /// The fixed states, one per step of the window.
    pub states: Vec<usize>,
    /// Posterior probability of this assignment.
    pub p_constraint: f64,
    /// Conditional entropy given this assignment; `None` when the
    /// assignment has zero posterior probability.
    pub h_cond: Option<f64>,
    /// Matching-sequence p ln p mass; `None` for impossible assignments
    /// (where it would be an empty sum).
    pub h_joint_term: Option<f64>,
}

/// All window assignments of a fixed range, with the shared pass outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct SubseqEnumeration {
    /// One row per assignment, in lexicographic state order.
    pub rows: Vec<SubseqEnumRow>,
    pub log_likelihood: f64,
    pub peak_state_elems: usize,
}

/// Decodes assignment `idx` into window states, first step most significant.
pub(crate) fn unrank_states(mut idx: usize, num_states: usize, width: usize) -> Vec<usize> {
    let mut states = vec![0usize; width];
    for slot in states.iter_mut().rev() {
        *slot = idx % num_states;
        idx /= num_states;
    }
    states
}

/// Runs the entropy-semiring forward pass and the per-state prefix entropy
/// recursion in lockstep and returns the worst absolute deviation from the
/// identities connecting them. Two things are checked at every step:
///
/// - the column identity, for every reachable state j:
///   alpha_h(j) = alpha_z(j) * (ln alpha_z(j) - H_t(j));
/// - the kernel identity, for every i with positive filtered mass and every
///   reachable j: a(i, j) b(j, o_t) / c_t equals the backward transition
///   probability p(s_{t-1} = i | s_t = j, o) times alpha_z_t(j) / alpha_z_{t-1}(i).
///
/// The two recursions compute the same decomposition in different
/// coordinates, so the deviation should sit at accumulated rounding error,
/// orders of magnitude below any real disagreement.
pub fn esrfb_hernando_bridge_check(model: &HmmModel, obs: &ObservationSeq) -> Result<f64> {
    model.check_obs(obs)?;
    let mut esr = EsrForwardState::init(model, obs.at(0))?;
    let mut her = HernandoState::init(model, obs.at(0))?;
    let mut worst = bridge_deviation(&esr, &her);
    for t in 1..obs.len() {
        let prev_alpha = her.alpha_hat().to_vec();
        esr.step(model, obs.at(t))?;
        her.step(model, obs.at(t))?;
        worst = worst.max(bridge_deviation(&esr, &her));
        worst = worst.max(kernel_identity_deviation(
            model,
            obs.at(t),
            &prev_alpha,
            her.alpha_hat(),
        ));
    }
    Ok(worst)
}

fn bridge_deviation(esr: &EsrForwardState, her: &HernandoState) -> f64 {
    let mut worst = 0.0f64;
    for (j, &az) in esr.alpha_z().iter().enumerate() {
        if az <= 0.0 {
            continue;
        }
        let predicted = az * (az.ln() - her.entropies()[j]);
        worst = worst.max((esr.alpha_h()[j] - predicted).abs());
    }
    worst
}

fn kernel_identity_deviation(
    model: &HmmModel,
    symbol: usize,
    prev_alpha: &[f64],
    cur_alpha: &[f64],
) -> f64 {
    let n = prev_alpha.len();
    let mut d = vec![0.0; n];
    for (j, dj) in d.iter_mut().enumerate() {
        for i in 0..n {
            *dj += prev_alpha[i] * model.a(i, j);
        }
    }
    let c_t: f64 = (0..n).map(|j| d[j] * model.b(j, symbol)).sum();
    let mut worst = 0.0f64;
    for j in 0..n {
        if d[j] <= 0.0 {
            continue;
        }
        for i in 0..n {
            if prev_alpha[i] <= 0.0 {
                continue;
            }
            let kernel = model.a(i, j) * model.b(j, symbol) / c_t;
            let p = prev_alpha[i] * model.a(i, j) / d[j];
            let rebuilt = p * cur_alpha[j] / prev_alpha[i];
            worst = worst.max((kernel - rebuilt).abs());
        }
    }
    worst
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{random_model, random_obs};

    #[test]
    fn unrank_orders_assignments_lexicographically() {
        assert_eq!(unrank_states(0, 3, 2), vec![0, 0]);
        assert_eq!(unrank_states(1, 3, 2), vec![0, 1]);
        assert_eq!(unrank_states(3, 3, 2), vec![1, 0]);
        assert_eq!(unrank_states(8, 3, 2), vec![2, 2]);
        assert_eq!(unrank_states(5, 2, 3), vec![1, 0, 1]);
    }

    #[test]
    fn bridge_holds_on_worked_instance() {
        let m = HmmModel::new(
            2,
            2,
            vec![0.5, 0.5],
            vec![0.9, 0.1, 0.1, 0.9],
            vec![0.9, 0.1, 0.1, 0.9],
        )
        .unwrap();
        let obs = ObservationSeq::new(vec![0, 0]).unwrap();
        let dev = esrfb_hernando_bridge_check(&m, &obs).unwrap();
        assert!(dev < 1e-12, "deviation {dev}");
    }

    #[test]
    fn bridge_holds_on_random_models() {
        for seed in 0..20 {
            let n = 2 + (seed as usize % 3);
            let m = random_model(n, 3, 900 + seed);
            let obs = random_obs(3, 40, 950 + seed);
            let dev = esrfb_hernando_bridge_check(&m, &obs).unwrap();
            assert!(dev < 1e-12, "seed {seed}: deviation {dev}");
        }
    }

    #[test]
    fn bridge_tolerates_unreachable_states() {
        // State 1 can never be entered, so its filtered posterior is 0 and
        // the identity is only claimed over reachable states.
        let m = HmmModel::new(
            2,
            2,
            vec![1.0, 0.0],
            vec![1.0, 0.0, 1.0, 0.0],
            vec![0.5, 0.5, 0.5, 0.5],
        )
        .unwrap();
        let obs = ObservationSeq::new(vec![0, 1, 0]).unwrap();
        let dev = esrfb_hernando_bridge_check(&m, &obs).unwrap();
        assert!(dev < 1e-12, "deviation {dev}");
    }
}
