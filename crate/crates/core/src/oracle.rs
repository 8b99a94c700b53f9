//! Brute-force ground truth by exhaustive enumeration of state sequences.
//!
//! Everything else in this crate is tested against this module. It makes no
//! use of the forward-backward machinery: probabilities come from
//! [`joint_prob`]-style products over every one of the N^(T+1) state
//! sequences, so agreement with the fast algorithms is meaningful evidence.
//! Enumeration is guarded by a cap on the sequence count (default 10^7).

use crate::error::{Error, Result};
use crate::model::{HmmModel, ObservationSeq, SubseqConstraint};

/// Default bound on the number of enumerated state sequences.
pub const DEFAULT_ENUMERATION_CAP: u64 = 10_000_000;

// ---------------------------------------------------------------------------
// posterior table
// ---------------------------------------------------------------------------

/// The full posterior p(s | o) over state sequences, indexed by the base-N
/// encoding of the sequence with s_0 as the most significant digit.
#[derive(Debug, Clone)]
pub struct PosteriorTable {
    probs: Vec<f64>,
    p_obs: f64,
    num_states: usize,
    seq_len: usize,
}

impl PosteriorTable {
    /// Total observation probability p(o).
    #[inline]
    pub fn p_obs(&self) -> f64 {
        self.p_obs
    }

    /// Number of entries, N^(T+1).
    #[inline]
    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    pub fn num_states(&self) -> usize {
        self.num_states
    }

    /// Sequence length T+1.
    #[inline]
    pub fn seq_len(&self) -> usize {
        self.seq_len
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    /// Posterior probability of a full state sequence.
    pub fn prob(&self, states: &[usize]) -> f64 {
        assert_eq!(states.len(), self.seq_len, "state sequence length mismatch");
        let mut idx = 0usize;
        for &s in states {
            assert!(s < self.num_states, "state {s} out of range");
            idx = idx * self.num_states + s;
        }
        self.probs[idx]
    }

    /// Decodes a table index back into its state sequence.
    pub fn states_of(&self, mut index: usize) -> Vec<usize> {
        assert!(index < self.probs.len());
        let mut states = vec![0usize; self.seq_len];
        for t in (0..self.seq_len).rev() {
            states[t] = index % self.num_states;
            index /= self.num_states;
        }
        states
    }

    /// Shannon entropy of the posterior in nats.
    pub fn entropy(&self) -> f64 {
        let mut acc = 0.0;
        for &p in &self.probs {
            if p > 0.0 {
                acc += p * p.ln();
            }
        }
        crate::clamp_entropy(-acc)
    }
}

// ---------------------------------------------------------------------------
// oracle operations
// ---------------------------------------------------------------------------

pub fn oracle_posterior(model: &HmmModel, obs: &ObservationSeq) -> Result<PosteriorTable> {
    oracle_posterior_with_cap(model, obs, DEFAULT_ENUMERATION_CAP)
}

pub fn oracle_posterior_with_cap(
    model: &HmmModel,
    obs: &ObservationSeq,
    cap: u64,
) -> Result<PosteriorTable> {
    model.check_obs(obs)?;
    check_feasible(model, obs)?;
    let size = sequence_count(model.num_states(), obs.len(), cap)?;

    let mut probs = vec![0.0f64; size];
    let mut p_obs = 0.0;
    enumerate_sequences(model, obs, |idx, _states, p| {
        probs[idx] = p;
        p_obs += p;
    });
    if p_obs <= 0.0 {
        // Feasibility was established structurally above, so reaching this
        // point means the joint probabilities underflowed f64.
        return Err(Error::malformed(
            "observation probability underflows f64; sequence too long for enumeration",
        ));
    }
    for p in &mut probs {
        *p /= p_obs;
    }
    Ok(PosteriorTable {
        probs,
        p_obs,
        num_states: model.num_states(),
        seq_len: obs.len(),
    })
}

/// Posterior state-sequence entropy in nats, by enumeration.
pub fn oracle_entropy(model: &HmmModel, obs: &ObservationSeq) -> Result<f64> {
    oracle_entropy_with_cap(model, obs, DEFAULT_ENUMERATION_CAP)
}

pub fn oracle_entropy_with_cap(model: &HmmModel, obs: &ObservationSeq, cap: u64) -> Result<f64> {
    Ok(oracle_posterior_with_cap(model, obs, cap)?.entropy())
}

/// Result of [`oracle_subseq_entropy`]: the entropy of the unconstrained
/// states given the fixed window, and the posterior probability of the window
/// itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OracleSubseq {
    pub h_cond: f64,
    pub p_constraint: f64,
}

/// Entropy of the state sequence outside the constraint window, conditioned
/// on the fixed window states and the observations, by enumeration.
pub fn oracle_subseq_entropy(
    model: &HmmModel,
    obs: &ObservationSeq,
    constraint: &SubseqConstraint,
) -> Result<OracleSubseq> {
    oracle_subseq_entropy_with_cap(model, obs, constraint, DEFAULT_ENUMERATION_CAP)
}

pub fn oracle_subseq_entropy_with_cap(
    model: &HmmModel,
    obs: &ObservationSeq,
    constraint: &SubseqConstraint,
    cap: u64,
) -> Result<OracleSubseq> {
    model.check_obs(obs)?;
    constraint.check(model, obs)?;
    check_feasible(model, obs)?;
    sequence_count(model.num_states(), obs.len(), cap)?;

    let from = constraint.from();
    let fixed = constraint.states();
    let mut p_obs = 0.0;
    // Joint-probability sums over sequences matching the constraint.
    let mut match_p = 0.0;
    let mut match_plogp = 0.0;
    enumerate_sequences(model, obs, |_idx, states, p| {
        p_obs += p;
        if states[from..=constraint.to()] == *fixed {
            match_p += p;
            if p > 0.0 {
                match_plogp += p * p.ln();
            }
        }
    });
    if p_obs <= 0.0 {
        return Err(Error::malformed(
            "observation probability underflows f64; sequence too long for enumeration",
        ));
    }
    if match_p <= 0.0 {
        return Err(Error::ImpossibleConstraint);
    }

    let p_constraint = match_p / p_obs;
    let h_cond = if constraint.width() == obs.len() {
        // Nothing is unconstrained; the conditional entropy is 0 by
        // definition.
        0.0
    } else {
        // sum of q ln q over matching sequences, with q = p(s | o)
        let g = (match_plogp - match_p * p_obs.ln()) / p_obs;
        crate::clamp_entropy(-g / p_constraint + p_constraint.ln())
    };
    Ok(OracleSubseq {
        h_cond,
        p_constraint,
    })
}

// ---------------------------------------------------------------------------
// enumeration internals
// ---------------------------------------------------------------------------

pub(crate) fn sequence_count(num_states: usize, seq_len: usize, cap: u64) -> Result<usize> {
    let mut size: u128 = 1;
    for _ in 0..seq_len {
        size *= num_states as u128;
        if size > cap as u128 {
            return Err(Error::CapExceeded {
                base: num_states,
                exponent: seq_len,
                cap,
            });
        }
    }
    Ok(size as usize)
}

/// Confirms some state path with positive probability emits `obs`, purely
/// structurally (no products, so no underflow). Errors with the first step at
/// which all paths die.
fn check_feasible(model: &HmmModel, obs: &ObservationSeq) -> Result<()> {
    let n = model.num_states();
    let mut alive: Vec<bool> = (0..n)
        .map(|j| model.pi(j) > 0.0 && model.b(j, obs.at(0)) > 0.0)
        .collect();
    if !alive.iter().any(|&x| x) {
        return Err(Error::ImpossibleObservation { t: 0 });
    }
    for t in 1..obs.len() {
        let next: Vec<bool> = (0..n)
            .map(|j| {
                model.b(j, obs.at(t)) > 0.0
                    && (0..n).any(|i| alive[i] && model.a(i, j) > 0.0)
            })
            .collect();
        if !next.iter().any(|&x| x) {
            return Err(Error::ImpossibleObservation { t });
        }
        alive = next;
    }
    Ok(())
}

/// Visits every state sequence with positive joint probability, passing its
/// table index, the sequence itself, and p(states, obs). Sequences whose
/// probability vanishes partway are skipped wholesale; their table entries
/// are simply never visited.
///
/// Iterative odometer rather than recursion, so sequence length is limited
/// only by the enumeration cap (N = 1 allows arbitrary lengths).
fn enumerate_sequences(
    model: &HmmModel,
    obs: &ObservationSeq,
    mut visit: impl FnMut(usize, &[usize], f64),
) {
    let n = model.num_states();
    let len = obs.len();
    let mut states = vec![0usize; len];
    // prefix[t] = p(states[..t], obs[..t]); iprefix[t] = base-N index of states[..t]
    let mut prefix = vec![1.0f64; len + 1];
    let mut iprefix = vec![0usize; len + 1];
    let mut dirty = 0usize;

    'outer: loop {
        let mut dead = None;
        for t in dirty..len {
            let s = states[t];
            let factor = if t == 0 {
                model.pi(s) * model.b(s, obs.at(0))
            } else {
                model.a(states[t - 1], s) * model.b(s, obs.at(t))
            };
            prefix[t + 1] = prefix[t] * factor;
            iprefix[t + 1] = iprefix[t] * n + s;
            if prefix[t + 1] == 0.0 {
                dead = Some(t);
                break;
            }
        }

        let mut pos = match dead {
            None => {
                visit(iprefix[len], &states, prefix[len]);
                len - 1
            }
            // Advancing at the dead step skips every extension of this
            // zero-probability prefix.
            Some(t) => t,
        };
        for s in &mut states[pos + 1..] {
            *s = 0;
        }
        loop {
            if states[pos] + 1 < n {
                states[pos] += 1;
                dirty = pos;
                break;
            }
            states[pos] = 0;
            if pos == 0 {
                break 'outer;
            }
            pos -= 1;
        }
    }
}

// ---------------------------------------------------------------------------
// tests
// ---------------------------------------------------------------------------
