//! Entropy computation on the stored forward-backward lattice.
//!
//! Both scaled passes are kept in memory, and per-state entropies are filled
//! in on top: H_alpha(t, j) is the entropy of the posterior over prefixes
//! ending in state j at step t, obtained by chaining the backward transition
//! probabilities xi_t(i, j) / gamma_t(j) read off the lattice. A symmetric
//! recursion over suffixes yields H_beta. Memory grows linearly with the
//! sequence, which is exactly what the O(N)-state algorithms avoid, but the
//! lattice makes conditional window queries cheap: the entropy given a fixed
//! window decomposes into the prefix entropy at the window start plus the
//! suffix entropy at the window end.

use crate::entropy::{
    check_window, underflow_error, unrank_states, EntropyResult, SubseqEntropyResult,
    SubseqEnumRow, SubseqEnumeration, DEFAULT_ASSIGNMENT_CAP,
};
use crate::error::{Error, Result};
use crate::forward_backward::{pairwise_marginal, ScaledFbResult};
use crate::model::{HmmModel, ObservationSeq, SubseqConstraint};
use crate::oracle::sequence_count;
use crate::clamp_entropy;

/// The stored lattice plus the prefix entropy table, (T+1) x N row-major.
#[derive(Debug, Clone)]
pub struct MmLattice {
    fb: ScaledFbResult,
    h_alpha: Vec<f64>,
}

impl MmLattice {
    pub fn compute(model: &HmmModel, obs: &ObservationSeq) -> Result<Self> {
        let fb = ScaledFbResult::compute(model, obs)?;
        let n = fb.num_states();
        let len = fb.seq_len();
        let mut h_alpha = vec![0.0; len * n];
        for t in 1..len {
            let xi = pairwise_marginal(model, obs, &fb, t);
            let gamma = fb.state_marginal(t);
            for j in 0..n {
                if gamma[j] <= 0.0 {
                    // Posterior-impossible cell; entropy pinned to 0, and
                    // every conditional drawn from it later has weight 0.
                    continue;
                }
                let mut h = 0.0;
                for i in 0..n {
                    let p = xi[i * n + j] / gamma[j];
                    if p > 0.0 {
                        h += p * (h_alpha[(t - 1) * n + i] - p.ln());
                    }
                }
                h_alpha[t * n + j] = h;
            }
        }
        Ok(MmLattice { fb, h_alpha })
    }

    pub fn fb(&self) -> &ScaledFbResult {
        &self.fb
    }

    /// Prefix entropy H_alpha(t, j).
    pub fn h_alpha(&self, t: usize, j: usize) -> f64 {
        self.h_alpha[t * self.fb.num_states() + j]
    }

    /// Entropy of the posterior over complete state sequences: the final
    /// prefix entropies mixed by the final posterior.
    pub fn entropy(&self) -> f64 {
        let t_last = self.fb.seq_len() - 1;
        let gamma = self.fb.state_marginal(t_last);
        let mut h = 0.0;
        for (j, &g) in gamma.iter().enumerate() {
            if g <= 0.0 {
                continue;
            }
            h += g * (self.h_alpha(t_last, j) - g.ln());
        }
        clamp_entropy(h)
    }

    /// Retained f64 cells: both passes, the scale factors, and the prefix
    /// entropy table.
    pub fn cell_count(&self) -> usize {
        self.fb.cell_count() + self.h_alpha.len()
    }

    /// Suffix entropies H_beta(down_to, j), by rolling a single column back
    /// from the end of the sequence.
    fn h_beta_column(&self, model: &HmmModel, obs: &ObservationSeq, down_to: usize) -> Vec<f64> {
        let n = self.fb.num_states();
        let mut cur = vec![0.0; n];
        for t in (down_to + 1..self.fb.seq_len()).rev() {
            let xi = pairwise_marginal(model, obs, &self.fb, t);
            let gamma_prev = self.fb.state_marginal(t - 1);
            let mut next = vec![0.0; n];
            for j in 0..n {
                if gamma_prev[j] <= 0.0 {
                    continue;
                }
                let mut h = 0.0;
                for i in 0..n {
                    let p = xi[j * n + i] / gamma_prev[j];
                    if p > 0.0 {
                        h += p * (cur[i] - p.ln());
                    }
                }
                next[j] = h;
            }
            cur = next;
        }
        cur
    }

    /// Posterior probability of a window assignment, tracking whether some
    /// factor was exactly zero (a structurally impossible window, as opposed
    /// to one whose probability merely underflowed).
    fn window_product(
        &self,
        model: &HmmModel,
        obs: &ObservationSeq,
        from: usize,
        to: usize,
        states: &[usize],
    ) -> (f64, bool) {
        let mut p = self.fb.alpha(from, states[0]);
        let mut saw_zero = p == 0.0;
        for (k, t) in (from + 1..=to).enumerate() {
            let f = model.a(states[k], states[k + 1]) * model.b(states[k + 1], obs.at(t));
            saw_zero |= f == 0.0;
            p *= f / self.fb.c()[t];
        }
        let beta = self.fb.beta(to, states[to - from]);
        saw_zero |= beta == 0.0;
        (p * beta, saw_zero)
    }
}

/// Full-sequence posterior entropy from the stored lattice.
pub fn mann_mccallum_entropy(model: &HmmModel, obs: &ObservationSeq) -> Result<EntropyResult> {
    let lattice = MmLattice::compute(model, obs)?;
    Ok(EntropyResult {
        entropy: lattice.entropy(),
        log_likelihood: lattice.fb.log_likelihood(),
        peak_state_elems: lattice.cell_count(),
    })
}

/// Entropy of the unconstrained states given a fixed window, from the
/// stored lattice: prefix entropy at the window start plus suffix entropy
/// at the window end.
pub fn mann_mccallum_subseq_entropy(
    model: &HmmModel,
    obs: &ObservationSeq,
    constraint: &SubseqConstraint,
) -> Result<SubseqEntropyResult> {
    constraint.check(model, obs)?;
    let lattice = MmLattice::compute(model, obs)?;
    let (from, to) = (constraint.from(), constraint.to());
    let (p, saw_zero) = lattice.window_product(model, obs, from, to, constraint.states());
    if saw_zero {
        return Err(Error::ImpossibleConstraint);
    }
    if p <= 0.0 {
        return Err(underflow_error());
    }
    let h_beta = lattice.h_beta_column(model, obs, to);
    let h_cond = lattice.h_alpha(from, constraint.state_at(from)) + h_beta[constraint.state_at(to)];
    Ok(SubseqEntropyResult {
        h_cond,
        p_constraint: p,
        h_joint_term: p * (p.ln() - h_cond),
        log_likelihood: lattice.fb.log_likelihood(),
        peak_state_elems: lattice.cell_count() + h_beta.len(),
    })
}

/// Evaluates every assignment of the window `from..=to` on one shared
/// lattice, under the default assignment cap.
pub fn mann_mccallum_subseq_enumerate(
    model: &HmmModel,
    obs: &ObservationSeq,
    from: usize,
    to: usize,
) -> Result<SubseqEnumeration> {
    mann_mccallum_subseq_enumerate_with_cap(model, obs, from, to, DEFAULT_ASSIGNMENT_CAP)
}

pub fn mann_mccallum_subseq_enumerate_with_cap(
    model: &HmmModel,
    obs: &ObservationSeq,
    from: usize,
    to: usize,
    cap: u64,
) -> Result<SubseqEnumeration> {
    model.check_obs(obs)?;
    check_window(obs, from, to)?;
    let width = to - from + 1;
    let count = sequence_count(model.num_states(), width, cap)?;
    let lattice = MmLattice::compute(model, obs)?;
    let h_beta = lattice.h_beta_column(model, obs, to);
    let mut rows = Vec::with_capacity(count);
    for idx in 0..count {
        let states = unrank_states(idx, model.num_states(), width);
        let (p, saw_zero) = lattice.window_product(model, obs, from, to, &states);
        let row = if saw_zero {
            SubseqEnumRow {
                states,
                p_constraint: 0.0,
                h_cond: None,
                h_joint_term: None,
            }
        } else if p <= 0.0 {
            return Err(underflow_error());
        } else {
            let h_cond = lattice.h_alpha(from, states[0]) + h_beta[states[width - 1]];
            SubseqEnumRow {
                p_constraint: p,
                h_cond: Some(h_cond),
                h_joint_term: Some(p * (p.ln() - h_cond)),
                states,
            }
        };
        rows.push(row);
    }
    Ok(SubseqEnumeration {
        rows,
        log_likelihood: lattice.fb.log_likelihood(),
        peak_state_elems: lattice.cell_count() + h_beta.len(),
    })
}
