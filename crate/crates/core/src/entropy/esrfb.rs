//! Entropy computation by a forward sweep over the entropy semiring.
//!
//! The scaled forward recursion is run on (z, h) pairs instead of plain
//! probabilities. The z parts follow the ordinary scaled recursion, so after
//! step t they hold the filtered posterior p(s_t = j | o_0..o_t). The h part
//! of state j accumulates sum of w ln w over all state prefixes ending in j,
//! where w is the prefix's scaled weight; after the final step the prefixes
//! are complete sequences, their weights are posterior probabilities, and
//! -sum_j h(j) is the posterior entropy. One pair per state is the entire
//! carried state.
//!
//! Conditioning on a fixed window of states reuses the same pieces: an
//! entropy-carrying forward sweep up to the window start, a plain scaled
//! sweep beyond it (keeping only the scale factors), an entropy-carrying
//! backward sweep down to the window end, and a product of window kernels to
//! join the two columns.

use crate::entropy::{
    check_symbol, check_window, underflow_error, unrank_states, EntropyResult,
    SubseqEntropyResult, SubseqEnumRow, SubseqEnumeration, DEFAULT_ASSIGNMENT_CAP,
};
use crate::error::{Error, Result};
use crate::model::{HmmModel, ObservationSeq, SubseqConstraint};
use crate::oracle::sequence_count;
use crate::semiring::{lift_weight, EsrValue, Semiring};
use crate::clamp_entropy;

/// The carried state of the forward sweep: one (z, h) pair per hidden state
/// plus the running log-likelihood. Feed observations one at a time with
/// [`EsrForwardState::step`]; the footprint never grows.
#[derive(Debug, Clone)]
pub struct EsrForwardState {
    t: usize,
    alpha_z: Vec<f64>,
    alpha_h: Vec<f64>,
    log_likelihood: f64,
}

impl EsrForwardState {
    /// Absorbs the first observation.
    pub fn init(model: &HmmModel, symbol: usize) -> Result<Self> {
        check_symbol(model, symbol)?;
        let n = model.num_states();
        let mut alpha_z: Vec<f64> = (0..n).map(|j| model.pi(j) * model.b(j, symbol)).collect();
        let c0: f64 = alpha_z.iter().sum();
        if c0 <= 0.0 {
            return Err(Error::ImpossibleObservation { t: 0 });
        }
        for z in &mut alpha_z {
            *z /= c0;
        }
        let alpha_h = alpha_z.iter().map(|&z| lift_weight(z).h).collect();
        Ok(EsrForwardState {
            t: 0,
            alpha_z,
            alpha_h,
            log_likelihood: c0.ln(),
        })
    }

    /// Absorbs the next observation.
    pub fn step(&mut self, model: &HmmModel, symbol: usize) -> Result<()> {
        check_symbol(model, symbol)?;
        let n = self.alpha_z.len();

        // The scale factor first: total unnormalized mass of the new column.
        let mut c_t = 0.0;
        for j in 0..n {
            let mut s = 0.0;
            for i in 0..n {
                s += self.alpha_z[i] * model.a(i, j);
            }
            c_t += s * model.b(j, symbol);
        }
        if c_t <= 0.0 {
            return Err(Error::ImpossibleObservation { t: self.t + 1 });
        }

        // Then the semiring step: each new pair is the sum over predecessors
        // of the lifted scaled kernel times the predecessor's pair.
        let mut new_z = vec![0.0; n];
        let mut new_h = vec![0.0; n];
        for j in 0..n {
            let b_j = model.b(j, symbol);
            if b_j == 0.0 {
                continue;
            }
            let mut acc = EsrValue::ZERO;
            for i in 0..n {
                let z = model.a(i, j) * b_j / c_t;
                if z == 0.0 {
                    continue;
                }
                let prev = EsrValue::new(self.alpha_z[i], self.alpha_h[i]);
                acc = acc.plus(&lift_weight(z).times(&prev));
            }
            new_z[j] = acc.z;
            new_h[j] = acc.h;
        }
        self.alpha_z = new_z;
        self.alpha_h = new_h;
        self.t += 1;
        self.log_likelihood += c_t.ln();
        Ok(())
    }

    /// Step index of the most recently absorbed observation.
    pub fn t(&self) -> usize {
        self.t
    }

    pub fn alpha_z(&self) -> &[f64] {
        &self.alpha_z
    }

    pub fn alpha_h(&self) -> &[f64] {
        &self.alpha_h
    }

    /// Entropy of the posterior over state prefixes absorbed so far, nats.
    pub fn entropy(&self) -> f64 {
        clamp_entropy(-self.alpha_h.iter().sum::<f64>())
    }

    /// ln p(observations absorbed so far).
    pub fn log_likelihood(&self) -> f64 {
        self.log_likelihood
    }

    /// f64 cells retained between steps.
    pub fn state_elems(&self) -> usize {
        self.alpha_z.len() + self.alpha_h.len() + 1
    }
}

/// Full-sequence posterior entropy in one forward sweep.
pub fn esrfb_entropy(model: &HmmModel, obs: &ObservationSeq) -> Result<EntropyResult> {
    model.check_obs(obs)?;
    let mut state = EsrForwardState::init(model, obs.at(0))?;
    for t in 1..obs.len() {
        state.step(model, obs.at(t))?;
    }
    Ok(EntropyResult {
        entropy: state.entropy(),
        log_likelihood: state.log_likelihood(),
        peak_state_elems: state.state_elems(),
    })
}

/// One column of the entropy-semiring backward sweep.
#[derive(Debug, Clone)]
pub struct EsrBackwardColumn {
    pub beta_z: Vec<f64>,
    pub beta_h: Vec<f64>,
}

/// Backward sweep from the end of the sequence down to step `down_to`,
/// returning only that column. `c` must hold the scale factors of the full
/// forward pass.
pub fn esr_backward(
    model: &HmmModel,
    obs: &ObservationSeq,
    c: &[f64],
    down_to: usize,
) -> EsrBackwardColumn {
    assert_eq!(c.len(), obs.len(), "scale factor length mismatch");
    esr_backward_with(model, obs, |t| c[t], down_to)
}

fn esr_backward_with(
    model: &HmmModel,
    obs: &ObservationSeq,
    c_at: impl Fn(usize) -> f64,
    down_to: usize,
) -> EsrBackwardColumn {
    let n = model.num_states();
    let mut beta_z = vec![1.0f64; n];
    let mut beta_h = vec![0.0f64; n];
    for t in (down_to..obs.t_max()).rev() {
        let o_next = obs.at(t + 1);
        let c_next = c_at(t + 1);
        let mut new_z = vec![0.0; n];
        let mut new_h = vec![0.0; n];
        for i in 0..n {
            let mut acc = EsrValue::ZERO;
            for j in 0..n {
                let z = model.a(i, j) * model.b(j, o_next) / c_next;
                if z == 0.0 {
                    continue;
                }
                let succ = EsrValue::new(beta_z[j], beta_h[j]);
                acc = acc.plus(&lift_weight(z).times(&succ));
            }
            new_z[i] = acc.z;
            new_h[i] = acc.h;
        }
        beta_z = new_z;
        beta_h = new_h;
    }
    EsrBackwardColumn { beta_z, beta_h }
}

/// The window-independent part of a conditioned run: forward column at the
/// window start, backward column at the window end, and the scale factors
/// in between. Computing it once lets many window assignments be evaluated
/// cheaply.
struct SubseqParts {
    from: usize,
    to: usize,
    alpha_z: Vec<f64>,
    alpha_h: Vec<f64>,
    beta: EsrBackwardColumn,
    /// Scale factors for steps from+1 ..= t_max.
    c_tail: Vec<f64>,
    log_likelihood: f64,
    peak_state_elems: usize,
}

enum RowOutcome {
    Infeasible,
    Underflow,
    Feasible { p: f64, h_cond: f64, h_joint: f64 },
}

impl SubseqParts {
    fn compute(model: &HmmModel, obs: &ObservationSeq, from: usize, to: usize) -> Result<Self> {
        let mut state = EsrForwardState::init(model, obs.at(0))?;
        for t in 1..=from {
            state.step(model, obs.at(t))?;
        }
        let mut log_likelihood = state.log_likelihood();

        // Beyond the window start only the z recursion matters, but its
        // scale factors must be kept: the backward sweep and the window
        // kernels both divide by them.
        let n = model.num_states();
        let mut cur = state.alpha_z.clone();
        let mut c_tail = Vec::with_capacity(obs.t_max() - from);
        for t in from + 1..obs.len() {
            let mut next = vec![0.0; n];
            let mut c_t = 0.0;
            for j in 0..n {
                let mut s = 0.0;
                for i in 0..n {
                    s += cur[i] * model.a(i, j);
                }
                let v = s * model.b(j, obs.at(t));
                next[j] = v;
                c_t += v;
            }
            if c_t <= 0.0 {
                return Err(Error::ImpossibleObservation { t });
            }
            for v in &mut next {
                *v /= c_t;
            }
            c_tail.push(c_t);
            log_likelihood += c_t.ln();
            cur = next;
        }
        drop(cur);

        let beta = esr_backward_with(model, obs, |t| c_tail[t - from - 1], to);
        let peak_state_elems = state.alpha_z.len()
            + state.alpha_h.len()
            + beta.beta_z.len()
            + beta.beta_h.len()
            + c_tail.len()
            + 1;
        Ok(SubseqParts {
            from,
            to,
            alpha_z: state.alpha_z,
            alpha_h: state.alpha_h,
            beta,
            c_tail,
            log_likelihood,
            peak_state_elems,
        })
    }

    /// Joins the columns through one window assignment.
    fn evaluate(&self, model: &HmmModel, obs: &ObservationSeq, states: &[usize]) -> RowOutcome {
        let az = self.alpha_z[states[0]];
        let last = *states.last().expect("window is never empty");
        let bz = self.beta.beta_z[last];
        if az == 0.0 || bz == 0.0 {
            return RowOutcome::Infeasible;
        }
        let mut zeta = 1.0f64;
        let mut sum_ln = 0.0f64;
        for (k, t) in (self.from + 1..=self.to).enumerate() {
            let w = model.a(states[k], states[k + 1]) * model.b(states[k + 1], obs.at(t))
                / self.c_tail[t - self.from - 1];
            if w == 0.0 {
                return RowOutcome::Infeasible;
            }
            zeta *= w;
            sum_ln += w.ln();
        }
        let p = az * zeta * bz;
        if p <= 0.0 {
            return RowOutcome::Underflow;
        }
        let ah = self.alpha_h[states[0]];
        let bh = self.beta.beta_h[last];
        // Product of lifted window kernels, folded by hand: the pair
        // (zeta, zeta * sum_ln) sandwiched between the columns.
        let h_joint = zeta * (az * bh + ah * bz + az * bz * sum_ln);
        let h_cond = clamp_entropy(-h_joint / p + p.ln());
        RowOutcome::Feasible { p, h_cond, h_joint }
    }
}

/// Entropy of the unconstrained states given a fixed window of states.
pub fn esrfb_subseq_entropy(
    model: &HmmModel,
    obs: &ObservationSeq,
    constraint: &SubseqConstraint,
) -> Result<SubseqEntropyResult> {
    constraint.check(model, obs)?;
    let parts = SubseqParts::compute(model, obs, constraint.from(), constraint.to())?;
    match parts.evaluate(model, obs, constraint.states()) {
        RowOutcome::Infeasible => Err(Error::ImpossibleConstraint),
        RowOutcome::Underflow => Err(underflow_error()),
        RowOutcome::Feasible { p, h_cond, h_joint } => Ok(SubseqEntropyResult {
            h_cond,
            p_constraint: p,
            h_joint_term: h_joint,
            log_likelihood: parts.log_likelihood,
            peak_state_elems: parts.peak_state_elems,
        }),
    }
}

/// Evaluates every assignment of the window `from..=to` with one shared
/// pass, under the default assignment cap.
pub fn esrfb_subseq_enumerate(
    model: &HmmModel,
    obs: &ObservationSeq,
    from: usize,
    to: usize,
) -> Result<SubseqEnumeration> {
    esrfb_subseq_enumerate_with_cap(model, obs, from, to, DEFAULT_ASSIGNMENT_CAP)
}

pub fn esrfb_subseq_enumerate_with_cap(
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
    let parts = SubseqParts::compute(model, obs, from, to)?;
    let mut rows = Vec::with_capacity(count);
    for idx in 0..count {
        let states = unrank_states(idx, model.num_states(), width);
        let row = match parts.evaluate(model, obs, &states) {
            RowOutcome::Infeasible => SubseqEnumRow {
                states,
                p_constraint: 0.0,
                h_cond: None,
                h_joint_term: None,
            },
            RowOutcome::Underflow => return Err(underflow_error()),
            RowOutcome::Feasible { p, h_cond, h_joint } => SubseqEnumRow {
                states,
                p_constraint: p,
                h_cond: Some(h_cond),
                h_joint_term: Some(h_joint),
            },
        };
        rows.push(row);
    }
    Ok(SubseqEnumeration {
        rows,
        log_likelihood: parts.log_likelihood,
        peak_state_elems: parts.peak_state_elems,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{random_model, random_obs};
    use crate::oracle::{oracle_entropy, oracle_subseq_entropy};

    fn symmetric_two_state() -> (HmmModel, ObservationSeq) {
        let m = HmmModel::new(
            2,
            2,
            vec![0.5, 0.5],
            vec![0.9, 0.1, 0.1, 0.9],
            vec![0.9, 0.1, 0.1, 0.9],
        )
        .unwrap();
        let obs = ObservationSeq::new(vec![0, 0]).unwrap();
        (m, obs)
    }

    fn assert_close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() < tol, "{a} vs {b}");
    }

    #[test]
    fn init_matches_hand_values() {
        let (m, obs) = symmetric_two_state();
        let state = EsrForwardState::init(&m, obs.at(0)).unwrap();
        assert_close(state.alpha_z()[0], 0.9, 1e-15);
        assert_close(state.alpha_z()[1], 0.1, 1e-15);
        assert_close(state.alpha_h()[0], 0.9 * 0.9f64.ln(), 1e-15);
        assert_close(state.alpha_h()[1], 0.1 * 0.1f64.ln(), 1e-15);
        assert_close(state.log_likelihood(), 0.5f64.ln(), 1e-15);
    }

    #[test]
    fn step_matches_hand_values() {
        let (m, obs) = symmetric_two_state();
        let mut state = EsrForwardState::init(&m, obs.at(0)).unwrap();
        state.step(&m, obs.at(1)).unwrap();
        assert_close(state.alpha_z()[0], 41.0 / 42.0, 1e-12);
        assert_close(state.alpha_z()[1], 1.0 / 42.0, 1e-12);
        assert_close(state.alpha_h()[0], -0.08781662, 1e-7);
        assert_close(state.alpha_h()[1], -0.10549564, 1e-7);
        assert_close(state.entropy(), 0.19331226, 1e-7);
        assert_close(state.log_likelihood(), 0.378f64.ln(), 1e-12);
    }

    #[test]
    fn worked_instance_entropy() {
        let (m, obs) = symmetric_two_state();
        let r = esrfb_entropy(&m, &obs).unwrap();
        assert_close(r.entropy, 0.193313, 1e-5);
        assert_close(r.log_likelihood, 0.378f64.ln(), 1e-12);
        assert_eq!(r.peak_state_elems, 5);
    }

    #[test]
    fn matches_oracle_on_random_models() {
        for seed in 0..30 {
            let n = 2 + (seed as usize % 2);
            let m = random_model(n, 3, seed);
            let obs = random_obs(3, 1 + (seed as usize % 6), 2000 + seed);
            let got = esrfb_entropy(&m, &obs).unwrap();
            let want = oracle_entropy(&m, &obs).unwrap();
            assert_close(got.entropy, want, 1e-9);
        }
    }

    #[test]
    fn deterministic_model_gives_exact_zero() {
        // Cyclic deterministic chain with identity emissions: one state
        // sequence is consistent, so the posterior has no entropy at all.
        let m = HmmModel::new(
            2,
            2,
            vec![1.0, 0.0],
            vec![0.0, 1.0, 1.0, 0.0],
            vec![1.0, 0.0, 0.0, 1.0],
        )
        .unwrap();
        let obs = ObservationSeq::new(vec![0, 1, 0, 1, 0]).unwrap();
        let r = esrfb_entropy(&m, &obs).unwrap();
        assert_eq!(r.entropy, 0.0);
        assert_eq!(r.log_likelihood, 0.0);
    }

    #[test]
    fn uninformative_model_closed_form() {
        // Uniform everything: the posterior is uniform over N^(T+1)
        // sequences and each h cell is exactly (t+1) * (1/N) ln(1/N).
        for n in [2usize, 3] {
            let nf = n as f64;
            let m = HmmModel::new(
                n,
                2,
                vec![1.0 / nf; n],
                vec![1.0 / nf; n * n],
                vec![0.5; n * 2],
            )
            .unwrap();
            let symbols: Vec<usize> = (0..11).map(|t| t % 2).collect();
            let obs = ObservationSeq::new(symbols).unwrap();
            let mut state = EsrForwardState::init(&m, obs.at(0)).unwrap();
            for t in 1..obs.len() {
                state.step(&m, obs.at(t)).unwrap();
            }
            for j in 0..n {
                let want = 11.0 * (1.0 / nf) * (1.0 / nf).ln();
                assert_close(state.alpha_h()[j], want, 1e-12);
            }
            assert_close(state.entropy(), 11.0 * nf.ln(), 1e-9);
        }
    }

    #[test]
    fn backward_closed_form_uninformative() {
        let n = 3usize;
        let nf = n as f64;
        let m = HmmModel::new(
            n,
            2,
            vec![1.0 / nf; n],
            vec![1.0 / nf; n * n],
            vec![0.5; n * 2],
        )
        .unwrap();
        let obs = ObservationSeq::new(vec![0; 8]).unwrap();
        let c = vec![0.5; 8];
        for down_to in [0usize, 3, 7] {
            let col = esr_backward(&m, &obs, &c, down_to);
            let steps_left = (7 - down_to) as f64;
            for i in 0..n {
                assert_close(col.beta_z[i], 1.0, 1e-12);
                assert_close(col.beta_h[i], -steps_left * nf.ln(), 1e-12);
            }
        }
    }

    #[test]
    fn backward_worked_instance() {
        let (m, obs) = symmetric_two_state();
        let c = vec![0.5, 0.756];

        let top = esr_backward(&m, &obs, &c, 1);
        assert_eq!(top.beta_z, vec![1.0, 1.0]);
        assert_eq!(top.beta_h, vec![0.0, 0.0]);

        // z parts reproduce the scaled backward pass; h parts are the
        // lifted-kernel sums over the single remaining step.
        let col = esr_backward(&m, &obs, &c, 0);
        assert_close(col.beta_z[0], 0.82 / 0.756, 1e-12);
        assert_close(col.beta_z[1], 0.18 / 0.756, 1e-12);
        let z00 = 0.81f64 / 0.756;
        let z01 = 0.01f64 / 0.756;
        assert_close(col.beta_h[0], z00 * z00.ln() + z01 * z01.ln(), 1e-12);
        let z10 = 0.09f64 / 0.756;
        assert_close(col.beta_h[1], 2.0 * z10 * z10.ln(), 1e-12);
    }

    #[test]
    fn state_stays_constant_while_streaming() {
        let m = random_model(4, 3, 17);
        let obs = random_obs(3, 200, 18);
        let mut state = EsrForwardState::init(&m, obs.at(0)).unwrap();
        assert_eq!(state.state_elems(), 9);
        for t in 1..obs.len() {
            state.step(&m, obs.at(t)).unwrap();
            assert_eq!(state.state_elems(), 9);
        }
        assert_eq!(state.t(), 199);
    }

    #[test]
    fn single_observation_is_filtered_entropy() {
        let (m, _) = symmetric_two_state();
        let obs = ObservationSeq::new(vec![0]).unwrap();
        let r = esrfb_entropy(&m, &obs).unwrap();
        let want = -(0.9f64 * 0.9f64.ln() + 0.1 * 0.1f64.ln());
        assert_close(r.entropy, want, 1e-12);
    }

    #[test]
    fn subseq_worked_instance() {
        let (m, obs) = symmetric_two_state();
        let c = SubseqConstraint::new(1, 1, vec![0]).unwrap();
        let r = esrfb_subseq_entropy(&m, &obs, &c).unwrap();
        assert_close(r.h_cond, 0.065861, 1e-5);
        assert_close(r.p_constraint, 41.0 / 42.0, 1e-12);
        assert_close(
            r.h_joint_term,
            r.p_constraint * (r.p_constraint.ln() - r.h_cond),
            1e-12,
        );
        assert_close(r.log_likelihood, 0.378f64.ln(), 1e-12);
    }

    #[test]
    fn subseq_matches_oracle_on_random_models() {
        for seed in 0..25 {
            let n = 2 + (seed as usize % 2);
            let m = random_model(n, 3, 3000 + seed);
            let obs = random_obs(3, 6, 3100 + seed);
            let from = seed as usize % 4;
            let to = from + 1 + (seed as usize % 2);
            let states: Vec<usize> = (from..=to).map(|t| (seed as usize + t) % n).collect();
            let constraint = SubseqConstraint::new(from, to, states).unwrap();
            let got = esrfb_subseq_entropy(&m, &obs, &constraint);
            let want = oracle_subseq_entropy(&m, &obs, &constraint);
            match (got, want) {
                (Ok(g), Ok(w)) => {
                    assert_close(g.h_cond, w.h_cond, 1e-9);
                    assert_close(g.p_constraint, w.p_constraint, 1e-12);
                }
                (Err(Error::ImpossibleConstraint), Err(Error::ImpossibleConstraint)) => {}
                (g, w) => panic!("seed {seed}: fast {g:?} vs oracle {w:?}"),
            }
        }
    }

    #[test]
    fn subseq_full_width_leaves_no_entropy() {
        // Everything is pinned, so only a rounding residue of the general
        // formula can remain (negatives are clamped away, a positive ulp
        // may survive).
        let (m, obs) = symmetric_two_state();
        let c = SubseqConstraint::new(0, 1, vec![0, 0]).unwrap();
        let r = esrfb_subseq_entropy(&m, &obs, &c).unwrap();
        assert!(r.h_cond.abs() < 1e-12, "h_cond {}", r.h_cond);
        assert!(r.h_cond >= 0.0);
        assert_close(r.p_constraint, 27.0 / 28.0, 1e-12);
    }

    #[test]
    fn subseq_window_at_sequence_end() {
        // Window touching the last step exercises the empty backward sweep.
        let m = random_model(3, 2, 41);
        let obs = random_obs(2, 5, 42);
        let constraint = SubseqConstraint::new(4, 4, vec![1]).unwrap();
        let got = esrfb_subseq_entropy(&m, &obs, &constraint).unwrap();
        let want = oracle_subseq_entropy(&m, &obs, &constraint).unwrap();
        assert_close(got.h_cond, want.h_cond, 1e-9);
        assert_close(got.p_constraint, want.p_constraint, 1e-12);
    }

    #[test]
    fn impossible_constraint_is_an_error() {
        let m = HmmModel::new(
            2,
            2,
            vec![0.5, 0.5],
            vec![0.5, 0.5, 0.5, 0.5],
            vec![1.0, 0.0, 0.0, 1.0],
        )
        .unwrap();
        let obs = ObservationSeq::new(vec![0, 0]).unwrap();
        // Observing symbol 0 at step 1 rules out state 1 there.
        let c = SubseqConstraint::new(1, 1, vec![1]).unwrap();
        match esrfb_subseq_entropy(&m, &obs, &c) {
            Err(Error::ImpossibleConstraint) => {}
            other => panic!("expected impossible constraint, got {other:?}"),
        }
    }

    #[test]
    fn underflowing_window_is_reported_not_zeroed() {
        // All factors positive, but the window product is ~1e-600.
        let m = HmmModel::new(
            2,
            2,
            vec![0.5, 0.5],
            vec![1e-300, 1.0, 0.5, 0.5],
            vec![1.0, 0.0, 1.0, 0.0],
        )
        .unwrap();
        let obs = ObservationSeq::new(vec![0, 0, 0]).unwrap();
        let c = SubseqConstraint::new(0, 2, vec![0, 0, 0]).unwrap();
        match esrfb_subseq_entropy(&m, &obs, &c) {
            Err(Error::Malformed(msg)) => assert!(msg.contains("underflow"), "{msg}"),
            other => panic!("expected underflow report, got {other:?}"),
        }
    }

    #[test]
    fn enumerate_covers_window_and_recovers_full_entropy() {
        let m = random_model(3, 2, 60);
        let obs = random_obs(2, 5, 61);
        let e = esrfb_subseq_enumerate(&m, &obs, 1, 2).unwrap();
        assert_eq!(e.rows.len(), 9);

        let total_p: f64 = e.rows.iter().map(|r| r.p_constraint).sum();
        assert_close(total_p, 1.0, 1e-9);

        // Window assignments partition the sequences, so the matching p ln p
        // masses add back up to the negated full entropy.
        let total_plogp: f64 = e.rows.iter().filter_map(|r| r.h_joint_term).sum();
        let full = esrfb_entropy(&m, &obs).unwrap();
        assert_close(-total_plogp, full.entropy, 1e-9);

        for row in &e.rows {
            let constraint = SubseqConstraint::new(1, 2, row.states.clone()).unwrap();
            let single = esrfb_subseq_entropy(&m, &obs, &constraint).unwrap();
            assert_close(row.p_constraint, single.p_constraint, 1e-15);
            assert_close(row.h_cond.unwrap(), single.h_cond, 1e-15);
        }
    }

    #[test]
    fn enumerate_marks_impossible_rows() {
        let m = HmmModel::new(
            2,
            2,
            vec![0.5, 0.5],
            vec![0.5, 0.5, 0.5, 0.5],
            vec![1.0, 0.0, 0.0, 1.0],
        )
        .unwrap();
        let obs = ObservationSeq::new(vec![0, 0]).unwrap();
        let e = esrfb_subseq_enumerate(&m, &obs, 1, 1).unwrap();
        assert_eq!(e.rows[0].states, vec![0]);
        assert_close(e.rows[0].p_constraint, 1.0, 1e-12);
        assert_eq!(e.rows[1].states, vec![1]);
        assert_eq!(e.rows[1].p_constraint, 0.0);
        assert_eq!(e.rows[1].h_cond, None);
        assert_eq!(e.rows[1].h_joint_term, None);
    }

    #[test]
    fn enumerate_respects_cap() {
        let m = random_model(3, 2, 70);
        let obs = random_obs(2, 4, 71);
        match esrfb_subseq_enumerate_with_cap(&m, &obs, 0, 1, 8) {
            Err(Error::CapExceeded {
                base,
                exponent,
                cap,
            }) => {
                assert_eq!((base, exponent, cap), (3, 2, 8));
            }
            other => panic!("expected cap refusal, got {other:?}"),
        }
        assert!(esrfb_subseq_enumerate_with_cap(&m, &obs, 0, 1, 9).is_ok());
    }

    #[test]
    fn bad_windows_are_rejected() {
        let m = random_model(2, 2, 80);
        let obs = random_obs(2, 3, 81);
        assert!(matches!(
            esrfb_subseq_enumerate(&m, &obs, 2, 1),
            Err(Error::Malformed(_))
        ));
        assert!(matches!(
            esrfb_subseq_enumerate(&m, &obs, 1, 3),
            Err(Error::Malformed(_))
        ));
    }
}
