//! Entropy computation by carrying per-state prefix entropies forward.
//!
//! Next to the filtered posterior, the recursion keeps one number per state:
//! the entropy of the distribution over state prefixes that end in that
//! state, given the observations so far. A step conditions each new state on
//! its predecessors through the backward transition probabilities
//! p(s_{t-1} = i | s_t = j, o_0..o_t), which only need the previous filtered
//! posterior and the transition row sums. At the end the per-state
//! entropies are mixed by the final posterior to give the total.
//!
//! The h parts of the semiring sweep in [`super::esrfb`] are these same
//! quantities in different coordinates; [`super::esrfb_hernando_bridge_check`]
//! pins the correspondence down numerically.

use crate::entropy::{check_symbol, EntropyResult};
use crate::error::{Error, Result};
use crate::model::{HmmModel, ObservationSeq};
use crate::clamp_entropy;

/// Carried state: filtered posterior, per-state prefix entropies, and the
/// running log-likelihood.
#[derive(Debug, Clone)]
pub struct HernandoState {
    t: usize,
    alpha_hat: Vec<f64>,
    entropies: Vec<f64>,
    log_likelihood: f64,
}

impl HernandoState {
    /// Absorbs the first observation. A one-state prefix has no uncertainty
    /// beyond its endpoint, so every entropy starts at zero.
    pub fn init(model: &HmmModel, symbol: usize) -> Result<Self> {
        check_symbol(model, symbol)?;
        let n = model.num_states();
        let mut alpha_hat: Vec<f64> = (0..n).map(|j| model.pi(j) * model.b(j, symbol)).collect();
        let c0: f64 = alpha_hat.iter().sum();
        if c0 <= 0.0 {
            return Err(Error::ImpossibleObservation { t: 0 });
        }
        for v in &mut alpha_hat {
            *v /= c0;
        }
        Ok(HernandoState {
            t: 0,
            alpha_hat,
            entropies: vec![0.0; n],
            log_likelihood: c0.ln(),
        })
    }

    /// Absorbs the next observation.
    pub fn step(&mut self, model: &HmmModel, symbol: usize) -> Result<()> {
        check_symbol(model, symbol)?;
        let n = self.alpha_hat.len();

        // d[j] doubles as the normalizer of the backward transition
        // probabilities into j and, times the emission, as the unnormalized
        // new posterior.
        let mut d = vec![0.0; n];
        for (j, dj) in d.iter_mut().enumerate() {
            for i in 0..n {
                *dj += self.alpha_hat[i] * model.a(i, j);
            }
        }
        let c_t: f64 = (0..n).map(|j| d[j] * model.b(j, symbol)).sum();
        if c_t <= 0.0 {
            return Err(Error::ImpossibleObservation { t: self.t + 1 });
        }

        let mut new_entropies = vec![0.0; n];
        for j in 0..n {
            if d[j] <= 0.0 {
                // No mass flows into j; its entropy is pinned to zero and
                // never consulted, because every later conditional out of j
                // carries weight alpha_hat[j] = 0.
                continue;
            }
            let mut h = 0.0;
            for i in 0..n {
                let w = self.alpha_hat[i] * model.a(i, j);
                if w <= 0.0 {
                    continue;
                }
                let p = w / d[j];
                h += p * (self.entropies[i] - p.ln());
            }
            new_entropies[j] = h;
        }

        for (j, v) in self.alpha_hat.iter_mut().enumerate() {
            *v = d[j] * model.b(j, symbol) / c_t;
        }
        self.entropies = new_entropies;
        self.t += 1;
        self.log_likelihood += c_t.ln();
        Ok(())
    }

    /// Step index of the most recently absorbed observation.
    pub fn t(&self) -> usize {
        self.t
    }

    pub fn alpha_hat(&self) -> &[f64] {
        &self.alpha_hat
    }

    pub fn entropies(&self) -> &[f64] {
        &self.entropies
    }

    /// Entropy of the posterior over the prefixes absorbed so far: the
    /// per-state entropies mixed by the current posterior, plus the entropy
    /// of the posterior itself.
    pub fn entropy(&self) -> f64 {
        let mut h = 0.0;
        for (j, &az) in self.alpha_hat.iter().enumerate() {
            if az <= 0.0 {
                continue;
            }
            h += az * (self.entropies[j] - az.ln());
        }
        clamp_entropy(h)
    }

    /// ln p(observations absorbed so far).
    pub fn log_likelihood(&self) -> f64 {
        self.log_likelihood
    }

    /// f64 cells retained between steps.
    pub fn state_elems(&self) -> usize {
        self.alpha_hat.len() + self.entropies.len() + 1
    }
}

/// Full-sequence posterior entropy in one forward sweep.
pub fn hernando_entropy(model: &HmmModel, obs: &ObservationSeq) -> Result<EntropyResult> {
    model.check_obs(obs)?;
    let mut state = HernandoState::init(model, obs.at(0))?;
    for t in 1..obs.len() {
        state.step(model, obs.at(t))?;
    }
    Ok(EntropyResult {
        entropy: state.entropy(),
        log_likelihood: state.log_likelihood(),
        peak_state_elems: state.state_elems(),
    })
}
