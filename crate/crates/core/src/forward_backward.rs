//! Scaled forward-backward recursions and their semiring-generic form.
//!
//! The scaled recursions follow the standard construction: at each step the
//! forward variables are normalized by c_t, the total unnormalized mass, so
//! alpha_hat_t(j) = p(s_t = j | o_0..o_t) and the c_t recover the likelihood
//! as prod c_t without underflow. The backward variables are scaled by the
//! same constants, making alpha_hat * beta_hat the posterior state marginal.
//!
//! The second half of the module reruns the same recursions over an arbitrary
//! commutative semiring: a chain is described by per-step kernel matrices,
//! and forward/backward/marginal/normalize are written once against
//! [`Semiring`]. Instantiated at `f64` with scaled kernels this reproduces
//! the recursions above; instantiated at [`EsrValue`] with lifted kernels the
//! normalization's h part accumulates the negated posterior entropy.

use crate::error::{Error, Result};
use crate::model::{HmmModel, ObservationSeq, SubseqConstraint};
use crate::semiring::{lift_weight, EsrValue, Semiring};

// ---------------------------------------------------------------------------
// scaled recursions
// ---------------------------------------------------------------------------

/// Scaled forward pass.
///
/// Returns `(alpha_hat, c)`: the filtered state posteriors, (T+1) x N
/// row-major, and the T+1 normalization constants. c_0 is the probability of
/// the first observation; each later c_t is the double sum of
/// alpha_hat_{t-1}(i) a(i, j) b(j, o_t), computed before normalizing.
pub fn scaled_forward(model: &HmmModel, obs: &ObservationSeq) -> Result<(Vec<f64>, Vec<f64>)> {
    model.check_obs(obs)?;
    let n = model.num_states();
    let len = obs.len();
    let mut alpha = vec![0.0f64; len * n];
    let mut c = vec![0.0f64; len];

    let mut c0 = 0.0;
    for j in 0..n {
        let v = model.pi(j) * model.b(j, obs.at(0));
        alpha[j] = v;
        c0 += v;
    }
    if c0 <= 0.0 {
        return Err(Error::ImpossibleObservation { t: 0 });
    }
    c[0] = c0;
    for j in 0..n {
        alpha[j] /= c0;
    }

    for t in 1..len {
        let (prev, cur) = alpha.split_at_mut(t * n);
        let prev = &prev[(t - 1) * n..];
        let cur = &mut cur[..n];
        let mut ct = 0.0;
        for j in 0..n {
            let mut s = 0.0;
            for i in 0..n {
                s += prev[i] * model.a(i, j);
            }
            let v = s * model.b(j, obs.at(t));
            cur[j] = v;
            ct += v;
        }
        if ct <= 0.0 {
            return Err(Error::ImpossibleObservation { t });
        }
        c[t] = ct;
        for v in cur.iter_mut() {
            *v /= ct;
        }
    }
    Ok((alpha, c))
}

/// Scaled backward pass using the forward pass's normalization constants.
///
/// Returns beta_hat, (T+1) x N row-major, with the final row all ones.
pub fn scaled_backward(model: &HmmModel, obs: &ObservationSeq, c: &[f64]) -> Vec<f64> {
    let n = model.num_states();
    let len = obs.len();
    assert_eq!(c.len(), len, "normalization constants length mismatch");
    let mut beta = vec![0.0f64; len * n];
    beta[(len - 1) * n..].fill(1.0);

    for t in (0..len - 1).rev() {
        let o_next = obs.at(t + 1);
        let c_next = c[t + 1];
        for i in 0..n {
            let mut s = 0.0;
            for j in 0..n {
                s += model.a(i, j) * model.b(j, o_next) * beta[(t + 1) * n + j];
            }
            beta[t * n + i] = s / c_next;
        }
    }
    beta
}

/// Both scaled passes plus the normalization constants, the common input to
/// marginal queries and the stored-lattice entropy algorithm.
#[derive(Debug, Clone)]
pub struct ScaledFbResult {
    alpha_hat: Vec<f64>,
    beta_hat: Vec<f64>,
    c: Vec<f64>,
    num_states: usize,
}

impl ScaledFbResult {
    pub fn compute(model: &HmmModel, obs: &ObservationSeq) -> Result<Self> {
        let (alpha_hat, c) = scaled_forward(model, obs)?;
        let beta_hat = scaled_backward(model, obs, &c);
        Ok(ScaledFbResult {
            alpha_hat,
            beta_hat,
            c,
            num_states: model.num_states(),
        })
    }

    #[inline]
    pub fn num_states(&self) -> usize {
        self.num_states
    }

    /// Sequence length T+1.
    #[inline]
    pub fn seq_len(&self) -> usize {
        self.c.len()
    }

    #[inline]
    pub fn alpha(&self, t: usize, j: usize) -> f64 {
        self.alpha_hat[t * self.num_states + j]
    }

    #[inline]
    pub fn beta(&self, t: usize, i: usize) -> f64 {
        self.beta_hat[t * self.num_states + i]
    }

    pub fn alpha_row(&self, t: usize) -> &[f64] {
        &self.alpha_hat[t * self.num_states..(t + 1) * self.num_states]
    }

    pub fn beta_row(&self, t: usize) -> &[f64] {
        &self.beta_hat[t * self.num_states..(t + 1) * self.num_states]
    }

    pub fn c(&self) -> &[f64] {
        &self.c
    }

    /// ln p(o) = sum of ln c_t.
    pub fn log_likelihood(&self) -> f64 {
        self.c.iter().map(|&ct| ct.ln()).sum()
    }

    /// Posterior state marginal p(s_t = j | o) for all j.
    pub fn state_marginal(&self, t: usize) -> Vec<f64> {
        assert!(t < self.seq_len(), "step {t} out of range");
        let n = self.num_states;
        (0..n).map(|j| self.alpha(t, j) * self.beta(t, j)).collect()
    }

    /// Number of retained floating-point cells; the memory cost of keeping
    /// the full lattice.
    pub fn cell_count(&self) -> usize {
        self.alpha_hat.len() + self.beta_hat.len() + self.c.len()
    }
}

/// Posterior pairwise marginal p(s_{t-1} = i, s_t = j | o) as an N x N
/// row-major matrix indexed by (i, j). Requires 1 <= t <= T.
pub fn pairwise_marginal(
    model: &HmmModel,
    obs: &ObservationSeq,
    fb: &ScaledFbResult,
    t: usize,
) -> Vec<f64> {
    assert!(t >= 1 && t < fb.seq_len(), "step {t} out of range");
    let n = fb.num_states();
    let o_t = obs.at(t);
    let c_t = fb.c()[t];
    let mut xi = vec![0.0f64; n * n];
    for i in 0..n {
        let alpha_prev = fb.alpha(t - 1, i);
        for j in 0..n {
            xi[i * n + j] =
                alpha_prev * model.a(i, j) * model.b(j, o_t) * fb.beta(t, j) / c_t;
        }
    }
    xi
}

/// Posterior probability of a fixed state window,
/// p(s_l..s_r = constraint | o).
pub fn range_marginal(
    model: &HmmModel,
    obs: &ObservationSeq,
    fb: &ScaledFbResult,
    constraint: &SubseqConstraint,
) -> Result<f64> {
    constraint.check(model, obs)?;
    let l = constraint.from();
    let r = constraint.to();
    let mut p = fb.alpha(l, constraint.state_at(l));
    for t in l + 1..=r {
        let (prev, cur) = (constraint.state_at(t - 1), constraint.state_at(t));
        p *= model.a(prev, cur) * model.b(cur, obs.at(t)) / fb.c()[t];
    }
    p *= fb.beta(r, constraint.state_at(r));
    Ok(p)
}

// ---------------------------------------------------------------------------
// semiring-generic layer
// ---------------------------------------------------------------------------

/// A chain described by semiring-valued kernels: an initial vector u0 over N
/// states and one N x N matrix per step t = 1..T.
#[derive(Debug, Clone)]
pub struct ChainKernels<E> {
    num_states: usize,
    u0: Vec<E>,
    steps: Vec<E>,
}

impl<E: Semiring> ChainKernels<E> {
    /// `steps` holds T row-major N x N matrices back to back; entry
    /// (from, to) of step t sits at `(t - 1) * N * N + from * N + to`.
    pub fn new(u0: Vec<E>, steps: Vec<E>) -> Result<Self> {
        let n = u0.len();
        if n == 0 {
            return Err(Error::malformed("chain kernels need at least one state"));
        }
        if steps.len() % (n * n) != 0 {
            return Err(Error::Malformed(format!(
                "step kernels hold {} entries, not a multiple of {n}x{n}",
                steps.len()
            )));
        }
        Ok(ChainKernels {
            num_states: n,
            u0,
            steps,
        })
    }

    #[inline]
    pub fn num_states(&self) -> usize {
        self.num_states
    }

    /// Chain length T+1.
    #[inline]
    pub fn seq_len(&self) -> usize {
        self.steps.len() / (self.num_states * self.num_states) + 1
    }

    pub fn initial(&self) -> &[E] {
        &self.u0
    }

    /// Kernel entry for step `t` in 1..=T.
    #[inline]
    pub fn step(&self, t: usize, from: usize, to: usize) -> E {
        let n = self.num_states;
        self.steps[(t - 1) * n * n + from * n + to]
    }
}

/// Scaled sum-product kernels of an HMM chain: u0(j) = pi(j) b(j, o_0) / c_0
/// and u_t(i, j) = a(i, j) b(j, o_t) / c_t. With these, the generic forward
/// pass reproduces the scaled alpha_hat exactly and normalization yields 1.
pub fn sum_product_kernels(
    model: &HmmModel,
    obs: &ObservationSeq,
    c: &[f64],
) -> ChainKernels<f64> {
    build_kernels(model, obs, c, |z| z)
}

/// Entropy-semiring kernels: the scaled sum-product kernels lifted to
/// (z, z ln z). Normalizing the generic forward pass gives (1, -H) where H
/// is the posterior state-sequence entropy.
pub fn entropy_kernels(
    model: &HmmModel,
    obs: &ObservationSeq,
    c: &[f64],
) -> ChainKernels<EsrValue> {
    build_kernels(model, obs, c, lift_weight)
}

fn build_kernels<E: Semiring>(
    model: &HmmModel,
    obs: &ObservationSeq,
    c: &[f64],
    embed: impl Fn(f64) -> E,
) -> ChainKernels<E> {
    let n = model.num_states();
    let len = obs.len();
    assert_eq!(c.len(), len, "normalization constants length mismatch");
    let u0 = (0..n)
        .map(|j| embed(model.pi(j) * model.b(j, obs.at(0)) / c[0]))
        .collect();
    let mut steps = Vec::with_capacity((len - 1) * n * n);
    for t in 1..len {
        for i in 0..n {
            for j in 0..n {
                steps.push(embed(model.a(i, j) * model.b(j, obs.at(t)) / c[t]));
            }
        }
    }
    ChainKernels {
        num_states: n,
        u0,
        steps,
    }
}

/// Generic forward pass: alpha_0 = u0 and
/// alpha_t(j) = (+)_i u_t(i, j) (x) alpha_{t-1}(i). One row per step.
pub fn generic_forward<E: Semiring>(kernels: &ChainKernels<E>) -> Vec<Vec<E>> {
    let n = kernels.num_states();
    let len = kernels.seq_len();
    let mut rows = Vec::with_capacity(len);
    rows.push(kernels.initial().to_vec());
    for t in 1..len {
        let prev = &rows[t - 1];
        let mut cur = vec![E::zero(); n];
        for (j, out) in cur.iter_mut().enumerate() {
            for i in 0..n {
                *out = out.plus(&kernels.step(t, i, j).times(&prev[i]));
            }
        }
        rows.push(cur);
    }
    rows
}

/// Generic backward pass: beta_T = one and
/// beta_t(i) = (+)_j u_{t+1}(i, j) (x) beta_{t+1}(j). One row per step.
pub fn generic_backward<E: Semiring>(kernels: &ChainKernels<E>) -> Vec<Vec<E>> {
    let n = kernels.num_states();
    let len = kernels.seq_len();
    let mut rows = vec![vec![E::one(); n]; len];
    for t in (0..len - 1).rev() {
        for i in 0..n {
            let mut acc = E::zero();
            for j in 0..n {
                acc = acc.plus(&kernels.step(t + 1, i, j).times(&rows[t + 1][j]));
            }
            rows[t][i] = acc;
        }
    }
    rows
}

/// Generic window marginal: alpha_l(s_l) (x) the step kernels along the fixed
/// window (x) beta_r(s_r).
pub fn generic_marginal<E: Semiring>(
    kernels: &ChainKernels<E>,
    alpha: &[Vec<E>],
    beta: &[Vec<E>],
    constraint: &SubseqConstraint,
) -> Result<E> {
    let l = constraint.from();
    let r = constraint.to();
    if r >= kernels.seq_len() {
        return Err(Error::Malformed(format!(
            "constraint window [{l}, {r}] exceeds final step {}",
            kernels.seq_len() - 1
        )));
    }
    for &s in constraint.states() {
        if s >= kernels.num_states() {
            return Err(Error::Malformed(format!(
                "constraint state {s} out of range for {} states",
                kernels.num_states()
            )));
        }
    }
    let mut acc = alpha[l][constraint.state_at(l)];
    for t in l + 1..=r {
        acc = acc.times(&kernels.step(t, constraint.state_at(t - 1), constraint.state_at(t)));
    }
    Ok(acc.times(&beta[r][constraint.state_at(r)]))
}

/// Sums the final forward row: the semiring-level normalization constant of
/// the chain.
pub fn generic_normalize<E: Semiring>(final_alpha: &[E]) -> E {
    final_alpha
        .iter()
        .fold(E::zero(), |acc, v| acc.plus(v))
}

// ---------------------------------------------------------------------------
// tests
// ---------------------------------------------------------------------------
