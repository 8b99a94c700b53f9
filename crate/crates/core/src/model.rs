//! Hidden Markov model parameters, observation sequences, and subsequence
//! constraints.
//!
//! A model over N states and M symbols holds an initial distribution `pi`
//! (length N), a row-stochastic transition matrix `a` (N x N, `a[i][j]` is the
//! probability of moving from state i to state j), and a row-stochastic
//! emission matrix `b` (N x M). Matrices are stored flat in row-major order.
//! Observations are symbol indices o_0..o_T; a sequence of length T+1 pairs
//! with a hidden state sequence s_0..s_T.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};

/// Row sums of `pi`, `a`, and `b` must equal 1 within this tolerance.
pub const STOCHASTICITY_TOLERANCE: f64 = 1e-9;

// ---------------------------------------------------------------------------
// model
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, PartialEq)]
pub struct HmmModel {
    num_states: usize,
    num_symbols: usize,
    pi: Vec<f64>,
    a: Vec<f64>,
    b: Vec<f64>,
}

impl HmmModel {
    /// Builds a model and checks every invariant: dimensions, entries in
    /// [0, 1], and row sums within [`STOCHASTICITY_TOLERANCE`].
    pub fn new(
        num_states: usize,
        num_symbols: usize,
        pi: Vec<f64>,
        a: Vec<f64>,
        b: Vec<f64>,
    ) -> Result<Self> {
        let model = Self::new_unvalidated(num_states, num_symbols, pi, a, b)?;
        model.validate().map_err(Error::InvalidModel)?;
        Ok(model)
    }

    /// Builds a model checking dimensions only. Stochasticity is left to
    /// [`HmmModel::validate`], so callers can inspect a broken model and
    /// report every violation instead of failing on the first.
    pub fn new_unvalidated(
        num_states: usize,
        num_symbols: usize,
        pi: Vec<f64>,
        a: Vec<f64>,
        b: Vec<f64>,
    ) -> Result<Self> {
        if num_states == 0 || num_symbols == 0 {
            return Err(Error::malformed(
                "model must have at least one state and one symbol",
            ));
        }
        if pi.len() != num_states {
            return Err(Error::Malformed(format!(
                "pi has {} entries, expected {num_states}",
                pi.len()
            )));
        }
        if a.len() != num_states * num_states {
            return Err(Error::Malformed(format!(
                "transition matrix has {} entries, expected {num_states}x{num_states}",
                a.len()
            )));
        }
        if b.len() != num_states * num_symbols {
            return Err(Error::Malformed(format!(
                "emission matrix has {} entries, expected {num_states}x{num_symbols}",
                b.len()
            )));
        }
        Ok(HmmModel {
            num_states,
            num_symbols,
            pi,
            a,
            b,
        })
    }

    /// Checks entry ranges and row sums, reporting every violation found.
    pub fn validate(&self) -> std::result::Result<(), ValidationReport> {
        let mut violations = Vec::new();
        let n = self.num_states;
        let m = self.num_symbols;

        check_row(MatrixId::Pi, 0, &self.pi, &mut violations);
        for i in 0..n {
            check_row(MatrixId::Transition, i, &self.a[i * n..(i + 1) * n], &mut violations);
        }
        for i in 0..n {
            check_row(MatrixId::Emission, i, &self.b[i * m..(i + 1) * m], &mut violations);
        }

        if violations.is_empty() {
            Ok(())
        } else {
            Err(ValidationReport { violations })
        }
    }

    #[inline]
    pub fn num_states(&self) -> usize {
        self.num_states
    }

    #[inline]
    pub fn num_symbols(&self) -> usize {
        self.num_symbols
    }

    #[inline]
    pub fn pi(&self, i: usize) -> f64 {
        self.pi[i]
    }

    /// Transition probability from state `i` to state `j`.
    #[inline]
    pub fn a(&self, i: usize, j: usize) -> f64 {
        self.a[i * self.num_states + j]
    }

    /// Emission probability of symbol `sym` in state `i`.
    #[inline]
    pub fn b(&self, i: usize, sym: usize) -> f64 {
        self.b[i * self.num_symbols + sym]
    }

    pub fn pi_row(&self) -> &[f64] {
        &self.pi
    }

    pub fn a_row(&self, i: usize) -> &[f64] {
        &self.a[i * self.num_states..(i + 1) * self.num_states]
    }

    pub fn b_row(&self, i: usize) -> &[f64] {
        &self.b[i * self.num_symbols..(i + 1) * self.num_symbols]
    }

    /// Verifies every observation index is a valid symbol of this model.
    pub fn check_obs(&self, obs: &ObservationSeq) -> Result<()> {
        for (t, &sym) in obs.symbols().iter().enumerate() {
            if sym >= self.num_symbols {
                return Err(Error::Malformed(format!(
                    "observation {sym} at step {t} out of range for {} symbols",
                    self.num_symbols
                )));
            }
        }
        Ok(())
    }
}

fn check_row(matrix: MatrixId, row: usize, entries: &[f64], out: &mut Vec<Violation>) {
    for (col, &value) in entries.iter().enumerate() {
        // The negated form also catches NaN.
        if !(value >= 0.0 && value <= 1.0) {
            out.push(Violation::EntryOutOfRange {
                matrix,
                row,
                col,
                value,
            });
        }
    }
    let sum: f64 = entries.iter().sum();
    if !((sum - 1.0).abs() <= STOCHASTICITY_TOLERANCE) {
        out.push(Violation::RowSum { matrix, row, sum });
    }
}

// ---------------------------------------------------------------------------
// validation report
// ---------------------------------------------------------------------------

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum MatrixId {
    Pi,
    Transition,
    Emission,
}

impl fmt::Display for MatrixId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MatrixId::Pi => write!(f, "pi"),
            MatrixId::Transition => write!(f, "transition"),
            MatrixId::Emission => write!(f, "emission"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    EntryOutOfRange {
        matrix: MatrixId,
        row: usize,
        col: usize,
        value: f64,
    },
    RowSum {
        matrix: MatrixId,
        row: usize,
        sum: f64,
    },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::EntryOutOfRange {
                matrix: MatrixId::Pi,
                col,
                value,
                ..
            } => write!(f, "pi[{col}] = {value} outside [0, 1]"),
            Violation::EntryOutOfRange {
                matrix,
                row,
                col,
                value,
            } => write!(f, "{matrix}[{row}][{col}] = {value} outside [0, 1]"),
            Violation::RowSum {
                matrix: MatrixId::Pi,
                sum,
                ..
            } => write!(f, "pi sums to {sum}"),
            Violation::RowSum { matrix, row, sum } => {
                write!(f, "{matrix} row {row} sums to {sum}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, v) in self.violations.iter().enumerate() {
            if i > 0 {
                write!(f, "; ")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// observations and constraints
// ---------------------------------------------------------------------------

/// A non-empty sequence of observed symbol indices o_0..o_T.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ObservationSeq {
    obs: Vec<usize>,
}

impl ObservationSeq {
    pub fn new(obs: Vec<usize>) -> Result<Self> {
        if obs.is_empty() {
            return Err(Error::malformed("observation sequence must be non-empty"));
        }
        Ok(ObservationSeq { obs })
    }

    /// Sequence length T+1.
    #[inline]
    pub fn len(&self) -> usize {
        self.obs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Index of the final step, T.
    #[inline]
    pub fn t_max(&self) -> usize {
        self.obs.len() - 1
    }

    #[inline]
    pub fn at(&self, t: usize) -> usize {
        self.obs[t]
    }

    pub fn symbols(&self) -> &[usize] {
        &self.obs
    }
}

/// Fixes the hidden states on a contiguous window [from, to].
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubseqConstraint {
    from: usize,
    to: usize,
    states: Vec<usize>,
}

impl SubseqConstraint {
    pub fn new(from: usize, to: usize, states: Vec<usize>) -> Result<Self> {
        if from > to {
            return Err(Error::Malformed(format!(
                "constraint window [{from}, {to}] is empty"
            )));
        }
        let width = to - from + 1;
        if states.len() != width {
            return Err(Error::Malformed(format!(
                "constraint fixes {} states but window [{from}, {to}] has width {width}",
                states.len()
            )));
        }
        Ok(SubseqConstraint { from, to, states })
    }

    #[inline]
    pub fn from(&self) -> usize {
        self.from
    }

    #[inline]
    pub fn to(&self) -> usize {
        self.to
    }

    #[inline]
    pub fn width(&self) -> usize {
        self.to - self.from + 1
    }

    pub fn states(&self) -> &[usize] {
        &self.states
    }

    /// Fixed state at step `t`, which must lie inside the window.
    #[inline]
    pub fn state_at(&self, t: usize) -> usize {
        self.states[t - self.from]
    }

    /// Checks the window against the sequence length and the states against
    /// the model's state count.
    pub fn check(&self, model: &HmmModel, obs: &ObservationSeq) -> Result<()> {
        if self.to > obs.t_max() {
            return Err(Error::Malformed(format!(
                "constraint window [{}, {}] exceeds final step {}",
                self.from,
                self.to,
                obs.t_max()
            )));
        }
        for (offset, &s) in self.states.iter().enumerate() {
            if s >= model.num_states() {
                return Err(Error::Malformed(format!(
                    "constraint state {s} at step {} out of range for {} states",
                    self.from + offset,
                    model.num_states()
                )));
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// joint probability and random instances
// ---------------------------------------------------------------------------

/// p(states, obs): the product pi(s_0) b(s_0, o_0) prod_t a(s_{t-1}, s_t)
/// b(s_t, o_t).
pub fn joint_prob(model: &HmmModel, states: &[usize], obs: &ObservationSeq) -> Result<f64> {
    if states.len() != obs.len() {
        return Err(Error::Malformed(format!(
            "state sequence length {} does not match observation length {}",
            states.len(),
            obs.len()
        )));
    }
    model.check_obs(obs)?;
    for (t, &s) in states.iter().enumerate() {
        if s >= model.num_states() {
            return Err(Error::Malformed(format!(
                "state {s} at step {t} out of range for {} states",
                model.num_states()
            )));
        }
    }

    let mut p = model.pi(states[0]) * model.b(states[0], obs.at(0));
    for t in 1..obs.len() {
        p *= model.a(states[t - 1], states[t]) * model.b(states[t], obs.at(t));
    }
    Ok(p)
}

/// Generates a strictly positive random model, deterministic in `seed`.
///
/// Every row is drawn uniformly from (1e-3, 1] and normalized, so all
/// transitions and emissions have positive probability and any observation
/// sequence is feasible.
pub fn random_model(num_states: usize, num_symbols: usize, seed: u64) -> HmmModel {
    assert!(num_states >= 1 && num_symbols >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pi = random_row(&mut rng, num_states);
    let mut a = Vec::with_capacity(num_states * num_states);
    for _ in 0..num_states {
        a.extend(random_row(&mut rng, num_states));
    }
    let mut b = Vec::with_capacity(num_states * num_symbols);
    for _ in 0..num_states {
        b.extend(random_row(&mut rng, num_symbols));
    }
    let model = HmmModel {
        num_states,
        num_symbols,
        pi,
        a,
        b,
    };
    debug_assert!(model.validate().is_ok());
    model
}

fn random_row(rng: &mut impl Rng, len: usize) -> Vec<f64> {
    let mut row: Vec<f64> = (0..len).map(|_| rng.gen_range(1e-3..=1.0)).collect();
    let sum: f64 = row.iter().sum();
    for x in &mut row {
        *x /= sum;
    }
    row
}

/// Generates a random observation sequence of the given length with symbols
/// drawn uniformly from [0, num_symbols), deterministic in `seed`.
pub fn random_obs(num_symbols: usize, len: usize, seed: u64) -> ObservationSeq {
    assert!(num_symbols >= 1 && len >= 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    ObservationSeq {
        obs: (0..len).map(|_| rng.gen_range(0..num_symbols)).collect(),
    }
}

// ---------------------------------------------------------------------------
// tests
// ---------------------------------------------------------------------------
