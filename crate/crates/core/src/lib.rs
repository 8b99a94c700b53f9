//! State-sequence entropy for hidden Markov models.
//!
//! Given a model and an observation sequence, this crate computes the Shannon
//! entropy of the posterior distribution over hidden state sequences, exactly
//! and in a single numerically stable pass where possible. Three algorithms
//! are implemented on top of the scaled forward-backward recursions, all
//! agreeing to near machine precision but with different cost profiles, plus
//! a brute-force enumeration oracle that serves as ground truth:
//!
//! - `esrfb`: forward-only sweep over the entropy semiring, O(N) memory;
//!   also handles entropy conditioned on a fixed state subsequence.
//! - `hernando`: forward recursion on per-state intermediate entropies,
//!   O(N) memory.
//! - `mann-mccallum`: entropies from the stored forward-backward lattice,
//!   O(NT) memory, supports subsequence conditioning.
//! - `brute`: exhaustive enumeration of all N^(T+1) state sequences.
//!
//! The [`forward_backward`] module additionally exposes the recursions
//! generically over any commutative [`semiring::Semiring`], with the scaled
//! sum-product and entropy-semiring instances as special cases.

pub mod entropy;
pub mod error;
pub mod forward_backward;
pub mod io;
pub mod model;
pub mod oracle;
pub mod semiring;

pub use entropy::{
    esr_backward, esrfb_entropy, esrfb_hernando_bridge_check, esrfb_subseq_entropy,
    esrfb_subseq_enumerate, esrfb_subseq_enumerate_with_cap, hernando_entropy,
    mann_mccallum_entropy, mann_mccallum_subseq_entropy, mann_mccallum_subseq_enumerate,
    mann_mccallum_subseq_enumerate_with_cap, EntropyResult, EsrBackwardColumn, EsrForwardState,
    HernandoState, MmLattice, SubseqEntropyResult, SubseqEnumRow, SubseqEnumeration,
    DEFAULT_ASSIGNMENT_CAP,
};
pub use error::{Error, Result};
pub use forward_backward::{
    entropy_kernels, generic_backward, generic_forward, generic_marginal, generic_normalize,
    pairwise_marginal, range_marginal, scaled_backward, scaled_forward, sum_product_kernels,
    ChainKernels, ScaledFbResult,
};
pub use io::{load_model, load_model_unvalidated, load_obs, save_model, save_obs};
pub use model::{
    joint_prob, random_model, random_obs, HmmModel, MatrixId, ObservationSeq, SubseqConstraint,
    ValidationReport, Violation, STOCHASTICITY_TOLERANCE,
};
pub use oracle::{
    oracle_entropy, oracle_posterior, oracle_subseq_entropy, OracleSubseq, PosteriorTable,
    DEFAULT_ENUMERATION_CAP,
};
pub use semiring::{fold_product, EsrValue, Semiring};

/// Entropies are mathematically nonnegative; cancellation can leave a tiny
/// negative residue, which is clamped to exactly 0 when within 1e-12 below
/// zero. Larger negative values pass through untouched so bugs stay visible.
pub(crate) fn clamp_entropy(h: f64) -> f64 {
    if h <= 0.0 && h > -1e-12 {
        0.0
    } else {
        h
    }
}
