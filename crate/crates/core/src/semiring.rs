//! Commutative semirings used by the generic forward-backward layer.
//!
//! Two instances are provided: plain `f64` under (+, *), which recovers the
//! usual sum-product recursions, and [`EsrValue`], the entropy semiring. An
//! entropy-semiring element is a pair (z, h) where z carries probability mass
//! and h carries mass-weighted log-mass. Multiplying lifted probabilities
//! accumulates the log terms needed for Shannon entropy, so a single forward
//! sweep over lifted kernels yields both the normalization and the entropy.

use crate::error::{Error, Result};

/// A commutative semiring over `Copy` elements.
///
/// Implementations must satisfy the usual laws: both operations associative
/// and commutative, `zero` neutral for `plus`, `one` neutral for `times`,
/// `times` distributing over `plus`, and `zero` annihilating `times`. The
/// laws are exercised numerically in the test suite; floating-point rounding
/// means they hold to relative precision, not bit-exactly.
pub trait Semiring: Copy + PartialEq + std::fmt::Debug {
    fn zero() -> Self;
    fn one() -> Self;
    #[must_use]
    fn plus(&self, rhs: &Self) -> Self;
    #[must_use]
    fn times(&self, rhs: &Self) -> Self;
}

/// The real sum-product semiring.
impl Semiring for f64 {
    #[inline]
    fn zero() -> Self {
        0.0
    }

    #[inline]
    fn one() -> Self {
        1.0
    }

    #[inline]
    fn plus(&self, rhs: &Self) -> Self {
        self + rhs
    }

    #[inline]
    fn times(&self, rhs: &Self) -> Self {
        self * rhs
    }
}

/// An entropy-semiring element: probability mass `z` paired with the
/// mass-weighted log term `h`.
///
/// For a lifted probability p the pair is (p, p ln p), so `h <= 0` on that
/// subset; general elements are unrestricted and the semiring operations are
/// total over all finite pairs.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EsrValue {
    pub z: f64,
    pub h: f64,
}

impl EsrValue {
    pub const ZERO: EsrValue = EsrValue { z: 0.0, h: 0.0 };
    pub const ONE: EsrValue = EsrValue { z: 1.0, h: 0.0 };

    #[inline]
    pub fn new(z: f64, h: f64) -> Self {
        EsrValue { z, h }
    }

    /// Lifts a probability-like weight to (z, z ln z), with 0 ln 0 taken as 0.
    ///
    /// Rejects negative and non-finite input; the log term is meaningless
    /// outside [0, inf).
    pub fn lift(z: f64) -> Result<Self> {
        if !z.is_finite() || z < 0.0 {
            return Err(Error::InvalidWeight { value: z });
        }
        Ok(lift_weight(z))
    }
}

/// Lift for weights already known to be finite and nonnegative, e.g. entries
/// of a validated model. Maps 0 to the additive identity without touching ln.
#[inline]
pub(crate) fn lift_weight(z: f64) -> EsrValue {
    debug_assert!(z >= 0.0, "lift_weight expects nonnegative input, got {z}");
    if z == 0.0 {
        EsrValue::ZERO
    } else {
        EsrValue::new(z, z * z.ln())
    }
}

impl Semiring for EsrValue {
    #[inline]
    fn zero() -> Self {
        EsrValue::ZERO
    }

    #[inline]
    fn one() -> Self {
        EsrValue::ONE
    }

    #[inline]
    fn plus(&self, rhs: &Self) -> Self {
        EsrValue::new(self.z + rhs.z, self.h + rhs.h)
    }

    /// (z1, h1) x (z2, h2) = (z1 z2, z1 h2 + z2 h1).
    ///
    /// On lifted values this is the product rule for p ln p: the product of
    /// (p, p ln p) and (q, q ln q) is (pq, pq ln(pq)).
    #[inline]
    fn times(&self, rhs: &Self) -> Self {
        EsrValue::new(self.z * rhs.z, self.z * rhs.h + rhs.z * self.h)
    }
}

/// Left-to-right product of a sequence of semiring elements; `one()` on empty
/// input.
///
/// Over the entropy semiring this realizes the identity behind the forward
/// recursion: the product of pairs (z_i, z_i h_i) is
/// (prod z_i, (prod z_i) * (sum h_i)).
pub fn fold_product<S: Semiring>(values: impl IntoIterator<Item = S>) -> S {
    values
        .into_iter()
        .fold(S::one(), |acc, v| acc.times(&v))
}

// ---------------------------------------------------------------------------
// tests
// ---------------------------------------------------------------------------

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol * a.abs().max(b.abs()).max(1.0)
    }

    fn esr_close(a: EsrValue, b: EsrValue, tol: f64) -> bool {
        close(a.z, b.z, tol) && close(a.h, b.h, tol)
    }

    #[test]
    fn real_semiring_identities() {
        assert_eq!(<f64 as Semiring>::zero(), 0.0);
        assert_eq!(<f64 as Semiring>::one(), 1.0);
        assert_eq!(2.0.plus(&3.0), 5.0);
        assert_eq!(2.0.times(&3.0), 6.0);
    }

    #[test]
    fn esr_plus_is_componentwise() {
        let s = EsrValue::new(1.0, 2.0).plus(&EsrValue::new(3.0, 4.0));
        assert_eq!(s, EsrValue::new(4.0, 6.0));
    }

    #[test]
    fn esr_times_mixes_components() {
        let p = EsrValue::new(2.0, 3.0).times(&EsrValue::new(5.0, 7.0));
        assert_eq!(p, EsrValue::new(10.0, 2.0 * 7.0 + 5.0 * 3.0));
    }

    #[test]
    fn esr_identities_behave() {
        let x = EsrValue::new(0.3, -0.7);
        assert_eq!(x.plus(&EsrValue::ZERO), x);
        assert_eq!(x.times(&EsrValue::ONE), x);
        assert_eq!(x.times(&EsrValue::ZERO), EsrValue::ZERO);
    }

    #[test]
    fn lift_of_probability() {
        let v = EsrValue::lift(0.9).unwrap();
        assert_eq!(v.z, 0.9);
        assert!(
            (v.h - (-0.094824)).abs() < 1e-6,
            "h part of lift(0.9) was {}",
            v.h
        );
    }

    #[test]
    fn lift_edge_values() {
        assert_eq!(EsrValue::lift(0.0).unwrap(), EsrValue::ZERO);
        assert_eq!(EsrValue::lift(1.0).unwrap(), EsrValue::ONE);
    }

    #[test]
    fn lift_rejects_bad_weights() {
        assert!(EsrValue::lift(-1.0).is_err());
        assert!(EsrValue::lift(f64::NAN).is_err());
        assert!(EsrValue::lift(f64::INFINITY).is_err());
    }

    #[test]
    fn lift_is_multiplicative() {
        let lhs = EsrValue::lift(0.3 * 0.8).unwrap();
        let rhs = EsrValue::lift(0.3).unwrap().times(&EsrValue::lift(0.8).unwrap());
        assert!(esr_close(lhs, rhs, 1e-12), "{lhs:?} vs {rhs:?}");
    }

    #[test]
    fn fold_product_examples() {
        let p = fold_product([EsrValue::new(2.0, 2.0), EsrValue::new(3.0, 6.0)]);
        assert_eq!(p, EsrValue::new(6.0, 18.0));

        let empty: [EsrValue; 0] = [];
        assert_eq!(fold_product(empty), EsrValue::ONE);

        let halves = fold_product([
            EsrValue::lift(0.5).unwrap(),
            EsrValue::lift(0.5).unwrap(),
        ]);
        assert!(esr_close(halves, lift_weight(0.25), 1e-12));
    }

    #[test]
    fn fold_product_matches_componentwise_identity() {
        // Product of (z_i, z_i h_i) must be (prod z, prod z * sum h).
        let pairs = [(0.5, -0.2), (0.8, 0.4), (0.25, 1.5)];
        let folded = fold_product(pairs.iter().map(|&(z, h)| EsrValue::new(z, z * h)));
        let prod_z: f64 = pairs.iter().map(|p| p.0).product();
        let sum_h: f64 = pairs.iter().map(|p| p.1).sum();
        assert!(esr_close(folded, EsrValue::new(prod_z, prod_z * sum_h), 1e-12));
    }

    fn arb_esr() -> impl Strategy<Value = EsrValue> {
        (-10.0..10.0f64, -10.0..10.0f64).prop_map(|(z, h)| EsrValue::new(z, h))
    }

    proptest! {
        #[test]
        fn esr_plus_commutes(a in arb_esr(), b in arb_esr()) {
            prop_assert_eq!(a.plus(&b), b.plus(&a));
        }

        #[test]
        fn esr_times_commutes(a in arb_esr(), b in arb_esr()) {
            prop_assert!(esr_close(a.times(&b), b.times(&a), 1e-12));
        }

        #[test]
        fn esr_ops_associate(a in arb_esr(), b in arb_esr(), c in arb_esr()) {
            prop_assert!(esr_close(a.plus(&b).plus(&c), a.plus(&b.plus(&c)), 1e-9));
            prop_assert!(esr_close(a.times(&b).times(&c), a.times(&b.times(&c)), 1e-9));
        }

        #[test]
        fn esr_times_distributes(a in arb_esr(), b in arb_esr(), c in arb_esr()) {
            let lhs = a.times(&b.plus(&c));
            let rhs = a.times(&b).plus(&a.times(&c));
            prop_assert!(esr_close(lhs, rhs, 1e-9), "{:?} vs {:?}", lhs, rhs);
        }

        #[test]
        fn real_times_distributes(a in -10.0..10.0f64, b in -10.0..10.0f64, c in -10.0..10.0f64) {
            prop_assert!(close(a * (b + c), a * b + a * c, 1e-9));
        }
    }
}
