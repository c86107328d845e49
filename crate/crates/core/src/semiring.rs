//! Commutative semirings used as value carriers for potentials.

use std::fmt::Debug;
use std::hash::Hash;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

/// Exact rational numbers.
pub type Rational = BigRational;

/// Which carrier a semiring works over.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CarrierKind {
    Boolean,
    NonNegativeRational,
}

/// Runtime description of a semiring instance.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct SemiringDescriptor {
    pub carrier: CarrierKind,
    pub additively_idempotent: bool,
}

/// A commutative semiring `⟨R, +, ·, 0, 1⟩`.
pub trait Semiring: Debug + Clone + Copy + PartialEq + Eq + Send + Sync + 'static {
    type Value: Clone + Debug + PartialEq + Eq + Hash + Send + Sync;

    const DESCRIPTOR: SemiringDescriptor;

    fn zero() -> Self::Value;
    fn one() -> Self::Value;
    fn add(a: &Self::Value, b: &Self::Value) -> Self::Value;
    fn mul(a: &Self::Value, b: &Self::Value) -> Self::Value;

    /// Whether `v` belongs to the carrier.
    fn contains(v: &Self::Value) -> bool;

    fn is_zero(v: &Self::Value) -> bool {
        *v == Self::zero()
    }
}

/// `⟨{0,1}, ∨, ∧, 0, 1⟩`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Boolean;

impl Semiring for Boolean {
    type Value = bool;

    const DESCRIPTOR: SemiringDescriptor =
        SemiringDescriptor { carrier: CarrierKind::Boolean, additively_idempotent: true };

    fn zero() -> bool {
        false
    }
    fn one() -> bool {
        true
    }
    fn add(a: &bool, b: &bool) -> bool {
        *a || *b
    }
    fn mul(a: &bool, b: &bool) -> bool {
        *a && *b
    }
    fn contains(_: &bool) -> bool {
        true
    }
}

/// `⟨ℚ≥0, +, ·, 0, 1⟩` with exact arithmetic.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct NonNegativeRational;

impl Semiring for NonNegativeRational {
    type Value = Rational;

    const DESCRIPTOR: SemiringDescriptor = SemiringDescriptor {
        carrier: CarrierKind::NonNegativeRational,
        additively_idempotent: false,
    };

    fn zero() -> Rational {
        Rational::zero()
    }
    fn one() -> Rational {
        Rational::one()
    }
    fn add(a: &Rational, b: &Rational) -> Rational {
        a + b
    }
    fn mul(a: &Rational, b: &Rational) -> Rational {
        a * b
    }
    fn contains(v: &Rational) -> bool {
        !v.is_negative()
    }
    fn is_zero(v: &Rational) -> bool {
        v.is_zero()
    }
}

/// `p/q` as an exact rational.
pub fn ratio(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

/// Parses `"p/q"` or an integer into lowest terms.
pub fn parse_rational(s: &str) -> Option<Rational> {
    let s = s.trim();
    match s.split_once('/') {
        Some((p, q)) => {
            let p: BigInt = p.trim().parse().ok()?;
            let q: BigInt = q.trim().parse().ok()?;
            if q.is_zero() {
                None
            } else {
                Some(Rational::new(p, q))
            }
        }
        None => s.parse::<BigInt>().ok().map(Rational::from_integer),
    }
}

/// Lowest-terms `p/q` rendering; integers still carry `/1`.
pub fn format_rational(r: &Rational) -> String {
    format!("{}/{}", r.numer(), r.denom())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn small_rational() -> impl Strategy<Value = Rational> {
        (0i64..20, 1i64..10).prop_map(|(p, q)| ratio(p, q))
    }

    fn laws<S: Semiring>(a: &S::Value, b: &S::Value, c: &S::Value) {
        assert_eq!(S::add(a, &S::add(b, c)), S::add(&S::add(a, b), c));
        assert_eq!(S::mul(a, &S::mul(b, c)), S::mul(&S::mul(a, b), c));
        assert_eq!(S::add(a, b), S::add(b, a));
        assert_eq!(S::mul(a, b), S::mul(b, a));
        assert_eq!(S::mul(a, &S::add(b, c)), S::add(&S::mul(a, b), &S::mul(a, c)));
        assert_eq!(S::mul(a, &S::zero()), S::zero());
        assert_eq!(S::add(a, &S::zero()), a.clone());
        assert_eq!(S::mul(a, &S::one()), a.clone());
    }

    proptest! {
        #[test]
        fn rational_semiring_laws(a in small_rational(), b in small_rational(), c in small_rational()) {
            laws::<NonNegativeRational>(&a, &b, &c);
            prop_assert!(NonNegativeRational::contains(&NonNegativeRational::add(&a, &b)));
        }

        #[test]
        fn boolean_semiring_laws(a: bool, b: bool, c: bool) {
            laws::<Boolean>(&a, &b, &c);
        }

        #[test]
        fn rational_text_round_trip(a in small_rational()) {
            prop_assert_eq!(parse_rational(&format_rational(&a)), Some(a));
        }
    }

    #[test]
    fn idempotency_flag_matches_samples() {
        for a in [false, true] {
            assert_eq!(Boolean::add(&a, &a), a);
        }
        const { assert!(Boolean::DESCRIPTOR.additively_idempotent) };
        let half = ratio(1, 2);
        assert_ne!(NonNegativeRational::add(&half, &half), half);
        const { assert!(!NonNegativeRational::DESCRIPTOR.additively_idempotent) };
    }

    #[test]
    fn rational_parsing() {
        assert_eq!(parse_rational("2/4"), Some(ratio(1, 2)));
        assert_eq!(parse_rational("3"), Some(ratio(3, 1)));
        assert_eq!(parse_rational("1/0"), None);
        assert_eq!(parse_rational("x"), None);
        assert_eq!(format_rational(&ratio(6, 8)), "3/4");
        assert_eq!(format_rational(&ratio(0, 8)), "0/1");
    }
}
