//! Exact ordered coefficient fields.
//!
//! Two implementations are provided: [`Rational`] (exact ℚ, the default) and
//! [`ExpRational`] (fractions of ℚ-linear combinations of `e^r`, `r ∈ ℚ`),
//! which additionally supports `exp` at every rational point.

mod exprational;
mod interval;
mod rational;

use std::cmp::Ordering;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub use exprational::ExpRational;
pub use interval::exp_bounds;
pub use rational::{parse_rational, Rational};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum ConstantError {
    #[error("exp is not available at {0} in the {1} field")]
    ExpUnsupported(String, &'static str),
    #[error("log is not available at {0} in the {1} field")]
    LogUnsupported(String, &'static str),
    #[error("{0} has no exact power {1} in the {2} field")]
    PowerUnsupported(String, String, &'static str),
    #[error("division by zero")]
    DivisionByZero,
}

/// Which constant field a computation runs over.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FieldKind {
    Rational,
    ExpRational,
}

impl fmt::Display for FieldKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FieldKind::Rational => write!(f, "rational"),
            FieldKind::ExpRational => write!(f, "exprational"),
        }
    }
}

/// An element of an exact, computable ordered field.
///
/// Zero tests and signs are exact and always terminate. `exp` and `ln` are
/// partial: each field documents where they are defined.
pub trait Constant:
    Clone + PartialEq + fmt::Debug + fmt::Display + Send + Sync + 'static
{
    const KIND: FieldKind;

    fn zero() -> Self;
    fn one() -> Self;
    fn from_rational(q: BigRational) -> Self;
    /// The value as a rational number, if it is one.
    fn to_rational(&self) -> Option<BigRational>;
    fn is_zero(&self) -> bool;
    /// Sign relative to zero.
    fn sign(&self) -> Ordering;
    fn add(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    fn inv(&self) -> Option<Self>;
    fn exp(&self) -> Result<Self, ConstantError>;
    fn ln(&self) -> Result<Self, ConstantError>;
    /// True when the printed form needs parentheses to act as a factor.
    fn needs_parens(&self) -> bool;

    fn from_int(n: i64) -> Self {
        Self::from_rational(BigRational::from_integer(BigInt::from(n)))
    }

    fn is_one(&self) -> bool {
        *self == Self::one()
    }

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    fn div(&self, other: &Self) -> Result<Self, ConstantError> {
        other
            .inv()
            .map(|inv| self.mul(&inv))
            .ok_or(ConstantError::DivisionByZero)
    }

    fn cmp_value(&self, other: &Self) -> Ordering {
        self.sub(other).sign()
    }

    fn mul_rational(&self, q: &BigRational) -> Self {
        self.mul(&Self::from_rational(q.clone()))
    }

    /// `self^r` for rational `r`, when it exists exactly in this field.
    fn pow_rational(&self, r: &BigRational) -> Result<Self, ConstantError> {
        if r.is_integer() {
            let n = r.to_integer();
            let base = if n.is_negative() {
                self.inv().ok_or(ConstantError::DivisionByZero)?
            } else {
                self.clone()
            };
            return Ok(pow_uint(&base, n.abs()));
        }
        if let Some(q) = self.to_rational() {
            if let Some(root) = rational_power(&q, r) {
                return Ok(Self::from_rational(root));
            }
        }
        Err(ConstantError::PowerUnsupported(
            self.to_string(),
            rational::format_rational(r),
            field_name(Self::KIND),
        ))
    }
}

pub(crate) fn field_name(kind: FieldKind) -> &'static str {
    match kind {
        FieldKind::Rational => "rational",
        FieldKind::ExpRational => "exprational",
    }
}

fn pow_uint<C: Constant>(base: &C, mut n: BigInt) -> C {
    let two = BigInt::from(2);
    let mut acc = C::one();
    let mut b = base.clone();
    while !n.is_zero() {
        if (&n % &two).is_one() {
            acc = acc.mul(&b);
        }
        b = b.mul(&b);
        n /= &two;
    }
    acc
}

/// Exact `q^r` for positive rational `q` when numerator and denominator are
/// perfect powers.
pub(crate) fn rational_power(q: &BigRational, r: &BigRational) -> Option<BigRational> {
    if q.is_zero() {
        return if r.is_positive() { Some(BigRational::zero()) } else { None };
    }
    if q.is_negative() {
        return None;
    }
    let k = r.denom().to_u32()?;
    let n = exact_root(q.numer(), k)?;
    let d = exact_root(q.denom(), k)?;
    let root = BigRational::new(n, d);
    let p = r.numer().clone();
    let base = if p.is_negative() { root.recip() } else { root };
    Some(num_traits::pow::pow(base, p.abs().to_usize()?))
}

fn exact_root(n: &BigInt, k: u32) -> Option<BigInt> {
    let root = n.nth_root(k);
    (num_traits::pow::pow(root.clone(), k as usize) == *n).then_some(root)
}

pub(crate) fn sign_of_rational(q: &BigRational) -> Ordering {
    if q.is_zero() {
        Ordering::Equal
    } else if q.is_positive() {
        Ordering::Greater
    } else {
        Ordering::Less
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn rational_powers_exact_roots() {
        assert_eq!(rational_power(&q(4, 9), &q(1, 2)), Some(q(2, 3)));
        assert_eq!(rational_power(&q(8, 1), &q(-2, 3)), Some(q(1, 4)));
        assert_eq!(rational_power(&q(2, 1), &q(1, 2)), None);
    }

    #[test]
    fn pow_rational_integer_and_missing_root() {
        let two = Rational::from_int(2);
        assert_eq!(two.pow_rational(&q(-3, 1)).unwrap(), Rational::from_rational(q(1, 8)));
        assert!(matches!(
            two.pow_rational(&q(1, 2)),
            Err(ConstantError::PowerUnsupported(..))
        ));
    }
}
