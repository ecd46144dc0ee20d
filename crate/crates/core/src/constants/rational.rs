use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use super::{sign_of_rational, Constant, ConstantError, FieldKind};

/// Exact rational numbers. `exp` is defined only at 0 and `ln` only at 1.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Rational(pub BigRational);

impl Rational {
    pub fn new(numer: i64, denom: i64) -> Self {
        Rational(BigRational::new(numer.into(), denom.into()))
    }

    pub fn value(&self) -> &BigRational {
        &self.0
    }
}

pub fn format_rational(q: &BigRational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `p`, `p/q`, or a finite decimal such as `-1.25`.
pub fn parse_rational(text: &str) -> Option<BigRational> {
    let text = text.trim();
    if let Some((n, d)) = text.split_once('/') {
        let n = BigInt::from_str(n.trim()).ok()?;
        let d = BigInt::from_str(d.trim()).ok()?;
        if d.is_zero() {
            return None;
        }
        return Some(BigRational::new(n, d));
    }
    if let Some((int, frac)) = text.split_once('.') {
        if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
            return None;
        }
        let negative = int.starts_with('-');
        let int_digits = int.trim_start_matches(['-', '+']);
        let digits = format!("{}{}", if int_digits.is_empty() { "0" } else { int_digits }, frac);
        let mut n = BigInt::from_str(&digits).ok()?;
        if negative {
            n = -n;
        }
        let d = num_traits::pow::pow(BigInt::from(10), frac.len());
        return Some(BigRational::new(n, d));
    }
    BigInt::from_str(text).ok().map(BigRational::from_integer)
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_rational(&self.0))
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl FromStr for Rational {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse_rational(s)
            .map(Rational)
            .ok_or_else(|| format!("not a rational literal: {s:?}"))
    }
}

impl Constant for Rational {
    const KIND: FieldKind = FieldKind::Rational;

    fn zero() -> Self {
        Rational(BigRational::zero())
    }

    fn one() -> Self {
        Rational(BigRational::one())
    }

    fn from_rational(q: BigRational) -> Self {
        Rational(q)
    }

    fn to_rational(&self) -> Option<BigRational> {
        Some(self.0.clone())
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    fn sign(&self) -> Ordering {
        sign_of_rational(&self.0)
    }

    fn add(&self, other: &Self) -> Self {
        Rational(&self.0 + &other.0)
    }

    fn mul(&self, other: &Self) -> Self {
        Rational(&self.0 * &other.0)
    }

    fn neg(&self) -> Self {
        Rational(-&self.0)
    }

    fn inv(&self) -> Option<Self> {
        (!self.0.is_zero()).then(|| Rational(self.0.recip()))
    }

    fn exp(&self) -> Result<Self, ConstantError> {
        if self.0.is_zero() {
            Ok(Self::one())
        } else {
            Err(ConstantError::ExpUnsupported(self.to_string(), "rational"))
        }
    }

    fn ln(&self) -> Result<Self, ConstantError> {
        if self.0.is_one() {
            Ok(Self::zero())
        } else {
            Err(ConstantError::LogUnsupported(self.to_string(), "rational"))
        }
    }

    fn needs_parens(&self) -> bool {
        false
    }
}
