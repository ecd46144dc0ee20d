use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::interval::exp_bounds;
use super::rational::format_rational;
use super::{rational_power, sign_of_rational, Constant, ConstantError, FieldKind};

/// Finite sum `Σ c·e^r`, keyed by exponent `r`. No zero coefficients.
type ExpPoly = BTreeMap<BigRational, BigRational>;

/// Quotient of two finite ℚ-linear combinations of `e^r` with rational `r`.
///
/// Distinct `e^r` are linearly independent over ℚ (Lindemann–Weierstrass), so
/// a combination vanishes exactly when all its coefficients do. Signs of
/// nonzero combinations are found by interval evaluation with doubling
/// precision, which terminates because the value is bounded away from zero.
#[derive(Clone)]
pub struct ExpRational {
    num: ExpPoly,
    den: ExpPoly,
}

fn unit_poly() -> ExpPoly {
    BTreeMap::from([(BigRational::zero(), BigRational::one())])
}

fn poly_mul(a: &ExpPoly, b: &ExpPoly) -> ExpPoly {
    let mut out = ExpPoly::new();
    for (ea, ca) in a {
        for (eb, cb) in b {
            let entry = out.entry(ea + eb).or_insert_with(BigRational::zero);
            *entry += ca * cb;
        }
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn poly_add(a: &ExpPoly, b: &ExpPoly) -> ExpPoly {
    let mut out = a.clone();
    for (e, c) in b {
        let entry = out.entry(e.clone()).or_insert_with(BigRational::zero);
        *entry += c;
    }
    out.retain(|_, c| !c.is_zero());
    out
}

fn poly_scale(a: &ExpPoly, shift: &BigRational, factor: &BigRational) -> ExpPoly {
    a.iter().map(|(e, c)| (e + shift, c * factor)).collect()
}

fn poly_sign(p: &ExpPoly) -> Ordering {
    match p.len() {
        0 => return Ordering::Equal,
        1 => return sign_of_rational(p.values().next().unwrap()),
        _ => {}
    }
    let mut prec = 32;
    loop {
        let mut lo = BigRational::zero();
        let mut hi = BigRational::zero();
        for (e, c) in p {
            let (l, h) = exp_bounds(e, prec);
            if c.is_positive() {
                lo += c * l;
                hi += c * h;
            } else {
                lo += c * h;
                hi += c * l;
            }
        }
        if lo.is_positive() {
            return Ordering::Greater;
        }
        if hi.is_negative() {
            return Ordering::Less;
        }
        prec *= 2;
    }
}

impl ExpRational {
    /// `q·e^r`.
    pub fn exp_term(q: BigRational, r: BigRational) -> Self {
        let mut num = ExpPoly::new();
        if !q.is_zero() {
            num.insert(r, q);
        }
        ExpRational { num, den: unit_poly() }
    }

    /// Builds `Σ qᵢ·e^{rᵢ}` from `(rᵢ, qᵢ)` pairs.
    pub fn combination(pairs: impl IntoIterator<Item = (BigRational, BigRational)>) -> Self {
        let mut num = ExpPoly::new();
        for (r, q) in pairs {
            *num.entry(r).or_insert_with(BigRational::zero) += q;
        }
        num.retain(|_, c| !c.is_zero());
        ExpRational { num, den: unit_poly() }
    }

    fn normalized(num: ExpPoly, den: ExpPoly) -> Self {
        debug_assert!(!den.is_empty());
        if num.is_empty() {
            return ExpRational { num, den: unit_poly() };
        }
        let (top_e, top_c) = den.iter().next_back().map(|(e, c)| (e.clone(), c.clone())).unwrap();
        let shift = -top_e;
        let factor = top_c.recip();
        let mut num = poly_scale(&num, &shift, &factor);
        let mut den = poly_scale(&den, &shift, &factor);
        if den.len() == 1 {
            return ExpRational { num, den };
        }
        if num.len() == den.len() {
            let (ne, nc) = num.iter().next_back().map(|(e, c)| (e.clone(), c.clone())).unwrap();
            if poly_scale(&den, &ne, &nc) == num {
                num = BTreeMap::from([(ne, nc)]);
                den = unit_poly();
            }
        }
        ExpRational { num, den }
    }

    fn is_polynomial(&self) -> bool {
        self.den.len() == 1
    }
}

impl PartialEq for ExpRational {
    fn eq(&self, other: &Self) -> bool {
        if self.is_polynomial() && other.is_polynomial() {
            return self.num == other.num;
        }
        poly_mul(&self.num, &other.den) == poly_mul(&other.num, &self.den)
    }
}

fn fmt_poly(p: &ExpPoly, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if p.is_empty() {
        return f.write_str("0");
    }
    for (i, (e, c)) in p.iter().rev().enumerate() {
        let negative = c.is_negative();
        let magnitude = c.abs();
        if i == 0 {
            if negative {
                f.write_str("-")?;
            }
        } else {
            f.write_str(if negative { " - " } else { " + " })?;
        }
        if e.is_zero() {
            f.write_str(&format_rational(&magnitude))?;
        } else if magnitude.is_one() {
            write!(f, "e^({})", format_rational(e))?;
        } else {
            write!(f, "{}*e^({})", format_rational(&magnitude), format_rational(e))?;
        }
    }
    Ok(())
}

impl fmt::Display for ExpRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_polynomial() {
            fmt_poly(&self.num, f)
        } else {
            f.write_str("(")?;
            fmt_poly(&self.num, f)?;
            f.write_str(")/(")?;
            fmt_poly(&self.den, f)?;
            f.write_str(")")
        }
    }
}

impl fmt::Debug for ExpRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Constant for ExpRational {
    const KIND: FieldKind = FieldKind::ExpRational;

    fn zero() -> Self {
        ExpRational { num: ExpPoly::new(), den: unit_poly() }
    }

    fn one() -> Self {
        ExpRational { num: unit_poly(), den: unit_poly() }
    }

    fn from_rational(q: BigRational) -> Self {
        Self::exp_term(q, BigRational::zero())
    }

    fn to_rational(&self) -> Option<BigRational> {
        if !self.is_polynomial() {
            return None;
        }
        match self.num.len() {
            0 => Some(BigRational::zero()),
            1 => {
                let (e, c) = self.num.iter().next().unwrap();
                e.is_zero().then(|| c.clone())
            }
            _ => None,
        }
    }

    fn is_zero(&self) -> bool {
        self.num.is_empty()
    }

    fn sign(&self) -> Ordering {
        let s = poly_sign(&self.num);
        if self.is_polynomial() {
            return s;
        }
        match poly_sign(&self.den) {
            Ordering::Less => s.reverse(),
            _ => s,
        }
    }

    fn add(&self, other: &Self) -> Self {
        if self.is_polynomial() && other.is_polynomial() {
            return ExpRational { num: poly_add(&self.num, &other.num), den: unit_poly() };
        }
        let num = poly_add(&poly_mul(&self.num, &other.den), &poly_mul(&other.num, &self.den));
        Self::normalized(num, poly_mul(&self.den, &other.den))
    }

    fn mul(&self, other: &Self) -> Self {
        if self.is_polynomial() && other.is_polynomial() {
            return ExpRational { num: poly_mul(&self.num, &other.num), den: unit_poly() };
        }
        Self::normalized(poly_mul(&self.num, &other.num), poly_mul(&self.den, &other.den))
    }

    fn neg(&self) -> Self {
        ExpRational {
            num: self.num.iter().map(|(e, c)| (e.clone(), -c)).collect(),
            den: self.den.clone(),
        }
    }

    fn inv(&self) -> Option<Self> {
        if self.num.is_empty() {
            return None;
        }
        Some(Self::normalized(self.den.clone(), self.num.clone()))
    }

    fn exp(&self) -> Result<Self, ConstantError> {
        match self.to_rational() {
            Some(r) => Ok(Self::exp_term(BigRational::one(), r)),
            None => Err(ConstantError::ExpUnsupported(self.to_string(), "exprational")),
        }
    }

    fn ln(&self) -> Result<Self, ConstantError> {
        if self.is_polynomial() && self.num.len() == 1 {
            let (e, c) = self.num.iter().next().unwrap();
            if c.is_one() {
                return Ok(Self::from_rational(e.clone()));
            }
        }
        Err(ConstantError::LogUnsupported(self.to_string(), "exprational"))
    }

    fn needs_parens(&self) -> bool {
        self.is_polynomial() && self.num.len() > 1
    }

    fn pow_rational(&self, r: &BigRational) -> Result<Self, ConstantError> {
        if self.is_polynomial() && self.num.len() == 1 {
            let (e, c) = self.num.iter().next().unwrap();
            if let Some(root) = rational_power(c, r) {
                return Ok(Self::exp_term(root, e * r));
            }
        }
        if r.is_integer() {
            let n = r.to_integer();
            let base = if n.is_negative() {
                self.inv().ok_or(ConstantError::DivisionByZero)?
            } else {
                self.clone()
            };
            return Ok(super::pow_uint(&base, n.abs()));
        }
        Err(ConstantError::PowerUnsupported(
            self.to_string(),
            format_rational(r),
            "exprational",
        ))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    fn e_pow(r: BigRational) -> ExpRational {
        ExpRational::exp_term(BigRational::one(), r)
    }

    #[test]
    fn e_lies_between_two_and_three() {
        let e = ExpRational::from_int(1).exp().unwrap();
        assert_eq!(e.sub(&ExpRational::from_int(2)).sign(), Ordering::Greater);
        assert_eq!(e.sub(&ExpRational::from_int(3)).sign(), Ordering::Less);
        assert_eq!(e.sub(&ExpRational::from_rational(q(5, 2))).sign(), Ordering::Greater);
    }

    #[test]
    fn exp_is_a_morphism() {
        let a = ExpRational::from_rational(q(1, 3));
        let b = ExpRational::from_rational(q(-7, 2));
        let lhs = a.add(&b).exp().unwrap();
        let rhs = a.exp().unwrap().mul(&b.exp().unwrap());
        assert_eq!(lhs, rhs);
    }

    #[test]
    fn fractions_cancel_and_compare() {
        let e = e_pow(q(1, 1));
        let one = ExpRational::one();
        let s = e.add(&one);
        let ratio = s.div(&s).unwrap();
        assert_eq!(ratio, one);
        let x = one.div(&s).unwrap();
        assert_eq!(x.mul(&s), one);
        // 1/(1+e) is between 1/4 and 1/3
        assert_eq!(x.sub(&ExpRational::from_rational(q(1, 4))).sign(), Ordering::Greater);
        assert_eq!(x.sub(&ExpRational::from_rational(q(1, 3))).sign(), Ordering::Less);
    }

    #[test]
    fn logs_of_pure_exponentials() {
        assert_eq!(e_pow(q(3, 4)).ln().unwrap(), ExpRational::from_rational(q(3, 4)));
        assert!(ExpRational::from_int(2).ln().is_err());
        assert!(e_pow(q(1, 1)).exp().is_err());
    }

    #[test]
    fn display_forms() {
        let c = ExpRational::combination([(q(0, 1), q(1, 1)), (q(1, 1), q(-2, 1))]);
        assert_eq!(c.to_string(), "-2*e^(1) + 1");
        assert_eq!(e_pow(q(1, 2)).to_string(), "e^(1/2)");
        assert!(c.needs_parens());
    }

    #[test]
    fn square_root_of_exponential() {
        let e = e_pow(q(1, 1));
        assert_eq!(e.pow_rational(&q(1, 2)).unwrap(), e_pow(q(1, 2)));
    }
}
