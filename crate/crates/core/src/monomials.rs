//! Ordered monomial groups: real powers `x^r`, logarithmic monomials
//! `ℓ₀^α₀···ℓₙ^αₙ`, and transmonomials `exp(a)·𝔩`.
//!
//! All three families share one representation, [`Monomial`]. A monomial is
//! canonical when its exponential argument `a` is purely infinite and holds
//! no `ℓⱼ` (j ≥ 1) term with a rational coefficient; such terms live in the
//! logarithmic part instead, as `ℓⱼ₋₁^α`. Canonical monomials are equal
//! exactly when they are structurally equal.
//!
//! Monomials are ordered through their logarithms: `𝔪 ≽ 𝔫` iff
//! `log 𝔪 ≥ log 𝔫`, where `log(exp(a)·∏ℓᵢ^αᵢ) = a + Σ αᵢ ℓᵢ₊₁`.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::constants::{sign_of_rational, Constant};
use crate::series::finite::{self, Term};
use crate::series::Series;

/// `ℓ₀^α₀ ℓ₁^α₁ ···` with `ℓ₀ = x` and `ℓₙ₊₁ = log ℓₙ`. No zero exponents.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct LogMonomial {
    exps: BTreeMap<usize, BigRational>,
}

impl LogMonomial {
    pub fn one() -> Self {
        Self::default()
    }

    /// `ℓᵢ^α`.
    pub fn power(index: usize, alpha: BigRational) -> Self {
        let mut exps = BTreeMap::new();
        if !alpha.is_zero() {
            exps.insert(index, alpha);
        }
        LogMonomial { exps }
    }

    pub fn from_exponents(pairs: impl IntoIterator<Item = (usize, BigRational)>) -> Self {
        let mut m = Self::one();
        for (i, alpha) in pairs {
            m = m.mul(&Self::power(i, alpha));
        }
        m
    }

    pub fn exponent(&self, index: usize) -> BigRational {
        self.exps.get(&index).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn exponents(&self) -> impl Iterator<Item = (usize, &BigRational)> {
        self.exps.iter().map(|(i, a)| (*i, a))
    }

    pub fn is_one(&self) -> bool {
        self.exps.is_empty()
    }

    pub fn max_index(&self) -> Option<usize> {
        self.exps.keys().next_back().copied()
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut exps = self.exps.clone();
        for (i, a) in &other.exps {
            let e = exps.entry(*i).or_insert_with(BigRational::zero);
            *e += a;
            if e.is_zero() {
                exps.remove(i);
            }
        }
        LogMonomial { exps }
    }

    pub fn inv(&self) -> Self {
        LogMonomial {
            exps: self.exps.iter().map(|(i, a)| (*i, -a)).collect(),
        }
    }

    pub fn pow(&self, r: &BigRational) -> Self {
        if r.is_zero() {
            return Self::one();
        }
        LogMonomial {
            exps: self.exps.iter().map(|(i, a)| (*i, a * r)).collect(),
        }
    }

    /// Least index where the exponents differ, with `self`'s minus `other`'s.
    fn first_difference(&self, other: &Self) -> Option<(usize, BigRational)> {
        let mut a = self.exps.iter().peekable();
        let mut b = other.exps.iter().peekable();
        loop {
            match (a.peek(), b.peek()) {
                (None, None) => return None,
                (Some((i, x)), None) => return Some((**i, (*x).clone())),
                (None, Some((j, y))) => return Some((**j, -(*y).clone())),
                (Some((i, x)), Some((j, y))) => {
                    if i < j {
                        return Some((**i, (*x).clone()));
                    }
                    if j < i {
                        return Some((**j, -(*y).clone()));
                    }
                    if x != y {
                        return Some((**i, *x - *y));
                    }
                    a.next();
                    b.next();
                }
            }
        }
    }
}

impl Ord for LogMonomial {
    fn cmp(&self, other: &Self) -> Ordering {
        match self.first_difference(other) {
            None => Ordering::Equal,
            Some((_, d)) => sign_of_rational(&d),
        }
    }
}

impl PartialOrd for LogMonomial {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

fn fmt_power(base: &str, alpha: &BigRational, f: &mut fmt::Formatter<'_>) -> fmt::Result {
    if alpha.is_one() {
        write!(f, "{base}")
    } else if alpha.is_integer() {
        write!(f, "{base}^{}", alpha.numer())
    } else {
        write!(f, "{base}^({}/{})", alpha.numer(), alpha.denom())
    }
}

impl fmt::Display for LogMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.exps.is_empty() {
            return f.write_str("1");
        }
        for (k, (i, a)) in self.exps.iter().enumerate() {
            if k > 0 {
                f.write_str("*")?;
            }
            let base = if *i == 0 { "x".to_string() } else { format!("l{i}") };
            fmt_power(&base, a, f)?;
        }
        Ok(())
    }
}

impl fmt::Debug for LogMonomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// The monomial `x^r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RealPowerMonomial(pub BigRational);

impl<C: Constant> From<RealPowerMonomial> for Monomial<C> {
    fn from(m: RealPowerMonomial) -> Self {
        Monomial::x_pow(m.0)
    }
}

impl<C: Constant> From<LogMonomial> for Monomial<C> {
    fn from(logs: LogMonomial) -> Self {
        Monomial(Arc::new(Inner { arg: Vec::new(), logs, height: 0 }))
    }
}

struct Inner<C: Constant> {
    arg: Vec<Term<C>>,
    logs: LogMonomial,
    height: u32,
}

/// A canonical transmonomial `exp(a)·𝔩`.
pub struct Monomial<C: Constant>(Arc<Inner<C>>);

impl<C: Constant> Clone for Monomial<C> {
    fn clone(&self) -> Self {
        Monomial(Arc::clone(&self.0))
    }
}

/// `ℓⱼ` for `j ≥ 1`, when `m` is exactly that monomial.
fn as_iterated_log<C: Constant>(m: &Monomial<C>) -> Option<usize> {
    if !m.0.arg.is_empty() || m.0.logs.exps.len() != 1 {
        return None;
    }
    let (i, a) = m.0.logs.exps.iter().next().unwrap();
    (*i >= 1 && a.is_one()).then_some(*i)
}

impl<C: Constant> Monomial<C> {
    pub fn one() -> Self {
        LogMonomial::one().into()
    }

    pub fn x() -> Self {
        Self::ell(0)
    }

    pub fn x_pow(r: BigRational) -> Self {
        LogMonomial::power(0, r).into()
    }

    pub fn x_int(n: i64) -> Self {
        Self::x_pow(BigRational::from_integer(n.into()))
    }

    /// The iterated logarithm `ℓᵢ` (`ℓ₀ = x`).
    pub fn ell(index: usize) -> Self {
        LogMonomial::power(index, BigRational::one()).into()
    }

    /// `exp(a)` for a purely infinite finite series `a`; `None` if some term
    /// of `a` is not infinitely large.
    pub fn exp_of(arg: &[Term<C>]) -> Option<Self> {
        if arg.iter().any(|t| t.monomial.cmp_one() != Ordering::Greater) {
            return None;
        }
        Some(Self::from_parts(arg.to_vec(), LogMonomial::one()))
    }

    /// Canonicalizes `exp(arg)·logs`. `arg` must be sorted and purely infinite.
    fn from_parts(arg: Vec<Term<C>>, mut logs: LogMonomial) -> Self {
        let mut rest = Vec::with_capacity(arg.len());
        for t in arg {
            let Some(j) = as_iterated_log(&t.monomial) else {
                rest.push(t);
                continue;
            };
            let total = t.coef.add(&C::from_rational(logs.exponent(j - 1)));
            logs.exps.remove(&(j - 1));
            match total.to_rational() {
                Some(q) => {
                    if !q.is_zero() {
                        logs.exps.insert(j - 1, q);
                    }
                }
                None => rest.push(Term::new(total, t.monomial)),
            }
        }
        // A leftover ℓⱼ₋₁ exponent next to an irrational ℓⱼ argument term is
        // already folded above; any other exponent stays in the log part.
        let height = rest
            .iter()
            .map(|t| t.monomial.height() + 1)
            .max()
            .unwrap_or(0);
        Monomial(Arc::new(Inner { arg: rest, logs, height }))
    }

    /// The exponential argument `a` (empty for logarithmic monomials).
    pub fn arg(&self) -> &[Term<C>] {
        &self.0.arg
    }

    pub fn arg_series(&self) -> Series<C> {
        Series::from_sorted_terms(self.0.arg.clone())
    }

    pub fn log_part(&self) -> &LogMonomial {
        &self.0.logs
    }

    /// Nesting depth of `exp`; 0 for logarithmic monomials.
    pub fn height(&self) -> u32 {
        self.0.height
    }

    pub fn is_one(&self) -> bool {
        self.0.arg.is_empty() && self.0.logs.is_one()
    }

    pub fn is_logarithmic(&self) -> bool {
        self.0.arg.is_empty()
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_one() {
            return other.clone();
        }
        if other.is_one() {
            return self.clone();
        }
        if self.0.arg.is_empty() && other.0.arg.is_empty() {
            return self.0.logs.mul(&other.0.logs).into();
        }
        let arg = finite::add(&self.0.arg, &other.0.arg);
        Self::from_parts(arg, self.0.logs.mul(&other.0.logs))
    }

    pub fn inv(&self) -> Self {
        if self.is_one() {
            return self.clone();
        }
        Monomial(Arc::new(Inner {
            arg: finite::neg(&self.0.arg),
            logs: self.0.logs.inv(),
            height: self.0.height,
        }))
    }

    pub fn div(&self, other: &Self) -> Self {
        self.mul(&other.inv())
    }

    pub fn pow(&self, r: &BigRational) -> Self {
        if r.is_zero() {
            return Self::one();
        }
        if r.is_one() {
            return self.clone();
        }
        let c = C::from_rational(r.clone());
        let arg = self
            .0
            .arg
            .iter()
            .map(|t| Term::new(t.coef.mul(&c), t.monomial.clone()))
            .collect();
        Self::from_parts(arg, self.0.logs.pow(r))
    }

    /// Terms of `log 𝔪 = a + Σ αᵢ ℓᵢ₊₁`, sorted decreasingly.
    pub fn log_terms(&self) -> Vec<Term<C>> {
        let logs: Vec<Term<C>> = self
            .0
            .logs
            .exps
            .iter()
            .map(|(i, a)| Term::new(C::from_rational(a.clone()), Self::ell(i + 1)))
            .collect();
        finite::add(&self.0.arg, &logs)
    }

    /// Comparison with the identity monomial.
    pub fn cmp_one(&self) -> Ordering {
        self.cmp(&Self::one())
    }
}

impl<C: Constant> PartialEq for Monomial<C> {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.0, &other.0)
            || (self.0.height == other.0.height
                && self.0.logs == other.0.logs
                && finite::terms_eq(&self.0.arg, &other.0.arg))
    }
}

impl<C: Constant> Eq for Monomial<C> {}

impl<C: Constant> Ord for Monomial<C> {
    fn cmp(&self, other: &Self) -> Ordering {
        if Arc::ptr_eq(&self.0, &other.0) {
            return Ordering::Equal;
        }
        let (a, b) = (&self.0, &other.0);
        if a.arg.is_empty() && b.arg.is_empty() {
            return a.logs.cmp(&b.logs);
        }
        let arg_diff = finite::first_difference(&a.arg, &b.arg);
        let log_diff = a.logs.first_difference(&b.logs);
        match (arg_diff, log_diff) {
            (None, None) => Ordering::Equal,
            (None, Some((_, d))) => sign_of_rational(&d),
            (Some(t), None) => t.coef.sign(),
            (Some(t), Some((i, d))) => match t.monomial.cmp(&Self::ell(i + 1)) {
                Ordering::Greater => t.coef.sign(),
                Ordering::Less => sign_of_rational(&d),
                Ordering::Equal => {
                    finite::first_difference(&self.log_terms(), &other.log_terms())
                        .map_or(Ordering::Equal, |t| t.coef.sign())
                }
            },
        }
    }
}

impl<C: Constant> PartialOrd for Monomial<C> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<C: Constant> fmt::Display for Monomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.arg.is_empty() {
            return write!(f, "{}", self.0.logs);
        }
        f.write_str("exp(")?;
        finite::fmt_terms(&self.0.arg, None, f)?;
        f.write_str(")")?;
        if !self.0.logs.is_one() {
            write!(f, "*{}", self.0.logs)?;
        }
        Ok(())
    }
}

impl<C: Constant> fmt::Debug for Monomial<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

/// `log 𝔪` as a finite series.
pub fn log_monomial<C: Constant>(m: &Monomial<C>) -> Series<C> {
    Series::from_sorted_terms(m.log_terms())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::Rational;

    type M = Monomial<Rational>;

    fn q(n: i64) -> BigRational {
        BigRational::from_integer(n.into())
    }

    fn t(c: i64, m: M) -> Term<Rational> {
        Term::new(Rational::from_int(c), m)
    }

    fn exp_m(arg: Vec<Term<Rational>>) -> M {
        M::exp_of(&finite::normalize(arg)).unwrap()
    }

    #[test]
    fn inverse_cancels() {
        let m = M::x_int(2).mul(&M::x_int(-2));
        assert!(m.is_one());
    }

    #[test]
    fn log_exponents_add() {
        let a: M = LogMonomial::from_exponents([(0, q(1)), (1, q(2))]).into();
        let b = M::x_int(-1);
        let expected: M = LogMonomial::power(1, q(2)).into();
        assert_eq!(a.mul(&b), expected);
    }

    #[test]
    fn exponential_arguments_cancel() {
        let a = exp_m(vec![t(1, M::x_int(2))]).mul(&M::x());
        let b = exp_m(vec![t(-1, M::x_int(2))]).mul(&M::ell(1));
        let expected: M = LogMonomial::from_exponents([(0, q(1)), (1, q(1))]).into();
        assert_eq!(a.mul(&b), expected);
        assert_eq!(a.mul(&b).height(), 0);
    }

    #[test]
    fn x_beats_any_power_of_log() {
        let l = M::ell(1).pow(&q(100));
        assert_eq!(M::x().cmp(&l), Ordering::Greater);
        assert_eq!(M::ell(2).pow(&q(-1)).cmp(&M::ell(1).pow(&q(-1))), Ordering::Greater);
    }

    #[test]
    fn exponentials_compare_by_argument() {
        let a = exp_m(vec![t(1, M::x_int(2))]).mul(&M::x_int(-5));
        let b = exp_m(vec![t(1, M::x())]).mul(&M::x_int(100));
        assert_eq!(a.cmp(&b), Ordering::Greater);
        assert_eq!(a.cmp(&a.clone()), Ordering::Equal);
        assert_eq!(M::x().cmp(&exp_m(vec![t(1, M::x())])), Ordering::Less);
    }

    #[test]
    fn slow_exponentials_sit_below_powers_of_x() {
        // exp(sqrt(log x)) grows slower than any x^r with r > 0
        let arg = vec![Term::new(Rational::one(), LogMonomial::power(1, BigRational::new(1.into(), 2.into())).into())];
        let slow = exp_m(arg);
        assert_eq!(slow.cmp_one(), Ordering::Greater);
        let tiny_power = M::x_pow(BigRational::new(1.into(), 1000.into()));
        assert_eq!(slow.cmp(&tiny_power), Ordering::Less);
        assert_eq!(slow.cmp(&M::ell(1).pow(&q(1000))), Ordering::Greater);
    }

    #[test]
    fn extraction_moves_iterated_logs() {
        let m = exp_m(vec![t(2, M::ell(1)), t(1, M::ell(2))]);
        let expected: M = LogMonomial::from_exponents([(0, q(2)), (1, q(1))]).into();
        assert_eq!(m, expected);
        assert_eq!(m.to_string(), "x^2*l1");
    }

    #[test]
    fn log_of_monomials() {
        let m: M = LogMonomial::from_exponents([(0, q(3)), (1, q(-1))]).into();
        assert_eq!(log_monomial(&m).to_string(), "3*l1 - l2");
        assert_eq!(log_monomial(&M::one()).to_string(), "0");
        let e = exp_m(vec![t(1, M::x_int(2))]).mul(&M::x_int(3));
        assert_eq!(log_monomial(&e).to_string(), "x^2 + 3*l1");
    }

    #[test]
    fn display_forms() {
        let m = exp_m(vec![t(1, M::x_int(2)), t(-1, M::x())]).mul(&M::x_pow(BigRational::new(1.into(), 2.into())));
        assert_eq!(m.to_string(), "exp(x^2 - x)*x^(1/2)");
        assert_eq!(M::x_int(-1).to_string(), "x^-1");
    }
}
