//! Taylor extension of analytic germs to bounded series arguments.
//!
//! A germ enters as a coefficient oracle `(c, n) ↦ f⁽ⁿ⁾(c)/n!`. For a bounded
//! `g = c + ε` with `c` in the germ's domain, `f̂(g) = Σ f⁽ⁿ⁾(c)/n! εⁿ`.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::constants::Constant;
use crate::error::{KernelError, Result};
use crate::hahn::{decompose, series_sign, Verdict};
use crate::series::{Budget, CoefficientOracle, Dominant, Series};

/// An end of an open interval.
#[derive(Clone, Debug, PartialEq)]
pub enum Endpoint<C: Constant> {
    NegInfinity,
    Value(C),
    PosInfinity,
}

impl<C: Constant> fmt::Display for Endpoint<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Endpoint::NegInfinity => f.write_str("-∞"),
            Endpoint::Value(c) => write!(f, "{c}"),
            Endpoint::PosInfinity => f.write_str("+∞"),
        }
    }
}

type GermOracle<C> = Arc<dyn Fn(&C, usize) -> Result<C> + Send + Sync>;

/// A real-analytic function on `(lower, upper)`, given by Taylor coefficients.
#[derive(Clone)]
pub struct AnalyticGerm<C: Constant> {
    name: String,
    lower: Endpoint<C>,
    upper: Endpoint<C>,
    oracle: GermOracle<C>,
    degree: Option<usize>,
}

fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |acc, k| acc * BigInt::from(k))
}

fn reciprocal_factorial<C: Constant>(n: usize) -> C {
    C::from_rational(BigRational::new(BigInt::one(), factorial(n)))
}

fn alternating<C: Constant>(n: usize, c: C) -> C {
    if n.is_multiple_of(2) {
        c
    } else {
        c.neg()
    }
}

fn at_zero_only<C: Constant>(name: &str, c: &C) -> Result<()> {
    if c.is_zero() {
        Ok(())
    } else {
        Err(KernelError::ConstantCapabilityMissing(format!("{name} at {c}")))
    }
}

/// `(1 + c)^p` for an integer `p`.
fn shifted_power<C: Constant>(c: &C, p: i64) -> Result<C> {
    let base = C::one().add(c);
    Ok(base.pow_rational(&BigRational::from_integer(p.into()))?)
}

impl<C: Constant> AnalyticGerm<C> {
    pub fn new(
        name: impl Into<String>,
        lower: Endpoint<C>,
        upper: Endpoint<C>,
        oracle: impl Fn(&C, usize) -> Result<C> + Send + Sync + 'static,
    ) -> Self {
        AnalyticGerm { name: name.into(), lower, upper, oracle: Arc::new(oracle), degree: None }
    }

    /// Marks the germ as a polynomial of the given degree.
    pub fn with_degree(mut self, degree: usize) -> Self {
        self.degree = Some(degree);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn degree(&self) -> Option<usize> {
        self.degree
    }

    pub fn contains(&self, c: &C) -> bool {
        let above = match &self.lower {
            Endpoint::NegInfinity => true,
            Endpoint::Value(a) => c.cmp_value(a) == Ordering::Greater,
            Endpoint::PosInfinity => false,
        };
        let below = match &self.upper {
            Endpoint::PosInfinity => true,
            Endpoint::Value(b) => c.cmp_value(b) == Ordering::Less,
            Endpoint::NegInfinity => false,
        };
        above && below
    }

    /// `f⁽ⁿ⁾(c)/n!`.
    pub fn coefficient(&self, c: &C, n: usize) -> Result<C> {
        if self.degree.is_some_and(|d| n > d) {
            return Ok(C::zero());
        }
        (self.oracle)(c, n)
    }

    pub fn exp() -> Self {
        Self::new("exp", Endpoint::NegInfinity, Endpoint::PosInfinity, |c: &C, n| {
            Ok(c.exp()?.mul(&reciprocal_factorial(n)))
        })
    }

    /// `log(1 + t)` on `(-1, ∞)`.
    pub fn log1p() -> Self {
        Self::new("log1p", Endpoint::Value(C::from_int(-1)), Endpoint::PosInfinity, |c: &C, n| {
            if n == 0 {
                return Ok(C::one().add(c).ln()?);
            }
            let k = C::from_int(n as i64);
            let mag = shifted_power(c, -(n as i64))?.div(&k)?;
            Ok(alternating(n + 1, mag))
        })
    }

    /// `1/(1 - t)` on `(-∞, 1)`.
    pub fn geometric() -> Self {
        Self::new("geom", Endpoint::NegInfinity, Endpoint::Value(C::one()), |c: &C, n| {
            let base = C::one().sub(c);
            Ok(base.pow_rational(&BigRational::from_integer(-BigInt::from(n + 1)))?)
        })
    }

    /// `sin`, available at the expansion point 0.
    pub fn sin() -> Self {
        Self::new("sin", Endpoint::NegInfinity, Endpoint::PosInfinity, |c: &C, n| {
            at_zero_only("sin", c)?;
            Ok(if n % 2 == 1 { alternating(n / 2, reciprocal_factorial(n)) } else { C::zero() })
        })
    }

    /// `cos`, available at the expansion point 0.
    pub fn cos() -> Self {
        Self::new("cos", Endpoint::NegInfinity, Endpoint::PosInfinity, |c: &C, n| {
            at_zero_only("cos", c)?;
            Ok(if n % 2 == 0 { alternating(n / 2, reciprocal_factorial(n)) } else { C::zero() })
        })
    }

    pub fn identity() -> Self {
        Self::new("id", Endpoint::NegInfinity, Endpoint::PosInfinity, |c: &C, n| {
            Ok(match n {
                0 => c.clone(),
                1 => C::one(),
                _ => C::zero(),
            })
        })
        .with_degree(1)
    }

    /// `(1 + t)^r` on `(-1, ∞)`.
    pub fn binomial(r: BigRational) -> Self {
        let degree = (r.is_integer() && r >= BigRational::zero())
            .then(|| r.to_integer().try_into().ok())
            .flatten();
        let name = format!("(1+t)^{r}");
        let germ = Self::new(name, Endpoint::Value(C::from_int(-1)), Endpoint::PosInfinity, move |c: &C, n| {
            // C(r, n) = r(r-1)...(r-n+1)/n!
            let mut choose = BigRational::one();
            for k in 0..n {
                choose *= &r - BigRational::from_integer(k.into());
            }
            choose /= BigRational::from_integer(factorial(n));
            if choose.is_zero() {
                return Ok(C::zero());
            }
            let base = C::one().add(c);
            let power = base.pow_rational(&(&r - BigRational::from_integer(n.into())))?;
            Ok(power.mul_rational(&choose))
        });
        match degree {
            Some(d) => germ.with_degree(d),
            None => germ,
        }
    }
}

/// `Σ_{|α| ≤ d} a_α ε^α` by ring operations, which keeps exact forms.
fn polynomial_sum<C: Constant>(
    eps: &[Series<C>],
    oracle: &dyn Fn(&[usize]) -> Result<C>,
    degree: usize,
) -> Result<Series<C>> {
    let mut acc = Series::zero();
    let mut alpha = vec![0usize; eps.len()];
    loop {
        let coef = oracle(&alpha)?;
        if !coef.is_zero() {
            let mut term = Series::constant(coef);
            for (e, &n) in eps.iter().zip(&alpha) {
                if n > 0 {
                    term = term.mul(&e.pow_uint(n as u64));
                }
            }
            acc = acc.add(&term);
        }
        // next multi-index with total degree ≤ d
        let mut i = 0;
        loop {
            if i == alpha.len() {
                return Ok(acc);
            }
            alpha[i] += 1;
            if alpha.iter().sum::<usize>() <= degree {
                break;
            }
            alpha[i] = 0;
            i += 1;
        }
    }
}

/// Returns `(c, ε)` for a bounded argument.
fn split_bounded<C: Constant>(g: &Series<C>, budget: Budget) -> Result<(C, Series<C>)> {
    let d = decompose(g, budget)?;
    if !d.infinite.is_exact_zero() {
        return Err(KernelError::ArgumentNotBounded);
    }
    Ok((d.constant, d.infinitesimal))
}

/// `f̂(g) = Σ f⁽ⁿ⁾(c)/n! εⁿ` for `g = c + ε` bounded.
pub fn taylor_apply<C: Constant>(
    germ: &AnalyticGerm<C>,
    g: &Series<C>,
    budget: Budget,
) -> Result<Series<C>> {
    let (c, eps) = split_bounded(g, budget)?;
    if !germ.contains(&c) {
        return Err(KernelError::ConstantOutsideDomain(format!(
            "{c} is outside the domain ({}, {}) of {}",
            germ.lower, germ.upper, germ.name
        )));
    }
    let head = germ.coefficient(&c, 0)?;
    if eps.is_exact_zero() {
        return Ok(Series::constant(head));
    }
    let local = germ.clone();
    let point = c.clone();
    let oracle = move |alpha: &[usize]| local.coefficient(&point, alpha[0]);
    if let Some(d) = germ.degree {
        return polynomial_sum(&[eps], &oracle, d);
    }
    Ok(Series::taylor_sum(vec![eps], Arc::new(oracle), None))
}

/// `e^{c+ε} = e^c · Σ εⁿ/n!` for bounded `g = c + ε`.
pub fn exp_bounded<C: Constant>(g: &Series<C>, budget: Budget) -> Result<Series<C>> {
    let (c, eps) = split_bounded(g, budget)?;
    let factor = c.exp()?;
    Ok(exp_infinitesimal(eps).scale(&factor))
}

/// `Σ εⁿ/n!` for infinitesimal `ε`.
pub(crate) fn exp_infinitesimal<C: Constant>(eps: Series<C>) -> Series<C> {
    if eps.is_exact_zero() {
        return Series::one();
    }
    let oracle: CoefficientOracle<C> = Arc::new(|alpha: &[usize]| Ok(reciprocal_factorial(alpha[0])));
    Series::taylor_sum(vec![eps], oracle, None)
}

/// `log(1 + ε) = Σ (-1)^{n+1} εⁿ/n` for infinitesimal `ε`.
pub(crate) fn log1p_infinitesimal<C: Constant>(eps: Series<C>) -> Series<C> {
    if eps.is_exact_zero() {
        return Series::zero();
    }
    let oracle: CoefficientOracle<C> = Arc::new(|alpha: &[usize]| {
        let n = alpha[0];
        if n == 0 {
            return Ok(C::zero());
        }
        let mag = C::from_rational(BigRational::new(BigInt::one(), BigInt::from(n)));
        Ok(alternating(n + 1, mag))
    });
    Series::taylor_sum(vec![eps], oracle, None)
}

/// `log(c(1 + ε)) = log c + log(1 + ε)` for a positive unit `g ≍ 1`.
pub fn log_unit<C: Constant>(g: &Series<C>, budget: Budget) -> Result<Series<C>> {
    let lead = match g.dominant(budget)? {
        Dominant::Term(t) if t.monomial.is_one() && t.coef.sign() == Ordering::Greater => t,
        Dominant::Indeterminate => return Err(KernelError::IndeterminateSign),
        _ => return Err(KernelError::NotPositiveUnit),
    };
    let log_c = lead.coef.ln()?;
    let inv = lead.coef.inv().ok_or(KernelError::DivisionByZero)?;
    let eps = g.tail_after(std::slice::from_ref(&lead)).scale(&inv);
    Ok(Series::constant(log_c).add(&log1p_infinitesimal(eps)))
}

type MultiOracle<C> = Arc<dyn Fn(&[C], &[usize]) -> Result<C> + Send + Sync>;

/// `F: Iⁿ → ℝ` analytic near the cube `I = [-1, 1]`, extended by 0 outside.
#[derive(Clone)]
pub struct RestrictedAnalyticFunction<C: Constant> {
    name: String,
    arity: usize,
    oracle: MultiOracle<C>,
    degree: Option<usize>,
}

impl<C: Constant> RestrictedAnalyticFunction<C> {
    pub fn new(
        name: impl Into<String>,
        arity: usize,
        oracle: impl Fn(&[C], &[usize]) -> Result<C> + Send + Sync + 'static,
    ) -> Self {
        RestrictedAnalyticFunction { name: name.into(), arity, oracle: Arc::new(oracle), degree: None }
    }

    pub fn with_degree(mut self, degree: usize) -> Self {
        self.degree = Some(degree);
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn arity(&self) -> usize {
        self.arity
    }

    /// The restriction of a one-variable germ defined on a neighbourhood of `I`.
    pub fn from_germ(germ: AnalyticGerm<C>) -> Self {
        let degree = germ.degree;
        let f = Self::new(format!("restricted {}", germ.name), 1, move |c: &[C], alpha| {
            germ.coefficient(&c[0], alpha[0])
        });
        match degree {
            Some(d) => f.with_degree(d),
            None => f,
        }
    }

    /// The restricted exponential `e` of the axiom (E5).
    pub fn restricted_exp() -> Self {
        Self::from_germ(AnalyticGerm::exp())
    }

    /// `(u, v) ↦ u·v`.
    pub fn product() -> Self {
        Self::new("product", 2, |c: &[C], alpha| {
            Ok(match (alpha[0], alpha[1]) {
                (0, 0) => c[0].mul(&c[1]),
                (1, 0) => c[1].clone(),
                (0, 1) => c[0].clone(),
                (1, 1) => C::one(),
                _ => C::zero(),
            })
        })
        .with_degree(2)
    }
}

pub fn restricted_apply<C: Constant>(
    f: &RestrictedAnalyticFunction<C>,
    args: &[Series<C>],
    budget: Budget,
) -> Result<Series<C>> {
    if args.len() != f.arity {
        return Err(KernelError::ArityMismatch { expected: f.arity, got: args.len() });
    }
    let one = Series::one();
    let mut outside = false;
    for g in args {
        for side in [one.sub(g), g.add(&one)] {
            match series_sign(&side, budget) {
                Verdict::Indeterminate => return Err(KernelError::IndeterminateCubeMembership),
                Verdict::Less => outside = true,
                _ => {}
            }
        }
    }
    if outside {
        return Ok(Series::zero());
    }
    let mut point = Vec::with_capacity(args.len());
    let mut eps = Vec::with_capacity(args.len());
    for g in args {
        let (c, e) = split_bounded(g, budget)?;
        point.push(c);
        eps.push(e);
    }
    let oracle = f.oracle.clone();
    let at = point.clone();
    let local = move |alpha: &[usize]| oracle(&at, alpha);
    if eps.iter().all(Series::is_exact_zero) {
        return Ok(Series::constant(local(&vec![0; args.len()])?));
    }
    if let Some(d) = f.degree {
        return polynomial_sum(&eps, &local, d);
    }
    local(&vec![0; args.len()])?;
    Ok(Series::taylor_sum(eps, Arc::new(local), None))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::{ExpRational, Rational};
    use crate::monomials::Monomial;
    use crate::series::Term;

    type S = Series<Rational>;
    type M = Monomial<Rational>;

    fn inv_x() -> S {
        S::monomial(M::x_int(-1))
    }

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n, d)
    }

    #[test]
    fn geometric_germ_matches_inversion() {
        let b = Budget::default();
        let g = taylor_apply(&AnalyticGerm::geometric(), &inv_x(), b).unwrap();
        let one_minus = S::one().sub(&inv_x());
        let h = one_minus.invert(b).unwrap();
        assert!(g.agrees_with(&h, 20, b).unwrap());
    }

    #[test]
    fn exp_germ_matches_exp_bounded() {
        let b = Budget::default();
        let via_germ = taylor_apply(&AnalyticGerm::exp(), &inv_x(), b).unwrap();
        let direct = exp_bounded(&inv_x(), b).unwrap();
        assert!(via_germ.agrees_with(&direct, 15, b).unwrap());
        let c = direct.coefficient(&M::x_int(-3), b).unwrap();
        assert_eq!(c, q(1, 6));
    }

    #[test]
    fn constants_map_to_values() {
        let b = Budget::default();
        let g = taylor_apply(&AnalyticGerm::geometric(), &S::constant(q(1, 2)), b).unwrap();
        assert_eq!(g.to_string(), "2");
        let err = taylor_apply(&AnalyticGerm::geometric(), &S::constant(q(3, 1)), b);
        assert!(matches!(err, Err(KernelError::ConstantOutsideDomain(_))));
        let err = taylor_apply(&AnalyticGerm::exp(), &S::x(), b);
        assert!(matches!(err, Err(KernelError::ArgumentNotBounded)));
    }

    #[test]
    fn identity_germ_is_exact() {
        let b = Budget::default();
        let g = S::constant(q(1, 3)).add(&inv_x());
        let h = taylor_apply(&AnalyticGerm::identity(), &g, b).unwrap();
        assert_eq!(h.to_string(), g.to_string());
        assert!(h.sub(&g).is_exact_zero());
    }

    #[test]
    fn log_of_units() {
        let b = Budget::default();
        assert!(log_unit(&S::one(), b).unwrap().is_exact_zero());
        let l = log_unit(&S::one().add(&inv_x()), b).unwrap();
        let expected = [q(1, 1), q(-1, 2), q(1, 3), q(-1, 4)];
        for (n, c) in expected.iter().enumerate() {
            assert_eq!(&l.coefficient(&M::x_int(-(n as i64) - 1), b).unwrap(), c);
        }
        let round = log_unit(&exp_bounded(&inv_x(), b).unwrap(), b).unwrap();
        assert!(round.agrees_down_to(&inv_x(), &M::x_int(-20), b).unwrap());
        assert!(matches!(log_unit(&S::x(), b), Err(KernelError::NotPositiveUnit)));
    }

    #[test]
    fn sin_and_cos_at_zero() {
        let b = Budget::default();
        let s = taylor_apply(&AnalyticGerm::sin(), &inv_x(), b).unwrap();
        assert_eq!(s.render(3, b), "x^-1 - 1/6*x^-3 + 1/120*x^-5 + o(x^-5)");
        let c = taylor_apply(&AnalyticGerm::cos(), &inv_x(), b).unwrap();
        assert_eq!(c.render(2, b), "1 - 1/2*x^-2 + o(x^-2)");
        let err = taylor_apply(&AnalyticGerm::sin(), &S::one(), b);
        assert!(matches!(err, Err(KernelError::ConstantCapabilityMissing(_))));
    }

    #[test]
    fn binomial_square_root() {
        let b = Budget::default();
        let half = BigRational::new(1.into(), 2.into());
        let root = taylor_apply(&AnalyticGerm::binomial(half), &inv_x(), b).unwrap();
        let square = root.mul(&root);
        assert_eq!(square.coefficient(&M::one(), b).unwrap(), q(1, 1));
        assert_eq!(square.coefficient(&M::x_int(-1), b).unwrap(), q(1, 1));
        for n in 2..=10 {
            assert!(square.coefficient(&M::x_int(-n), b).unwrap().is_zero());
        }
    }

    #[test]
    fn restricted_functions() {
        let b = Budget::default();
        let e = RestrictedAnalyticFunction::<ExpRational>::restricted_exp();
        let one = Series::<ExpRational>::one();
        let v = restricted_apply(&e, &[one], b).unwrap();
        assert_eq!(v.to_string(), "e^(1)");
        let product = RestrictedAnalyticFunction::<Rational>::product();
        let p = restricted_apply(&product, &[inv_x(), inv_x()], b).unwrap();
        assert_eq!(p.to_string(), "x^-2");
        let outside = restricted_apply(&RestrictedAnalyticFunction::restricted_exp(), &[S::constant(q(2, 1))], b);
        assert!(outside.unwrap().is_exact_zero());
        let bad = restricted_apply(&product, &[inv_x()], b);
        assert!(matches!(bad, Err(KernelError::ArityMismatch { expected: 2, got: 1 })));
    }

    #[test]
    fn restricted_membership_needs_a_determinate_sign() {
        let s = S::stream((0..).map(|n| Term::new(Rational::one(), M::x_int(-n))));
        let zero_stream = s.sub(&S::stream((0..).map(|n| Term::new(Rational::one(), M::x_int(-n)))));
        let e = RestrictedAnalyticFunction::restricted_exp();
        let r = restricted_apply(&e, &[S::one().add(&zero_stream)], Budget::new(8).unwrap());
        assert!(matches!(r, Err(KernelError::IndeterminateCubeMembership)));
    }
}
