//! The exponential field 𝕋: total `exp` and `log`, powers, and levels.
//!
//! The tower `K₀ ⊂ K₁ ⊂ ⋯` is kept implicit. A series lives at level `n`
//! when all its monomials have exponential height at most `n`, and one
//! extension step adjoins `exp(A)` for the purely infinite `A` of the level.

use std::cmp::Ordering;
use std::fmt;

use num_rational::BigRational;
use num_traits::Signed;

use crate::analytic::{exp_infinitesimal, log1p_infinitesimal, taylor_apply, AnalyticGerm};
use crate::constants::Constant;
use crate::error::{KernelError, Result};
use crate::hahn::{decompose, Decomposition};
use crate::monomials::{log_monomial, Monomial};
use crate::series::{Budget, Dominant, Series, Tag, Term};

/// Transseries are series over transmonomials.
pub type Transseries<C> = Series<C>;

/// `exp(f^≻ + c + ε) = exp(f^≻) · e^c · Σ εⁿ/n!`.
pub fn exp_total<C: Constant>(f: &Series<C>, budget: Budget) -> Result<Series<C>> {
    if let Some(Tag::LogOf(g)) = f.tag() {
        return Ok(g.clone());
    }
    let d = decompose(f, budget)?;
    let factor = d.constant.exp()?;
    Ok(assemble_exp(f, &d, factor))
}

/// `exp` from a decomposition and a given value of `e^c`.
pub(crate) fn assemble_exp<C: Constant>(f: &Series<C>, d: &Decomposition<C>, factor: C) -> Series<C> {
    let infinite = d.infinite.finite_terms().expect("finite infinite part");
    let monomial = Monomial::exp_of(infinite).expect("purely infinite argument");
    exp_infinitesimal(d.infinitesimal.clone())
        .mul_term(&factor, &monomial)
        .tagged(Tag::ExpOf(f.clone()))
}

/// The leading term of a positive series.
fn positive_lead<C: Constant>(g: &Series<C>, budget: Budget) -> Result<Term<C>> {
    match g.dominant(budget)? {
        Dominant::Term(t) if t.coef.sign() == Ordering::Greater => Ok(t),
        Dominant::Indeterminate => Err(KernelError::IndeterminateSign),
        _ => Err(KernelError::NotPositive),
    }
}

/// `ε` with `g = c·𝔡·(1 + ε)`.
fn relative_tail<C: Constant>(g: &Series<C>, lead: &Term<C>) -> Result<Series<C>> {
    let inv = lead.coef.inv().ok_or(KernelError::DivisionByZero)?;
    Ok(g
        .tail_after(std::slice::from_ref(lead))
        .mul_term(&inv, &lead.monomial.inv()))
}

/// `log(c·𝔡·(1 + ε)) = log 𝔡 + log c + log(1 + ε)`.
pub fn log_total<C: Constant>(g: &Series<C>, budget: Budget) -> Result<Series<C>> {
    if let Some(Tag::ExpOf(f)) = g.tag() {
        return Ok(f.clone());
    }
    let lead = positive_lead(g, budget)?;
    let log_c = lead.coef.ln()?;
    let eps = relative_tail(g, &lead)?;
    Ok(log_monomial(&lead.monomial)
        .add(&Series::constant(log_c))
        .add(&log1p_infinitesimal(eps))
        .tagged(Tag::LogOf(g.clone())))
}

/// `f^r` for rational `r`.
///
/// Integer exponents use ring operations and inversion, so any nonzero `f`
/// is allowed. Other exponents need `f > 0` and expand
/// `c^r·𝔡^r·(1 + ε)^r` binomially.
pub fn power<C: Constant>(f: &Series<C>, r: &BigRational, budget: Budget) -> Result<Series<C>> {
    if r.is_integer() {
        let n = r.to_integer();
        let base = if n.is_negative() { f.invert(budget)? } else { f.clone() };
        let e: u64 = n.abs().try_into().map_err(|_| {
            KernelError::ConstantCapabilityMissing(format!("exponent {n} is too large"))
        })?;
        return Ok(base.pow_uint(e));
    }
    let lead = positive_lead(f, budget)?;
    let coef = lead.coef.pow_rational(r)?;
    let monomial = lead.monomial.pow(r);
    let eps = relative_tail(f, &lead)?;
    if eps.is_exact_zero() {
        return Ok(Series::term(coef, monomial));
    }
    let germ = AnalyticGerm::binomial(r.clone());
    let unit = taylor_apply(&germ, &eps, budget)?;
    Ok(unit.mul_term(&coef, &monomial))
}

/// Least `n` with every monomial in `𝔗ₙ` (an upper bound for lazy series).
pub fn level<C: Constant>(f: &Series<C>) -> u32 {
    f.level()
}

/// The step `(Kₙ, Aₙ, Bₙ, logₙ) → (Kₙ₊₁, Aₙ₊₁, Bₙ₊₁, logₙ₊₁)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExtensionStep {
    pub level: u32,
}

impl ExtensionStep {
    pub fn new(level: u32) -> Self {
        ExtensionStep { level }
    }

    pub fn next(self) -> Self {
        ExtensionStep { level: self.level + 1 }
    }

    /// Whether `f ∈ Kₙ`.
    pub fn admits<C: Constant>(&self, f: &Series<C>) -> bool {
        f.level() <= self.level
    }

    /// `f = a + b` with `a ∈ Aₙ` purely infinite and `b ∈ Bₙ` bounded.
    pub fn split<C: Constant>(&self, f: &Series<C>, budget: Budget) -> Result<(Series<C>, Series<C>)> {
        if !self.admits(f) {
            return Err(KernelError::TierUnsupported("higher-level"));
        }
        let d = decompose(f, budget)?;
        let bounded = Series::constant(d.constant).add(&d.infinitesimal);
        Ok((d.infinite, bounded))
    }
}

impl fmt::Display for ExtensionStep {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (n, m) = (self.level, self.level + 1);
        write!(f, "K{n} -> K{m}: A{n} = K{n}^>1, B{n} = K{n}^<=1, T{m} = exp(A{n})*T{n}")
    }
}
