//! Ordered-field and valuation structure on `C[[𝔐]]`.

use std::cmp::Ordering;
use std::fmt;
use std::sync::Arc;

use crate::constants::Constant;
use crate::error::{KernelError, Result};
use crate::monomials::{LogMonomial, Monomial};
use crate::series::finite::{self, Term};
use crate::series::{Budget, Dominant, Series, Tier, SAFETY_CAP};

/// A three-valued comparison outcome.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Less,
    Equal,
    Greater,
    Indeterminate,
}

impl Verdict {
    pub fn from_ordering(o: Ordering) -> Self {
        match o {
            Ordering::Less => Verdict::Less,
            Ordering::Equal => Verdict::Equal,
            Ordering::Greater => Verdict::Greater,
        }
    }

    pub fn ordering(self) -> Option<Ordering> {
        match self {
            Verdict::Less => Some(Ordering::Less),
            Verdict::Equal => Some(Ordering::Equal),
            Verdict::Greater => Some(Ordering::Greater),
            Verdict::Indeterminate => None,
        }
    }

    pub fn reverse(self) -> Self {
        match self {
            Verdict::Less => Verdict::Greater,
            Verdict::Greater => Verdict::Less,
            v => v,
        }
    }

    pub fn is_determinate(self) -> bool {
        self != Verdict::Indeterminate
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Less => "Less",
            Verdict::Equal => "Equal",
            Verdict::Greater => "Greater",
            Verdict::Indeterminate => "Indeterminate",
        })
    }
}

/// Sign of the dominant coefficient; `Equal` means `f = 0`.
pub fn series_sign<C: Constant>(f: &Series<C>, budget: Budget) -> Verdict {
    match f.dominant(budget) {
        Ok(Dominant::Zero) => Verdict::Equal,
        Ok(Dominant::Term(t)) => Verdict::from_ordering(t.coef.sign()),
        Ok(Dominant::Indeterminate) | Err(_) => Verdict::Indeterminate,
    }
}

/// Compares dominant monomials: `Less` is `f ≺ g`, `Equal` is `f ≍ g`.
pub fn series_cmp_abs<C: Constant>(f: &Series<C>, g: &Series<C>, budget: Budget) -> Verdict {
    let (Ok(a), Ok(b)) = (f.dominant(budget), g.dominant(budget)) else {
        return Verdict::Indeterminate;
    };
    match (a, b) {
        (Dominant::Indeterminate, _) | (_, Dominant::Indeterminate) => Verdict::Indeterminate,
        (Dominant::Zero, Dominant::Zero) => Verdict::Equal,
        (Dominant::Zero, _) => Verdict::Less,
        (_, Dominant::Zero) => Verdict::Greater,
        (Dominant::Term(s), Dominant::Term(t)) => Verdict::from_ordering(s.monomial.cmp(&t.monomial)),
    }
}

/// `f = f^≻ + f₁ + f^≺`.
#[derive(Clone, Debug)]
pub struct Decomposition<C: Constant> {
    pub infinite: Series<C>,
    pub constant: C,
    pub infinitesimal: Series<C>,
}

impl<C: Constant> Decomposition<C> {
    pub fn reassemble(&self) -> Series<C> {
        self.infinite
            .add(&Series::constant(self.constant.clone()))
            .add(&self.infinitesimal)
    }
}

pub fn decompose<C: Constant>(f: &Series<C>, budget: Budget) -> Result<Decomposition<C>> {
    if let Some(terms) = f.finite_terms() {
        let split = terms.partition_point(|t| t.monomial.cmp_one() == Ordering::Greater);
        let (constant, rest) = match terms.get(split) {
            Some(t) if t.monomial.is_one() => (t.coef.clone(), split + 1),
            _ => (C::zero(), split),
        };
        return Ok(Decomposition {
            infinite: Series::from_sorted_terms(terms[..split].to_vec()),
            constant,
            infinitesimal: Series::from_sorted_terms(terms[rest..].to_vec()),
        });
    }
    let limit = match f.tier() {
        Tier::Stream => budget.max_terms(),
        _ => SAFETY_CAP,
    };
    let consumed = f.terms_down_to(&Monomial::one(), budget, limit)?;
    let mut prefix = consumed.clone();
    let constant = prefix.pop_if(|t| t.monomial.is_one()).map_or_else(C::zero, |t| t.coef);
    Ok(Decomposition {
        infinite: Series::from_sorted_terms(prefix),
        constant,
        infinitesimal: f.tail_after(&consumed),
    })
}

/// The valuation `v f`, an order-reversed copy of `𝔡(f)`; `∞` for zero.
#[derive(Clone, Debug, PartialEq)]
pub enum Valuation<C: Constant> {
    Value(Monomial<C>),
    Infinite,
}

impl<C: Constant> Eq for Valuation<C> {}

impl<C: Constant> Valuation<C> {
    /// `v(fg) = vf + vg`.
    pub fn add(&self, other: &Self) -> Self {
        match (self, other) {
            (Valuation::Value(a), Valuation::Value(b)) => Valuation::Value(a.mul(b)),
            _ => Valuation::Infinite,
        }
    }
}

impl<C: Constant> Ord for Valuation<C> {
    fn cmp(&self, other: &Self) -> Ordering {
        match (self, other) {
            (Valuation::Infinite, Valuation::Infinite) => Ordering::Equal,
            (Valuation::Infinite, _) => Ordering::Greater,
            (_, Valuation::Infinite) => Ordering::Less,
            (Valuation::Value(a), Valuation::Value(b)) => b.cmp(a),
        }
    }
}

impl<C: Constant> PartialOrd for Valuation<C> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<C: Constant> fmt::Display for Valuation<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Value(m) => write!(f, "v({m})"),
            Valuation::Infinite => f.write_str("∞"),
        }
    }
}

pub fn valuation<C: Constant>(f: &Series<C>, budget: Budget) -> Result<Valuation<C>> {
    match f.dominant(budget)? {
        Dominant::Zero => Ok(Valuation::Infinite),
        Dominant::Term(t) => Ok(Valuation::Value(t.monomial)),
        Dominant::Indeterminate => Err(KernelError::BudgetExhausted),
    }
}

/// Membership in the valuation ring `𝒪 = C[[𝔐]]^≼`.
pub fn is_bounded<C: Constant>(f: &Series<C>, budget: Budget) -> Result<bool> {
    Ok(match valuation(f, budget)? {
        Valuation::Infinite => true,
        Valuation::Value(m) => m.cmp_one() != Ordering::Greater,
    })
}

/// Membership in the maximal ideal `𝔬 = C[[𝔐]]^≺`.
pub fn is_infinitesimal<C: Constant>(f: &Series<C>, budget: Budget) -> Result<bool> {
    Ok(match valuation(f, budget)? {
        Valuation::Infinite => true,
        Valuation::Value(m) => m.cmp_one() == Ordering::Less,
    })
}

type Projection<C> = Arc<dyn Fn(&Monomial<C>) -> Monomial<C> + Send + Sync>;

/// A factorization `𝔐 ≅ 𝔐₁·𝔐₂` given by its two projections, `𝔐₁` convex.
#[derive(Clone)]
pub struct Split<C: Constant> {
    name: String,
    first: Projection<C>,
    second: Projection<C>,
}

impl<C: Constant> Split<C> {
    pub fn new(
        name: impl Into<String>,
        first: impl Fn(&Monomial<C>) -> Monomial<C> + Send + Sync + 'static,
        second: impl Fn(&Monomial<C>) -> Monomial<C> + Send + Sync + 'static,
    ) -> Self {
        Split { name: name.into(), first: Arc::new(first), second: Arc::new(second) }
    }

    /// `𝔐₁ = 𝔏` (logarithmic part), `𝔐₂` = exponential part.
    pub fn log_exp() -> Self {
        Split::new(
            "log/exp",
            |m: &Monomial<C>| Monomial::from(m.log_part().clone()),
            |m: &Monomial<C>| Monomial::exp_of(m.arg()).expect("canonical argument"),
        )
    }

    /// `𝔐₁` = monomials in `ℓₖ, ℓₖ₊₁, …`; `𝔐₂` = the rest.
    pub fn log_index_at_least(k: usize) -> Self {
        let deep = move |m: &Monomial<C>| {
            let logs = LogMonomial::from_exponents(
                m.log_part().exponents().filter(|(i, _)| *i >= k).map(|(i, a)| (i, a.clone())),
            );
            Monomial::from(logs)
        };
        Split::new(format!("l{k}.."), deep, move |m: &Monomial<C>| m.div(&deep(m)))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn project(&self, m: &Monomial<C>) -> (Monomial<C>, Monomial<C>) {
        ((self.first)(m), (self.second)(m))
    }
}

/// A series over `𝔐₂` with coefficients in `C[[𝔐₁]]`, decreasing in `𝔐₂`.
#[derive(Clone, Debug)]
pub struct Regrouped<C: Constant> {
    pub groups: Vec<(Series<C>, Monomial<C>)>,
}

impl<C: Constant> Regrouped<C> {
    pub fn flatten(&self) -> Series<C> {
        self.groups.iter().fold(Series::zero(), |acc, (coef, m)| {
            acc.add(&coef.mul(&Series::monomial(m.clone())))
        })
    }

    /// Sign of the leading coefficient series.
    pub fn sign(&self, budget: Budget) -> Verdict {
        match self.groups.first() {
            None => Verdict::Equal,
            Some((coef, _)) => series_sign(coef, budget),
        }
    }
}

impl<C: Constant> fmt::Display for Regrouped<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.groups.is_empty() {
            return f.write_str("0");
        }
        for (i, (coef, m)) in self.groups.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({coef})*{m}")?;
        }
        Ok(())
    }
}

pub fn regroup<C: Constant>(f: &Series<C>, split: &Split<C>) -> Result<Regrouped<C>> {
    let terms = match f.finite_terms() {
        Some(t) => t.to_vec(),
        None if f.tier() == Tier::Grid => {
            let e = f.enumerate(SAFETY_CAP)?;
            if !e.exhausted_input {
                return Err(KernelError::TierUnsupported("infinite grid"));
            }
            e.terms
        }
        None => return Err(KernelError::TierUnsupported("stream")),
    };
    let invalid = |m: &Monomial<C>, why: &str| {
        KernelError::InvalidSplit(format!("{m} under {}: {why}", split.name))
    };
    let mut parts: Vec<(Monomial<C>, Monomial<C>, Term<C>)> = Vec::with_capacity(terms.len());
    for t in terms {
        let (a, b) = split.project(&t.monomial);
        if a.mul(&b) != t.monomial {
            return Err(invalid(&t.monomial, "projections do not multiply back"));
        }
        if !split.project(&a).1.is_one() || !split.project(&b).0.is_one() {
            return Err(invalid(&t.monomial, "factors are not unique"));
        }
        parts.push((a, b, t));
    }
    // Convexity of 𝔐₁: the 𝔐₂ component decides the order across groups.
    for (i, (_, b, s)) in parts.iter().enumerate() {
        for (_, c, t) in &parts[i + 1..] {
            if b != c && b.cmp(c) != s.monomial.cmp(&t.monomial) {
                return Err(invalid(&s.monomial, "first factor is not convex on the support"));
            }
        }
    }
    let mut groups: Vec<(Monomial<C>, Vec<Term<C>>)> = Vec::new();
    for (a, b, t) in parts {
        let term = Term::new(t.coef, a);
        match groups.iter_mut().find(|(m, _)| *m == b) {
            Some((_, list)) => list.push(term),
            None => groups.push((b, vec![term])),
        }
    }
    groups.sort_by(|x, y| y.0.cmp(&x.0));
    Ok(Regrouped {
        groups: groups
            .into_iter()
            .map(|(m, list)| (Series::from_sorted_terms(finite::normalize(list)), m))
            .collect(),
    })
}
