//! Well-based series `C[[𝔐]]` over transmonomials.
//!
//! A series lives in one of three tiers:
//!
//! * **Finite**: an eager, sorted term list.
//! * **Grid**: a lazy stream whose support is known to lie in a grid
//!   `𝔪₀·{𝔫₁, …, 𝔫ₖ}^ℕ` with every `𝔫ᵢ ≺ 1`.
//! * **Stream**: any lazy, strictly decreasing, memoized term stream.
//!
//! Lazy series built from finite data by ring operations and division also
//! carry an exact numerator/denominator form, which makes their zero test
//! and dominant term exact. Everything else is observed under a [`Budget`]:
//! a query that meets more cancellations than the budget allows reports
//! indeterminacy instead of guessing.

pub mod finite;
pub(crate) mod lazy;

use std::cmp::Ordering;
use std::fmt;
use std::sync::atomic::{AtomicUsize, Ordering as AtomicOrdering};
use std::sync::Arc;

use crate::constants::Constant;
use crate::error::{KernelError, Result};
use crate::monomials::Monomial;

pub use finite::Term;
pub use lazy::CoefficientOracle;
use lazy::{DivisionSource, Fuel, MergeSource, Node, Probe, ProductSource, ScaleSource, TailSource, TaylorSource};

/// Upper bound on cancellations tolerated by plain enumeration.
pub const SAFETY_CAP: usize = 4096;

static GLOBAL_BUDGET: AtomicUsize = AtomicUsize::new(Budget::DEFAULT_TERMS);

/// How many cancelled emissions a query may sit through before giving up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Budget {
    max_terms: usize,
}

impl Budget {
    pub const DEFAULT_TERMS: usize = 64;

    pub fn new(max_terms: usize) -> Result<Self> {
        if max_terms == 0 {
            return Err(KernelError::InvalidBudget);
        }
        Ok(Budget { max_terms })
    }

    pub fn max_terms(&self) -> usize {
        self.max_terms
    }

    /// Changes the budget returned by `Budget::default()`.
    pub fn set_global_default(max_terms: usize) -> Result<()> {
        Budget::new(max_terms)?;
        GLOBAL_BUDGET.store(max_terms, AtomicOrdering::Relaxed);
        Ok(())
    }

    fn fuel(&self) -> Fuel {
        Fuel::new(self.max_terms)
    }
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_terms: GLOBAL_BUDGET.load(AtomicOrdering::Relaxed) }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Tier {
    Finite,
    Grid,
    Stream,
}

/// A grid `start·{generators}^ℕ` containing the support. Generators are ≺ 1.
#[derive(Clone, Debug)]
pub struct Grid<C: Constant> {
    pub start: Monomial<C>,
    pub generators: Vec<Monomial<C>>,
}

type Terms<C> = Vec<Term<C>>;

impl<C: Constant> Grid<C> {
    fn new(start: Monomial<C>, generators: impl IntoIterator<Item = Monomial<C>>) -> Self {
        let mut gens: Vec<Monomial<C>> = generators
            .into_iter()
            .filter(|g| g.cmp_one() == Ordering::Less)
            .collect();
        gens.sort_by(|a, b| b.cmp(a));
        gens.dedup();
        Grid { start, generators: gens }
    }

    fn of_terms(terms: &[Term<C>]) -> Option<Self> {
        let first = terms.first()?;
        let gens = terms[1..].iter().map(|t| t.monomial.div(&first.monomial));
        Some(Grid::new(first.monomial.clone(), gens))
    }

    fn union(&self, other: &Self) -> Self {
        let (hi, lo) = if self.start >= other.start { (self, other) } else { (other, self) };
        let gens = hi
            .generators
            .iter()
            .chain(&lo.generators)
            .cloned()
            .chain(std::iter::once(lo.start.div(&hi.start)));
        Grid::new(hi.start.clone(), gens)
    }

    fn product(&self, other: &Self) -> Self {
        Grid::new(
            self.start.mul(&other.start),
            self.generators.iter().chain(&other.generators).cloned(),
        )
    }

    fn scaled(&self, m: &Monomial<C>) -> Self {
        Grid { start: self.start.mul(m), generators: self.generators.clone() }
    }

    /// Generators for powers of an infinitesimal series with this grid.
    fn infinitesimal_generators(&self) -> Option<Vec<Monomial<C>>> {
        match self.start.cmp_one() {
            Ordering::Less => {
                let mut gens = self.generators.clone();
                gens.push(self.start.clone());
                Some(gens)
            }
            Ordering::Equal => Some(self.generators.clone()),
            Ordering::Greater => None,
        }
    }

    /// Whether `m` can lie in the grid's support region (`m ≼ start`).
    pub fn admits(&self, m: &Monomial<C>) -> bool {
        *m <= self.start
    }
}

/// Exact form `num / den` of a lazy series, both finite with `den ≠ 0`.
#[derive(Clone, Debug)]
pub(crate) struct Exact<C: Constant> {
    pub(crate) num: Vec<Term<C>>,
    pub(crate) den: Vec<Term<C>>,
}

/// What a lazy series is known to equal, symbolically.
#[derive(Clone)]
pub enum Tag<C: Constant> {
    /// The series is `exp(arg)`.
    ExpOf(Series<C>),
    /// The series is `log(arg)`.
    LogOf(Series<C>),
}

/// Outcome of a dominant-term query.
#[derive(Clone, Debug, PartialEq)]
pub enum Dominant<C: Constant> {
    Zero,
    Term(Term<C>),
    Indeterminate,
}

impl<C: Constant> Dominant<C> {
    pub fn monomial(&self) -> Option<&Monomial<C>> {
        match self {
            Dominant::Term(t) => Some(&t.monomial),
            _ => None,
        }
    }
}

/// First terms of a series.
#[derive(Clone, Debug)]
pub struct Enumeration<C: Constant> {
    pub terms: Vec<Term<C>>,
    /// The series has no further terms.
    pub exhausted_input: bool,
}

#[derive(Clone)]
enum Repr<C: Constant> {
    Finite(Arc<Vec<Term<C>>>),
    Lazy(Arc<Node<C>>),
}

/// An immutable well-based series. Cloning is cheap.
#[derive(Clone)]
pub struct Series<C: Constant>(Repr<C>);

fn finite_height<C: Constant>(terms: &[Term<C>]) -> u32 {
    terms.iter().map(|t| t.monomial.height()).max().unwrap_or(0)
}

impl<C: Constant> Series<C> {
    pub fn zero() -> Self {
        Self::from_sorted_terms(Vec::new())
    }

    pub fn one() -> Self {
        Self::constant(C::one())
    }

    pub fn constant(c: C) -> Self {
        Self::term(c, Monomial::one())
    }

    pub fn monomial(m: Monomial<C>) -> Self {
        Self::term(C::one(), m)
    }

    pub fn term(c: C, m: Monomial<C>) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self::from_sorted_terms(vec![Term::new(c, m)])
    }

    pub fn x() -> Self {
        Self::monomial(Monomial::x())
    }

    /// Finite series from terms in any order; duplicates are merged.
    pub fn from_terms(terms: Vec<Term<C>>) -> Self {
        Self::from_sorted_terms(finite::normalize(terms))
    }

    /// Finite series from terms already sorted decreasingly without zeros.
    pub fn from_sorted_terms(terms: Vec<Term<C>>) -> Self {
        debug_assert!(terms.windows(2).all(|w| w[0].monomial > w[1].monomial));
        Series(Repr::Finite(Arc::new(terms)))
    }

    /// A stream-tier series from a strictly decreasing term iterator.
    ///
    /// Zero coefficients are skipped; an out-of-order term makes later
    /// observations fail with `UnorderedStream`.
    pub fn stream<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = Term<C>>,
        I::IntoIter: Send + 'static,
    {
        let source = lazy::IterSource::new(terms.into_iter());
        Self::lazy(Node::new(Box::new(source), None, None, 0))
    }

    /// Like [`Series::stream`], with a declared exponential height.
    pub fn stream_with_height<I>(terms: I, height: u32) -> Self
    where
        I: IntoIterator<Item = Term<C>>,
        I::IntoIter: Send + 'static,
    {
        let source = lazy::IterSource::new(terms.into_iter());
        Self::lazy(Node::new(Box::new(source), None, None, height))
    }

    fn lazy(node: Node<C>) -> Self {
        Series(Repr::Lazy(Arc::new(node)))
    }

    pub fn tier(&self) -> Tier {
        match &self.0 {
            Repr::Finite(_) => Tier::Finite,
            Repr::Lazy(n) if n.grid.is_some() => Tier::Grid,
            Repr::Lazy(_) => Tier::Stream,
        }
    }

    pub fn finite_terms(&self) -> Option<&[Term<C>]> {
        match &self.0 {
            Repr::Finite(t) => Some(t),
            Repr::Lazy(_) => None,
        }
    }

    /// True when the series is known to be zero without observation.
    pub fn is_exact_zero(&self) -> bool {
        matches!(&self.0, Repr::Finite(t) if t.is_empty())
    }

    /// True for finite series and lazy series with an exact rational form.
    pub fn has_exact_zero_test(&self) -> bool {
        match &self.0 {
            Repr::Finite(_) => true,
            Repr::Lazy(n) => n.exact.is_some(),
        }
    }

    pub fn grid(&self) -> Option<Grid<C>> {
        match &self.0 {
            Repr::Finite(t) => Grid::of_terms(t),
            Repr::Lazy(n) => n.grid.clone(),
        }
    }

    pub fn tag(&self) -> Option<&Tag<C>> {
        match &self.0 {
            Repr::Finite(_) => None,
            Repr::Lazy(n) => n.tag.as_ref(),
        }
    }

    /// Attaches a symbolic identity to a lazy series; finite series are
    /// returned unchanged.
    pub(crate) fn tagged(self, tag: Tag<C>) -> Self {
        match self.0 {
            Repr::Finite(_) => self,
            Repr::Lazy(node) => {
                let source = TailSource { inner: Series(Repr::Lazy(node.clone())), index: 0 };
                let fresh = Node::new(Box::new(source), node.grid.clone(), node.exact.clone(), node.height);
                Self::lazy(fresh.with_tag(tag))
            }
        }
    }

    /// The same series with any symbolic identity dropped.
    pub fn detached(&self) -> Self {
        match &self.0 {
            Repr::Lazy(node) if node.tag.is_some() => {
                let source = TailSource { inner: self.clone(), index: 0 };
                Self::lazy(Node::new(Box::new(source), node.grid.clone(), node.exact.clone(), node.height))
            }
            _ => self.clone(),
        }
    }

    /// Maximal exponential height of the monomials (an upper bound for lazy
    /// series).
    pub fn level(&self) -> u32 {
        match &self.0 {
            Repr::Finite(t) => finite_height(t),
            Repr::Lazy(n) => n.height,
        }
    }

    pub(crate) fn term_at(&self, index: usize, fuel: &mut Fuel) -> Result<Option<Term<C>>> {
        match &self.0 {
            Repr::Finite(t) => Ok(t.get(index).cloned()),
            Repr::Lazy(n) => n.get(index, fuel),
        }
    }

    pub(crate) fn probe(
        &self,
        index: usize,
        fuel: &mut Fuel,
        floor: Option<&Monomial<C>>,
    ) -> Result<Probe<C>> {
        match &self.0 {
            Repr::Finite(t) => Ok(t.get(index).cloned().map_or(Probe::Done, Probe::Term)),
            Repr::Lazy(n) => n.probe(index, fuel, floor),
        }
    }

    fn exact_parts(&self) -> Option<(Terms<C>, Terms<C>)> {
        match &self.0 {
            Repr::Finite(t) => Some((t.to_vec(), vec![Term::new(C::one(), Monomial::one())])),
            Repr::Lazy(n) => n.exact.as_ref().map(|e| (e.num.clone(), e.den.clone())),
        }
    }

    /// The series `num / den`, finite when the quotient visibly is.
    /// `num/den` when it is a finite series.
    fn reduce_exact(num: &[Term<C>], den: &[Term<C>]) -> Option<Self> {
        debug_assert!(!den.is_empty());
        if num.is_empty() {
            return Some(Self::zero());
        }
        let lead = &den[0];
        let inv_coef = lead.coef.inv().expect("nonzero leading coefficient");
        let inv_mono = lead.monomial.inv();
        if den.len() == 1 {
            return Some(Self::from_sorted_terms(finite::scale(num, &inv_coef, &inv_mono)));
        }
        if num.len() == den.len() {
            let q_coef = num[0].coef.mul(&inv_coef);
            let q_mono = num[0].monomial.mul(&inv_mono);
            if finite::terms_eq(&finite::scale(den, &q_coef, &q_mono), num) {
                return Some(Self::term(q_coef, q_mono));
            }
        }
        None
    }

    /// `num/den`, with terms drawn from `stream`, which must equal it.
    ///
    /// Streaming the operation that produced the quotient, rather than
    /// `num·den⁻¹`, avoids cancellations hidden by the common denominator.
    fn exact_over(num: Vec<Term<C>>, den: Vec<Term<C>>, stream: impl FnOnce() -> Self) -> Self {
        if let Some(s) = Self::reduce_exact(&num, &den) {
            return s;
        }
        let stream = stream();
        match &stream.0 {
            Repr::Lazy(node) if node.exact.is_none() => {
                let source = TailSource { inner: stream.clone(), index: 0 };
                let (grid, height) = (node.grid.clone(), node.height);
                Self::lazy(Node::new(Box::new(source), grid, Some(Exact { num, den }), height))
            }
            _ => stream,
        }
    }

    fn from_exact(num: Vec<Term<C>>, den: Vec<Term<C>>) -> Self {
        if let Some(s) = Self::reduce_exact(&num, &den) {
            return s;
        }
        let lead = &den[0];
        let inv_coef = lead.coef.inv().expect("nonzero leading coefficient");
        let inv_mono = lead.monomial.inv();
        // num · (c𝔡)⁻¹ / (1 + ε) with ε = den/(c𝔡) − 1
        let eps = finite::scale(&den[1..], &inv_coef, &inv_mono);
        let quotient_grid = Grid::of_terms(&eps)
            .and_then(|g| g.infinitesimal_generators())
            .map(|g| Grid::new(inv_mono.clone(), g))
            .or_else(|| eps.is_empty().then(|| Grid::new(inv_mono.clone(), [])));
        let height = finite_height(&num).max(finite_height(&den));
        let grid = match (Grid::of_terms(&num), quotient_grid) {
            (Some(a), Some(b)) => Some(a.product(&b)),
            _ => None,
        };
        let scaled = finite::scale(&num, &inv_coef, &inv_mono);
        let steps = eps.into_iter().map(|t| (t.coef, t.monomial)).collect();
        let source = DivisionSource::new(scaled, steps);
        Self::lazy(Node::new(Box::new(source), grid, Some(Exact { num, den }), height))
    }

    /// `Σ_α a_α ε^α` for infinitesimal arguments `εᵢ` (every term ≺ 1).
    pub fn taylor_sum(
        eps: Vec<Series<C>>,
        oracle: CoefficientOracle<C>,
        max_degree: Option<usize>,
    ) -> Self {
        let height = eps.iter().map(|e| e.level()).max().unwrap_or(0);
        let mut gens = Some(Vec::new());
        for e in &eps {
            if e.is_exact_zero() {
                continue;
            }
            match (e.grid().and_then(|g| g.infinitesimal_generators()), gens.as_mut()) {
                (Some(g), Some(all)) => all.extend(g),
                _ => gens = None,
            }
        }
        let grid = gens.map(|g| Grid::new(Monomial::one(), g));
        let source = TaylorSource::new(eps, oracle, max_degree);
        Self::lazy(Node::new(Box::new(source), grid, None, height))
    }

    pub fn add(&self, other: &Self) -> Self {
        if let (Repr::Finite(a), Repr::Finite(b)) = (&self.0, &other.0) {
            return Self::from_sorted_terms(finite::add(a, b));
        }
        if self.is_exact_zero() {
            return other.clone();
        }
        if other.is_exact_zero() {
            return self.clone();
        }
        if let (Some((na, da)), Some((nb, db))) = (self.exact_parts(), other.exact_parts()) {
            let (num, den) = if finite::terms_eq(&da, &db) {
                (finite::add(&na, &nb), da)
            } else {
                let num = finite::add(&finite::mul(&na, &db), &finite::mul(&nb, &da));
                (num, finite::mul(&da, &db))
            };
            return Self::exact_over(num, den, || self.streaming_add(other));
        }
        self.streaming_add(other)
    }

    fn streaming_add(&self, other: &Self) -> Self {
        let grid = match (self.grid(), other.grid()) {
            (Some(a), Some(b)) => Some(a.union(&b)),
            _ => None,
        };
        let height = self.level().max(other.level());
        let source = MergeSource { a: self.clone(), b: other.clone(), ia: 0, ib: 0 };
        Self::lazy(Node::new(Box::new(source), grid, None, height))
    }

    pub fn neg(&self) -> Self {
        self.scale(&C::one().neg())
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: &C) -> Self {
        self.mul_term(c, &Monomial::one())
    }

    /// Multiplication by the single term `c·m`.
    pub fn mul_term(&self, c: &C, m: &Monomial<C>) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        if c.is_one() && m.is_one() {
            return self.clone();
        }
        match &self.0 {
            Repr::Finite(t) => Self::from_sorted_terms(finite::scale(t, c, m)),
            Repr::Lazy(node) => {
                let exact = node.exact.as_ref().map(|e| Exact {
                    num: finite::scale(&e.num, c, m),
                    den: e.den.clone(),
                });
                let grid = node.grid.as_ref().map(|g| g.scaled(m));
                let height = node.height.max(m.height());
                let source = ScaleSource {
                    inner: self.clone(),
                    index: 0,
                    coef: c.clone(),
                    monomial: m.clone(),
                };
                Self::lazy(Node::new(Box::new(source), grid, exact, height))
            }
        }
    }

    pub fn mul(&self, other: &Self) -> Self {
        if let (Repr::Finite(a), Repr::Finite(b)) = (&self.0, &other.0) {
            return Self::from_sorted_terms(finite::mul(a, b));
        }
        if self.is_exact_zero() || other.is_exact_zero() {
            return Self::zero();
        }
        for (single, rest) in [(self, other), (other, self)] {
            if let Some([t]) = single.finite_terms() {
                return rest.mul_term(&t.coef, &t.monomial);
            }
        }
        if let (Some((na, da)), Some((nb, db))) = (self.exact_parts(), other.exact_parts()) {
            let (num, den) = (finite::mul(&na, &nb), finite::mul(&da, &db));
            return Self::exact_over(num, den, || self.streaming_mul(other));
        }
        self.streaming_mul(other)
    }

    /// The product as a stream over the memoized terms of both factors,
    /// without an exact form.
    pub(crate) fn streaming_mul(&self, other: &Self) -> Self {
        if let (Repr::Finite(a), Repr::Finite(b)) = (&self.0, &other.0) {
            return Self::from_sorted_terms(finite::mul(a, b));
        }
        let grid = match (self.grid(), other.grid()) {
            (Some(a), Some(b)) => Some(a.product(&b)),
            _ => None,
        };
        let height = self.level().max(other.level());
        let source = ProductSource::new(self.clone(), other.clone());
        Self::lazy(Node::new(Box::new(source), grid, None, height))
    }

    /// `self^n` for a natural number `n`.
    pub fn pow_uint(&self, n: u64) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut n = n;
        while n > 0 {
            if n & 1 == 1 {
                acc = acc.mul(&base);
            }
            n >>= 1;
            if n > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// The maximal term of the support.
    pub fn dominant(&self, budget: Budget) -> Result<Dominant<C>> {
        match &self.0 {
            Repr::Finite(t) => Ok(t.first().cloned().map_or(Dominant::Zero, Dominant::Term)),
            Repr::Lazy(node) => {
                if let Some(e) = &node.exact {
                    let (n, d) = (&e.num[0], &e.den[0]);
                    let coef = n.coef.div(&d.coef)?;
                    return Ok(Dominant::Term(Term::new(coef, n.monomial.div(&d.monomial))));
                }
                match node.get(0, &mut budget.fuel()) {
                    Ok(Some(t)) => Ok(Dominant::Term(t)),
                    Ok(None) => Ok(Dominant::Zero),
                    Err(KernelError::BudgetExhausted) => Ok(Dominant::Indeterminate),
                    Err(e) => Err(e),
                }
            }
        }
    }

    /// The coefficient of `m`.
    pub fn coefficient(&self, m: &Monomial<C>, budget: Budget) -> Result<C> {
        if let Repr::Finite(t) = &self.0 {
            return Ok(t
                .iter()
                .find(|t| t.monomial == *m)
                .map_or_else(C::zero, |t| t.coef.clone()));
        }
        let limit = match self.tier() {
            Tier::Stream => budget.max_terms(),
            _ => SAFETY_CAP,
        };
        let mut fuel = budget.fuel();
        for i in 0..limit {
            match self.probe(i, &mut fuel, Some(m))? {
                Probe::Done | Probe::Below => return Ok(C::zero()),
                Probe::Term(t) => match t.monomial.cmp(m) {
                    Ordering::Equal => return Ok(t.coef),
                    Ordering::Less => return Ok(C::zero()),
                    Ordering::Greater => {}
                },
            }
        }
        Err(KernelError::BudgetExhausted)
    }

    /// The first `k` terms, in strictly decreasing order.
    pub fn enumerate(&self, k: usize) -> Result<Enumeration<C>> {
        self.enumerate_with(k, Budget { max_terms: SAFETY_CAP })
    }

    pub fn enumerate_with(&self, k: usize, budget: Budget) -> Result<Enumeration<C>> {
        let mut fuel = budget.fuel();
        let mut terms = Vec::with_capacity(k.min(1024));
        for i in 0..k {
            match self.term_at(i, &mut fuel)? {
                Some(t) => terms.push(t),
                None => return Ok(Enumeration { terms, exhausted_input: true }),
            }
        }
        Ok(Enumeration { terms, exhausted_input: false })
    }

    /// The finite partial sum of the first `k` terms.
    pub fn truncate(&self, k: usize) -> Result<Self> {
        Ok(Self::from_sorted_terms(self.enumerate(k)?.terms))
    }

    /// All terms `≽ floor`, which form a prefix of the series.
    ///
    /// At most `limit` terms are collected; more is `BudgetExhausted`.
    pub(crate) fn terms_down_to(
        &self,
        floor: &Monomial<C>,
        budget: Budget,
        limit: usize,
    ) -> Result<Vec<Term<C>>> {
        let mut fuel = budget.fuel();
        let mut prefix = Vec::new();
        loop {
            match self.probe(prefix.len(), &mut fuel, Some(floor))? {
                Probe::Term(t) if t.monomial >= *floor => {
                    if prefix.len() == limit {
                        return Err(KernelError::BudgetExhausted);
                    }
                    prefix.push(t);
                }
                _ => return Ok(prefix),
            }
        }
    }

    /// True when `self - other` has no term `≽ floor`.
    pub fn agrees_down_to(&self, other: &Self, floor: &Monomial<C>, budget: Budget) -> Result<bool> {
        let diff = self.sub(other);
        Ok(diff.terms_down_to(floor, budget, SAFETY_CAP)?.is_empty())
    }

    /// Terms from index `k` on, given the first `k` terms.
    pub(crate) fn tail_after(&self, prefix: &[Term<C>]) -> Self {
        match &self.0 {
            Repr::Finite(t) => Self::from_sorted_terms(t[prefix.len()..].to_vec()),
            Repr::Lazy(node) => {
                let stream = || {
                    let source = TailSource { inner: self.clone(), index: prefix.len() };
                    Self::lazy(Node::new(Box::new(source), node.grid.clone(), None, node.height))
                };
                match &node.exact {
                    Some(e) => {
                        let num = finite::add(&e.num, &finite::neg(&finite::mul(prefix, &e.den)));
                        Self::exact_over(num, e.den.clone(), stream)
                    }
                    None => stream(),
                }
            }
        }
    }

    /// `f⁻¹ = (c𝔡)⁻¹ Σ (−ε)ⁿ` where `f = c𝔡(1 + ε)`.
    pub fn invert(&self, budget: Budget) -> Result<Self> {
        if let Some((num, den)) = self.exact_parts() {
            if num.is_empty() {
                return Err(KernelError::DivisionByZero);
            }
            return Ok(Self::from_exact(den, num));
        }
        let lead = match self.dominant(budget)? {
            Dominant::Zero => return Err(KernelError::DivisionByZero),
            Dominant::Indeterminate => return Err(KernelError::IndeterminatePivot),
            Dominant::Term(t) => t,
        };
        let inv_coef = lead.coef.inv().ok_or(KernelError::DivisionByZero)?;
        let inv_mono = lead.monomial.inv();
        let eps = self.tail_after(std::slice::from_ref(&lead)).mul_term(&inv_coef, &inv_mono);
        let alternating: CoefficientOracle<C> = Arc::new(|alpha: &[usize]| {
            Ok(if alpha[0].is_multiple_of(2) { C::one() } else { C::one().neg() })
        });
        let result = Self::taylor_sum(vec![eps], alternating, None).mul_term(&inv_coef, &inv_mono);
        Ok(match (&result.0, self.grid()) {
            (Repr::Lazy(node), Some(g)) if node.grid.is_some() && g.start != lead.monomial => {
                // The grid of ε is only known when f's grid starts at 𝔡(f).
                let source = TailSource { inner: result.clone(), index: 0 };
                Self::lazy(Node::new(Box::new(source), None, None, node.height))
            }
            _ => result,
        })
    }

    pub fn div(&self, other: &Self, budget: Budget) -> Result<Self> {
        Ok(self.mul(&other.invert(budget)?))
    }

    /// Compares the first `k` terms of two series.
    ///
    /// `Ok(true)` when both agree on every such term (or both end early).
    pub fn agrees_with(&self, other: &Self, k: usize, budget: Budget) -> Result<bool> {
        let a = self.enumerate_with(k, budget)?;
        let b = other.enumerate_with(k, budget)?;
        Ok(a.terms.len() == b.terms.len() && finite::terms_eq(&a.terms, &b.terms))
    }

    /// At most `k` leading terms, noting whether more follow.
    pub fn expansion(&self, k: usize, budget: Budget) -> Expansion<C> {
        let mut fuel = budget.fuel();
        let mut terms = Vec::new();
        let mut cut = false;
        let mut blocked = false;
        let mut error = None;
        for i in 0..=k {
            match self.term_at(i, &mut fuel) {
                Ok(Some(t)) if i < k => terms.push(t),
                Ok(Some(_)) => cut = true,
                Ok(None) => break,
                Err(e) => {
                    blocked = true;
                    if e != KernelError::BudgetExhausted {
                        error = Some(e);
                    }
                    break;
                }
            }
        }
        Expansion { terms, cut, blocked, error }
    }

    /// Text with at most `k` terms and an `o(m)` marker on a cut-off tail.
    pub fn render(&self, k: usize, budget: Budget) -> String {
        self.expansion(k, budget).to_string()
    }
}

/// A finite prefix of a series, as produced by [`Series::expansion`].
#[derive(Clone, Debug)]
pub struct Expansion<C: Constant> {
    pub terms: Vec<Term<C>>,
    /// More terms follow.
    pub cut: bool,
    /// The next term could not be settled.
    pub blocked: bool,
    /// Why, when the cause was not the budget.
    pub error: Option<KernelError>,
}

impl<C: Constant> Expansion<C> {
    /// Nothing could be settled within the budget.
    pub fn is_indeterminate(&self) -> bool {
        self.blocked && self.terms.is_empty()
    }
}

impl<C: Constant> fmt::Display for Expansion<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_indeterminate() {
            return f.write_str("<indeterminate>");
        }
        let tail = if self.cut || self.blocked { self.terms.last().map(|t| &t.monomial) } else { None };
        finite::fmt_terms(&self.terms, tail, f)
    }
}

impl<C: Constant> fmt::Display for Series<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(10, Budget { max_terms: SAFETY_CAP }))
    }
}

impl<C: Constant> fmt::Debug for Series<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Series[{:?}]({self})", self.tier())
    }
}

impl<C: Constant> From<Monomial<C>> for Series<C> {
    fn from(m: Monomial<C>) -> Self {
        Series::monomial(m)
    }
}

#[cfg(test)]
mod tests;
