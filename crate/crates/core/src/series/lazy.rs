//! Memoized term streams and the sources that feed them.
//!
//! A source produces one [`Step`] at a time. A `Skip` marks work that did not
//! yield a term (typically a cancellation) and is charged against the caller's
//! [`Fuel`]. A skip may carry a monomial `μ`: every later term is then `≺ μ`. Sources only fail after leaving their state consistent, so a
//! query that runs out of fuel can be retried with more.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashSet};
use std::sync::{Arc, Mutex};

use crate::constants::Constant;
use crate::error::{KernelError, Result};
use crate::monomials::Monomial;

use super::{Exact, Grid, Series, Tag, Term};

pub(crate) struct Fuel {
    left: usize,
}

impl Fuel {
    pub(crate) fn new(left: usize) -> Self {
        Fuel { left }
    }

    pub(crate) fn burn(&mut self) -> Result<()> {
        if self.left == 0 {
            return Err(KernelError::BudgetExhausted);
        }
        self.left -= 1;
        Ok(())
    }
}

pub(crate) enum Step<C: Constant> {
    Emit(Term<C>),
    Skip(Option<Monomial<C>>),
    /// Every later term is `≺` the given monomial; not charged.
    Below(Monomial<C>),
    Done,
}

/// Result of looking for a term at or above a floor monomial.
pub(crate) enum Probe<C: Constant> {
    Term(Term<C>),
    /// No term remains.
    Done,
    /// Every remaining term is `≺` the floor.
    Below,
}

pub(crate) trait Source<C: Constant>: Send {
    /// Advances by one step. `floor` is a hint: once every remaining term
    /// is known to be `≺ floor`, a source may answer `Below(floor)`.
    fn step(&mut self, fuel: &mut Fuel, floor: Option<&Monomial<C>>) -> Result<Step<C>>;
}

struct Memo<C: Constant> {
    terms: Vec<Term<C>>,
    /// Strict upper bound on every term not yet memoized.
    ceiling: Option<Monomial<C>>,
    source: Option<Box<dyn Source<C>>>,
}

pub(crate) struct Node<C: Constant> {
    pub(crate) grid: Option<Grid<C>>,
    pub(crate) exact: Option<Exact<C>>,
    pub(crate) tag: Option<Tag<C>>,
    pub(crate) height: u32,
    memo: Mutex<Memo<C>>,
}

impl<C: Constant> Node<C> {
    pub(crate) fn new(
        source: Box<dyn Source<C>>,
        grid: Option<Grid<C>>,
        exact: Option<Exact<C>>,
        height: u32,
    ) -> Self {
        Node {
            grid,
            exact,
            tag: None,
            height,
            memo: Mutex::new(Memo { terms: Vec::new(), ceiling: None, source: Some(source) }),
        }
    }

    pub(crate) fn with_tag(mut self, tag: Tag<C>) -> Self {
        self.tag = Some(tag);
        self
    }

    pub(crate) fn get(&self, index: usize, fuel: &mut Fuel) -> Result<Option<Term<C>>> {
        match self.probe(index, fuel, None)? {
            Probe::Term(t) => Ok(Some(t)),
            _ => Ok(None),
        }
    }

    /// The term at `index`, unless all terms from there on are `≺ floor`.
    pub(crate) fn probe(
        &self,
        index: usize,
        fuel: &mut Fuel,
        floor: Option<&Monomial<C>>,
    ) -> Result<Probe<C>> {
        let mut memo = self.memo.lock().unwrap_or_else(|e| e.into_inner());
        loop {
            if let Some(t) = memo.terms.get(index) {
                return Ok(Probe::Term(t.clone()));
            }
            if index == memo.terms.len() {
                if let (Some(c), Some(f)) = (&memo.ceiling, floor) {
                    if c <= f {
                        return Ok(Probe::Below);
                    }
                }
            }
            let Some(source) = memo.source.as_mut() else {
                return Ok(Probe::Done);
            };
            match source.step(fuel, floor)? {
                Step::Emit(t) => {
                    debug_assert!(!t.coef.is_zero());
                    debug_assert!(memo
                        .terms
                        .last()
                        .is_none_or(|prev| prev.monomial > t.monomial));
                    memo.ceiling = Some(t.monomial.clone());
                    memo.terms.push(t);
                }
                Step::Skip(bound) => {
                    if bound.is_some() {
                        memo.ceiling = bound;
                    }
                    fuel.burn()?;
                }
                Step::Below(bound) => memo.ceiling = Some(bound),
                Step::Done => memo.source = None,
            }
        }
    }
}

/// Wraps a caller-supplied iterator, rejecting out-of-order terms.
pub(crate) struct IterSource<C: Constant, I> {
    iter: I,
    last: Option<Monomial<C>>,
}

impl<C: Constant, I> IterSource<C, I> {
    pub(crate) fn new(iter: I) -> Self {
        IterSource { iter, last: None }
    }
}

impl<C, I> Source<C> for IterSource<C, I>
where
    C: Constant,
    I: Iterator<Item = Term<C>> + Send,
{
    fn step(&mut self, _fuel: &mut Fuel, _floor: Option<&Monomial<C>>) -> Result<Step<C>> {
        let Some(t) = self.iter.next() else {
            return Ok(Step::Done);
        };
        if t.coef.is_zero() {
            return Ok(Step::Skip(None));
        }
        if self.last.as_ref().is_some_and(|prev| *prev <= t.monomial) {
            return Err(KernelError::UnorderedStream);
        }
        self.last = Some(t.monomial.clone());
        Ok(Step::Emit(t))
    }
}

/// Terms of `inner` from a fixed index on.
pub(crate) struct TailSource<C: Constant> {
    pub(crate) inner: Series<C>,
    pub(crate) index: usize,
}

impl<C: Constant> Source<C> for TailSource<C> {
    fn step(&mut self, fuel: &mut Fuel, floor: Option<&Monomial<C>>) -> Result<Step<C>> {
        Ok(match self.inner.probe(self.index, fuel, floor)? {
            Probe::Term(t) => {
                self.index += 1;
                Step::Emit(t)
            }
            Probe::Done => Step::Done,
            Probe::Below => Step::Below(floor.unwrap().clone()),
        })
    }
}

/// `coef·monomial·inner` with `coef ≠ 0`.
pub(crate) struct ScaleSource<C: Constant> {
    pub(crate) inner: Series<C>,
    pub(crate) index: usize,
    pub(crate) coef: C,
    pub(crate) monomial: Monomial<C>,
}

impl<C: Constant> Source<C> for ScaleSource<C> {
    fn step(&mut self, fuel: &mut Fuel, floor: Option<&Monomial<C>>) -> Result<Step<C>> {
        let inner_floor = floor.map(|f| f.div(&self.monomial));
        Ok(match self.inner.probe(self.index, fuel, inner_floor.as_ref())? {
            Probe::Term(t) => {
                self.index += 1;
                Step::Emit(Term::new(t.coef.mul(&self.coef), t.monomial.mul(&self.monomial)))
            }
            Probe::Done => Step::Done,
            Probe::Below => Step::Below(floor.unwrap().clone()),
        })
    }
}

/// Decreasing merge of two streams with cancellation.
pub(crate) struct MergeSource<C: Constant> {
    pub(crate) a: Series<C>,
    pub(crate) b: Series<C>,
    pub(crate) ia: usize,
    pub(crate) ib: usize,
}

impl<C: Constant> Source<C> for MergeSource<C> {
    fn step(&mut self, fuel: &mut Fuel, floor: Option<&Monomial<C>>) -> Result<Step<C>> {
        let ta = self.a.probe(self.ia, fuel, floor)?;
        let tb = self.b.probe(self.ib, fuel, floor)?;
        let below = |t: &Term<C>| floor.is_some_and(|f| t.monomial < *f);
        Ok(match (ta, tb) {
            (Probe::Done, Probe::Done) => Step::Done,
            (Probe::Term(s), Probe::Term(t)) => match s.monomial.cmp(&t.monomial) {
                Ordering::Greater => {
                    self.ia += 1;
                    Step::Emit(s)
                }
                Ordering::Less => {
                    self.ib += 1;
                    Step::Emit(t)
                }
                Ordering::Equal => {
                    self.ia += 1;
                    self.ib += 1;
                    let c = s.coef.add(&t.coef);
                    if c.is_zero() {
                        Step::Skip(Some(s.monomial))
                    } else {
                        Step::Emit(Term::new(c, s.monomial))
                    }
                }
            },
            (Probe::Term(s), Probe::Done) => {
                self.ia += 1;
                Step::Emit(s)
            }
            (Probe::Done, Probe::Term(t)) => {
                self.ib += 1;
                Step::Emit(t)
            }
            // One side lies entirely below the floor.
            (Probe::Term(s), Probe::Below) if !below(&s) => {
                self.ia += 1;
                Step::Emit(s)
            }
            (Probe::Below, Probe::Term(t)) if !below(&t) => {
                self.ib += 1;
                Step::Emit(t)
            }
            _ => Step::Below(floor.unwrap().clone()),
        })
    }
}

struct PairEntry<C: Constant> {
    monomial: Monomial<C>,
    coef: C,
    i: usize,
    j: usize,
}

impl<C: Constant> PartialEq for PairEntry<C> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<C: Constant> Eq for PairEntry<C> {}
impl<C: Constant> PartialOrd for PairEntry<C> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<C: Constant> Ord for PairEntry<C> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.monomial
            .cmp(&other.monomial)
            .then_with(|| other.i.cmp(&self.i))
            .then_with(|| other.j.cmp(&self.j))
    }
}

/// Long division of finite series, `r = s/(1 + Σ δⱼμⱼ)` with every `μⱼ ≺ 1`.
///
/// Uses `r(m) = s(m) − Σ δⱼ r(m/μⱼ)`. Candidates are the monomials of `s`
/// and the products `m·μⱼ` of every emitted `m`, taken in decreasing order.
pub(crate) struct DivisionSource<C: Constant> {
    numerator: BTreeMap<Monomial<C>, C>,
    steps: Vec<(C, Monomial<C>)>,
    known: BTreeMap<Monomial<C>, C>,
    seen: BTreeSet<Monomial<C>>,
    heap: BinaryHeap<Monomial<C>>,
}

impl<C: Constant> DivisionSource<C> {
    pub(crate) fn new(numerator: Vec<Term<C>>, steps: Vec<(C, Monomial<C>)>) -> Self {
        let heap: BinaryHeap<_> = numerator.iter().map(|t| t.monomial.clone()).collect();
        let seen = heap.iter().cloned().collect();
        let numerator = numerator.into_iter().map(|t| (t.monomial, t.coef)).collect();
        DivisionSource { numerator, steps, known: BTreeMap::new(), seen, heap }
    }
}

impl<C: Constant> Source<C> for DivisionSource<C> {
    fn step(&mut self, _fuel: &mut Fuel, floor: Option<&Monomial<C>>) -> Result<Step<C>> {
        let Some(top) = self.heap.peek() else {
            return Ok(Step::Done);
        };
        if let Some(f) = floor {
            if top < f {
                return Ok(Step::Below(f.clone()));
            }
        }
        let m = self.heap.pop().expect("nonempty heap");
        let mut coef = self.numerator.get(&m).cloned().unwrap_or_else(C::zero);
        for (delta, mu) in &self.steps {
            if let Some(r) = self.known.get(&m.div(mu)) {
                coef = coef.sub(&delta.mul(r));
            }
        }
        if coef.is_zero() {
            return Ok(Step::Skip(Some(m)));
        }
        for (_, mu) in &self.steps {
            let next = m.mul(mu);
            if self.seen.insert(next.clone()) {
                self.heap.push(next);
            }
        }
        self.known.insert(m.clone(), coef.clone());
        Ok(Step::Emit(Term::new(coef, m)))
    }
}

/// Cauchy product, emitted through a priority queue over index pairs.
///
/// Pair `(i, j)` enters the queue when `(i-1, j)` leaves it (or `(0, j-1)`
/// for `i = 0`), so the queue always holds the maximum of what remains.
pub(crate) struct ProductSource<C: Constant> {
    a: Series<C>,
    b: Series<C>,
    heap: BinaryHeap<PairEntry<C>>,
    pending: Vec<(usize, usize)>,
}

impl<C: Constant> ProductSource<C> {
    pub(crate) fn new(a: Series<C>, b: Series<C>) -> Self {
        ProductSource { a, b, heap: BinaryHeap::new(), pending: vec![(0, 0)] }
    }
}

impl<C: Constant> Source<C> for ProductSource<C> {
    fn step(&mut self, fuel: &mut Fuel, floor: Option<&Monomial<C>>) -> Result<Step<C>> {
        while let Some(&(i, j)) = self.pending.last() {
            let ta = self.a.term_at(i, fuel)?;
            let tb = self.b.term_at(j, fuel)?;
            self.pending.pop();
            if let (Some(s), Some(t)) = (ta, tb) {
                self.heap.push(PairEntry {
                    monomial: s.monomial.mul(&t.monomial),
                    coef: s.coef.mul(&t.coef),
                    i,
                    j,
                });
            }
        }
        if let (Some(top), Some(f)) = (self.heap.peek(), floor) {
            if top.monomial < *f {
                return Ok(Step::Below(f.clone()));
            }
        }
        let Some(top) = self.heap.pop() else {
            return Ok(Step::Done);
        };
        let mut coef = top.coef;
        let mut group = vec![(top.i, top.j)];
        while self.heap.peek().is_some_and(|e| e.monomial == top.monomial) {
            let e = self.heap.pop().unwrap();
            coef = coef.add(&e.coef);
            group.push((e.i, e.j));
        }
        for (i, j) in group {
            self.pending.push((i + 1, j));
            if i == 0 {
                self.pending.push((0, j + 1));
            }
        }
        Ok(if coef.is_zero() {
            Step::Skip(Some(top.monomial))
        } else {
            Step::Emit(Term::new(coef, top.monomial))
        })
    }
}

/// Coefficient of `ε^α` for a multi-index `α`.
pub type CoefficientOracle<C> = Arc<dyn Fn(&[usize]) -> Result<C> + Send + Sync>;

struct FrontierEntry<C: Constant> {
    bound: Monomial<C>,
    alpha: Vec<usize>,
}

impl<C: Constant> FrontierEntry<C> {
    fn degree(&self) -> usize {
        self.alpha.iter().sum()
    }
}

impl<C: Constant> PartialEq for FrontierEntry<C> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<C: Constant> Eq for FrontierEntry<C> {}
impl<C: Constant> PartialOrd for FrontierEntry<C> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<C: Constant> Ord for FrontierEntry<C> {
    // Largest bound first; ties by total degree, then lexicographically.
    fn cmp(&self, other: &Self) -> Ordering {
        self.bound
            .cmp(&other.bound)
            .then_with(|| other.degree().cmp(&self.degree()))
            .then_with(|| other.alpha.cmp(&self.alpha))
    }
}

struct HeadEntry<C: Constant> {
    monomial: Monomial<C>,
    coef: C,
    id: usize,
}

impl<C: Constant> PartialEq for HeadEntry<C> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl<C: Constant> Eq for HeadEntry<C> {}
impl<C: Constant> PartialOrd for HeadEntry<C> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<C: Constant> Ord for HeadEntry<C> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.monomial.cmp(&other.monomial).then_with(|| other.id.cmp(&self.id))
    }
}

struct Summand<C: Constant> {
    series: Series<C>,
    next: usize,
}

/// `Σ_α a_α ε₁^α₁···ε_k^α_k` for infinitesimal `εᵢ`.
///
/// Summands are opened lazily: summand `α` has dominant monomial
/// `∏ 𝔡(εᵢ)^αᵢ`, and the frontier of unopened multi-indices always dominates
/// everything not yet opened. A term is emitted once no unopened summand can
/// reach its monomial.
pub(crate) struct TaylorSource<C: Constant> {
    eps: Vec<Series<C>>,
    leads: Option<Vec<Option<Term<C>>>>,
    powers: Vec<Vec<Series<C>>>,
    oracle: CoefficientOracle<C>,
    max_degree: Option<usize>,
    frontier: BinaryHeap<FrontierEntry<C>>,
    seen: HashSet<Vec<usize>>,
    summands: Vec<Summand<C>>,
    active: BinaryHeap<HeadEntry<C>>,
    unfetched: Vec<usize>,
}

impl<C: Constant> TaylorSource<C> {
    pub(crate) fn new(
        eps: Vec<Series<C>>,
        oracle: CoefficientOracle<C>,
        max_degree: Option<usize>,
    ) -> Self {
        let k = eps.len();
        TaylorSource {
            eps,
            leads: None,
            powers: vec![vec![Series::one()]; k],
            oracle,
            max_degree,
            frontier: BinaryHeap::new(),
            seen: HashSet::new(),
            summands: Vec::new(),
            active: BinaryHeap::new(),
            unfetched: Vec::new(),
        }
    }

    fn power(&mut self, i: usize, n: usize) -> Series<C> {
        while self.powers[i].len() <= n {
            let last = self.powers[i].last().unwrap().clone();
            let next = if self.powers[i].len() == 1 {
                self.eps[i].clone()
            } else {
                last.streaming_mul(&self.eps[i])
            };
            self.powers[i].push(next);
        }
        self.powers[i][n].clone()
    }

    fn monomial_power(&mut self, alpha: &[usize]) -> Series<C> {
        let mut acc: Option<Series<C>> = None;
        for (i, &n) in alpha.iter().enumerate() {
            if n == 0 {
                continue;
            }
            let p = self.power(i, n);
            acc = Some(match acc {
                None => p,
                Some(a) => a.streaming_mul(&p),
            });
        }
        acc.unwrap_or_else(Series::one)
    }

    fn open(&mut self, entry: FrontierEntry<C>, fuel: &mut Fuel) -> Result<()> {
        let leads = self.leads.clone().unwrap_or_default();
        let degree = entry.degree();
        if self.max_degree.is_none_or(|d| degree < d) {
            for (i, lead) in leads.iter().enumerate() {
                let Some(lead) = lead else { continue };
                let mut beta = entry.alpha.clone();
                beta[i] += 1;
                if self.seen.insert(beta.clone()) {
                    self.frontier.push(FrontierEntry {
                        bound: entry.bound.mul(&lead.monomial),
                        alpha: beta,
                    });
                }
            }
        }
        let coef = (self.oracle)(&entry.alpha)?;
        if coef.is_zero() {
            return fuel.burn();
        }
        let mut head = coef.clone();
        for (i, &n) in entry.alpha.iter().enumerate() {
            if let Some(lead) = &leads[i] {
                for _ in 0..n {
                    head = head.mul(&lead.coef);
                }
            }
        }
        let series = self.monomial_power(&entry.alpha).scale(&coef);
        let id = self.summands.len();
        self.summands.push(Summand { series, next: 1 });
        self.active.push(HeadEntry { monomial: entry.bound, coef: head, id });
        Ok(())
    }
}

impl<C: Constant> Source<C> for TaylorSource<C> {
    fn step(&mut self, fuel: &mut Fuel, floor: Option<&Monomial<C>>) -> Result<Step<C>> {
        if self.leads.is_none() {
            let mut leads = Vec::with_capacity(self.eps.len());
            for e in &self.eps {
                leads.push(e.term_at(0, fuel)?);
            }
            self.leads = Some(leads);
            let zero = vec![0; self.eps.len()];
            self.seen.insert(zero.clone());
            self.frontier.push(FrontierEntry { bound: Monomial::one(), alpha: zero });
        }
        while let Some(&id) = self.unfetched.last() {
            let s = &self.summands[id];
            if let Some(t) = s.series.term_at(s.next, fuel)? {
                self.active.push(HeadEntry { monomial: t.monomial, coef: t.coef, id });
                self.summands[id].next += 1;
            }
            self.unfetched.pop();
        }
        loop {
            let open = match (self.frontier.peek(), self.active.peek()) {
                (None, _) => false,
                (Some(_), None) => true,
                (Some(f), Some(h)) => f.bound >= h.monomial,
            };
            if !open {
                break;
            }
            let entry = self.frontier.pop().unwrap();
            self.open(entry, fuel)?;
        }
        if let (Some(top), Some(f)) = (self.active.peek(), floor) {
            if top.monomial < *f {
                return Ok(Step::Below(f.clone()));
            }
        }
        let Some(top) = self.active.pop() else {
            return Ok(Step::Done);
        };
        let mut coef = top.coef;
        self.unfetched.push(top.id);
        while self.active.peek().is_some_and(|h| h.monomial == top.monomial) {
            let h = self.active.pop().unwrap();
            coef = coef.add(&h.coef);
            self.unfetched.push(h.id);
        }
        Ok(if coef.is_zero() {
            Step::Skip(Some(top.monomial))
        } else {
            Step::Emit(Term::new(coef, top.monomial))
        })
    }
}
