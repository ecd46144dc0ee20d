//! Eventual comparison and limits of germs at `+∞`, and an executable suite
//! for the exponential axioms (E1)–(E5).

use std::cmp::Ordering;
use std::fmt;

use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::analytic::{restricted_apply, RestrictedAnalyticFunction};
use crate::constants::{Constant, ExpRational};
use crate::error::{KernelError, Result};
use crate::hahn::{decompose, series_sign, Verdict};
use crate::monomials::Monomial;
use crate::series::{Budget, Dominant, Series, Term, SAFETY_CAP};
use crate::tower::{assemble_exp, exp_total, log_total, power};

/// The sign of `f - g` at `+∞`.
pub fn eventual_compare<C: Constant>(f: &Series<C>, g: &Series<C>, budget: Budget) -> Verdict {
    series_sign(&f.sub(g), budget)
}

#[derive(Clone, Debug, PartialEq)]
pub enum Limit<C: Constant> {
    PosInfinity,
    NegInfinity,
    Finite(C),
    Indeterminate,
}

impl<C: Constant> fmt::Display for Limit<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Limit::PosInfinity => f.write_str("+∞"),
            Limit::NegInfinity => f.write_str("-∞"),
            Limit::Finite(c) => write!(f, "{c}"),
            Limit::Indeterminate => f.write_str("Indeterminate"),
        }
    }
}

pub fn limit_at_infinity<C: Constant>(f: &Series<C>, budget: Budget) -> Limit<C> {
    let Ok(d) = decompose(f, budget) else {
        return Limit::Indeterminate;
    };
    match d.infinite.finite_terms().and_then(|t| t.first()) {
        None => Limit::Finite(d.constant),
        Some(t) if t.coef.sign() == Ordering::Greater => Limit::PosInfinity,
        Some(_) => Limit::NegInfinity,
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Pass,
    Fail(String),
    Indeterminate,
}

/// One checked instance of an axiom.
#[derive(Clone, Debug)]
pub struct Instance {
    pub axiom: &'static str,
    pub statement: String,
    pub outcome: Outcome,
}

#[derive(Clone, Debug, Default)]
pub struct AxiomReport {
    pub instances: Vec<Instance>,
}

impl AxiomReport {
    fn count(&self, pred: impl Fn(&Outcome) -> bool) -> usize {
        self.instances.iter().filter(|i| pred(&i.outcome)).count()
    }

    pub fn passed(&self) -> usize {
        self.count(|o| *o == Outcome::Pass)
    }

    pub fn failed(&self) -> usize {
        self.count(|o| matches!(o, Outcome::Fail(_)))
    }

    pub fn indeterminate(&self) -> usize {
        self.count(|o| *o == Outcome::Indeterminate)
    }

    pub fn all_pass(&self) -> bool {
        self.passed() == self.instances.len()
    }

    pub fn of_axiom<'a>(&'a self, axiom: &'a str) -> impl Iterator<Item = &'a Instance> + 'a {
        self.instances.iter().filter(move |i| i.axiom == axiom)
    }
}

impl fmt::Display for AxiomReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for i in &self.instances {
            match &i.outcome {
                Outcome::Pass => writeln!(f, "PASS  {:<8} {}", i.axiom, i.statement)?,
                Outcome::Indeterminate => writeln!(f, "????  {:<8} {}", i.axiom, i.statement)?,
                Outcome::Fail(w) => writeln!(f, "FAIL  {:<8} {}  witness: {w}", i.axiom, i.statement)?,
            }
        }
        write!(
            f,
            "{} passed, {} failed, {} indeterminate",
            self.passed(),
            self.failed(),
            self.indeterminate()
        )
    }
}

type K = ExpRational;
type S = Series<K>;
type Mono = Monomial<K>;

/// An implementation of `exp` under test.
pub type ExpFn = dyn Fn(&S, Budget) -> Result<S>;

/// Depth, below the dominant monomial, to which identities are compared.
const DEPTH: i64 = 8;

/// Test fixture: an `exp` that loses the factor `e^c` when `ε ≠ 0`.
pub fn exp_dropping_constant_factor(f: &S, budget: Budget) -> Result<S> {
    let d = decompose(f, budget)?;
    let factor = if d.infinitesimal.is_exact_zero() { d.constant.exp()? } else { K::one() };
    Ok(assemble_exp(f, &d, factor))
}

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

fn konst(n: i64, d: i64) -> S {
    S::constant(K::from_rational(q(n, d)))
}

fn xp(n: i64) -> S {
    S::monomial(Mono::x_int(n))
}

fn exp_mono(arg: &S) -> Mono {
    Mono::exp_of(arg.finite_terms().expect("finite argument")).expect("purely infinite argument")
}

/// `lhs = rhs` on every monomial `≽ 𝔡(lhs)·x^-DEPTH`.
fn identity_outcome(lhs: Result<S>, rhs: Result<S>, budget: Budget) -> Outcome {
    let (lhs, rhs) = match (lhs, rhs) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(KernelError::BudgetExhausted), _) | (_, Err(KernelError::BudgetExhausted)) => {
            return Outcome::Indeterminate
        }
        (Err(e), _) | (_, Err(e)) => return Outcome::Fail(format!("error: {e}")),
    };
    let top = match lhs.dominant(budget) {
        Ok(Dominant::Term(t)) => t.monomial,
        Ok(Dominant::Zero) => Mono::one(),
        _ => return Outcome::Indeterminate,
    };
    let floor = top.mul(&Mono::x_int(-DEPTH));
    match lhs.sub(&rhs).terms_down_to(&floor, budget, SAFETY_CAP) {
        Ok(diff) if diff.is_empty() => Outcome::Pass,
        Ok(diff) => Outcome::Fail(format!("difference has leading term {}", S::from_sorted_terms(vec![diff[0].clone()]))),
        Err(KernelError::BudgetExhausted) => Outcome::Indeterminate,
        Err(e) => Outcome::Fail(format!("error: {e}")),
    }
}

/// `Pass` when the verdict is one of `allowed`.
fn verdict_outcome(v: Verdict, allowed: &[Verdict], what: &str) -> Outcome {
    if v == Verdict::Indeterminate {
        Outcome::Indeterminate
    } else if allowed.contains(&v) {
        Outcome::Pass
    } else {
        Outcome::Fail(format!("{what} is {v}"))
    }
}

fn signed(result: Result<S>, budget: Budget) -> Verdict {
    match result {
        Ok(s) => series_sign(&s, budget),
        Err(_) => Verdict::Indeterminate,
    }
}

fn show(s: &S) -> String {
    s.render(6, Budget::default())
}

/// Bounded samples `c + ε` with `-1 ≤ c + ε ≤ 1`, from a fixed seed.
pub fn bounded_samples(count: usize, seed: u64) -> Vec<S> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        let den: i64 = rng.gen_range(1..=6);
        let num: i64 = rng.gen_range(-den..=den);
        let mut terms = vec![Term::new(K::from_rational(q(num, den)), Mono::one())];
        for k in 1..=rng.gen_range(0..=3) {
            let c: i64 = rng.gen_range(-3..=3);
            if c != 0 {
                terms.push(Term::new(K::from_rational(q(c, rng.gen_range(1..=4))), Mono::x_int(-k)));
            }
        }
        let f = S::from_terms(terms);
        let one = S::one();
        let inside = [one.sub(&f), f.add(&one)]
            .iter()
            .all(|s| series_sign(s, Budget::default()) != Verdict::Less);
        if inside && !out.iter().any(|o: &S| o.sub(&f).is_exact_zero()) {
            out.push(f);
        }
    }
    out
}

/// Runs every axiom instance with the kernel's `exp_total`.
pub fn axiom_suite(budget: Budget) -> AxiomReport {
    axiom_suite_with(budget, &|f: &S, b: Budget| exp_total(f, b))
}

/// Runs every axiom instance against the given `exp`.
pub fn axiom_suite_with(budget: Budget, exp: &ExpFn) -> AxiomReport {
    let mut report = AxiomReport::default();
    let mut push = |axiom: &'static str, statement: String, outcome: Outcome| {
        report.instances.push(Instance { axiom, statement, outcome });
    };
    let x = S::x();
    let l1 = S::monomial(Mono::ell(1));
    let e_x = S::monomial(exp_mono(&x));

    // (E1) exp(f + g) = exp(f)·exp(g)
    let pairs = [
        (x.clone(), xp(-1)),
        (konst(1, 1), xp(-1)),
        (x.mul(&x).add(&x), konst(1, 2).sub(&x)),
        (l1.clone(), xp(-1).add(&konst(-1, 3))),
        (konst(1, 2).add(&xp(-1)), xp(-2)),
        (e_x.clone(), x.neg()),
    ];
    for (f, g) in &pairs {
        let lhs = exp(&f.add(g), budget);
        let rhs = exp(f, budget).and_then(|a| Ok(a.mul(&exp(g, budget)?)));
        push("E1", format!("exp(f+g) = exp(f)*exp(g) for f = {}, g = {}", show(f), show(g)), identity_outcome(lhs, rhs, budget));
    }

    // (E2) f < g ⟹ exp(f) < exp(g)
    let ordered = [
        (x.clone(), x.add(&xp(-1))),
        (xp(-1), konst(1, 1)),
        (l1.clone(), S::monomial(Mono::x_pow(q(1, 2)))),
        (konst(-1, 1), konst(1, 3)),
        (x.clone(), e_x.clone()),
    ];
    for (f, g) in &ordered {
        let statement = format!("{} < {} implies exp(f) < exp(g)", show(f), show(g));
        let outcome = match eventual_compare(f, g, budget) {
            Verdict::Less => {
                let diff = exp(g, budget).and_then(|b| Ok(b.sub(&exp(f, budget)?)));
                verdict_outcome(signed(diff, budget), &[Verdict::Greater], "exp(g) - exp(f)")
            }
            Verdict::Indeterminate => Outcome::Indeterminate,
            v => Outcome::Fail(format!("sample is not ordered: f - g is {v}")),
        };
        push("E2", statement, outcome);
    }

    // (E3) h > 0 ⟹ exp(y) = h for y = log h
    let e1 = K::from_int(1).exp().expect("e");
    let positive = [
        x.clone(),
        konst(1, 1).add(&xp(-1)),
        x.scale(&e1).add(&konst(3, 1)),
        S::monomial(Mono::x().mul(&Mono::ell(1))),
        e_x.mul(&x.pow_uint(3)),
    ];
    for h in &positive {
        let y = log_total(h, budget).map(|y| y.detached());
        let lhs = y.and_then(|y| exp(&y, budget));
        push("E3", format!("exp(log h) = h for h = {}", show(h)), identity_outcome(lhs, Ok(h.clone()), budget));
    }

    // (E4ₙ) f > n² ⟹ exp(f) > fⁿ
    let x2x = x.mul(&x).add(&x);
    for n in 1..=10u32 {
        for f in [&x, &x2x] {
            let statement = format!("exp(f) > f^{n} for f = {}", show(f));
            let fn_ = power(f, &BigRational::from_integer(n.into()), budget);
            let outcome = match (exp(f, budget), fn_) {
                (Ok(e), Ok(p)) => {
                    let dom = crate::hahn::series_cmp_abs(&e, &p, budget);
                    match verdict_outcome(dom, &[Verdict::Greater], "d(exp f) vs d(f^n)") {
                        Outcome::Pass => verdict_outcome(eventual_compare(&e, &p, budget), &[Verdict::Greater], "exp(f) - f^n"),
                        other => other,
                    }
                }
                _ => Outcome::Indeterminate,
            };
            push("E4", statement, outcome);
        }
    }
    for (n, c) in [(1u32, 2i64), (2, 5), (3, 10)] {
        let f = konst(c, 1).add(&xp(-1));
        let statement = format!("exp(f) > f^{n} for f = {}", show(&f));
        let diff = exp(&f, budget).and_then(|e| Ok(e.sub(&power(&f, &BigRational::from_integer(n.into()), budget)?)));
        push("E4", statement, verdict_outcome(signed(diff, budget), &[Verdict::Greater], "exp(f) - f^n"));
    }

    // (E5) -1 ≤ f ≤ 1 ⟹ e(f) = exp(f)
    let e_fn = RestrictedAnalyticFunction::<K>::restricted_exp();
    for f in bounded_samples(20, 5) {
        let lhs = restricted_apply(&e_fn, std::slice::from_ref(&f), budget);
        push("E5", format!("e(f) = exp(f) for f = {}", show(&f)), identity_outcome(lhs, exp(&f, budget), budget));
    }

    // exp(f) ≥ 1 + f
    let mut samples = bounded_samples(6, 11);
    samples.extend([x.clone(), x.neg(), l1.clone()]);
    if !samples.iter().any(S::is_exact_zero) {
        samples.push(S::zero());
    }
    for f in &samples {
        let diff = exp(f, budget).map(|e| e.sub(&S::one()).sub(f));
        push(
            "exp>=1+f",
            format!("exp(f) >= 1 + f for f = {}", show(f)),
            verdict_outcome(signed(diff, budget), &[Verdict::Greater, Verdict::Equal], "exp(f) - 1 - f"),
        );
    }

    // log(gh) = log g + log h and monotonicity of log
    let log_pairs = [
        (x.clone(), konst(1, 1).add(&xp(-1))),
        (x.scale(&e1), l1.clone()),
        (e_x.clone(), x.mul(&x).add(&konst(1, 1))),
    ];
    for (g, h) in &log_pairs {
        let lhs = log_total(&g.mul(h), budget);
        let rhs = log_total(g, budget).and_then(|a| Ok(a.add(&log_total(h, budget)?)));
        push("log", format!("log(gh) = log g + log h for g = {}, h = {}", show(g), show(h)), identity_outcome(lhs, rhs, budget));
    }
    for (g, h) in [(x.clone(), x.mul(&x)), (l1.clone(), x.clone()), (x.clone(), e_x.clone())] {
        let statement = format!("log {} < log {}", show(&g), show(&h));
        let diff = log_total(&h, budget).and_then(|b| Ok(b.sub(&log_total(&g, budget)?)));
        push("log", statement, verdict_outcome(signed(diff, budget), &[Verdict::Greater], "log h - log g"));
    }
    report
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constants::Rational;

    type R = Series<Rational>;

    #[test]
    fn comparisons() {
        let b = Budget::default();
        let e = exp_total(&R::x(), b).unwrap();
        let p = power(&R::x(), &BigRational::from_integer(1000.into()), b).unwrap();
        assert_eq!(eventual_compare(&e, &p, b), Verdict::Greater);
        let xp1 = R::x().add(&R::one());
        let sq = R::from_terms(vec![
            Term::new(Rational::one(), Monomial::x_int(2)),
            Term::new(Rational::from_int(2), Monomial::x()),
            Term::new(Rational::one(), Monomial::one()),
        ]);
        assert_eq!(eventual_compare(&xp1.mul(&xp1), &sq, b), Verdict::Equal);
        let lx = log_total(&R::monomial(Monomial::x().mul(&Monomial::ell(1))), b).unwrap();
        assert_eq!(eventual_compare(&lx, &R::monomial(Monomial::ell(1)), b), Verdict::Greater);
    }

    #[test]
    fn limits() {
        let b = Budget::default();
        let g = R::one().sub(&R::monomial(Monomial::x_int(-1))).invert(b).unwrap();
        assert_eq!(limit_at_infinity(&g, b), Limit::Finite(Rational::one()));
        let h = R::x().mul(&R::x()).sub(&exp_total(&R::x(), b).unwrap());
        assert_eq!(limit_at_infinity(&h, b), Limit::NegInfinity);
        assert_eq!(limit_at_infinity(&R::constant(Rational::from_int(5)), b), Limit::Finite(Rational::from_int(5)));
    }

    #[test]
    fn suite_passes_at_default_budget() {
        let report = axiom_suite(Budget::default());
        assert!(report.all_pass(), "{report}");
    }

    #[test]
    fn tiny_budget_is_never_a_failure() {
        let report = axiom_suite(Budget::new(1).unwrap());
        assert_eq!(report.failed(), 0, "{report}");
        assert!(report.indeterminate() > 0);
    }

    #[test]
    fn dropped_factor_breaks_e1() {
        let report = axiom_suite_with(Budget::default(), &exp_dropping_constant_factor);
        let e1: Vec<_> = report.of_axiom("E1").collect();
        let failing: Vec<_> = e1.iter().filter(|i| matches!(i.outcome, Outcome::Fail(_))).collect();
        assert!(!failing.is_empty(), "{report}");
        assert!(failing.iter().any(|i| i.statement.contains("f = 1, g = x^-1")));
    }
}
