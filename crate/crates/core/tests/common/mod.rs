#![allow(dead_code)]

use num_rational::BigRational;
use proptest::prelude::*;
use tss_core::analytic::exp_bounded;
use tss_core::{Budget, Constant, Dominant, LogMonomial, Monomial, Rational, Series, Term};

pub type S = Series<Rational>;
pub type M = Monomial<Rational>;

pub fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(n.into(), d.into())
}

pub fn b() -> Budget {
    Budget::default()
}

pub fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n, d)
}

pub fn coef() -> impl Strategy<Value = Rational> {
    (prop_oneof![-6i64..=-1, 1i64..=6], 1i64..=4).prop_map(|(n, d)| rat(n, d))
}

pub fn exponent() -> impl Strategy<Value = BigRational> {
    (-8i64..=8, 1i64..=2).prop_map(|(n, d)| q(n, d))
}

/// Finite series over `x^ℚ`.
pub fn finite() -> impl Strategy<Value = S> {
    prop::collection::vec((coef(), exponent()), 0..5).prop_map(|ts| {
        S::from_terms(ts.into_iter().map(|(c, e)| Term::new(c, M::x_pow(e))).collect())
    })
}

/// Finite and nonzero.
pub fn finite_nonzero() -> impl Strategy<Value = S> {
    finite().prop_filter("nonzero", |f| !f.is_exact_zero())
}

/// A finite infinitesimal over `x^ℤ`.
pub fn infinitesimal() -> impl Strategy<Value = S> {
    prop::collection::vec((coef(), 1i64..=4), 1..4).prop_map(|ts| {
        S::from_terms(ts.into_iter().map(|(c, e)| Term::new(c, M::x_int(-e))).collect())
    })
}

/// `c·(1 + ε)` with `c > 0`, an invertible grid unit.
pub fn unit() -> impl Strategy<Value = S> {
    ((1i64..=5, 1i64..=3), infinitesimal()).prop_map(|((n, d), e)| S::constant(rat(n, d)).add(&e))
}

/// Infinite grid series: quotients and Taylor compositions of finite data.
pub fn grid() -> impl Strategy<Value = S> {
    prop_oneof![
        (finite_nonzero(), unit()).prop_map(|(p, u)| p.div(&u, b()).unwrap()),
        (finite_nonzero(), infinitesimal()).prop_map(|(p, e)| p.mul(&exp_bounded(&e, b()).unwrap())),
    ]
}

pub fn finite_or_grid() -> impl Strategy<Value = S> {
    prop_oneof![finite(), grid()]
}

/// Logarithmic monomials on `ℓ₀, ℓ₁, ℓ₂`.
pub fn log_monomial() -> impl Strategy<Value = M> {
    prop::collection::vec((0usize..3, exponent()), 0..3)
        .prop_map(|ps| LogMonomial::from_exponents(ps).into())
}

/// Purely infinite finite arguments built from the given monomials.
fn argument(base: impl Strategy<Value = M>) -> impl Strategy<Value = Vec<Term<Rational>>> {
    prop::collection::vec((coef(), base), 1..3).prop_map(|ts| {
        let ts: Vec<_> = ts
            .into_iter()
            .filter(|(_, m)| m.cmp_one() == std::cmp::Ordering::Greater)
            .map(|(c, m)| Term::new(c, m))
            .collect();
        S::from_terms(ts).finite_terms().unwrap().to_vec()
    })
}

fn height_one() -> impl Strategy<Value = M> {
    (argument(log_monomial()), log_monomial())
        .prop_map(|(a, l)| M::exp_of(&a).unwrap().mul(&l))
}

/// Canonical monomials of height at most 2.
pub fn monomial() -> impl Strategy<Value = M> {
    prop_oneof![
        log_monomial(),
        height_one(),
        (argument(prop_oneof![height_one(), log_monomial()]), log_monomial())
            .prop_map(|(a, l)| M::exp_of(&a).unwrap().mul(&l)),
    ]
}

/// Finite transseries over monomials of height at most 2.
pub fn transseries() -> impl Strategy<Value = S> {
    prop::collection::vec((coef(), monomial()), 0..4)
        .prop_map(|ts| S::from_terms(ts.into_iter().map(|(c, m)| Term::new(c, m)).collect()))
}

/// Coefficients of `f` and `g` agree at each of `ms`.
pub fn agree_at(f: &S, g: &S, ms: &[M]) -> bool {
    ms.iter().all(|m| f.coefficient(m, b()).unwrap() == g.coefficient(m, b()).unwrap())
}

/// 50 monomials `x^(k/2)` spanning the supports generated above.
pub fn probe_monomials() -> Vec<M> {
    (-40..10).map(|k| M::x_pow(q(k, 2))).collect()
}

pub fn sum<C: Constant>(fs: &[Series<C>]) -> Series<C> {
    fs.iter().fold(Series::zero(), |acc, f| acc.add(f))
}

/// Finite transseries of level at most 1 with zero constant term.
///
/// The infinite part is arbitrary; the infinitesimal part lies in `x^ℤ`, so
/// `exp` of it has finitely many terms above any `x^-k`.
pub fn level_one_finite() -> impl Strategy<Value = S> {
    let infinite = prop::collection::vec((coef(), prop_oneof![log_monomial(), height_one()]), 0..4)
        .prop_map(|ts| {
            S::from_terms(
                ts.into_iter()
                    .filter(|(_, m)| m.cmp_one() == std::cmp::Ordering::Greater)
                    .map(|(c, m)| Term::new(c, m))
                    .collect(),
            )
        });
    (infinite, prop::option::of(infinitesimal()))
        .prop_map(|(f, e)| e.map_or(f.clone(), |e| f.add(&e)))
}

/// Level-1 series with an infinite grid infinitesimal tail.
pub fn level_one_grid() -> impl Strategy<Value = S> {
    (level_one_finite(), infinitesimal(), unit())
        .prop_map(|(f, e, u)| f.add(&e.div(&u, b()).unwrap()))
}

/// Positive grid transseries `𝔪·(1 + ε)` with unit leading coefficient.
pub fn positive_grid() -> impl Strategy<Value = S> {
    (monomial(), infinitesimal(), unit()).prop_map(|(m, e, u)| {
        let unit = S::one().add(&e.div(&u, b()).unwrap());
        unit.mul(&S::monomial(m))
    })
}

/// `f = g` on every monomial down to `𝔡(f)·x^-depth`.
pub fn agree_below_top(f: &S, g: &S, depth: i64) -> bool {
    let top = match f.dominant(b()).unwrap() {
        Dominant::Term(t) => t.monomial,
        _ => M::one(),
    };
    f.agrees_down_to(g, &top.mul(&M::x_int(-depth)), b()).unwrap()
}
