mod common;

use std::cmp::Ordering;
use std::collections::BTreeMap;

use common::*;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use proptest::prelude::*;
use tss_core::hahn::{
    decompose, is_bounded, regroup, series_cmp_abs, series_sign, valuation, Split, Valuation, Verdict,
};
use tss_core::{Constant, KernelError, Rational, Term};

type Raw = Vec<(BigRational, BigRational)>;

fn raw() -> impl Strategy<Value = Raw> {
    prop::collection::vec(((-4i64..=4, 1i64..=3), (-6i64..=6, 1i64..=2)), 0..6)
        .prop_map(|v| v.into_iter().map(|((n, d), (e, f))| (q(n, d), q(e, f))).collect())
}

fn build(r: &Raw) -> S {
    S::from_terms(
        r.iter()
            .map(|(c, e)| Term::new(Rational::from_rational(c.clone()), M::x_pow(e.clone())))
            .collect(),
    )
}

/// `(exponent, coefficient)` of the dominant term, by merging and taking the largest exponent.
fn oracle_dominant(r: &Raw) -> Option<(BigRational, BigRational)> {
    let mut merged: BTreeMap<BigRational, BigRational> = BTreeMap::new();
    for (c, e) in r {
        *merged.entry(e.clone()).or_insert_with(BigRational::zero) += c;
    }
    merged.into_iter().rev().find(|(_, c)| !c.is_zero())
}

fn oracle_sign(r: &Raw) -> Verdict {
    match oracle_dominant(r) {
        None => Verdict::Equal,
        Some((_, c)) if c.is_positive() => Verdict::Greater,
        Some(_) => Verdict::Less,
    }
}

fn scaled(r: &Raw, k: i64) -> Raw {
    r.iter().map(|(c, e)| (c * BigRational::from_integer(k.into()), e.clone())).collect()
}

fn concat(a: &Raw, b: &Raw) -> Raw {
    a.iter().chain(b).cloned().collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn trichotomy(f in raw(), g in raw()) {
        let (sf, sg) = (build(&f), build(&g));
        let v = series_sign(&sf.sub(&sg), b());
        prop_assert!(v.is_determinate());
        prop_assert_eq!(v, oracle_sign(&concat(&f, &scaled(&g, -1))));
        let reversed = series_sign(&sg.sub(&sf), b());
        prop_assert_eq!(reversed, v.reverse());
    }

    #[test]
    fn translation_invariance(f in raw(), g in raw(), h in raw()) {
        let (sf, sg, sh) = (build(&f), build(&g), build(&h));
        let before = series_sign(&sg.sub(&sf), b());
        let after = series_sign(&sg.add(&sh).sub(&sf.add(&sh)), b());
        prop_assert_eq!(before, after);
    }

    #[test]
    fn domination_matches_oracle(f in raw(), g in raw()) {
        let v = series_cmp_abs(&build(&f), &build(&g), b());
        let expected = match (oracle_dominant(&f), oracle_dominant(&g)) {
            (None, None) => Verdict::Equal,
            (None, Some(_)) => Verdict::Less,
            (Some(_), None) => Verdict::Greater,
            (Some((a, _)), Some((c, _))) => Verdict::from_ordering(a.cmp(&c)),
        };
        prop_assert_eq!(v, expected);
    }

    #[test]
    fn dominant_matches_oracle(f in raw()) {
        let s = build(&f);
        match (s.dominant(b()).unwrap(), oracle_dominant(&f)) {
            (tss_core::Dominant::Zero, None) => {}
            (tss_core::Dominant::Term(t), Some((e, c))) => {
                prop_assert_eq!(t.monomial, M::x_pow(e));
                prop_assert_eq!(t.coef, Rational::from_rational(c));
            }
            (d, o) => prop_assert!(false, "kernel {:?} vs oracle {:?}", d, o),
        }
    }

    #[test]
    fn valuation_ring_is_convex(f in finite_or_grid(), g in finite_or_grid()) {
        if !is_bounded(&f, b()).unwrap() {
            return Ok(());
        }
        let smaller = matches!(series_cmp_abs(&g, &f, b()), Verdict::Less | Verdict::Equal);
        if smaller {
            prop_assert!(is_bounded(&g, b()).unwrap());
        }
    }

    #[test]
    fn valuation_reverses_dominance(f in finite_or_grid(), g in finite_or_grid()) {
        let (vf, vg) = (valuation(&f, b()).unwrap(), valuation(&g, b()).unwrap());
        let expected = series_cmp_abs(&f, &g, b()).reverse().ordering().unwrap();
        prop_assert_eq!(vf.cmp(&vg), expected);
        let vfg = valuation(&f.mul(&g), b()).unwrap();
        prop_assert_eq!(vfg, vf.add(&vg));
    }

    #[test]
    fn decomposition_parts(f in finite_or_grid()) {
        let d = decompose(&f, b()).unwrap();
        for t in d.infinite.enumerate(20).unwrap().terms {
            prop_assert_eq!(t.monomial.cmp_one(), Ordering::Greater);
        }
        for t in d.infinitesimal.enumerate(20).unwrap().terms {
            prop_assert_eq!(t.monomial.cmp_one(), Ordering::Less);
        }
        prop_assert!(agree_at(&d.reassemble(), &f, &probe_monomials()));
    }

    #[test]
    fn regroup_then_flatten(f in transseries()) {
        for split in [Split::log_exp(), Split::log_index_at_least(1), Split::log_index_at_least(2)] {
            let r = match regroup(&f, &split) {
                Ok(r) => r,
                Err(KernelError::InvalidSplit(_)) => continue,
                Err(e) => return Err(TestCaseError::fail(e.to_string())),
            };
            prop_assert!(r.flatten().sub(&f).is_exact_zero());
            prop_assert_eq!(r.sign(b()), series_sign(&f, b()));
            for w in r.groups.windows(2) {
                prop_assert!(w[0].1 > w[1].1);
            }
        }
    }

    #[test]
    fn deep_logs_split_logarithmic_series(ts in prop::collection::vec((coef(), log_monomial()), 0..5), k in 0usize..3) {
        let f = S::from_terms(ts.into_iter().map(|(c, m)| Term::new(c, m)).collect());
        let r = regroup(&f, &Split::log_index_at_least(k)).unwrap();
        prop_assert!(r.flatten().sub(&f).is_exact_zero());
    }
}

#[test]
fn valuation_examples() {
    assert_eq!(valuation(&S::zero(), b()).unwrap(), Valuation::Infinite);
    let f = S::x().add(&S::monomial(M::x_int(-2)));
    assert_eq!(valuation(&f, b()).unwrap(), Valuation::Value(M::x()));
    assert!(Valuation::Value(M::x()) < Valuation::Value(M::one()));
    assert!(Valuation::<Rational>::Infinite > Valuation::Value(M::x_int(-5)));
}

#[test]
fn regroup_example() {
    let f = S::monomial(M::x().mul(&M::ell(1)));
    let r = regroup(&f, &Split::log_index_at_least(1)).unwrap();
    assert_eq!(r.to_string(), "(l1)*x");
}
