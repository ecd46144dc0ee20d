mod common;

use common::*;
use num_rational::BigRational;
use proptest::prelude::*;
use tss_core::asymptotics::{eventual_compare, limit_at_infinity, Limit};
use tss_core::hahn::{decompose, Verdict};
use tss_core::{Budget, Constant, KernelError, LogMonomial, Rational, Term};

/// `(ℓ₀ℓ₁⋯ℓₙ)⁻¹`.
fn log_chain(n: usize) -> M {
    LogMonomial::from_exponents((0..=n).map(|i| (i, q(-1, 1)))).into()
}

fn el_witness() -> S {
    S::stream((0..).map(|n| Term::new(Rational::one(), log_chain(n))))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn comparison_is_a_total_order(fs in prop::collection::vec(transseries(), 2..6)) {
        for f in &fs {
            for g in &fs {
                let v = eventual_compare(f, g, b());
                prop_assert!(v.is_determinate());
                prop_assert_eq!(eventual_compare(g, f, b()), v.reverse());
                for h in &fs {
                    let w = eventual_compare(g, h, b());
                    if v == Verdict::Less && w == Verdict::Less {
                        prop_assert_eq!(eventual_compare(f, h, b()), Verdict::Less);
                    }
                }
            }
        }
    }

    #[test]
    fn finite_limits_add(f in finite_or_grid(), g in finite_or_grid()) {
        if let (Limit::Finite(a), Limit::Finite(c)) = (limit_at_infinity(&f, b()), limit_at_infinity(&g, b())) {
            prop_assert_eq!(limit_at_infinity(&f.add(&g), b()), Limit::Finite(a.add(&c)));
        }
    }

    #[test]
    fn limits_follow_the_decomposition(f in finite_or_grid()) {
        let d = decompose(&f, b()).unwrap();
        let expected = match d.infinite.finite_terms().unwrap().first() {
            None => Limit::Finite(d.constant),
            Some(t) if t.coef.sign() == std::cmp::Ordering::Greater => Limit::PosInfinity,
            Some(_) => Limit::NegInfinity,
        };
        prop_assert_eq!(limit_at_infinity(&f, b()), expected);
    }

    #[test]
    fn positive_scaling_preserves_comparison(f in level_one_grid(), g in level_one_grid(), c in coef()) {
        let c = if c.sign() == std::cmp::Ordering::Less { c.neg() } else { c };
        prop_assume!(eventual_compare(&f, &g, b()) != Verdict::Equal);
        prop_assert_eq!(eventual_compare(&f.scale(&c), &g.scale(&c), b()), eventual_compare(&f, &g, b()));
        prop_assert_eq!(eventual_compare(&f.scale(&c.neg()), &g.scale(&c.neg()), b()), eventual_compare(&g, &f, b()));
    }
}

#[test]
fn el_witness_is_well_based() {
    let f = el_witness();
    let d = decompose(&f, b()).unwrap();
    assert!(d.infinite.is_exact_zero());
    assert!(d.constant.is_zero());
    assert!(agree_at(&d.infinitesimal, &f, &(0..8).map(log_chain).collect::<Vec<_>>()));
    assert_eq!(eventual_compare(&f, &S::monomial(M::x_int(-1)).scale(&rat(2, 1)), b()), Verdict::Less);
    assert_eq!(f.coefficient(&log_chain(5), b()).unwrap(), Rational::one());
    assert_eq!(f.coefficient(&M::ell(5).inv(), b()).unwrap(), Rational::zero());
    assert_eq!(f.render(3, b()), "x^-1 + x^-1*l1^-1 + x^-1*l1^-1*l2^-1 + o(x^-1*l1^-1*l2^-1)");
}

#[test]
fn reciprocal_logs_do_not_form_a_series() {
    // Σ 1/ℓₙ has the increasing support ℓ₀⁻¹ ≺ ℓ₁⁻¹ ≺ ⋯
    let f = S::stream((0..).map(|n| Term::new(Rational::one(), M::ell(n).inv())));
    assert!(matches!(f.enumerate(3), Err(KernelError::UnorderedStream)));
}

#[test]
fn stream_self_difference_stays_open() {
    for n in [1, 2, 8, 64, 256, 1024] {
        let f = el_witness();
        let v = eventual_compare(&f, &f.clone(), Budget::new(n).unwrap());
        assert_eq!(v, Verdict::Indeterminate, "budget {n}");
    }
}

#[test]
fn worked_comparisons() {
    let x2 = S::x().mul(&S::x());
    let e = tss_core::tower::exp_total(&S::x(), b()).unwrap();
    assert_eq!(limit_at_infinity(&x2.sub(&e), b()), Limit::NegInfinity);
    let p = tss_core::tower::power(&S::x(), &BigRational::from_integer(1000.into()), b()).unwrap();
    assert_eq!(eventual_compare(&e, &p, b()), Verdict::Greater);
}
