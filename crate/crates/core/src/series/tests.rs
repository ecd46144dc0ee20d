use super::*;
use crate::constants::Rational;
use crate::monomials::Monomial;

type S = Series<Rational>;
type M = Monomial<Rational>;

fn r(n: i64) -> Rational {
    Rational::from_int(n)
}

fn xp(n: i64) -> M {
    M::x_int(n)
}

fn poly(pairs: &[(i64, i64)]) -> S {
    S::from_terms(pairs.iter().map(|&(c, e)| Term::new(r(c), xp(e))).collect())
}

fn geometric_stream() -> S {
    // Σ x^-n with no exact form
    S::stream((0..).map(|n| Term::new(Rational::one(), xp(-n))))
}

#[test]
fn finite_ring_operations() {
    let a = poly(&[(1, 1), (1, 0)]);
    let b = poly(&[(1, 1), (-1, 0)]);
    assert_eq!(a.mul(&b).to_string(), "x^2 - 1");
    assert!(a.sub(&a).is_exact_zero());
    assert_eq!(a.tier(), Tier::Finite);
}

#[test]
fn inverse_of_one_minus_reciprocal() {
    let f = poly(&[(1, 0), (-1, -1)]);
    let g = f.invert(Budget::default()).unwrap();
    assert_eq!(g.tier(), Tier::Grid);
    let terms = g.enumerate(5).unwrap().terms;
    assert_eq!(terms.len(), 5);
    for (n, t) in terms.iter().enumerate() {
        assert_eq!(t.monomial, xp(-(n as i64)));
        assert!(t.coef.is_one());
    }
    assert_eq!(g.render(3, Budget::default()), "1 + x^-1 + x^-2 + o(x^-2)");
}

#[test]
fn exact_forms_give_exact_zero_and_dominant() {
    let f = poly(&[(1, 1), (1, 0)]);
    let g = f.invert(Budget::default()).unwrap();
    let one = g.mul(&f);
    assert_eq!(one.tier(), Tier::Finite);
    assert_eq!(one.to_string(), "1");
    let h = g.sub(&g);
    assert!(h.is_exact_zero());
    let d = g.add(&S::x()).dominant(Budget::default()).unwrap();
    assert_eq!(d.monomial(), Some(&M::x()));
}

#[test]
fn stream_products_and_sums() {
    let s = geometric_stream();
    assert_eq!(s.tier(), Tier::Stream);
    let sq = s.mul(&s);
    let terms = sq.enumerate(6).unwrap().terms;
    for (n, t) in terms.iter().enumerate() {
        assert_eq!(t.monomial, xp(-(n as i64)));
        assert_eq!(t.coef, r(n as i64 + 1));
    }
    let back = sq.mul(&poly(&[(1, 0), (-1, -1)]));
    assert!(back.agrees_with(&s, 8, Budget::default()).unwrap());
}

#[test]
fn hidden_cancellation_is_indeterminate() {
    let s = geometric_stream();
    let d = s.sub(&geometric_stream());
    assert_eq!(d.dominant(Budget::new(16).unwrap()).unwrap(), Dominant::Indeterminate);
    // a cancellation observed at 1 settles that coefficient, not the dominant term
    assert!(d.coefficient(&M::one(), Budget::new(16).unwrap()).unwrap().is_zero());
    assert!(d.coefficient(&xp(-3), Budget::new(16).unwrap()).unwrap().is_zero());
}

#[test]
fn partial_cancellation_is_found() {
    let s = geometric_stream();
    let d = s.sub(&S::from_terms(vec![Term::new(r(1), M::one()), Term::new(r(1), xp(-1))]));
    let lead = d.dominant(Budget::default()).unwrap();
    assert_eq!(lead.monomial(), Some(&xp(-2)));
}

#[test]
fn unordered_streams_are_rejected() {
    let bad = S::stream(vec![Term::new(r(1), xp(-1)), Term::new(r(1), xp(0))]);
    assert!(matches!(bad.enumerate(3), Err(KernelError::UnorderedStream)));
}

#[test]
fn zero_budget_is_invalid() {
    assert!(matches!(Budget::new(0), Err(KernelError::InvalidBudget)));
}

#[test]
fn taylor_in_two_variables() {
    // 1/(1 - a - b) with a = x^-1, b = x^-2, as a bivariate Taylor sum
    let eps = vec![poly(&[(1, -1)]), poly(&[(1, -2)])];
    let multinomial: CoefficientOracle<Rational> = Arc::new(|alpha: &[usize]| {
        let fact = |n: usize| (1..=n as i64).fold(num_bigint::BigInt::from(1), |acc, k| acc * k);
        let n = alpha[0] + alpha[1];
        let value = fact(n) / (fact(alpha[0]) * fact(alpha[1]));
        Ok(Rational::from_rational(num_rational::BigRational::from_integer(value)))
    });
    let s = S::taylor_sum(eps, multinomial, None);
    let expected = poly(&[(1, 0), (-1, -1), (-1, -2)]).invert(Budget::default()).unwrap();
    assert!(s.agrees_with(&expected, 10, Budget::default()).unwrap());
    // Fibonacci coefficients
    let fib: Vec<i64> = s.enumerate(6).unwrap().terms.iter().map(|t| {
        t.coef.to_rational().unwrap().to_integer().try_into().unwrap()
    }).collect();
    assert_eq!(fib, vec![1, 1, 2, 3, 5, 8]);
}

#[test]
fn coefficient_lookup() {
    let g = poly(&[(1, 0), (-2, -1)]).invert(Budget::default()).unwrap();
    assert_eq!(g.coefficient(&xp(-3), Budget::default()).unwrap(), r(8));
    assert_eq!(g.coefficient(&xp(1), Budget::default()).unwrap(), r(0));
}

#[test]
fn long_division_gives_fibonacci_numbers() {
    let f = poly(&[(1, 0), (-1, -1), (-1, -2)]).invert(Budget::default()).unwrap();
    let coefs: Vec<_> = f.enumerate(8).unwrap().terms.into_iter().map(|t| t.coef).collect();
    assert_eq!(coefs, [1, 1, 2, 3, 5, 8, 13, 21].map(r));
    // 2x/(1 + x^-1)
    let g = poly(&[(2, 1)]).mul(&poly(&[(1, 0), (1, -1)]).invert(Budget::default()).unwrap());
    assert_eq!(g.render(3, Budget::default()), "2*x - 2 + 2*x^-1 + o(x^-1)");
}
