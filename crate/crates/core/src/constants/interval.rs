//! Rational enclosures of `e^r` for rational `r`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

fn dyadic(w: u32) -> BigRational {
    BigRational::from_integer(BigInt::one() << w)
}

fn round_down(q: &BigRational, w: u32) -> BigRational {
    let scale = dyadic(w);
    (q * &scale).floor() / scale
}

fn round_up(q: &BigRational, w: u32) -> BigRational {
    let scale = dyadic(w);
    (q * &scale).ceil() / scale
}

/// Returns `(lo, hi)` with `lo <= e^r <= hi`, `lo > 0`, and relative width
/// roughly `2^-prec`.
pub fn exp_bounds(r: &BigRational, prec: u32) -> (BigRational, BigRational) {
    if r.is_zero() {
        return (BigRational::one(), BigRational::one());
    }
    if r.is_negative() {
        let (lo, hi) = exp_bounds(&-r, prec);
        return (hi.recip(), lo.recip());
    }
    let half = BigRational::new(1.into(), 2.into());
    let mut s = 0u32;
    let mut y = r.clone();
    while y > half {
        y /= BigInt::from(2);
        s += 1;
    }
    let w = prec + s + 8;
    let tolerance = dyadic(w).recip();

    // Taylor sum at y in (0, 1/2]; the tail after term t is at most 2t.
    let mut sum = BigRational::zero();
    let mut term = BigRational::one();
    let mut n = 0u32;
    while term > tolerance {
        sum += &term;
        n += 1;
        term = term * &y / BigInt::from(n);
    }
    let mut lo = round_down(&sum, w);
    let mut hi = round_up(&(sum + term * BigInt::from(2)), w);
    for _ in 0..s {
        lo = round_down(&(&lo * &lo), w);
        hi = round_up(&(&hi * &hi), w);
    }
    (lo, hi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn encloses_float_reference() {
        for (n, d) in [(1, 1), (-1, 1), (7, 3), (-5, 2), (40, 1), (1, 1000)] {
            let r = q(n, d);
            let (lo, hi) = exp_bounds(&r, 60);
            let reference = (n as f64 / d as f64).exp();
            let (lo, hi) = (lo.to_f64().unwrap(), hi.to_f64().unwrap());
            assert!(lo <= reference * (1.0 + 1e-12) && reference <= hi * (1.0 + 1e-12));
            assert!((hi - lo) / reference < 1e-12);
        }
    }

    #[test]
    fn e_has_two_correct_digits() {
        let (lo, hi) = exp_bounds(&q(1, 1), 16);
        assert!(lo > q(2718, 1000) && hi < q(2719, 1000));
    }
}
