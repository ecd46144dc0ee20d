//! Eager arithmetic on sorted term lists.

use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use crate::constants::Constant;
use crate::monomials::Monomial;

/// A nonzero coefficient attached to a monomial.
#[derive(Clone, Debug, PartialEq)]
pub struct Term<C: Constant> {
    pub monomial: Monomial<C>,
    pub coef: C,
}

impl<C: Constant> Term<C> {
    pub fn new(coef: C, monomial: Monomial<C>) -> Self {
        Term { monomial, coef }
    }
}

/// Sorts by decreasing monomial, merges duplicates and drops zeros.
pub(crate) fn normalize<C: Constant>(terms: Vec<Term<C>>) -> Vec<Term<C>> {
    let mut acc: BTreeMap<Monomial<C>, C> = BTreeMap::new();
    for t in terms {
        match acc.get_mut(&t.monomial) {
            Some(c) => *c = c.add(&t.coef),
            None => {
                acc.insert(t.monomial, t.coef);
            }
        }
    }
    acc.into_iter()
        .rev()
        .filter(|(_, c)| !c.is_zero())
        .map(|(monomial, coef)| Term { monomial, coef })
        .collect()
}

pub(crate) fn add<C: Constant>(a: &[Term<C>], b: &[Term<C>]) -> Vec<Term<C>> {
    let mut out = Vec::with_capacity(a.len() + b.len());
    let (mut i, mut j) = (0, 0);
    while i < a.len() && j < b.len() {
        match a[i].monomial.cmp(&b[j].monomial) {
            Ordering::Greater => {
                out.push(a[i].clone());
                i += 1;
            }
            Ordering::Less => {
                out.push(b[j].clone());
                j += 1;
            }
            Ordering::Equal => {
                let c = a[i].coef.add(&b[j].coef);
                if !c.is_zero() {
                    out.push(Term::new(c, a[i].monomial.clone()));
                }
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&a[i..]);
    out.extend_from_slice(&b[j..]);
    out
}

pub(crate) fn neg<C: Constant>(a: &[Term<C>]) -> Vec<Term<C>> {
    a.iter()
        .map(|t| Term::new(t.coef.neg(), t.monomial.clone()))
        .collect()
}

/// Multiplies every term by `c·m`; `c` must be nonzero.
pub(crate) fn scale<C: Constant>(a: &[Term<C>], c: &C, m: &Monomial<C>) -> Vec<Term<C>> {
    debug_assert!(!c.is_zero());
    a.iter()
        .map(|t| Term::new(t.coef.mul(c), t.monomial.mul(m)))
        .collect()
}

pub(crate) fn mul<C: Constant>(a: &[Term<C>], b: &[Term<C>]) -> Vec<Term<C>> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    if a.len() == 1 {
        return scale(b, &a[0].coef, &a[0].monomial);
    }
    if b.len() == 1 {
        return scale(a, &b[0].coef, &b[0].monomial);
    }
    let mut products = Vec::with_capacity(a.len() * b.len());
    for s in a {
        for t in b {
            products.push(Term::new(s.coef.mul(&t.coef), s.monomial.mul(&t.monomial)));
        }
    }
    normalize(products)
}

/// The dominant term of `a - b`, found without building the difference.
pub(crate) fn first_difference<C: Constant>(a: &[Term<C>], b: &[Term<C>]) -> Option<Term<C>> {
    let (mut i, mut j) = (0, 0);
    loop {
        match (a.get(i), b.get(j)) {
            (None, None) => return None,
            (Some(s), None) => return Some(s.clone()),
            (None, Some(t)) => return Some(Term::new(t.coef.neg(), t.monomial.clone())),
            (Some(s), Some(t)) => match s.monomial.cmp(&t.monomial) {
                Ordering::Greater => return Some(s.clone()),
                Ordering::Less => return Some(Term::new(t.coef.neg(), t.monomial.clone())),
                Ordering::Equal => {
                    let c = s.coef.sub(&t.coef);
                    if !c.is_zero() {
                        return Some(Term::new(c, s.monomial.clone()));
                    }
                    i += 1;
                    j += 1;
                }
            },
        }
    }
}

pub(crate) fn terms_eq<C: Constant>(a: &[Term<C>], b: &[Term<C>]) -> bool {
    a.len() == b.len()
        && a.iter()
            .zip(b)
            .all(|(s, t)| s.monomial == t.monomial && s.coef == t.coef)
}

fn fmt_term<C: Constant>(
    t: &Term<C>,
    first: bool,
    f: &mut fmt::Formatter<'_>,
) -> fmt::Result {
    let negative = t.coef.sign() == Ordering::Less;
    let magnitude = if negative { t.coef.neg() } else { t.coef.clone() };
    match (first, negative) {
        (true, true) => f.write_str("-")?,
        (false, true) => f.write_str(" - ")?,
        (false, false) => f.write_str(" + ")?,
        (true, false) => {}
    }
    if t.monomial.is_one() {
        if magnitude.needs_parens() && (negative || !first) {
            return write!(f, "({magnitude})");
        }
        return write!(f, "{magnitude}");
    }
    if !magnitude.is_one() {
        if magnitude.needs_parens() {
            write!(f, "({magnitude})*")?;
        } else {
            write!(f, "{magnitude}*")?;
        }
    }
    write!(f, "{}", t.monomial)
}

/// Writes `c1*m1 + c2*m2 + ...`, with ` + o(m)` when `tail` is given.
pub(crate) fn fmt_terms<C: Constant>(
    terms: &[Term<C>],
    tail: Option<&Monomial<C>>,
    f: &mut fmt::Formatter<'_>,
) -> fmt::Result {
    if terms.is_empty() {
        match tail {
            Some(m) => return write!(f, "o({m})"),
            None => return f.write_str("0"),
        }
    }
    for (i, t) in terms.iter().enumerate() {
        fmt_term(t, i == 0, f)?;
    }
    if let Some(m) = tail {
        write!(f, " + o({m})")?;
    }
    Ok(())
}
