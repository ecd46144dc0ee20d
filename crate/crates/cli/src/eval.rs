//! Folding an expression through the kernel.

use std::fmt;
use std::ops::Range;

use num_rational::BigRational;
use tss_core::analytic::{taylor_apply, AnalyticGerm};
use tss_core::tower::{exp_total, log_total, power};
use tss_core::{Budget, Constant, FieldKind, KernelError, Monomial, Series};

use crate::parse::{BinOp, Expr, ExprKind};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum EvalErrorKind {
    #[error(transparent)]
    Kernel(#[from] KernelError),
    #[error("unknown name {0:?}")]
    UnknownName(String),
    #[error("unknown function {0:?}")]
    UnknownFunction(String),
    #[error("{name} takes {expected} argument(s), got {got}")]
    Arity { name: String, expected: usize, got: usize },
    #[error("exponent must be a rational constant")]
    NonRationalExponent,
}

/// A failure together with the subexpression that caused it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvalError {
    pub kind: EvalErrorKind,
    pub span: Range<usize>,
}

impl EvalError {
    fn at(span: &Range<usize>, kind: impl Into<EvalErrorKind>) -> Self {
        EvalError { kind: kind.into(), span: span.clone() }
    }

    /// The message, the input with the offending part underlined, and a hint
    /// when one applies.
    pub fn report(&self, source: &str, field: FieldKind) -> String {
        let start = self.span.start.min(source.len());
        let end = self.span.end.clamp(start, source.len());
        let pad = source[..start].chars().count();
        let width = source[start..end].chars().count().max(1);
        let mut out = format!("error: {}\n  {source}\n  {}{}", self.kind, " ".repeat(pad), "^".repeat(width));
        if let Some(hint) = self.hint(field) {
            out.push_str("\nhint: ");
            out.push_str(hint);
        }
        out
    }

    /// The computation was cut off by the budget rather than refused.
    pub fn is_undecided(&self) -> bool {
        matches!(
            self.kind,
            EvalErrorKind::Kernel(
                KernelError::BudgetExhausted
                    | KernelError::IndeterminatePivot
                    | KernelError::IndeterminateSign
                    | KernelError::IndeterminateCubeMembership
            )
        )
    }

    fn hint(&self, field: FieldKind) -> Option<&'static str> {
        match (&self.kind, field) {
            (EvalErrorKind::Kernel(KernelError::ConstantExpUnsupported(_)), FieldKind::Rational) => {
                Some("exp of a nonzero constant needs the exprational field (set field exprational, or --field exprational)")
            }
            _ if self.is_undecided() => Some("raise the term budget (set budget <n>, or --budget <n>)"),
            _ => None,
        }
    }
}

impl fmt::Display for EvalError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (at {}..{})", self.kind, self.span.start, self.span.end)
    }
}

pub type EvalResult<T> = Result<T, EvalError>;

/// `l<digits>` as a log index.
fn log_index(name: &str) -> Option<usize> {
    let digits = name.strip_prefix('l')?;
    if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    digits.parse().ok()
}

fn germ<C: Constant>(name: &str) -> Option<AnalyticGerm<C>> {
    match name {
        "sin" => Some(AnalyticGerm::sin()),
        "cos" => Some(AnalyticGerm::cos()),
        "geom" => Some(AnalyticGerm::geometric()),
        _ => None,
    }
}

/// The rational value of a constant series.
fn rational_value<C: Constant>(s: &Series<C>) -> Option<BigRational> {
    match s.finite_terms()? {
        [] => Some(BigRational::from_integer(0.into())),
        [t] if t.monomial.is_one() => t.coef.to_rational(),
        _ => None,
    }
}

pub fn evaluate<C: Constant>(e: &Expr, budget: Budget) -> EvalResult<Series<C>> {
    let kernel = |r: Result<Series<C>, KernelError>| r.map_err(|k| EvalError::at(&e.span, k));
    match &e.kind {
        ExprKind::Number(q) => Ok(Series::constant(C::from_rational(q.clone()))),
        ExprKind::Name(name) => match name.as_str() {
            "x" => Ok(Series::x()),
            "e" => kernel(C::one().exp().map(Series::constant).map_err(KernelError::from)),
            _ => match log_index(name) {
                Some(i) => Ok(Series::monomial(Monomial::ell(i))),
                None => Err(EvalError::at(&e.span, EvalErrorKind::UnknownName(name.clone()))),
            },
        },
        ExprKind::Neg(inner) => Ok(evaluate::<C>(inner, budget)?.neg()),
        ExprKind::Binary(op, a, b) => {
            if *op == BinOp::Pow && a.kind == ExprKind::Name("e".into()) {
                return kernel(exp_total(&evaluate(b, budget)?, budget));
            }
            let lhs = evaluate::<C>(a, budget)?;
            let rhs = evaluate::<C>(b, budget)?;
            match op {
                BinOp::Add => Ok(lhs.add(&rhs)),
                BinOp::Sub => Ok(lhs.sub(&rhs)),
                BinOp::Mul => Ok(lhs.mul(&rhs)),
                BinOp::Div => kernel(lhs.div(&rhs, budget)),
                BinOp::Pow => {
                    let r = rational_value(&rhs)
                        .ok_or_else(|| EvalError::at(&b.span, EvalErrorKind::NonRationalExponent))?;
                    kernel(power(&lhs, &r, budget))
                }
            }
        }
        ExprKind::Call(name, args) => {
            let arity = |expected: usize| {
                if args.len() == expected {
                    Ok(())
                } else {
                    let kind = EvalErrorKind::Arity { name: name.clone(), expected, got: args.len() };
                    Err(EvalError::at(&e.span, kind))
                }
            };
            match name.as_str() {
                "exp" => {
                    arity(1)?;
                    kernel(exp_total(&evaluate(&args[0], budget)?, budget))
                }
                "log" => {
                    arity(1)?;
                    kernel(log_total(&evaluate(&args[0], budget)?, budget))
                }
                other => match germ::<C>(other) {
                    Some(g) => {
                        arity(1)?;
                        kernel(taylor_apply(&g, &evaluate(&args[0], budget)?, budget))
                    }
                    None => Err(EvalError::at(&e.span, EvalErrorKind::UnknownFunction(other.to_string()))),
                },
            }
        }
    }
}
