//! Expression language and command layer over `tss_core`.

pub mod eval;
pub mod parse;
pub mod repl;

pub use eval::{evaluate, EvalError, EvalErrorKind};
pub use parse::{parse, BinOp, Expr, ExprKind, SyntaxError};
pub use repl::{run, Reply, Session, Status};
