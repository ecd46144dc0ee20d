//! Exact symbolic kernel for well-based series and exp-log transseries.

pub mod constants;
pub mod error;
pub mod monomials;
pub mod series;
pub mod hahn;
pub mod analytic;
pub mod tower;
pub mod asymptotics;

pub use constants::{Constant, ExpRational, FieldKind, Rational};
pub use error::{KernelError, Result};
pub use monomials::{LogMonomial, Monomial, RealPowerMonomial};
pub use series::{Budget, Dominant, Expansion, Series, Term, Tier};
