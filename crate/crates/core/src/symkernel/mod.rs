//! Exact symbolic kernel.
//!
//! Expressions live in three spatial variables `x1, x2, x3`, named real
//! parameters, elementary functions and abstract function symbols. Every
//! expression has a canonical *normal form*: a reduced rational function in
//! the expression's atoms (variables, parameters, the imaginary unit, square
//! roots, transcendental applications and abstract-function applications).
//! Zero testing is two-tier: exact when the normal form's numerator vanishes,
//! seeded random-point evaluation otherwise.

mod eval;
mod expr;
mod normal;
mod poly;
mod scalar;
mod text;
mod zero;

pub use eval::{Env, EvalError};
pub use expr::{Expr, ExprKind, Func, FunctionDef};
pub use normal::NormalForm;
pub use scalar::{rat, rat_int, Axis, GaussRat, Rational};
pub use text::{ParseError, Parser};
pub use zero::{is_zero, ZeroStatus, ZeroTestPolicy};

use thiserror::Error;

/// Failures of exact normalization.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum KernelError {
    #[error("division by zero in `{0}`")]
    DivisionByZero(String),
    #[error("logarithm of zero in `{0}`")]
    LogOfZero(String),
    #[error("normal form exceeds {0} terms")]
    TooLarge(usize),
}
