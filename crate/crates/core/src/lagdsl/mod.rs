//! Expression language for Lagrangians, potentials, wavefunctions and
//! symmetry generators.
//!
//! Grammar (whitespace-insensitive):
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := primary ('^' unary)?          exponent must fold to a real constant
//! primary := number | 'i' | 't' | 'q'k | 'v'k | param | func '(' expr ')' | '(' expr ')'
//! func    := sin | cos | exp | ln | sqrt | abs2 | conj
//! ```

mod ast;
mod diff;
mod eval;
mod parser;

use thiserror::Error;

pub use ast::{Expr, Func, Var};
pub use eval::{Bindings, Params};
pub use parser::{is_reserved, parse};

/// Errors from parsing, evaluating or differentiating expressions.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("syntax error at column {column}: {message}")]
    Syntax { column: usize, message: String },

    #[error("unknown identifier `{name}` at column {column}")]
    UnknownIdentifier { name: String, column: usize },

    #[error("index out of range: `{name}` at column {column} (dimension is {dim})")]
    IndexOutOfRange { name: String, column: usize, dim: usize },

    #[error("parameter name `{name}` is reserved")]
    ReservedParameter { name: String },

    #[error("exponent at column {column} must be a constant real number")]
    NonConstantExponent { column: usize },

    #[error("parameter `{name}` has no value")]
    UnboundParameter { name: String },

    #[error("expected {expected} components, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("variable `{name}` is not allowed in {context}")]
    ForbiddenVariable { name: String, context: &'static str },

    #[error("cannot differentiate `{func}` with respect to the complex variable `{var}`")]
    NonHolomorphic { func: &'static str, var: String },

    #[error("division by zero")]
    DivisionByZero,

    #[error("logarithm of zero")]
    LogOfZero,

    #[error("non-finite value evaluating `{expr}`")]
    NonFinite { expr: String },
}

impl ExprError {
    pub fn is_numerical(&self) -> bool {
        matches!(self, ExprError::DivisionByZero | ExprError::LogOfZero | ExprError::NonFinite { .. })
    }
}

impl Expr {
    /// Fails if the expression references a variable outside `allowed`.
    pub fn require_vars(&self, allowed: impl Fn(Var) -> bool, context: &'static str) -> Result<(), ExprError> {
        match self.vars().into_iter().find(|v| !allowed(*v)) {
            Some(v) => Err(ExprError::ForbiddenVariable { name: v.to_string(), context }),
            None => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn printing_round_trips_parsed_trees() {
        let cases = [
            "0.5*m*v1^2 - U",
            "sin(t)*q1 + i*v1",
            "t - (q1 - q2)",
            "t/(q1*q2)",
            "-q1^2",
            "(-q1)^2",
            "--t",
            "q1^-1.5",
            "(q1^2)^3",
            "exp(-(q1^2)/2)*exp(-i*t/2)",
            "t - -q1",
            "2*(3*q1)",
            "abs2(q1 + i*q2)",
        ];
        for text in cases {
            let e = parse(text, 2, ["m", "U"]).unwrap();
            let printed = e.to_string();
            let again = parse(&printed, 2, ["m", "U"]).unwrap();
            assert_eq!(e, again, "{text} -> {printed}");
        }
    }

    #[test]
    fn forbidden_variables() {
        let e = parse("t + v1", 1, Vec::<String>::new()).unwrap();
        assert!(e.require_vars(|v| !matches!(v, Var::V(_)), "generators").is_err());
        assert!(e.require_vars(|_| true, "anything").is_ok());
    }
}
