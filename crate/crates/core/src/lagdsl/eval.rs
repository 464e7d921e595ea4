use std::collections::BTreeMap;

use num_complex::Complex64;

use super::ast::{Expr, Func, Var};
use super::ExprError;
use crate::funcspace::is_finite;

/// Named parameter values.
pub type Params = BTreeMap<String, Complex64>;

/// Values for every symbol an expression may reference.
#[derive(Debug, Clone, Copy)]
pub struct Bindings<'a> {
    /// Time. Real along paths; the invariance check also evaluates at the
    /// transformed time `t + sτ`, which is complex when τ is.
    pub t: Complex64,
    pub q: &'a [Complex64],
    pub v: &'a [Complex64],
    pub params: &'a Params,
}

impl<'a> Bindings<'a> {
    pub fn new(t: f64, q: &'a [Complex64], v: &'a [Complex64], params: &'a Params) -> Self {
        Self { t: Complex64::new(t, 0.0), q, v, params }
    }
}

impl Expr {
    /// Evaluates with principal branches for `ln`, `sqrt` and real powers.
    pub fn eval(&self, b: &Bindings<'_>) -> Result<Complex64, ExprError> {
        let z = self.eval_inner(b)?;
        if !is_finite(z) {
            return Err(ExprError::NonFinite { expr: self.to_string() });
        }
        Ok(z)
    }

    fn eval_inner(&self, b: &Bindings<'_>) -> Result<Complex64, ExprError> {
        Ok(match self {
            Expr::Const(z) => *z,
            Expr::Param(name) => {
                *b.params.get(name).ok_or_else(|| ExprError::UnboundParameter { name: name.clone() })?
            }
            Expr::Var(Var::T) => b.t,
            Expr::Var(Var::Q(k)) => component(b.q, *k)?,
            Expr::Var(Var::V(k)) => component(b.v, *k)?,
            Expr::Neg(x) => -x.eval_inner(b)?,
            Expr::Add(x, y) => x.eval_inner(b)? + y.eval_inner(b)?,
            Expr::Sub(x, y) => x.eval_inner(b)? - y.eval_inner(b)?,
            Expr::Mul(x, y) => x.eval_inner(b)? * y.eval_inner(b)?,
            Expr::Div(x, y) => {
                let den = y.eval_inner(b)?;
                if den == Complex64::new(0.0, 0.0) {
                    return Err(ExprError::DivisionByZero);
                }
                x.eval_inner(b)? / den
            }
            Expr::Pow(x, p) => power(x.eval_inner(b)?, *p)?,
            Expr::Call(f, x) => {
                let z = x.eval_inner(b)?;
                if *f == Func::Ln && z == Complex64::new(0.0, 0.0) {
                    return Err(ExprError::LogOfZero);
                }
                f.apply(z)
            }
        })
    }
}

fn component(values: &[Complex64], k: usize) -> Result<Complex64, ExprError> {
    values.get(k).copied().ok_or(ExprError::DimensionMismatch { expected: k + 1, got: values.len() })
}

fn power(z: Complex64, p: f64) -> Result<Complex64, ExprError> {
    let zero = Complex64::new(0.0, 0.0);
    if z == zero {
        return match p {
            p if p > 0.0 => Ok(zero),
            0.0 => Ok(Complex64::new(1.0, 0.0)),
            _ => Err(ExprError::DivisionByZero),
        };
    }
    if p.fract() == 0.0 && p.abs() <= i32::MAX as f64 {
        Ok(z.powi(p as i32))
    } else {
        Ok(z.powf(p))
    }
}
