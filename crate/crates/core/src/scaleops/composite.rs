use num_complex::Complex64;

use super::{deltas, scale_derivative, ScaleParams};
use crate::error::{Error, Result};
use crate::funcspace::Path;
use crate::lagdsl::{Bindings, Expr, Params, Var};

/// Finite-ε second-order correction
/// `a_{k,j} = (ε/2)[Δ⁺x_k·Δ⁺x_j(1+iμ) − Δ⁻x_k·Δ⁻x_j(1−iμ)]` at `t`.
///
/// Indices are zero-based.
pub fn quadratic_term(p: &Path, sp: ScaleParams, k: usize, j: usize, t: f64) -> Result<Complex64> {
    let d = p.dim();
    if k >= d || j >= d {
        return Err(Error::DimensionMismatch { expected: d, got: k.max(j) + 1 });
    }
    let (fwd, bwd) = deltas(p, sp.epsilon(), t)?;
    Ok(super::cross(fwd[k], bwd[k], fwd[j], bwd[j], sp))
}

/// A scalar field `f(x, t)` on `ℂ^d × ℝ` with its symbolic partial
/// derivatives up to the Hessian in `x`. The field variable `x_k` is written
/// `q<k+1>` in expression text.
#[derive(Debug, Clone)]
pub struct ScalarField {
    pub expr: Expr,
    pub dt: Expr,
    pub grad: Vec<Expr>,
    pub hessian: Vec<Vec<Expr>>,
    pub params: Params,
}

impl ScalarField {
    pub fn new(expr: Expr, dim: usize, params: Params) -> Result<Self> {
        expr.require_vars(|v| !matches!(v, Var::V(_)), "a scalar field")?;
        let grad = (0..dim).map(|k| expr.diff(Var::Q(k))).collect::<Result<Vec<_>, _>>()?;
        let hessian = grad
            .iter()
            .map(|g| (0..dim).map(|j| g.diff(Var::Q(j))).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Self { dt: expr.diff(Var::T)?, expr, grad, hessian, params })
    }

    pub fn dim(&self) -> usize {
        self.grad.len()
    }

    pub fn eval(&self, x: &[Complex64], t: f64) -> Result<Complex64> {
        Ok(self.expr.eval(&Bindings::new(t, x, &[], &self.params))?)
    }
}

/// Chain rule for the ε-scale derivative of `t ↦ f(x(t), t)`:
///
/// ```text
/// ∂f/∂t + ∇_x f · □_ε x + Σ_{k,j} ½ ∂²f/∂x_k∂x_j · a_{k,j}
/// ```
///
/// with every derivative of `f` evaluated at `(x(t), t)`. For `f` quadratic
/// in `x` and affine in `t` this equals the direct ε-scale derivative of the
/// composite exactly.
pub fn composite_scale_derivative(f: &ScalarField, p: &Path, sp: ScaleParams, t: f64) -> Result<Complex64> {
    if f.dim() != p.dim() {
        return Err(Error::DimensionMismatch { expected: f.dim(), got: p.dim() });
    }
    let x = p.eval(t)?;
    let bx = scale_derivative(p, sp, t)?;
    let b = Bindings::new(t, &x, &[], &f.params);
    let mut total = f.dt.eval(&b)?;
    for (g, v) in f.grad.iter().zip(&bx) {
        total += g.eval(&b)? * v;
    }
    for (k, row) in f.hessian.iter().enumerate() {
        for (j, h) in row.iter().enumerate() {
            if h.is_zero() {
                continue;
            }
            total += h.eval(&b)? * quadratic_term(p, sp, k, j, t)? * 0.5;
        }
    }
    Ok(total)
}
