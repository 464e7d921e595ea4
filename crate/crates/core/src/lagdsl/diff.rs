use super::ast::{Expr, Func, Var};
use super::ExprError;

impl Expr {
    /// Exact symbolic partial derivative with respect to `var`, with
    /// constant folding and `0`/`1` identities applied.
    ///
    /// `abs2` and `conj` are not holomorphic; differentiating through them
    /// is only allowed with respect to the real variable `t`.
    pub fn diff(&self, var: Var) -> Result<Expr, ExprError> {
        Ok(match self {
            Expr::Const(_) | Expr::Param(_) => Expr::real(0.0),
            Expr::Var(w) => Expr::real(if *w == var { 1.0 } else { 0.0 }),
            Expr::Neg(x) => -x.diff(var)?,
            Expr::Add(a, b) => a.diff(var)? + b.diff(var)?,
            Expr::Sub(a, b) => a.diff(var)? - b.diff(var)?,
            Expr::Mul(a, b) => a.diff(var)? * (**b).clone() + (**a).clone() * b.diff(var)?,
            Expr::Div(a, b) => {
                let (da, db) = (a.diff(var)?, b.diff(var)?);
                if db.is_zero() {
                    da / (**b).clone()
                } else {
                    (da * (**b).clone() - (**a).clone() * db) / (**b).clone().powf(2.0)
                }
            }
            Expr::Pow(x, p) => {
                let dx = x.diff(var)?;
                if dx.is_zero() {
                    return Ok(Expr::real(0.0));
                }
                Expr::real(*p) * (**x).clone().powf(p - 1.0) * dx
            }
            Expr::Call(f, x) => {
                let dx = x.diff(var)?;
                if dx.is_zero() {
                    return Ok(Expr::real(0.0));
                }
                let u = (**x).clone();
                match f {
                    Func::Sin => Expr::call(Func::Cos, u) * dx,
                    Func::Cos => -Expr::call(Func::Sin, u) * dx,
                    Func::Exp => Expr::call(Func::Exp, u) * dx,
                    Func::Ln => dx / u,
                    Func::Sqrt => dx / (Expr::real(2.0) * Expr::call(Func::Sqrt, u)),
                    Func::Abs2 | Func::Conj if var != Var::T => {
                        return Err(ExprError::NonHolomorphic { func: f.name(), var: var.to_string() })
                    }
                    Func::Abs2 => u.clone() * Expr::call(Func::Conj, dx.clone()) + Expr::call(Func::Conj, u) * dx,
                    Func::Conj => Expr::call(Func::Conj, dx),
                }
            }
        })
    }
}
