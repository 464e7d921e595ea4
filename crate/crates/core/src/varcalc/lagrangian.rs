use num_complex::Complex64;

use crate::error::{invalid, Result};
use crate::lagdsl::{parse, Bindings, Expr, Params, Var};

/// A Lagrangian `L(t, q, v)` with its partial derivatives
/// `∂₁L = ∂L/∂t`, `∂₂L = ∇_q L` and `∂₃L = ∇_v L`.
#[derive(Debug, Clone)]
pub struct LagrangianSpec {
    pub lagrangian: Expr,
    pub dl_dt: Expr,
    pub grad_q: Vec<Expr>,
    pub grad_v: Vec<Expr>,
    pub params: Params,
}

impl LagrangianSpec {
    pub fn new(lagrangian: Expr, dim: usize, params: Params) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dim", "dimension must be positive"));
        }
        let grad_q = (0..dim).map(|k| lagrangian.diff(Var::Q(k))).collect::<Result<Vec<_>, _>>()?;
        let grad_v = (0..dim).map(|k| lagrangian.diff(Var::V(k))).collect::<Result<Vec<_>, _>>()?;
        Ok(Self { dl_dt: lagrangian.diff(Var::T)?, lagrangian, grad_q, grad_v, params })
    }

    /// Parses `text` over `t, q1..qd, v1..vd` and the names in `params`.
    pub fn parse(text: &str, dim: usize, params: Params) -> Result<Self> {
        let l = parse(text, dim, params.keys())?;
        Self::new(l, dim, params)
    }

    pub fn dim(&self) -> usize {
        self.grad_q.len()
    }

    pub(crate) fn bindings<'a>(&'a self, t: f64, q: &'a [Complex64], v: &'a [Complex64]) -> Bindings<'a> {
        Bindings::new(t, q, v, &self.params)
    }

    /// `∂₃L · v`.
    pub(crate) fn momentum_dot(&self, b: &Bindings<'_>) -> Result<Complex64> {
        let mut acc = Complex64::new(0.0, 0.0);
        for (p, v) in self.grad_v.iter().zip(b.v) {
            acc += p.eval(b)? * v;
        }
        Ok(acc)
    }
}

/// Default group-parameter step for the invariance derivative.
pub const DEFAULT_S_STEP: f64 = 1e-4;

/// Infinitesimal generators `t̄ = t + sτ(t,q)`, `q̄ = q + sξ(t,q)`.
#[derive(Debug, Clone)]
pub struct SymmetrySpec {
    pub tau: Expr,
    pub xi: Vec<Expr>,
    pub s_step: f64,
}

impl SymmetrySpec {
    pub fn new(tau: Expr, xi: Vec<Expr>, s_step: f64) -> Result<Self> {
        let no_velocity = |v: Var| !matches!(v, Var::V(_));
        tau.require_vars(no_velocity, "a symmetry generator")?;
        for x in &xi {
            x.require_vars(no_velocity, "a symmetry generator")?;
        }
        if xi.is_empty() {
            return Err(invalid("xi", "need one generator component per dimension"));
        }
        if !(s_step > 0.0 && s_step <= 0.1) {
            return Err(invalid("s_step", format!("need 0 < s_step <= 0.1, got {s_step}")));
        }
        Ok(Self { tau, xi, s_step })
    }

    pub fn parse<S: AsRef<str>>(tau: &str, xi: &[S], dim: usize, params: &Params, s_step: f64) -> Result<Self> {
        if xi.len() != dim {
            return Err(crate::Error::DimensionMismatch { expected: dim, got: xi.len() });
        }
        let tau = parse(tau, dim, params.keys())?;
        let xi = xi.iter().map(|x| parse(x.as_ref(), dim, params.keys())).collect::<Result<Vec<_>, _>>()?;
        Self::new(tau, xi, s_step)
    }

    pub fn dim(&self) -> usize {
        self.xi.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn partials_of_oscillator() {
        let lg = LagrangianSpec::parse("0.5*v1^2 - 0.5*q1^2", 1, Params::new()).unwrap();
        assert!(lg.dl_dt.is_zero());
        assert_eq!(lg.grad_v[0], Expr::Var(Var::V(0)));
        assert_eq!(lg.grad_q[0].to_string(), "-q1");
    }

    #[test]
    fn symmetry_validation() {
        let p = Params::new();
        assert!(SymmetrySpec::parse("1", &["0"], 1, &p, 1e-4).is_ok());
        assert!(SymmetrySpec::parse("v1", &["0"], 1, &p, 1e-4).is_err());
        assert!(SymmetrySpec::parse("1", &["0"], 1, &p, 0.5).is_err());
        assert!(SymmetrySpec::parse("1", &["0", "0"], 1, &p, 1e-4).is_err());
    }
}
