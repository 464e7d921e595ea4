use num_complex::Complex64;
use rayon::prelude::*;

use super::lagrangian::{LagrangianSpec, SymmetrySpec};
use super::report::{NoetherReport, ResidualReport};
use crate::error::{Error, Result};
use crate::funcspace::{Path, TimeGrid};
use crate::lagdsl::{Bindings, Expr};
use crate::quadrature::trapezoid;
use crate::scaleops::{scale_derivative_extended, ScaleParams};
use crate::CVector;

/// Below this modulus `1 + s□τ` is treated as singular.
const SINGULAR_JACOBIAN: f64 = 1e-6;

/// A sampled path together with its scale derivative, both on the grid
/// shrunk by ε.
struct Along {
    grid: TimeGrid,
    q: Vec<CVector>,
    v: Vec<CVector>,
}

impl Along {
    fn new(p: &Path, dim: usize, sp: ScaleParams, pad_multiple: usize) -> Result<(Self, usize)> {
        let grid = *p.grid().ok_or(Error::NotSampled)?;
        if p.dim() != dim {
            return Err(Error::DimensionMismatch { expected: dim, got: p.dim() });
        }
        let m = grid.epsilon_steps(sp.epsilon())?;
        grid.require_pad(pad_multiple as f64 * sp.epsilon())?;
        let vpath = scale_derivative_extended(p, sp, &grid)?;
        let rows = p.rows().expect("sampled");
        let q = rows[m..rows.len() - m].to_vec();
        let v = vpath.rows().expect("sampled");
        Ok((Self { grid: *vpath.grid().expect("sampled"), q, v }, m))
    }

    fn bind<'a>(&'a self, lg: &'a LagrangianSpec, j: usize) -> Bindings<'a> {
        lg.bindings(self.grid.node(j), &self.q[j], &self.v[j])
    }

    /// Evaluates `f` at the given node indices in parallel, in order.
    fn map<T, F>(&self, range: std::ops::RangeInclusive<usize>, f: F) -> Result<Vec<T>>
    where
        T: Send,
        F: Fn(usize) -> Result<T> + Sync + Send,
    {
        range.into_par_iter().map(f).collect()
    }
}

fn eval_all(exprs: &[Expr], b: &Bindings<'_>) -> Result<CVector> {
    exprs.iter().map(|e| e.eval(b).map_err(Error::from)).collect()
}

fn times(grid: &TimeGrid, range: std::ops::RangeInclusive<usize>) -> Vec<f64> {
    range.map(|j| grid.node(j)).collect()
}

/// `L(t, q, □_ε q)` at the nodes of `[a, b]`.
pub fn functional_integrand(lg: &LagrangianSpec, p: &Path, sp: ScaleParams) -> Result<(Vec<f64>, Vec<Complex64>)> {
    let (along, _) = Along::new(p, lg.dim(), sp, 1)?;
    let core = along.grid.core();
    let values = along.map(core.clone(), |j| Ok(lg.lagrangian.eval(&along.bind(lg, j))?))?;
    Ok((times(&along.grid, core), values))
}

/// `∫_a^b L(t, q, □_ε q) dt` by the trapezoid rule over the nodes of `[a, b]`.
pub fn evaluate_functional(lg: &LagrangianSpec, p: &Path, sp: ScaleParams) -> Result<Complex64> {
    let (_, values) = functional_integrand(lg, p, sp)?;
    Ok(trapezoid(&values, p.grid().ok_or(Error::NotSampled)?.step()))
}

/// `∂₂L − □_ε ∂₃L` along `p`, on `[a + ε, b − ε]`.
pub fn euler_lagrange_residual(lg: &LagrangianSpec, p: &Path, sp: ScaleParams) -> Result<ResidualReport> {
    let (along, m) = Along::new(p, lg.dim(), sp, 2)?;
    let g1 = along.grid;
    let momentum = along.map(0..=g1.len() - 1, |j| eval_all(&lg.grad_v, &along.bind(lg, j)))?;
    let momentum = Path::sampled(g1, "momentum", momentum)?;
    let box_momentum = scale_derivative_extended(&momentum, sp, &g1)?;
    let g2 = *box_momentum.grid().expect("sampled");
    let window = g2.interior(m);
    let residuals = along.map(window.clone(), |i| {
        let dq = eval_all(&lg.grad_q, &along.bind(lg, i + m))?;
        let dp = box_momentum.at_node(i).expect("in range");
        Ok(dq.iter().zip(&dp).map(|(a, b)| a - b).collect())
    })?;
    Ok(ResidualReport::from_samples(times(&g2, window), residuals, g2.step()))
}

/// `□_ε(L − ∂₃L·v) − ∂₁L` along `p`, on `[a + ε, b − ε]`.
pub fn dubois_reymond_residual(lg: &LagrangianSpec, p: &Path, sp: ScaleParams) -> Result<ResidualReport> {
    let (along, m) = Along::new(p, lg.dim(), sp, 2)?;
    let g1 = along.grid;
    let energy = along.map(0..=g1.len() - 1, |j| {
        let b = along.bind(lg, j);
        Ok(vec![lg.lagrangian.eval(&b)? - lg.momentum_dot(&b)?])
    })?;
    let energy = Path::sampled(g1, "energy", energy)?;
    let box_energy = scale_derivative_extended(&energy, sp, &g1)?;
    let g2 = *box_energy.grid().expect("sampled");
    let window = g2.interior(m);
    let residuals = along.map(window.clone(), |i| {
        let dt = lg.dl_dt.eval(&along.bind(lg, i + m))?;
        Ok(vec![box_energy.at_node(i).expect("in range")[0] - dt])
    })?;
    Ok(ResidualReport::from_samples(times(&g2, window), residuals, g2.step()))
}

/// Generators evaluated along `p`, and their scale derivatives, on the
/// shrunk grid.
struct Generators {
    tau: Vec<Complex64>,
    xi: Vec<CVector>,
    box_tau: Vec<Complex64>,
    box_xi: Vec<CVector>,
}

fn generators(sym: &SymmetrySpec, lg: &LagrangianSpec, p: &Path, sp: ScaleParams, m: usize) -> Result<Generators> {
    let grid = *p.grid().ok_or(Error::NotSampled)?;
    if sym.dim() != p.dim() {
        return Err(Error::DimensionMismatch { expected: p.dim(), got: sym.dim() });
    }
    let rows = p.rows().expect("sampled");
    let composite = (0..grid.len())
        .into_par_iter()
        .map(|k| {
            let b = lg.bindings(grid.node(k), &rows[k], &[]);
            let mut out = Vec::with_capacity(sym.dim() + 1);
            out.push(sym.tau.eval(&b)?);
            for x in &sym.xi {
                out.push(x.eval(&b)?);
            }
            Ok(out)
        })
        .collect::<Result<Vec<_>>>()?;
    let composite = Path::sampled(grid, "generators", composite)?;
    let boxed = scale_derivative_extended(&composite, sp, &grid)?;
    let inner = composite.rows().expect("sampled");
    let inner = &inner[m..inner.len() - m];
    let boxed = boxed.rows().expect("sampled");
    Ok(Generators {
        tau: inner.iter().map(|r| r[0]).collect(),
        xi: inner.iter().map(|r| r[1..].to_vec()).collect(),
        box_tau: boxed.iter().map(|r| r[0]).collect(),
        box_xi: boxed.iter().map(|r| r[1..].to_vec()).collect(),
    })
}

/// `I(s) = ∫ L[t + sτ, q + sξ, (v + s□ξ)/(1 + s□τ)](1 + s□τ) dt`.
fn transformed_functional(lg: &LagrangianSpec, along: &Along, gens: &Generators, s: f64) -> Result<Complex64> {
    let integrand = along.map(along.grid.core(), |j| {
        let t = along.grid.node(j);
        let jac = Complex64::new(1.0, 0.0) + gens.box_tau[j] * s;
        if jac.norm() < SINGULAR_JACOBIAN {
            return Err(Error::SingularTransform { t });
        }
        let q: CVector = along.q[j].iter().zip(&gens.xi[j]).map(|(q, x)| q + x * s).collect();
        let v: CVector = along.v[j].iter().zip(&gens.box_xi[j]).map(|(v, x)| (v + x * s) / jac).collect();
        let b = Bindings { t: Complex64::new(t, 0.0) + gens.tau[j] * s, q: &q, v: &v, params: &lg.params };
        Ok(lg.lagrangian.eval(&b)? * jac)
    })?;
    Ok(trapezoid(&integrand, along.grid.step()))
}

/// Central difference in `s` of the transformed functional at `s = 0`.
pub fn invariance_derivative(lg: &LagrangianSpec, p: &Path, sym: &SymmetrySpec, sp: ScaleParams) -> Result<Complex64> {
    let (along, m) = Along::new(p, lg.dim(), sp, 1)?;
    let gens = generators(sym, lg, p, sp, m)?;
    let s = sym.s_step;
    let plus = transformed_functional(lg, &along, &gens, s)?;
    let minus = transformed_functional(lg, &along, &gens, -s)?;
    Ok((plus - minus) / (2.0 * s))
}

/// The integrand `∂₁L·τ + ∂₂L·ξ + ∂₃L·(□ξ − v□τ) + L□τ` at the nodes of
/// `[a, b]`.
pub fn invariance_integrand(
    lg: &LagrangianSpec,
    p: &Path,
    sym: &SymmetrySpec,
    sp: ScaleParams,
) -> Result<(Vec<f64>, Vec<Complex64>)> {
    let (along, m) = Along::new(p, lg.dim(), sp, 1)?;
    let gens = generators(sym, lg, p, sp, m)?;
    let core = along.grid.core();
    let values = along.map(core.clone(), |j| {
        let b = along.bind(lg, j);
        let mut acc = lg.dl_dt.eval(&b)? * gens.tau[j] + lg.lagrangian.eval(&b)? * gens.box_tau[j];
        for k in 0..lg.dim() {
            acc += lg.grad_q[k].eval(&b)? * gens.xi[j][k];
            acc += lg.grad_v[k].eval(&b)? * (gens.box_xi[j][k] - along.v[j][k] * gens.box_tau[j]);
        }
        Ok(acc)
    })?;
    Ok((times(&along.grid, core), values))
}

/// Trapezoid quadrature of [`invariance_integrand`] over `[a, b]`.
pub fn invariance_integrand_integral(
    lg: &LagrangianSpec,
    p: &Path,
    sym: &SymmetrySpec,
    sp: ScaleParams,
) -> Result<Complex64> {
    let (_, values) = invariance_integrand(lg, p, sym, sp)?;
    let step = p.grid().ok_or(Error::NotSampled)?.step();
    Ok(trapezoid(&values, step))
}

/// Samples `C = ∂₃L·ξ + (L − ∂₃L·v)τ` at the nodes of `[a, b]`.
pub fn noether_constant(lg: &LagrangianSpec, p: &Path, sym: &SymmetrySpec, sp: ScaleParams) -> Result<NoetherReport> {
    let (along, m) = Along::new(p, lg.dim(), sp, 1)?;
    let gens = generators(sym, lg, p, sp, m)?;
    let core = along.grid.core();
    let samples = along.map(core.clone(), |j| {
        let b = along.bind(lg, j);
        let momentum = eval_all(&lg.grad_v, &b)?;
        let mut c = Complex64::new(0.0, 0.0);
        let mut pv = Complex64::new(0.0, 0.0);
        for ((p, xi), v) in momentum.iter().zip(&gens.xi[j]).zip(&along.v[j]) {
            c += p * xi;
            pv += p * v;
        }
        Ok(c + (lg.lagrangian.eval(&b)? - pv) * gens.tau[j])
    })?;
    Ok(NoetherReport::from_samples(times(&along.grid, core), samples))
}
