//! Wavefunction-induced complex velocity fields.
//!
//! A solution `Ψ` of `iℏ ∂Ψ/∂t + (ℏ²/2m) ΔΨ = UΨ` defines the velocity
//! field `−2iγ ∇Ψ/Ψ` with `γ = ℏ/2m`. Trajectories of that field are
//! complex, and along them the Lagrangian `½m v² − U` has the energy
//! `L − ∂₃L·v` as a constant of motion.

use std::f64::consts::PI;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{invalid, Error, Result};
use crate::funcspace::{is_finite, Path, TimeGrid};
use crate::lagdsl::{parse, Bindings, Expr, Params, Var};
use crate::scaleops::ScaleParams;
use crate::varcalc::{noether_constant, LagrangianSpec, NoetherReport, ResidualReport, SymmetrySpec, DEFAULT_S_STEP};
use crate::CVector;

/// `|Ψ|` below this is treated as a node of the wavefunction.
pub const PSI_FLOOR: f64 = 1e-12;

/// `|q|` above this aborts trajectory integration.
pub const DIVERGENCE_BOUND: f64 = 1e6;

#[derive(Debug, Clone)]
pub struct SchrodingerProblem {
    psi: Expr,
    potential: Expr,
    hbar: f64,
    m: f64,
    gamma: f64,
    params: Params,
    dpsi_dt: Expr,
    grad_psi: Vec<Expr>,
    second_psi: Vec<Expr>,
}

impl SchrodingerProblem {
    pub fn new(psi: Expr, potential: Expr, dim: usize, hbar: f64, m: f64, params: Params) -> Result<Self> {
        if dim == 0 {
            return Err(invalid("dim", "dimension must be positive"));
        }
        if !(hbar > 0.0 && hbar.is_finite()) {
            return Err(invalid("hbar", format!("need hbar > 0, got {hbar}")));
        }
        if !(m > 0.0 && m.is_finite()) {
            return Err(invalid("m", format!("need m > 0, got {m}")));
        }
        psi.require_vars(|v| !matches!(v, Var::V(_)), "a wavefunction")?;
        potential.require_vars(|v| matches!(v, Var::Q(_)), "a potential")?;
        let grad_psi = (0..dim).map(|k| psi.diff(Var::Q(k))).collect::<Result<Vec<_>, _>>()?;
        let second_psi = grad_psi.iter().enumerate().map(|(k, g)| g.diff(Var::Q(k))).collect::<Result<Vec<_>, _>>()?;
        Ok(Self {
            dpsi_dt: psi.diff(Var::T)?,
            psi,
            potential,
            hbar,
            m,
            gamma: hbar / (2.0 * m),
            params,
            grad_psi,
            second_psi,
        })
    }

    pub fn parse(psi: &str, potential: &str, dim: usize, hbar: f64, m: f64, params: Params) -> Result<Self> {
        let psi = parse(psi, dim, params.keys())?;
        let potential = parse(potential, dim, params.keys())?;
        Self::new(psi, potential, dim, hbar, m, params)
    }

    pub fn dim(&self) -> usize {
        self.grad_psi.len()
    }

    pub fn hbar(&self) -> f64 {
        self.hbar
    }

    pub fn mass(&self) -> f64 {
        self.m
    }

    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    pub fn psi(&self) -> &Expr {
        &self.psi
    }

    pub fn potential(&self) -> &Expr {
        &self.potential
    }

    fn bind<'a>(&'a self, t: f64, q: &'a [Complex64]) -> Result<Bindings<'a>> {
        if q.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: q.len() });
        }
        Ok(Bindings::new(t, q, &[], &self.params))
    }

    fn psi_at(&self, b: &Bindings<'_>, t: f64) -> Result<Complex64> {
        let psi = self.psi.eval(b)?;
        if psi.norm() < PSI_FLOOR {
            return Err(Error::WavefunctionZero { t, modulus: psi.norm() });
        }
        Ok(psi)
    }

    /// `∂ ln Ψ/∂q_k` in quotient form.
    fn log_gradient(&self, t: f64, q: &[Complex64]) -> Result<CVector> {
        let b = self.bind(t, q)?;
        let psi = self.psi_at(&b, t)?;
        self.grad_psi.iter().map(|g| Ok(g.eval(&b)? / psi)).collect()
    }

    /// `iℏ ∂Ψ/∂t + (ℏ²/2m) ΔΨ − UΨ` at one point.
    pub fn residual_at(&self, t: f64, q: &[Complex64]) -> Result<Complex64> {
        let b = self.bind(t, q)?;
        let psi = self.psi_at(&b, t)?;
        let mut lap = Complex64::new(0.0, 0.0);
        for s in &self.second_psi {
            lap += s.eval(&b)?;
        }
        let kinetic = self.hbar * self.hbar / (2.0 * self.m);
        Ok(Complex64::i() * self.hbar * self.dpsi_dt.eval(&b)? + lap * kinetic - self.potential.eval(&b)? * psi)
    }

    /// Residual of the Schrödinger equation on the lattice `t_nodes × q_nodes`.
    ///
    /// The `l2` entry is the root mean square over the lattice points.
    pub fn schrodinger_residual(&self, t_nodes: &[f64], q_nodes: &[CVector]) -> Result<ResidualReport> {
        let points: Vec<(f64, &CVector)> = t_nodes.iter().flat_map(|&t| q_nodes.iter().map(move |q| (t, q))).collect();
        let residuals =
            points.par_iter().map(|(t, q)| Ok(vec![self.residual_at(*t, q)?])).collect::<Result<Vec<_>>>()?;
        let weight = 1.0 / points.len().max(1) as f64;
        Ok(ResidualReport::from_samples(points.iter().map(|p| p.0).collect(), residuals, weight))
    }

    /// `−2iγ (∂Ψ/∂q_k)/Ψ`, componentwise.
    pub fn velocity_field(&self, t: f64, q: &[Complex64]) -> Result<CVector> {
        let scale = Complex64::new(0.0, -2.0 * self.gamma);
        Ok(self.log_gradient(t, q)?.into_iter().map(|g| scale * g).collect())
    }

    /// Integrates `dq/dt = velocity_field(t, q)` with classical RK4 over
    /// every node of `grid`, starting from `q(a) = q0` and stepping both
    /// forwards and backwards through the padding.
    pub fn integrate_trajectory(&self, q0: &[Complex64], grid: &TimeGrid) -> Result<Trajectory> {
        if q0.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), got: q0.len() });
        }
        let start = grid.pad_steps();
        let mut rows = vec![Vec::new(); grid.len()];
        rows[start] = q0.to_vec();
        self.velocity_field(grid.node(start), q0)?;
        for k in start..grid.len() - 1 {
            rows[k + 1] = self.rk4_step(grid.node(k), &rows[k], grid.node(k + 1))?;
        }
        for k in (1..=start).rev() {
            rows[k - 1] = self.rk4_step(grid.node(k), &rows[k], grid.node(k - 1))?;
        }
        let path = Path::sampled(*grid, "trajectory", rows)?;
        Ok(Trajectory { q0: q0.to_vec(), path })
    }

    fn rk4_step(&self, t: f64, q: &[Complex64], t_next: f64) -> Result<CVector> {
        let h = t_next - t;
        let shifted = |k: &[Complex64], c: f64| -> CVector { q.iter().zip(k).map(|(q, k)| q + k * (c * h)).collect() };
        let k1 = self.velocity_field(t, q)?;
        let k2 = self.velocity_field(t + 0.5 * h, &shifted(&k1, 0.5))?;
        let k3 = self.velocity_field(t + 0.5 * h, &shifted(&k2, 0.5))?;
        let k4 = self.velocity_field(t_next, &shifted(&k3, 1.0))?;
        let next: CVector = (0..q.len()).map(|i| q[i] + (k1[i] + (k2[i] + k3[i]) * 2.0 + k4[i]) * (h / 6.0)).collect();
        let modulus = next.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
        if !(modulus <= DIVERGENCE_BOUND) || !next.iter().all(|z| is_finite(*z)) {
            return Err(Error::Divergence { t: t_next, modulus });
        }
        Ok(next)
    }

    /// The Lagrangian `½m Σ v_k² − U(q)`.
    pub fn lagrangian(&self) -> Result<LagrangianSpec> {
        let mut kinetic = Expr::real(0.0);
        for k in 0..self.dim() {
            kinetic = kinetic + Expr::var(Var::V(k)).powf(2.0);
        }
        let l = Expr::real(0.5 * self.m) * kinetic - self.potential.clone();
        LagrangianSpec::new(l, self.dim(), self.params.clone())
    }

    /// Both forms of the energy along a trajectory.
    ///
    /// `theorem` is `L − ∂₃L·□_ε q = −½m Σ(□_ε q_k)² − U` from time
    /// translation. `printed` is `2m(γ Σ ∂ln Ψ/∂q_k)² + U`, which differs
    /// from it in the sign of `U`.
    pub fn energy_constant(&self, traj: &Trajectory, sp: ScaleParams) -> Result<EnergyReport> {
        let lg = self.lagrangian()?;
        let sym = SymmetrySpec::new(Expr::real(1.0), vec![Expr::real(0.0); self.dim()], DEFAULT_S_STEP)?;
        let theorem = noether_constant(&lg, &traj.path, &sym, sp)?;
        let grid = traj.grid();
        let core = grid.core();
        let coef = 2.0 * self.m;
        let samples = core
            .clone()
            .into_par_iter()
            .map(|k| {
                let t = grid.node(k);
                let q = traj.path.at_node(k).expect("in range");
                let sum: Complex64 = self.log_gradient(t, &q)?.iter().sum();
                let g = sum * self.gamma;
                Ok(g * g * coef + self.potential.eval(&self.bind(t, &q)?)?)
            })
            .collect::<Result<Vec<_>>>()?;
        let printed = NoetherReport::from_samples(core.map(|k| grid.node(k)).collect(), samples);
        Ok(EnergyReport { theorem, printed })
    }
}

/// A trajectory of the velocity field, sampled on the integrator's grid.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub q0: CVector,
    pub path: Path,
}

impl Trajectory {
    pub fn grid(&self) -> &TimeGrid {
        self.path.grid().expect("trajectories are sampled")
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EnergyReport {
    pub theorem: NoetherReport,
    pub printed: NoetherReport,
}

/// `2mγ²` with `γ = ℏ/2m`.
pub fn energy_coefficient(hbar: f64, m: f64) -> f64 {
    let gamma = hbar / (2.0 * m);
    2.0 * m * gamma * gamma
}

/// `(1/8m)(h/π)²` with Planck's constant `h = 2πℏ`.
pub fn planck_energy_coefficient(h: f64, m: f64) -> f64 {
    (h / PI).powi(2) / (8.0 * m)
}
