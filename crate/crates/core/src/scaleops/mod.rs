//! The ε-scale derivative and the operators built on it.
//!
//! For `ε > 0` the one-sided quotients are
//! `Δ⁺f(t) = (f(t+ε) − f(t))/ε` and `Δ⁻f(t) = (f(t) − f(t−ε))/ε`, and the
//! ε-scale derivative is
//!
//! ```text
//! □_ε f(t) = ½[(Δ⁺f + Δ⁻f) + iμ(Δ⁺f − Δ⁻f)],   μ ∈ {1, −1, 0, i, −i}
//! ```
//!
//! applied componentwise. On sampled paths ε must be a whole number of grid
//! steps so every quotient uses stored samples only.

mod composite;
mod extrapolate;
mod integral;

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{invalid, Error, Result};
use crate::funcspace::{Path, Sign, TimeGrid};
use crate::CVector;

pub use composite::{composite_scale_derivative, quadratic_term, ScalarField};
pub use extrapolate::{default_epsilons, quantum_derivative, ExtrapolationReport, DEFAULT_TOLERANCE};
pub use integral::{barrow_defect, quantum_integral};

/// The admissible values of μ.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Mu {
    #[serde(rename = "1")]
    One,
    #[serde(rename = "-1")]
    MinusOne,
    #[serde(rename = "0")]
    Zero,
    #[serde(rename = "i")]
    I,
    #[serde(rename = "-i")]
    MinusI,
}

impl Mu {
    pub const ALL: [Mu; 5] = [Mu::One, Mu::MinusOne, Mu::Zero, Mu::I, Mu::MinusI];

    pub fn value(self) -> Complex64 {
        match self {
            Mu::One => Complex64::new(1.0, 0.0),
            Mu::MinusOne => Complex64::new(-1.0, 0.0),
            Mu::Zero => Complex64::new(0.0, 0.0),
            Mu::I => Complex64::new(0.0, 1.0),
            Mu::MinusI => Complex64::new(0.0, -1.0),
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Mu::One => "1",
            Mu::MinusOne => "-1",
            Mu::Zero => "0",
            Mu::I => "i",
            Mu::MinusI => "-i",
        }
    }
}

impl fmt::Display for Mu {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mu {
    type Err = Error;

    fn from_str(s: &str) -> Result<Mu> {
        Mu::ALL
            .into_iter()
            .find(|m| m.as_str() == s.trim())
            .ok_or_else(|| invalid("mu", format!("expected one of 1, -1, 0, i, -i; got `{s}`")))
    }
}

/// The pair (ε, μ) selecting an ε-scale derivative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ScaleParams {
    epsilon: f64,
    mu: Mu,
}

impl ScaleParams {
    pub fn new(epsilon: f64, mu: Mu) -> Result<Self> {
        if !(epsilon > 0.0 && epsilon.is_finite()) {
            return Err(invalid("epsilon", format!("need epsilon > 0, got {epsilon}")));
        }
        Ok(Self { epsilon, mu })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }

    pub fn mu(&self) -> Mu {
        self.mu
    }

    pub fn with_epsilon(self, epsilon: f64) -> Result<Self> {
        Self::new(epsilon, self.mu)
    }
}

/// `½[(Δ⁺ + Δ⁻) + iμ(Δ⁺ − Δ⁻)]` for one component.
#[inline]
pub fn combine(forward: Complex64, backward: Complex64, mu: Mu) -> Complex64 {
    let imu = Complex64::i() * mu.value();
    ((forward + backward) + imu * (forward - backward)) * 0.5
}

/// Values of `p` at `t` and `t ± ε` (whichever sides are requested).
fn stencil(p: &Path, epsilon: f64, t: f64, plus: bool, minus: bool) -> Result<[Option<CVector>; 3]> {
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(invalid("epsilon", format!("need epsilon > 0, got {epsilon}")));
    }
    match p.grid() {
        Some(grid) => {
            let m = grid.epsilon_steps(epsilon)?;
            let k = grid.index_of(t)?;
            let (lo, hi) = grid.domain();
            let at = |j: Option<usize>, reach: f64| {
                j.filter(|j| *j < grid.len()).and_then(|j| p.at_node(j)).ok_or(Error::OutOfDomain {
                    t: t + reach,
                    lo,
                    hi,
                })
            };
            Ok([
                if minus { Some(at(k.checked_sub(m), -epsilon)?) } else { None },
                Some(at(Some(k), 0.0)?),
                if plus { Some(at(Some(k + m), epsilon)?) } else { None },
            ])
        }
        None => Ok([
            if minus { Some(p.eval(t - epsilon)?) } else { None },
            Some(p.eval(t)?),
            if plus { Some(p.eval(t + epsilon)?) } else { None },
        ]),
    }
}

fn quotient(hi: &CVector, lo: &CVector, epsilon: f64) -> CVector {
    hi.iter().zip(lo).map(|(a, b)| (a - b) / epsilon).collect()
}

/// The one-sided quotient `Δ_ε^σ p(t)`.
pub fn delta(p: &Path, epsilon: f64, sigma: Sign, t: f64) -> Result<CVector> {
    let [m, c, pl] = stencil(p, epsilon, t, sigma == Sign::Plus, sigma == Sign::Minus)?;
    let c = c.unwrap();
    Ok(match sigma {
        Sign::Plus => quotient(&pl.unwrap(), &c, epsilon),
        Sign::Minus => quotient(&c, &m.unwrap(), epsilon),
    })
}

/// Both quotients `(Δ⁺p(t), Δ⁻p(t))` from one stencil.
pub fn deltas(p: &Path, epsilon: f64, t: f64) -> Result<(CVector, CVector)> {
    let [m, c, pl] = stencil(p, epsilon, t, true, true)?;
    let c = c.unwrap();
    Ok((quotient(&pl.unwrap(), &c, epsilon), quotient(&c, &m.unwrap(), epsilon)))
}

/// The ε-scale derivative `□_ε p(t)`, componentwise.
pub fn scale_derivative(p: &Path, sp: ScaleParams, t: f64) -> Result<CVector> {
    let (fwd, bwd) = deltas(p, sp.epsilon, t)?;
    Ok(fwd.iter().zip(&bwd).map(|(f, b)| combine(*f, *b, sp.mu)).collect())
}

/// `□_ε` of one sampled series at indices `lo..=hi`, with ε spanning `m`
/// steps.
pub(crate) fn scale_series(
    values: &[Complex64],
    m: usize,
    sp: ScaleParams,
    range: std::ops::RangeInclusive<usize>,
) -> Vec<Complex64> {
    range
        .map(|k| {
            let fwd = (values[k + m] - values[k]) / sp.epsilon;
            let bwd = (values[k] - values[k - m]) / sp.epsilon;
            combine(fwd, bwd, sp.mu)
        })
        .collect()
}

/// `□_ε p` sampled on `grid` with the padding reduced by ε on each side.
///
/// Sampled paths must live on `grid` and ε must be a multiple of its step.
/// Analytic paths are evaluated at `t ± ε` directly; the padding is then
/// reduced by ε rounded up to whole steps.
pub fn scale_derivative_extended(p: &Path, sp: ScaleParams, grid: &TimeGrid) -> Result<Path> {
    grid.require_pad(sp.epsilon)?;
    let label = format!("box[{}]", p.label());
    match p.columns() {
        Some(columns) => {
            if p.grid() != Some(grid) {
                return Err(Error::GridMismatch);
            }
            let m = grid.epsilon_steps(sp.epsilon)?;
            let out_grid = grid.shrink(m)?;
            let range = m..=grid.len() - 1 - m;
            let cols = columns.iter().map(|c| scale_series(c, m, sp, range.clone())).collect();
            Ok(Path::from_columns_unchecked(out_grid, label, cols))
        }
        None => {
            let m = (sp.epsilon / grid.step() - 1e-9).ceil().max(1.0) as usize;
            let out_grid = grid.shrink(m)?;
            let rows = out_grid.nodes().map(|t| scale_derivative(p, sp, t)).collect::<Result<Vec<_>>>()?;
            Path::sampled(out_grid, label, rows)
        }
    }
}

/// `□_ε p` sampled at every node of `[a, b]`.
pub fn scale_derivative_path(p: &Path, sp: ScaleParams, grid: &TimeGrid) -> Result<Path> {
    scale_derivative_extended(p, sp, grid)?.trim_pad(0)
}

/// Cross term `(ε/2)[Δ⁺f·Δ⁺g(1+iμ) − Δ⁻f·Δ⁻g(1−iμ)]` of the finite-ε
/// product rule for scalar paths.
pub fn leibniz_cross_term(f: &Path, g: &Path, sp: ScaleParams, t: f64) -> Result<Complex64> {
    let (fp, fm) = deltas(f, sp.epsilon, t)?;
    let (gp, gm) = deltas(g, sp.epsilon, t)?;
    Ok(cross(fp[0], fm[0], gp[0], gm[0], sp))
}

pub(crate) fn cross(fp: Complex64, fm: Complex64, gp: Complex64, gm: Complex64, sp: ScaleParams) -> Complex64 {
    let imu = Complex64::i() * sp.mu.value();
    let one = Complex64::new(1.0, 0.0);
    (fp * gp * (one + imu) - fm * gm * (one - imu)) * (sp.epsilon / 2.0)
}

/// Finite-ε product-rule defect `□_ε(fg) − (□_ε f·g + f·□_ε g)` for scalar
/// paths.
pub fn leibniz_defect(f: &Path, g: &Path, sp: ScaleParams, t: f64) -> Result<Complex64> {
    if f.dim() != 1 || g.dim() != 1 {
        return Err(Error::DimensionMismatch { expected: 1, got: f.dim().max(g.dim()) });
    }
    let [fm, fc, fp] = stencil(f, sp.epsilon, t, true, true)?;
    let [gm, gc, gp] = stencil(g, sp.epsilon, t, true, true)?;
    let (fm, fc, fp) = (fm.unwrap()[0], fc.unwrap()[0], fp.unwrap()[0]);
    let (gm, gc, gp) = (gm.unwrap()[0], gc.unwrap()[0], gp.unwrap()[0]);
    let e = sp.epsilon;
    let product = combine((fp * gp - fc * gc) / e, (fc * gc - fm * gm) / e, sp.mu);
    let box_f = combine((fp - fc) / e, (fc - fm) / e, sp.mu);
    let box_g = combine((gp - gc) / e, (gc - gm) / e, sp.mu);
    Ok(product - (box_f * gc + fc * box_g))
}
