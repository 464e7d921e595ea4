use num_complex::Complex64;
use serde::Serialize;

use crate::CVector;

/// Pointwise residual of an optimality condition.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResidualReport {
    pub node_times: Vec<f64>,
    /// Residual vector at each node.
    pub residuals: Vec<CVector>,
    /// Largest Euclidean norm over the nodes.
    pub max_abs: f64,
    /// `sqrt(w · Σ |r|²)` with `w` the quadrature weight (the grid step).
    pub l2: f64,
}

impl ResidualReport {
    pub fn from_samples(node_times: Vec<f64>, residuals: Vec<CVector>, weight: f64) -> Self {
        let norms: Vec<f64> = residuals.iter().map(|r| norm(r)).collect();
        let max_abs = norms.iter().copied().fold(0.0, f64::max);
        let l2 = (weight * norms.iter().map(|n| n * n).sum::<f64>()).sqrt();
        Self { node_times, residuals, max_abs, l2 }
    }
}

/// Samples of a candidate constant of motion along a path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NoetherReport {
    pub node_times: Vec<f64>,
    pub constant_samples: Vec<Complex64>,
    pub mean: Complex64,
    /// `max |C(t) − mean| / max(1, |mean|)`.
    pub drift: f64,
}

impl NoetherReport {
    pub fn from_samples(node_times: Vec<f64>, constant_samples: Vec<Complex64>) -> Self {
        let n = constant_samples.len().max(1) as f64;
        let mean = constant_samples.iter().sum::<Complex64>() / n;
        let spread = constant_samples.iter().map(|c| (c - mean).norm()).fold(0.0, f64::max);
        let drift = spread / mean.norm().max(1.0);
        Self { node_times, constant_samples, mean, drift }
    }
}

pub(crate) fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}
