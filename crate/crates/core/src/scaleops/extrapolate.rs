use num_complex::Complex64;
use serde::Serialize;

use super::{scale_derivative, Mu, ScaleParams};
use crate::error::{invalid, Result};
use crate::funcspace::{log_log_fit, Path};
use crate::CVector;

/// Default convergence tolerance for [`quantum_derivative`].
pub const DEFAULT_TOLERANCE: f64 = 1e-8;

/// The default sweep `ε_k = 1e−2 · 2^{−k}`, `k = 0..7`.
pub fn default_epsilons() -> Vec<f64> {
    (0..8).map(|k| 1e-2 * 0.5f64.powi(k)).collect()
}

/// ε-sweep of `□_ε p(t)` with its extrapolated ε → 0 limit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExtrapolationReport {
    pub epsilons: Vec<f64>,
    pub values: Vec<CVector>,
    pub limit_estimate: CVector,
    /// Slope of `ln |v_k − v_{k−1}|` against `ln ε_k`; `None` when some
    /// successive difference vanishes.
    pub convergence_rate: Option<f64>,
    pub converged: bool,
    pub tolerance: f64,
}

/// Extracts the ε-independent part of `□_ε p(t)` by extrapolating an
/// ε-sweep to zero.
///
/// The sweep is fed through a Neville tableau in ε (polynomial extrapolation
/// to ε = 0), two levels deep: the first level removes the term linear in ε
/// that μ ≠ 0 introduces, the second the quadratic term left by the
/// symmetric quotient. The estimate is converged when the last two
/// second-level values agree to `tolerance` in every component. Paths without
/// a classical derivative do not settle and come back with
/// `converged == false`; their raw values are then the result.
pub fn quantum_derivative(p: &Path, mu: Mu, epsilons: &[f64], tolerance: f64, t: f64) -> Result<ExtrapolationReport> {
    if epsilons.len() < 4 {
        return Err(invalid("epsilons", format!("need at least 4 values, got {}", epsilons.len())));
    }
    if epsilons.iter().any(|e| !(*e > 0.0 && e.is_finite())) || epsilons.windows(2).any(|w| w[1] >= w[0]) {
        return Err(invalid("epsilons", "epsilons must be positive and strictly decreasing"));
    }
    if !(tolerance > 0.0) {
        return Err(invalid("tolerance", format!("need a positive tolerance, got {tolerance}")));
    }

    let values =
        epsilons.iter().map(|&eps| scale_derivative(p, ScaleParams::new(eps, mu)?, t)).collect::<Result<Vec<_>>>()?;

    let first = neville_level(epsilons, &values, 1);
    let second = neville_level(epsilons, &first, 2);
    let n = second.len();
    let limit_estimate = second[n - 1].clone();
    let converged = second[n - 1].iter().zip(&second[n - 2]).all(|(a, b)| (a - b).norm() < tolerance);

    let diffs: Vec<f64> = values.windows(2).map(|w| distance(&w[1], &w[0])).collect();
    let convergence_rate = if diffs.iter().all(|d| *d > 0.0) {
        let xs: Vec<f64> = epsilons[1..].iter().map(|e| e.ln()).collect();
        let ys: Vec<f64> = diffs.iter().map(|d| d.ln()).collect();
        Some(log_log_fit(&xs, &ys).0)
    } else {
        None
    };

    Ok(ExtrapolationReport {
        epsilons: epsilons.to_vec(),
        values,
        limit_estimate,
        convergence_rate,
        converged,
        tolerance,
    })
}

/// One level of the Neville tableau for extrapolation to ε = 0:
/// `P_k = (ε_{k−lvl} P'_k − ε_k P'_{k−1}) / (ε_{k−lvl} − ε_k)`, where `prev`
/// holds the previous level aligned to the tail of `eps`.
fn neville_level(eps: &[f64], prev: &[CVector], level: usize) -> Vec<CVector> {
    let offset = eps.len() - prev.len();
    (1..prev.len())
        .map(|j| {
            let k = j + offset;
            let (far, near) = (eps[k - level], eps[k]);
            prev[j]
                .iter()
                .zip(&prev[j - 1])
                .map(|(cur, old)| (cur * far - old * near) / Complex64::new(far - near, 0.0))
                .collect()
        })
        .collect()
}

fn distance(a: &CVector, b: &CVector) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>().sqrt()
}
