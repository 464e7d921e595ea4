use rayon::prelude::*;
use serde::Serialize;

use super::Path;
use crate::error::{invalid, Error, Result};
use crate::CVector;

/// Result of a max-oscillation log–log fit.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HolderEstimate {
    /// Fitted exponent: slope of `ln M(δ)` against `ln δ`.
    pub alpha: f64,
    /// RMS deviation of the points from the fitted line.
    pub fit_residual: f64,
    /// `(smallest δ, largest δ)`.
    pub delta_range: (f64, f64),
    /// `(δ, M(δ))` pairs in the order given.
    pub oscillations: Vec<(f64, f64)>,
}

/// Estimates the Hölder exponent of `p` from the growth of
/// `M(δ) = max_t ‖p(t+δ) − p(t)‖` over `sample_count` equispaced times.
///
/// Sampled paths are probed at nodes of `[a, b]` and every δ must be a
/// multiple of the step; analytic paths are probed over
/// `[lo, hi − δ_max]` of their (finite) domain.
pub fn estimate_holder(p: &Path, deltas: &[f64], sample_count: usize) -> Result<HolderEstimate> {
    if deltas.len() < 3 {
        return Err(invalid("deltas", format!("need at least 3 deltas, got {}", deltas.len())));
    }
    if deltas.iter().any(|d| !(*d > 0.0 && d.is_finite())) {
        return Err(invalid("deltas", "deltas must be positive and finite"));
    }
    if deltas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(invalid("deltas", "deltas must be strictly decreasing"));
    }
    if sample_count < 2 {
        return Err(invalid("sample_count", "need at least 2 sample times"));
    }

    let oscillations = match p.grid() {
        Some(grid) => {
            let n = grid.steps();
            let mut idx: Vec<usize> = (0..sample_count)
                .map(|j| grid.pad_steps() + ((j * n) as f64 / (sample_count - 1) as f64).round() as usize)
                .collect();
            idx.dedup();
            deltas
                .iter()
                .map(|&delta| {
                    let m = grid.epsilon_steps(delta)?;
                    let last = *idx.last().unwrap();
                    if last + m >= grid.len() {
                        let (lo, hi) = grid.domain();
                        return Err(Error::OutOfDomain { t: grid.node(last) + delta, lo, hi });
                    }
                    let osc = idx
                        .iter()
                        .map(|&k| distance(&p.at_node(k + m).unwrap(), &p.at_node(k).unwrap()))
                        .fold(0.0, f64::max);
                    Ok((delta, osc))
                })
                .collect::<Result<Vec<_>>>()?
        }
        None => {
            let (lo, hi) = p.domain();
            if !(lo.is_finite() && hi.is_finite()) {
                return Err(invalid("path", "analytic path needs a finite domain for Hölder estimation"));
            }
            let top = hi - deltas[0];
            if top <= lo {
                return Err(Error::OutOfDomain { t: lo + deltas[0], lo, hi });
            }
            let times: Vec<f64> =
                (0..sample_count).map(|j| lo + (top - lo) * j as f64 / (sample_count - 1) as f64).collect();
            deltas
                .iter()
                .map(|&delta| {
                    let osc = times
                        .par_iter()
                        .map(|&t| Ok(distance(&p.eval(t + delta)?, &p.eval(t)?)))
                        .collect::<Result<Vec<f64>>>()?
                        .into_iter()
                        .fold(0.0, f64::max);
                    Ok((delta, osc))
                })
                .collect::<Result<Vec<_>>>()?
        }
    };

    if let Some(&(delta, _)) = oscillations.iter().find(|(_, m)| *m <= 0.0) {
        return Err(Error::DegenerateOscillation { delta });
    }
    let xs: Vec<f64> = oscillations.iter().map(|(d, _)| d.ln()).collect();
    let ys: Vec<f64> = oscillations.iter().map(|(_, m)| m.ln()).collect();
    let (slope, fit_residual) = log_log_fit(&xs, &ys);
    Ok(HolderEstimate { alpha: slope, fit_residual, delta_range: (*deltas.last().unwrap(), deltas[0]), oscillations })
}

fn distance(x: &CVector, y: &CVector) -> f64 {
    x.iter().zip(y).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt()
}

/// Least-squares line; returns `(slope, rms residual)`.
pub(crate) fn log_log_fit(xs: &[f64], ys: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = xs.iter().zip(ys).map(|(x, y)| (y - intercept - slope * x).powi(2)).sum();
    (slope, (rss / n).sqrt())
}
