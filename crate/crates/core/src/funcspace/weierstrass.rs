use std::f64::consts::PI;

use num_complex::Complex64;

use super::Path;
use crate::error::{invalid, Result};

/// Truncated Weierstrass function `t ↦ Σ_{n=0}^{N} a^n cos(b^n π t)`.
///
/// `N` is the smallest index whose geometric tail bound `a^{N+1}/(1-a)` drops
/// below `trunc_tol`, so the truncation error is uniformly below `trunc_tol`.
/// The returned path carries the exponent `-ln a / ln b` as metadata.
pub fn weierstrass(a_coef: f64, b_base: f64, trunc_tol: f64) -> Result<Path> {
    if !(a_coef > 0.0 && a_coef < 1.0) {
        return Err(invalid("a_coef", format!("need 0 < a < 1, got {a_coef}")));
    }
    if !(b_base > 1.0 && b_base.is_finite()) {
        return Err(invalid("b_base", format!("need b > 1, got {b_base}")));
    }
    if a_coef * b_base < 1.0 {
        return Err(invalid("a_coef", format!("need a*b >= 1, got {}", a_coef * b_base)));
    }
    if !(trunc_tol > 0.0) {
        return Err(invalid("trunc_tol", format!("need a positive tolerance, got {trunc_tol}")));
    }

    let terms = truncation_order(a_coef, trunc_tol) + 1;
    let coeffs: Vec<(f64, f64)> = (0..terms).map(|n| (a_coef.powi(n as i32), b_base.powi(n as i32) * PI)).collect();
    let alpha = -a_coef.ln() / b_base.ln();
    let label = format!("weierstrass(a={a_coef}, b={b_base})");
    let path = Path::analytic(1, label, move |t| {
        let sum: f64 = coeffs.iter().map(|&(amp, freq)| amp * (freq * t).cos()).sum();
        vec![Complex64::new(sum, 0.0)]
    });
    Ok(path.with_holder_exponent(alpha))
}

/// Smallest `N` with `a^{N+1} / (1 - a) < tol`.
pub(crate) fn truncation_order(a: f64, tol: f64) -> usize {
    let mut n = 0;
    while a.powi(n as i32 + 1) / (1.0 - a) >= tol {
        n += 1;
    }
    n
}
