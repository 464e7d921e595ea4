//! Quadrature rules shared by the operator modules.

use num_complex::Complex64;

/// Composite trapezoid rule over uniformly spaced samples.
///
/// Returns zero for fewer than two samples.
pub fn trapezoid(samples: &[Complex64], step: f64) -> Complex64 {
    match samples {
        [] | [_] => Complex64::new(0.0, 0.0),
        [first, inner @ .., last] => {
            let interior: Complex64 = inner.iter().sum();
            (interior + (first + last) * 0.5) * step
        }
    }
}

/// Composite Simpson rule of `f` over `[lo, hi]` with `panels` panels
/// (rounded up to an even count). `hi < lo` gives the signed integral.
pub fn simpson<F>(f: F, lo: f64, hi: f64, panels: usize) -> Complex64
where
    F: Fn(f64) -> Complex64,
{
    let panels = (panels.max(2) + 1) & !1;
    let step = (hi - lo) / panels as f64;
    let mut acc = f(lo) + f(hi);
    for k in 1..panels {
        let w = if k % 2 == 1 { 4.0 } else { 2.0 };
        acc += f(lo + k as f64 * step) * w;
    }
    acc * (step / 3.0)
}
