use num_complex::Complex64;

use super::{Path, Sign};
use crate::error::{invalid, Error, Result};
use crate::quadrature::simpson;

/// Simpson panels used for each ε-mean evaluation.
pub const MEAN_PANELS: usize = 64;

/// The ε-mean function `t ↦ (σ/ε) ∫_t^{t+σε} p(s) ds`.
///
/// Its classical derivative is the one-sided quotient `Δ_ε^σ p`. The result
/// is analytic, with the domain of `p` shrunk by ε on the side the integral
/// reaches into.
pub fn mean_function(p: &Path, epsilon: f64, sigma: Sign) -> Result<Path> {
    if p.is_sampled() {
        return Err(Error::NotAnalytic);
    }
    if !(epsilon > 0.0 && epsilon.is_finite()) {
        return Err(invalid("epsilon", format!("need epsilon > 0, got {epsilon}")));
    }
    let (lo, hi) = p.domain();
    let domain = match sigma {
        Sign::Plus => (lo, hi - epsilon),
        Sign::Minus => (lo + epsilon, hi),
    };
    let src = p.clone();
    let dim = p.dim();
    let s = sigma.value();
    let mean = Path::analytic(dim, format!("mean[{}]", p.label()), move |t| {
        (0..dim)
            .map(|k| {
                let integral = simpson(
                    |u| src.eval(u).map(|v| v[k]).unwrap_or(Complex64::new(f64::NAN, f64::NAN)),
                    t,
                    t + s * epsilon,
                    MEAN_PANELS,
                );
                integral * (s / epsilon)
            })
            .collect()
    });
    if domain.0.is_finite() || domain.1.is_finite() {
        if !(domain.0 < domain.1) {
            return Err(Error::OutOfDomain { t: domain.0, lo, hi });
        }
        return mean.with_domain(domain.0, domain.1);
    }
    Ok(mean)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_mean_is_constant() {
        let p = Path::real("c", |_| 2.5);
        for sigma in [Sign::Plus, Sign::Minus] {
            let m = mean_function(&p, 0.1, sigma).unwrap();
            assert!((m.eval(0.3).unwrap()[0].re - 2.5).abs() < 1e-14);
        }
    }

    #[test]
    fn linear_forward_mean() {
        let m = mean_function(&Path::real("t", |t| t), 0.1, Sign::Plus).unwrap();
        for t in [0.0, 0.4, 1.0] {
            assert!((m.eval(t).unwrap()[0].re - (t + 0.05)).abs() < 1e-14);
        }
    }

    #[test]
    fn quadratic_backward_mean() {
        let m = mean_function(&Path::real("t^2", |t| t * t), 0.1, Sign::Minus).unwrap();
        let expected = (1.0 - 0.729) / 3.0 / 0.1;
        assert!((m.eval(1.0).unwrap()[0].re - expected).abs() < 1e-13);
        assert!((expected - 0.903_333_333_333_333_3).abs() < 1e-12);
    }

    #[test]
    fn mean_domain_shrinks() {
        let p = Path::real("t", |t| t).with_domain(0.0, 1.0).unwrap();
        let fwd = mean_function(&p, 0.1, Sign::Plus).unwrap();
        assert!(fwd.eval(0.95).is_err());
        let bwd = mean_function(&p, 0.1, Sign::Minus).unwrap();
        assert!(bwd.eval(0.05).is_err());
        assert!(bwd.eval(0.95).is_ok());
    }

    #[test]
    fn sampled_input_rejected() {
        let g = crate::TimeGrid::new(0.0, 1.0, 10, 0.0).unwrap();
        let p = Path::real("t", |t| t).sample(&g).unwrap();
        assert!(matches!(mean_function(&p, 0.1, Sign::Plus), Err(Error::NotAnalytic)));
    }
}
