use super::{scale_derivative_path, ScaleParams};
use crate::error::{Error, Result};
use crate::funcspace::{Path, TimeGrid};
use crate::quadrature::trapezoid;
use crate::CVector;

/// Trapezoid integral over `[a, b]` of a sampled derivative path.
///
/// `dp` may carry padding, but must cover the same `[a, b]` with the same
/// step as `grid`.
pub fn quantum_integral(dp: &Path, grid: &TimeGrid) -> Result<CVector> {
    let own = dp.grid().ok_or(Error::NotSampled)?;
    if own.a() != grid.a() || own.b() != grid.b() || own.steps() != grid.steps() {
        return Err(Error::GridMismatch);
    }
    let core = own.core();
    Ok((0..dp.dim()).map(|k| trapezoid(&dp.column(k).unwrap()[core.clone()], grid.step())).collect())
}

/// `∫_a^b □_ε p dt − (p(b) − p(a))`: how far the finite-ε quantum integral
/// is from the endpoint difference.
pub fn barrow_defect(p: &Path, sp: ScaleParams, grid: &TimeGrid) -> Result<CVector> {
    let integral = quantum_integral(&scale_derivative_path(p, sp, grid)?, grid)?;
    let (pa, pb) = match p.grid() {
        Some(_) => (p.eval(grid.a())?, p.eval(grid.b())?),
        None => (p.eval(grid.a())?, p.eval(grid.b())?),
    };
    Ok(integral.iter().zip(pb.iter().zip(&pa)).map(|(i, (b, a))| i - (b - a)).collect())
}
