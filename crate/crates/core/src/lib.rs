//! Numerical and symbolic toolkit for the scale (quantum) calculus of
//! nondifferentiable functions.
//!
//! The crate is organised bottom-up:
//!
//! * [`funcspace`]: time grids, analytic and sampled paths, Weierstrass test
//!   functions, Hölder exponent estimation and ε-mean functions.
//! * [`scaleops`]: the ε-left/right quotients, the ε-scale derivative `□_ε`,
//!   extrapolation of `□_ε` as ε → 0, the quantum integral and the composite
//!   (chain-rule) scale derivative.
//! * [`lagdsl`]: a small expression language with complex evaluation and
//!   symbolic differentiation, used for Lagrangians, potentials,
//!   wavefunctions and symmetry generators.
//! * [`varcalc`]: functionals, Euler–Lagrange and DuBois–Reymond residuals,
//!   invariance checks and Noether constants of motion.
//! * [`schrodinger`]: wavefunction-induced complex velocity fields, RK4
//!   trajectories and the energy constant along them.

// Float checks are written `!(x > 0.0)` on purpose so that NaN fails them.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod funcspace;
pub mod lagdsl;
pub mod quadrature;
pub mod scaleops;
pub mod schrodinger;
pub mod varcalc;

pub use error::{Error, Result};
pub use funcspace::{HolderEstimate, Path, TimeGrid};
pub use lagdsl::{Bindings, Expr, ExprError, Var};
pub use num_complex::Complex64;
pub use scaleops::{ExtrapolationReport, Mu, ScaleParams};
pub use schrodinger::{EnergyReport, SchrodingerProblem, Trajectory};
pub use varcalc::{LagrangianSpec, NoetherReport, ResidualReport, SymmetrySpec};

/// A complex vector, one entry per path component.
pub type CVector = Vec<Complex64>;
