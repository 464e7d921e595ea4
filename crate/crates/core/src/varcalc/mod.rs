//! Scale calculus of variations.
//!
//! Every operation takes a sampled path `q` on a padded grid, computes
//! `v = □_ε q` on the grid shrunk by ε, and evaluates the Lagrangian along
//! `(t, q(t), v(t))`. Operations that apply `□_ε` a second time (the
//! Euler–Lagrange and DuBois–Reymond residuals) need a padding of 2ε and
//! report on `[a + ε, b − ε]`.

mod lagrangian;
mod ops;
mod report;

pub use lagrangian::{LagrangianSpec, SymmetrySpec, DEFAULT_S_STEP};
pub use ops::{
    dubois_reymond_residual, euler_lagrange_residual, evaluate_functional, functional_integrand, invariance_derivative,
    invariance_integrand, invariance_integrand_integral, noether_constant,
};
pub use report::{NoetherReport, ResidualReport};
