//! Time grids, paths, nondifferentiable test functions and Hölder
//! diagnostics.

mod grid;
mod holder;
mod mean;
mod path;
mod weierstrass;

pub use grid::TimeGrid;
pub(crate) use holder::log_log_fit;
pub use holder::{estimate_holder, HolderEstimate};
pub use mean::{mean_function, MEAN_PANELS};
pub(crate) use path::is_finite;
pub use path::Path;
pub use weierstrass::weierstrass;

/// Side of a one-sided difference quotient.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }
}
