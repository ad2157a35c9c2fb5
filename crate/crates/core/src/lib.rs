//! Numerical laboratory for the one-phase supercooled Stefan problem in its
//! probabilistic form `X = X_0 + B - Lambda`, `Lambda_t = P(tau <= t)`.

pub mod bounds;
pub mod cli;
pub mod conditions;
pub mod densities;
pub mod error;
pub mod numerics;
pub mod solver;

pub use densities::{Density, DensitySpec};
pub use error::{Error, Result};
