//! Scalar numerical building blocks shared by the densities, solvers and
//! estimators.

pub mod normal;
pub mod quadrature;
pub mod rng;

pub use quadrature::{adaptive_simpson, bisect_increasing, golden_section_max, Quadrature};
