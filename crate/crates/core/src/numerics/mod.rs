//! Numeric substrate shared by every model in the crate.

mod complex;
mod quadrature;
mod rng;
mod stats;

pub use complex::{from_polar, Complex};
pub use quadrature::{integrate, integrate_with, QuadratureResult, DEFAULT_MAX_SUBDIVISIONS};
pub use rng::{sample_standard_complex_gaussian, RngStream};
pub use stats::{binomial_ci, normal_quantile, ConfidenceInterval};
