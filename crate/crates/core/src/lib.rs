//! Link-level models for reconfigurable-intelligent-surface (RIS) assisted
//! wireless links.
//!
//! The crate is organized bottom-up:
//!
//! - [`numerics`]: complex helpers, counter-based random streams, adaptive
//!   Gauss–Kronrod quadrature and binomial confidence intervals.
//! - [`geometry`]: deterministic path-loss models (LOS, two-ray, N-tile RIS
//!   on the ground plane, relay product channel) and exponent fitting.
//! - [`fading`]: Rayleigh realizations of the dual-hop RIS channel and the
//!   Gaussian (CLT) parameters of the composite amplitudes.
//! - [`link`]: instantaneous signal and SNR models for an RIS used as a
//!   reflector or as a transmitter, plus phase-control policies.
//! - [`sep`]: MGF-based symbol error probability integrals, bounds and
//!   asymptotic approximations.
//! - [`montecarlo`]: deterministic parallel Monte Carlo estimation of the
//!   same error probabilities.

// `!(x > 0.0)` style checks are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod fading;
pub mod geometry;
pub mod link;
pub mod montecarlo;
pub mod numerics;
pub mod sep;

pub use error::{Error, Result};
pub use numerics::Complex;

/// Which role the surface plays in the link.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RisMode {
    /// Source → RIS → destination, both hops Rayleigh faded.
    Reflector,
    /// A nearby feeder illuminates the RIS, which encodes data in its phases.
    Transmitter,
}

impl RisMode {
    pub fn as_str(self) -> &'static str {
        match self {
            RisMode::Reflector => "reflector",
            RisMode::Transmitter => "transmitter",
        }
    }
}

impl std::fmt::Display for RisMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for RisMode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "reflector" => Ok(RisMode::Reflector),
            "transmitter" => Ok(RisMode::Transmitter),
            other => Err(Error::invalid(format!(
                "unknown RIS mode `{other}` (expected reflector|transmitter)"
            ))),
        }
    }
}

/// Converts a decibel value to a linear power ratio.
pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// Converts a linear power ratio to decibels.
pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}
