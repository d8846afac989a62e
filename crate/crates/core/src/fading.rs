//! Rayleigh fading realizations for the dual-hop RIS channel.
//!
//! Coefficients follow the convention `hᵢ = αᵢe^{−jθᵢ}`, `gᵢ = βᵢe^{−jψᵢ}`
//! (note the negative exponent), so co-phasing is literally `φᵢ = θᵢ + ψᵢ`.
//! Path loss is not part of the fading coefficients.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::{sample_standard_complex_gaussian, Complex, RngStream};
use crate::RisMode;

/// Number of tiles from which the Gaussian model of the composite
/// amplitude is trusted.
pub const CLT_TRUST_THRESHOLD: usize = 32;

/// Source→tile (`h`) and tile→destination (`g`) coefficients of one channel
/// use, each `CN(0, 1)` and i.i.d. across tiles.
#[derive(Debug, Clone, PartialEq)]
pub struct FadingRealization {
    h: Vec<Complex>,
    g: Vec<Complex>,
}

impl FadingRealization {
    pub fn new(h: Vec<Complex>, g: Vec<Complex>) -> Result<Self> {
        if h.is_empty() {
            return Err(Error::invalid("a realization needs at least one tile"));
        }
        if h.len() != g.len() {
            return Err(Error::invalid(format!(
                "h has {} tiles but g has {}",
                h.len(),
                g.len()
            )));
        }
        Ok(FadingRealization { h, g })
    }

    pub fn len(&self) -> usize {
        self.h.len()
    }

    pub fn is_empty(&self) -> bool {
        self.h.is_empty()
    }

    pub fn h(&self) -> &[Complex] {
        &self.h
    }

    pub fn g(&self) -> &[Complex] {
        &self.g
    }

    pub fn alpha(&self, i: usize) -> f64 {
        self.h[i].norm()
    }

    pub fn theta(&self, i: usize) -> f64 {
        -self.h[i].arg()
    }

    pub fn beta(&self, i: usize) -> f64 {
        self.g[i].norm()
    }

    pub fn psi(&self, i: usize) -> f64 {
        -self.g[i].arg()
    }

    /// `A = Σ αᵢβᵢ`, the co-phased reflector amplitude.
    pub fn reflector_amplitude(&self) -> f64 {
        self.h
            .iter()
            .zip(&self.g)
            .map(|(h, g)| h.norm() * g.norm())
            .sum()
    }

    /// `B = Σ βᵢ`, the co-phased transmitter amplitude.
    pub fn transmitter_amplitude(&self) -> f64 {
        self.g.iter().map(|g| g.norm()).sum()
    }
}

/// Draws `2n` independent `CN(0, 1)` coefficients: `h₁…hₙ` then `g₁…gₙ`.
pub fn draw_realization(stream: &mut RngStream, n: usize) -> Result<FadingRealization> {
    if n == 0 {
        return Err(Error::invalid("tile count must be at least 1"));
    }
    let h = (0..n).map(|_| sample_standard_complex_gaussian(stream)).collect();
    let g = (0..n).map(|_| sample_standard_complex_gaussian(stream)).collect();
    Ok(FadingRealization { h, g })
}

/// Gaussian approximation of `A` (reflector) or `B` (transmitter).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CltParameters {
    pub mean: f64,
    pub variance: f64,
    pub mode: RisMode,
}

impl CltParameters {
    /// Whether `n` is large enough for the Gaussian model to be trusted.
    pub fn trusted(n: usize) -> bool {
        n >= CLT_TRUST_THRESHOLD
    }
}

/// Mean and variance of the composite amplitude for `n` tiles.
///
/// Each `αᵢβᵢ` has mean `π/4` and variance `1 − π²/16`; each `βᵢ` has mean
/// `√π/2` and variance `(4 − π)/4`.
pub fn clt_parameters(n: usize, mode: RisMode) -> Result<CltParameters> {
    if n == 0 {
        return Err(Error::invalid("tile count must be at least 1"));
    }
    let n = n as f64;
    let (mean, variance) = match mode {
        RisMode::Reflector => (n * PI / 4.0, n * (1.0 - PI * PI / 16.0)),
        RisMode::Transmitter => (n * PI.sqrt() / 2.0, n * (4.0 - PI) / 4.0),
    };
    Ok(CltParameters {
        mean,
        variance,
        mode,
    })
}
