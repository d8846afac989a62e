//! Deterministic link budgets: free-space LOS, two-ray ground reflection,
//! an N-tile RIS coating the ground plane, and the relay/backscatter
//! product channel.
//!
//! All models assume unit-gain antennas and narrowband signals. Powers are
//! in watts and lengths in meters.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numerics::{from_polar, Complex};
use crate::linear_to_db;

/// Speed of light in vacuum, m/s.
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Transmitter/receiver placement above a flat ground plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoRayGeometry {
    h_t: f64,
    h_r: f64,
    d: f64,
    lambda: f64,
}

impl TwoRayGeometry {
    /// `h_t`, `h_r`: antenna heights; `d`: horizontal separation;
    /// `lambda`: wavelength. All must be positive and finite.
    pub fn new(h_t: f64, h_r: f64, d: f64, lambda: f64) -> Result<Self> {
        for (name, v) in [("h_t", h_t), ("h_r", h_r), ("d", d), ("lambda", lambda)] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        Ok(TwoRayGeometry { h_t, h_r, d, lambda })
    }

    pub fn h_t(&self) -> f64 {
        self.h_t
    }

    pub fn h_r(&self) -> f64 {
        self.h_r
    }

    pub fn d(&self) -> f64 {
        self.d
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Direct (LOS) path length `l`.
    pub fn los_length(&self) -> f64 {
        self.d.hypot(self.h_t - self.h_r)
    }

    /// Horizontal distance from the transmitter to the specular point.
    ///
    /// Found with the image method: mirror the receiver below the ground and
    /// intersect the straight line with the ground plane.
    pub fn reflection_point(&self) -> f64 {
        self.d * self.h_t / (self.h_t + self.h_r)
    }

    /// Transmitter → specular point and specular point → receiver lengths.
    pub fn reflected_legs(&self) -> (f64, f64) {
        let x = self.reflection_point();
        (x.hypot(self.h_t), (self.d - x).hypot(self.h_r))
    }

    /// Total specular path `r₁ + r₂`, the distance to the image receiver.
    pub fn reflected_length(&self) -> f64 {
        self.d.hypot(self.h_t + self.h_r)
    }

    /// Excess length of the reflected path over the LOS path.
    pub fn excess_length(&self) -> f64 {
        // (a² - b²)/(a + b) avoids cancellation when both paths are nearly equal.
        let sum = self.h_t + self.h_r;
        let diff = self.h_t - self.h_r;
        (sum * sum - diff * diff) / (self.reflected_length() + self.los_length())
    }

    /// Relative delay τ of the reflected ray, seconds.
    pub fn relative_delay(&self) -> f64 {
        self.excess_length() / SPEED_OF_LIGHT
    }

    /// `τ · bandwidth`; the narrowband model requires this to be small.
    pub fn narrowband_ratio(&self, bandwidth_hz: f64) -> f64 {
        self.relative_delay() * bandwidth_hz
    }

    /// Phase difference Δφ between the reflected and LOS rays.
    pub fn phase_difference(&self) -> f64 {
        2.0 * PI * self.excess_length() / self.lambda
    }

    /// Same geometry at a new horizontal separation.
    pub fn with_distance(&self, d: f64) -> Result<Self> {
        TwoRayGeometry::new(self.h_t, self.h_r, d, self.lambda)
    }
}

/// One reconfigurable element of a ground-plane RIS.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tile {
    /// Total reflected path `r₁ᵢ + r₂ᵢ`.
    pub path_length: f64,
    /// Reflection coefficient `Rᵢ`, `|Rᵢ| ≤ 1`.
    pub reflection: Complex,
}

/// The tiles of an RIS laid on the ground.
///
/// An empty set is allowed and reduces every RIS model to the LOS ray.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct TileSet {
    tiles: Vec<Tile>,
}

impl TileSet {
    pub fn new(tiles: Vec<Tile>, geometry: &TwoRayGeometry) -> Result<Self> {
        let l = geometry.los_length();
        for (i, t) in tiles.iter().enumerate() {
            if !(t.path_length.is_finite() && t.path_length >= l) {
                return Err(Error::invalid(format!(
                    "tile {i}: path length {} is shorter than the LOS path {l}",
                    t.path_length
                )));
            }
            if !(t.reflection.norm() <= 1.0 + 1e-12) {
                return Err(Error::invalid(format!(
                    "tile {i}: |R| = {} exceeds 1",
                    t.reflection.norm()
                )));
            }
        }
        Ok(TileSet { tiles })
    }

    /// `n` far-field tiles sharing the specular path, each with reflection
    /// coefficient `reflection`.
    pub fn specular(geometry: &TwoRayGeometry, n: usize, reflection: Complex) -> Result<Self> {
        let tile = Tile {
            path_length: geometry.reflected_length(),
            reflection,
        };
        TileSet::new(vec![tile; n], geometry)
    }

    pub fn len(&self) -> usize {
        self.tiles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tiles.is_empty()
    }

    pub fn tiles(&self) -> &[Tile] {
        &self.tiles
    }

    /// Copy with new reflection coefficients, one per tile.
    pub fn with_reflections(&self, reflections: &[Complex]) -> Result<Self> {
        if reflections.len() != self.tiles.len() {
            return Err(Error::invalid(format!(
                "expected {} reflection coefficients, got {}",
                self.tiles.len(),
                reflections.len()
            )));
        }
        let tiles = self
            .tiles
            .iter()
            .zip(reflections)
            .map(|(t, &r)| Tile {
                reflection: r,
                ..*t
            })
            .collect();
        Ok(TileSet { tiles })
    }
}

/// How the RIS tiles are phased.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TilePhasing {
    /// Use each tile's reflection coefficient as given.
    Explicit,
    /// Co-phase every tile with the LOS ray (`Rᵢ = |Rᵢ|e^{jΔφᵢ}`) on the
    /// exact path lengths.
    OptimalExact,
    /// Co-phased tiles in the far field, `r₁ᵢ + r₂ᵢ ≈ l ≈ d`:
    /// `P_r = (1 + Σ|Rᵢ|)²·P_t·(λ/4πd)²`, i.e. `(N+1)²` times LOS for
    /// lossless tiles.
    Optimal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerResult {
    pub p_r: f64,
    pub p_t: f64,
    /// Received power relative to [`los_power`] at the same geometry, dB.
    pub gain_db: f64,
}

fn check_power(p_t: f64) -> Result<()> {
    if p_t.is_finite() && p_t >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("transmit power must be non-negative, got {p_t}")))
    }
}

fn friis(lambda: f64, distance: f64) -> f64 {
    let a = lambda / (4.0 * PI * distance);
    a * a
}

fn with_gain(p_t: f64, p_r: f64, geometry: &TwoRayGeometry) -> PowerResult {
    let los = p_t * friis(geometry.lambda, geometry.d);
    PowerResult {
        p_r,
        p_t,
        gain_db: linear_to_db(p_r / los),
    }
}

/// Free-space LOS power over the horizontal separation, `P_t(λ/4πd)²`.
pub fn los_power(p_t: f64, geometry: &TwoRayGeometry) -> Result<PowerResult> {
    check_power(p_t)?;
    let p_r = p_t * friis(geometry.lambda, geometry.d);
    Ok(PowerResult {
        p_r,
        p_t,
        gain_db: 0.0,
    })
}

/// LOS ray plus a single ground reflection with coefficient `reflection`.
pub fn two_ray_power(
    p_t: f64,
    geometry: &TwoRayGeometry,
    reflection: Complex,
) -> Result<PowerResult> {
    check_power(p_t)?;
    if !(reflection.norm() <= 1.0 + 1e-12) {
        return Err(Error::invalid(format!(
            "|R| = {} exceeds 1",
            reflection.norm()
        )));
    }
    let dphi = geometry.phase_difference();
    let field = Complex::new(1.0 / geometry.los_length(), 0.0)
        + reflection * from_polar(1.0, -dphi) / geometry.reflected_length();
    let k = geometry.lambda / (4.0 * PI);
    Ok(with_gain(p_t, p_t * k * k * field.norm_sqr(), geometry))
}

/// LOS ray plus the rays reflected by every RIS tile.
pub fn ris_ground_power(
    p_t: f64,
    geometry: &TwoRayGeometry,
    tiles: &TileSet,
    phasing: TilePhasing,
) -> Result<PowerResult> {
    check_power(p_t)?;
    let l = geometry.los_length();
    let lambda = geometry.lambda;

    if phasing == TilePhasing::Optimal {
        let amplitude = 1.0 + tiles.tiles().iter().map(|t| t.reflection.norm()).sum::<f64>();
        let p_r = amplitude * amplitude * p_t * friis(lambda, geometry.d);
        return Ok(with_gain(p_t, p_r, geometry));
    }

    let mut field = Complex::new(1.0 / l, 0.0);
    for t in tiles.tiles() {
        let dphi = 2.0 * PI * (t.path_length - l) / lambda;
        let r = match phasing {
            TilePhasing::Explicit => t.reflection,
            _ => from_polar(t.reflection.norm(), dphi),
        };
        field += r * from_polar(1.0, -dphi) / t.path_length;
    }
    let k = lambda / (4.0 * PI);
    Ok(with_gain(p_t, p_t * k * k * field.norm_sqr(), geometry))
}

/// Relay/backscatter product channel with two cascaded unit-gain free-space
/// hops, `P_t(λ/4π)⁴/(r₁²r₂²)`. The LOS path is ignored.
///
/// The `gain_db` field is relative to LOS over `r1 + r2`.
pub fn relay_power(p_t: f64, r1: f64, r2: f64, lambda: f64) -> Result<PowerResult> {
    check_power(p_t)?;
    for (name, v) in [("r1", r1), ("r2", r2), ("lambda", lambda)] {
        if !(v.is_finite() && v > 0.0) {
            return Err(Error::invalid(format!("{name} must be positive, got {v}")));
        }
    }
    let p_r = p_t * friis(lambda, r1) * friis(lambda, r2);
    let los = p_t * friis(lambda, r1 + r2);
    Ok(PowerResult {
        p_r,
        p_t,
        gain_db: linear_to_db(p_r / los),
    })
}

/// Least-squares slope of `ln p_r` against `ln d`.
pub fn fit_pathloss_exponent(points: &[(f64, f64)]) -> Result<f64> {
    if points.len() < 3 {
        return Err(Error::invalid(format!(
            "need at least 3 points to fit an exponent, got {}",
            points.len()
        )));
    }
    if let Some(&(d, p)) = points.iter().find(|(d, p)| !(*d > 0.0 && *p > 0.0)) {
        return Err(Error::invalid(format!(
            "distances and powers must be positive, got ({d}, {p})"
        )));
    }
    let n = points.len() as f64;
    let (sx, sy) = points
        .iter()
        .fold((0.0, 0.0), |(sx, sy), (d, p)| (sx + d.ln(), sy + p.ln()));
    let (mx, my) = (sx / n, sy / n);
    let (sxx, sxy) = points.iter().fold((0.0, 0.0), |(sxx, sxy), (d, p)| {
        let dx = d.ln() - mx;
        (sxx + dx * dx, sxy + dx * (p.ln() - my))
    });
    if sxx <= f64::EPSILON * n * (mx * mx).max(1.0) {
        return Err(Error::invalid("all distances are equal; slope is undefined"));
    }
    Ok(sxy / sxx)
}

/// `n` logarithmically spaced values from `start` to `stop` inclusive.
pub fn logspace(start: f64, stop: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![start],
        _ => {
            let (a, b) = (start.ln(), stop.ln());
            (0..n)
                .map(|i| (a + (b - a) * i as f64 / (n - 1) as f64).exp())
                .collect()
        }
    }
}
