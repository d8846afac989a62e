//! Average symbol error probability (SEP) of co-phased RIS links via the
//! moment generating function (MGF) of the instantaneous SNR.
//!
//! With the Gaussian (CLT) model of the composite amplitude, `γ` is a scaled
//! non-central chi-square variable with one degree of freedom:
//!
//! ```text
//! M_γ(s) = (1 − s·c₁)^{−1/2} · exp(s·c₂ / (1 − s·c₁))
//! ```
//!
//! where, with `ρ = E_s/N₀`,
//!
//! | mode        | `c₁`            | `c₂`          |
//! |-------------|-----------------|---------------|
//! | reflector   | `N(16 − π²)ρ/8` | `N²π²ρ/16`    |
//! | transmitter | `N(4 − π)ρ/2`   | `N²πρ/4`      |
//!
//! The SEP integrals only evaluate the MGF on the negative axis,
//! `M_γ(−k/sin²η)`. Rewritten as `√(t/(t + k·c₁))·exp(−k·c₂/(t + k·c₁))`
//! with `t = sin²η`, the integrand is finite everywhere and vanishes
//! linearly at `η = 0`, so plain adaptive quadrature on the closed interval
//! is enough.
//!
//! All SNR arguments are linear; dB only appears in [`SepPoint`] and
//! [`required_snr_db`].

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, PI};

use statrs::function::erf::erfc;

use crate::error::{Error, Result};
use crate::link::{qam_side, ModulationFamily};
use crate::numerics::integrate;
use crate::RisMode;

/// Relative tolerance of every SEP integral.
pub const DEFAULT_REL_TOL: f64 = 1e-10;

/// SEP values below this are reported as "below floor".
pub const SEP_FLOOR: f64 = 1e-12;

/// `N·E_s/N₀` below which the waterfall approximation is considered valid.
pub const WATERFALL_LIMIT: f64 = 1.0;

/// `N·E_s/N₀` above which the high-SNR approximation is considered valid.
pub const HIGH_SNR_LIMIT: f64 = 10.0;

/// MGF of the instantaneous SNR for one RIS configuration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MgfSpec {
    mode: RisMode,
    n: usize,
    es_over_n0: f64,
}

impl MgfSpec {
    pub fn new(mode: RisMode, n: usize, es_over_n0: f64) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("tile count must be at least 1"));
        }
        if !(es_over_n0.is_finite() && es_over_n0 > 0.0) {
            return Err(Error::invalid(format!(
                "E_s/N0 must be positive and finite, got {es_over_n0}"
            )));
        }
        Ok(MgfSpec {
            mode,
            n,
            es_over_n0,
        })
    }

    pub fn mode(&self) -> RisMode {
        self.mode
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn es_over_n0(&self) -> f64 {
        self.es_over_n0
    }

    /// `(c₁, c₂)`: twice the SNR-scaled variance and the squared SNR-scaled
    /// mean of the composite amplitude.
    fn coefficients(&self) -> (f64, f64) {
        let n = self.n as f64;
        let rho = self.es_over_n0;
        match self.mode {
            RisMode::Reflector => (n * (16.0 - PI * PI) * rho / 8.0, n * n * PI * PI * rho / 16.0),
            RisMode::Transmitter => (n * (4.0 - PI) * rho / 2.0, n * n * PI * rho / 4.0),
        }
    }

    /// Location of the pole on the positive real axis.
    pub fn pole(&self) -> f64 {
        1.0 / self.coefficients().0
    }

    /// Mean SNR, `M'_γ(0) = c₁/2 + c₂`.
    pub fn mean(&self) -> f64 {
        let (c1, c2) = self.coefficients();
        0.5 * c1 + c2
    }

    /// `M_γ(−k/t)` in a form that stays finite as `t → 0`.
    fn at_negative_ratio(&self, k: f64, t: f64) -> f64 {
        let (c1, c2) = self.coefficients();
        let denom = t + k * c1;
        (t / denom).sqrt() * (-k * c2 / denom).exp()
    }
}

/// Evaluates `M_γ(s)`.
pub fn mgf(spec: &MgfSpec, s: f64) -> Result<f64> {
    let (c1, c2) = spec.coefficients();
    let u = 1.0 - s * c1;
    if s.is_nan() || s >= 1.0 / c1 || u <= 0.0 {
        return Err(Error::MgfPole {
            s,
            pole: spec.pole(),
        });
    }
    if s == f64::NEG_INFINITY {
        return Ok(0.0);
    }
    Ok(u.powf(-0.5) * (s * c2 / u).exp())
}

/// How an SEP value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SepMethod {
    Exact,
    UpperBound,
    /// Bare exponential factor of the low-SNR approximation.
    Waterfall,
    /// Proportional form of the high-SNR approximation.
    HighSnr,
}

impl SepMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            SepMethod::Exact => "exact",
            SepMethod::UpperBound => "upper_bound",
            SepMethod::Waterfall => "waterfall",
            SepMethod::HighSnr => "high_snr",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SepPoint {
    pub snr_db: f64,
    pub pe: f64,
    pub method: SepMethod,
}

impl SepPoint {
    pub fn below_floor(&self) -> bool {
        self.pe < SEP_FLOOR
    }
}

/// Which asymptotic regime `N·E_s/N₀` falls into.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Regime {
    /// `N·E_s/N₀ < 1`: SEP governed by `exp(−c·N²·E_s/N₀)`.
    Waterfall,
    /// `1 ≤ N·E_s/N₀ ≤ 10`: neither approximation is reliable.
    Transition,
    /// `N·E_s/N₀ > 10`: slow `(E_s/N₀)^{−1/2}` decay.
    HighSnr,
}

impl Regime {
    pub fn classify(n: usize, es_over_n0: f64) -> Regime {
        let x = n as f64 * es_over_n0;
        if x < WATERFALL_LIMIT {
            Regime::Waterfall
        } else if x > HIGH_SNR_LIMIT {
            Regime::HighSnr
        } else {
            Regime::Transition
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Regime::Waterfall => "waterfall",
            Regime::Transition => "transition",
            Regime::HighSnr => "high_snr",
        }
    }
}

fn integrate_mgf(spec: &MgfSpec, k: f64, upper: f64) -> Result<f64> {
    let r = integrate(
        |eta: f64| {
            let s = eta.sin();
            spec.at_negative_ratio(k, s * s)
        },
        0.0,
        upper,
        DEFAULT_REL_TOL,
    )?;
    Ok(r.value)
}

fn check_order(m: usize) -> Result<()> {
    if m < 2 {
        Err(Error::invalid(format!(
            "modulation order must be at least 2, got {m}"
        )))
    } else {
        Ok(())
    }
}

/// `sin²(π/M)`, exact for `M = 2`.
fn psk_gain(m: usize) -> f64 {
    if m == 2 {
        1.0
    } else {
        (PI / m as f64).sin().powi(2)
    }
}

/// M-PSK SEP, `(1/π)∫₀^{(M−1)π/M} M_γ(−sin²(π/M)/sin²η) dη`.
pub fn sep_mpsk(spec: &MgfSpec, m: usize) -> Result<f64> {
    check_order(m)?;
    let upper = PI * (m as f64 - 1.0) / m as f64;
    Ok(integrate_mgf(spec, psk_gain(m), upper)? / PI)
}

/// Reflector-mode BPSK SEP (the `M = 2` case of [`sep_mpsk`]).
pub fn sep_bpsk_reflector(n: usize, es_over_n0: f64) -> Result<f64> {
    sep_mpsk(&MgfSpec::new(RisMode::Reflector, n, es_over_n0)?, 2)
}

/// Upper bound on the reflector BPSK SEP obtained at `η = π/2`:
/// `½·M_γ(−1)`.
pub fn sep_bpsk_ub(n: usize, es_over_n0: f64) -> Result<f64> {
    let spec = MgfSpec::new(RisMode::Reflector, n, es_over_n0)?;
    Ok(0.5 * spec.at_negative_ratio(1.0, 1.0))
}

/// Square M-QAM SEP:
/// `(4/π)(1 − 1/√M)∫₀^{π/2} M_γ(−g/sin²η)dη − (4/π)(1 − 1/√M)²∫₀^{π/4} M_γ(−g/sin²η)dη`
/// with `g = 3/(2(M − 1))`.
pub fn sep_mqam(spec: &MgfSpec, m: usize) -> Result<f64> {
    let (q, g) = qam_constants(m)?;
    let first = integrate_mgf(spec, g, FRAC_PI_2)?;
    let second = integrate_mgf(spec, g, FRAC_PI_4)?;
    Ok(4.0 / PI * q * first - 4.0 / PI * q * q * second)
}

/// Endpoint bound of [`sep_mqam`]: the first integrand taken at `η = π/2`
/// and the second at `η = π/4`.
pub fn sep_mqam_endpoint_bound(spec: &MgfSpec, m: usize) -> Result<f64> {
    let (q, g) = qam_constants(m)?;
    let first = FRAC_PI_2 * spec.at_negative_ratio(g, 1.0);
    let second = FRAC_PI_4 * spec.at_negative_ratio(g, 0.5);
    Ok(4.0 / PI * q * first - 4.0 / PI * q * q * second)
}

fn qam_constants(m: usize) -> Result<(f64, f64)> {
    let side = qam_side(m).ok_or_else(|| {
        Error::invalid(format!("QAM order must be a perfect square >= 4, got {m}"))
    })?;
    Ok((1.0 - 1.0 / side as f64, 3.0 / (2.0 * (m as f64 - 1.0))))
}

/// Transmitter-mode SEP: the M-PSK integral with the transmitter MGF
/// (binary signaling for `M = 2`).
pub fn sep_transmitter(n: usize, es_over_n0: f64, m: usize) -> Result<f64> {
    sep_mpsk(&MgfSpec::new(RisMode::Transmitter, n, es_over_n0)?, m)
}

/// Exact (CLT-model) SEP for any supported mode/family pair.
///
/// The transmitter mode only produces PSK constellations.
pub fn sep_exact(
    mode: RisMode,
    family: ModulationFamily,
    n: usize,
    es_over_n0: f64,
    m: usize,
) -> Result<f64> {
    let spec = MgfSpec::new(mode, n, es_over_n0)?;
    match (mode, family) {
        (_, ModulationFamily::Psk) => sep_mpsk(&spec, m),
        (RisMode::Reflector, ModulationFamily::Qam) => sep_mqam(&spec, m),
        (RisMode::Transmitter, ModulationFamily::Qam) => Err(Error::invalid(
            "the RIS transmitter encodes data in phases only; use psk",
        )),
    }
}

/// Endpoint (`η = π/2`) upper bound matching [`sep_exact`]:
/// `((M − 1)/M)·M_γ(−sin²(π/M))` for PSK and the endpoint bound for QAM.
pub fn sep_upper_bound(
    mode: RisMode,
    family: ModulationFamily,
    n: usize,
    es_over_n0: f64,
    m: usize,
) -> Result<f64> {
    let spec = MgfSpec::new(mode, n, es_over_n0)?;
    match (mode, family) {
        (_, ModulationFamily::Psk) => {
            check_order(m)?;
            Ok((m as f64 - 1.0) / m as f64 * spec.at_negative_ratio(psk_gain(m), 1.0))
        }
        (RisMode::Reflector, ModulationFamily::Qam) => sep_mqam_endpoint_bound(&spec, m),
        (RisMode::Transmitter, ModulationFamily::Qam) => Err(Error::invalid(
            "the RIS transmitter encodes data in phases only; use psk",
        )),
    }
}

/// Bare exponential factor of the low-SNR (waterfall) approximation.
///
/// | mode        | `M`   | factor                              |
/// |-------------|-------|-------------------------------------|
/// | reflector   | 2     | `exp(−N²π²ρ/16)`                    |
/// | reflector   | ≥ 4   | `exp(−3N²π²ρ/(32(M − 1)))` (QAM)    |
/// | transmitter | any   | `exp(−sin²(π/M)·N²πρ/4)`            |
///
/// The proportionality constants are not modeled; use the value for ratios
/// and SNR gaps only.
pub fn sep_waterfall_approx(mode: RisMode, n: usize, es_over_n0: f64, m: usize) -> Result<f64> {
    MgfSpec::new(mode, n, es_over_n0)?;
    check_order(m)?;
    let n = n as f64;
    let rho = es_over_n0;
    let exponent = match mode {
        RisMode::Reflector if m == 2 => n * n * PI * PI * rho / 16.0,
        RisMode::Reflector => {
            qam_constants(m)?;
            3.0 * n * n * PI * PI * rho / (32.0 * (m as f64 - 1.0))
        }
        RisMode::Transmitter => psk_gain(m) * n * n * PI * rho / 4.0,
    };
    Ok((-exponent).exp())
}

/// Proportional high-SNR form of the reflector BPSK SEP,
/// `(N(16 − π²)ρ/8)^{−1/2}·exp(−Nπ²/(2(16 − π²)))`.
pub fn sep_high_snr_approx_reflector(n: usize, es_over_n0: f64) -> Result<f64> {
    MgfSpec::new(RisMode::Reflector, n, es_over_n0)?;
    let n = n as f64;
    let c = 16.0 - PI * PI;
    Ok((n * c * es_over_n0 / 8.0).powf(-0.5) * (-n * PI * PI / (2.0 * c)).exp())
}

/// BPSK SEP over AWGN without fading, `Q(√(2ρ))`.
pub fn awgn_bpsk_sep(es_over_n0: f64) -> f64 {
    0.5 * erfc(es_over_n0.sqrt())
}

/// Smallest SNR (dB) at which a decreasing SEP curve reaches `target_pe`,
/// found by bisection to 0.01 dB on `bracket = (low_db, high_db)`.
pub fn required_snr_db<F>(mut curve: F, target_pe: f64, bracket: (f64, f64)) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let (mut lo, mut hi) = bracket;
    if !(lo < hi) || !(target_pe > 0.0) {
        return Err(Error::invalid(format!(
            "need low < high and a positive target, got bracket ({lo}, {hi}) and target {target_pe}"
        )));
    }
    let at_lo = curve(lo)?;
    let at_hi = curve(hi)?;
    if !(at_lo >= target_pe && at_hi <= target_pe) {
        return Err(Error::NotBracketed {
            target: target_pe,
            low: at_hi,
            high: at_lo,
        });
    }
    while hi - lo > 0.01 {
        let mid = 0.5 * (lo + hi);
        if curve(mid)? > target_pe {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::{db_to_linear, linear_to_db};

    fn spec(mode: RisMode, n: usize, snr: f64) -> MgfSpec {
        MgfSpec::new(mode, n, snr).unwrap()
    }

    fn db_grid(start: f64, stop: f64, step: f64) -> Vec<f64> {
        let count = ((stop - start) / step).round() as usize;
        (0..=count).map(|i| start + i as f64 * step).collect()
    }

    #[test]
    fn mgf_at_zero_is_one() {
        for mode in [RisMode::Reflector, RisMode::Transmitter] {
            assert_eq!(mgf(&spec(mode, 32, 0.1), 0.0).unwrap(), 1.0);
        }
    }

    #[test]
    fn mgf_derivative_gives_mean_snr() {
        let h = 1e-6;
        for (n, snr) in [(16, 0.01), (32, 0.003), (64, 1.0)] {
            let s = spec(RisMode::Reflector, n, snr);
            let fd = (mgf(&s, h).unwrap() - mgf(&s, -h).unwrap()) / (2.0 * h);
            let mean = crate::link::mean_snr_reflector(n, snr).unwrap();
            assert!((fd / mean - 1.0).abs() < 1e-4, "n={n}: {fd} vs {mean}");
            assert!((s.mean() / mean - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn mgf_decreases_along_negative_axis() {
        for mode in [RisMode::Reflector, RisMode::Transmitter] {
            let s = spec(mode, 8, 0.05);
            let values: Vec<f64> = (0..100)
                .map(|i| mgf(&s, -10.0 * i as f64 / 99.0).unwrap())
                .collect();
            assert!(values.windows(2).all(|w| w[1] < w[0]));
            assert!(values.iter().all(|&v| v > 0.0 && v <= 1.0));
        }
    }

    #[test]
    fn mgf_pole() {
        let s = spec(RisMode::Reflector, 4, 1.0);
        assert!(mgf(&s, 0.5 * s.pole()).is_ok());
        assert!(matches!(mgf(&s, s.pole()), Err(Error::MgfPole { .. })));
        assert!(mgf(&s, 2.0 * s.pole()).is_err());
        assert_eq!(mgf(&s, f64::NEG_INFINITY).unwrap(), 0.0);
    }

    #[test]
    fn stable_form_matches_direct_mgf() {
        let s = spec(RisMode::Transmitter, 32, 0.02);
        for eta in [0.01, 0.3, 1.0, FRAC_PI_2] {
            let t = eta.sin().powi(2);
            let direct = mgf(&s, -0.5 / t).unwrap();
            let stable = s.at_negative_ratio(0.5, t);
            assert!((direct / stable - 1.0).abs() < 1e-13);
        }
    }

    #[test]
    fn integrand_vanishes_at_origin() {
        for mode in [RisMode::Reflector, RisMode::Transmitter] {
            for (n, snr) in [(8, 1e-4), (32, 0.01), (256, 1.0)] {
                let s = spec(mode, n, snr);
                assert_eq!(s.at_negative_ratio(1.0, 0.0), 0.0);
                let tiny = 1e-40f64.sin().powi(2);
                assert!(s.at_negative_ratio(1.0, tiny) < 1e-30);
            }
        }
    }

    #[test]
    fn bpsk_is_binary_psk() {
        for snr in [1e-4, 0.01, 1.0] {
            let a = sep_bpsk_reflector(32, snr).unwrap();
            let b = sep_mpsk(&spec(RisMode::Reflector, 32, snr), 2).unwrap();
            assert_eq!(a, b);
            let t = sep_transmitter(32, snr, 2).unwrap();
            let u = sep_mpsk(&spec(RisMode::Transmitter, 32, snr), 2).unwrap();
            assert_eq!(t, u);
        }
    }

    #[test]
    fn qpsk_equals_4qam() {
        for mode in [RisMode::Reflector, RisMode::Transmitter] {
            for snr_db in [-40.0, -25.0, -15.0, 0.0] {
                let s = spec(mode, 32, db_to_linear(snr_db));
                let psk = sep_mpsk(&s, 4).unwrap();
                let qam = sep_mqam(&s, 4).unwrap();
                assert!((psk - qam).abs() <= 1e-9 * psk.max(1e-300), "{psk} vs {qam}");
            }
        }
    }

    #[test]
    fn zero_snr_limits() {
        // The deviation from the limit scales like sqrt(N·E_s/N0).
        let tiny = 1e-16;
        for m in [2, 4, 8, 16] {
            let pe = sep_mpsk(&spec(RisMode::Reflector, 16, tiny), m).unwrap();
            let expected = (m as f64 - 1.0) / m as f64;
            assert!((pe - expected).abs() < 1e-6, "M={m}: {pe}");
        }
        for m in [4, 16, 64] {
            let pe = sep_mqam(&spec(RisMode::Reflector, 16, tiny), m).unwrap();
            // MGF ≡ 1: 2(1 − 1/√M) − (1 − 1/√M)² = 1 − 1/M.
            let q = 1.0 - 1.0 / (m as f64).sqrt();
            let plug_in = 2.0 * q - q * q;
            assert!((plug_in - (1.0 - 1.0 / m as f64)).abs() < 1e-15);
            assert!((pe - plug_in).abs() < 1e-6, "M={m}: {pe}");
        }
        assert!((sep_bpsk_ub(16, tiny).unwrap() - 0.5).abs() < 1e-6);
    }

    #[test]
    fn reflector_bpsk_beats_awgn() {
        for n in [16, 32] {
            for db in db_grid(-45.0, 0.0, 0.5) {
                let snr = db_to_linear(db);
                let ris = sep_bpsk_reflector(n, snr).unwrap();
                let awgn = awgn_bpsk_sep(snr);
                if ris > 1e-12 && awgn > 1e-12 {
                    assert!(ris < awgn, "N={n}, {db} dB: {ris} vs {awgn}");
                }
            }
        }
    }

    #[test]
    fn bounds_dominate_exact() {
        for n in [8, 16, 32, 64, 128, 256] {
            for db in db_grid(-45.0, 0.0, 0.5) {
                let snr = db_to_linear(db);
                let exact = sep_bpsk_reflector(n, snr).unwrap();
                let ub = sep_bpsk_ub(n, snr).unwrap();
                assert!(ub >= exact, "N={n}, {db} dB");
                assert_eq!(
                    ub,
                    sep_upper_bound(RisMode::Reflector, ModulationFamily::Psk, n, snr, 2).unwrap()
                );
                for m in [4, 16, 64] {
                    let s = spec(RisMode::Reflector, n, snr);
                    let e = sep_mqam(&s, m).unwrap();
                    let b = sep_mqam_endpoint_bound(&s, m).unwrap();
                    assert!(b >= e * (1.0 - 1e-9), "QAM M={m}, N={n}, {db} dB: {b} < {e}");
                }
                for m in [2, 8] {
                    let e = sep_transmitter(n, snr, m).unwrap();
                    let b = sep_upper_bound(RisMode::Transmitter, ModulationFamily::Psk, n, snr, m)
                        .unwrap();
                    assert!(b >= e);
                }
            }
        }
    }

    #[test]
    fn exact_sep_range_and_monotonicity() {
        let ns = [8, 16, 32, 64, 128, 256];
        let grid = db_grid(-45.0, 0.0, 0.5);
        let table: Vec<Vec<f64>> = ns
            .iter()
            .map(|&n| {
                grid.iter()
                    .map(|&db| sep_bpsk_reflector(n, db_to_linear(db)).unwrap())
                    .collect()
            })
            .collect();
        for row in &table {
            assert!(row.iter().all(|&p| (0.0..=0.5).contains(&p)));
            assert!(row.windows(2).all(|w| w[1] < w[0]));
        }
        for k in 1..ns.len() {
            assert!(table[k].iter().zip(&table[k - 1]).all(|(a, b)| a < b));
        }
        for m in [4, 16] {
            let row: Vec<f64> = grid
                .iter()
                .map(|&db| sep_transmitter(32, db_to_linear(db), m).unwrap())
                .collect();
            assert!(row.iter().all(|&p| (0.0..=1.0).contains(&p)));
            assert!(row.windows(2).all(|w| w[1] < w[0]));
        }
    }

    #[test]
    fn qam_degrades_with_order() {
        for db in [-35.0, -25.0, -20.0] {
            let s = spec(RisMode::Reflector, 32, db_to_linear(db));
            let p: Vec<f64> = [4, 16, 64].iter().map(|&m| sep_mqam(&s, m).unwrap()).collect();
            assert!(p[0] < p[1] && p[1] < p[2], "{db} dB: {p:?}");
        }
        assert!(sep_mqam(&spec(RisMode::Reflector, 4, 1.0), 8).is_err());
    }

    #[test]
    fn transmitter_qam_is_rejected() {
        assert!(sep_exact(RisMode::Transmitter, ModulationFamily::Qam, 8, 1.0, 16).is_err());
        assert!(sep_exact(RisMode::Reflector, ModulationFamily::Qam, 8, 1.0, 16).is_ok());
    }

    #[test]
    fn waterfall_scaling() {
        // Same factor at N and 2N when the SNR drops by exactly 20·log10(2) dB.
        let snr = 0.01;
        let a = sep_waterfall_approx(RisMode::Reflector, 16, snr, 2).unwrap();
        let b = sep_waterfall_approx(RisMode::Reflector, 32, snr / 4.0, 2).unwrap();
        assert!((a / b - 1.0).abs() < 1e-12);
        assert!((linear_to_db(4.0) - 6.0206).abs() < 1e-4);

        // Transmitter matches the reflector exponent at 10·log10(π/4) dB less SNR.
        let offset_db = 10.0 * ((PI * PI / 16.0) / (PI / 4.0)).log10();
        assert!((offset_db + 1.0491).abs() < 1e-4);
        let r = sep_waterfall_approx(RisMode::Reflector, 32, snr, 2).unwrap();
        let t = sep_waterfall_approx(RisMode::Transmitter, 32, snr * db_to_linear(offset_db), 2)
            .unwrap();
        assert!((r / t - 1.0).abs() < 1e-12);

        let m2 = sep_waterfall_approx(RisMode::Transmitter, 16, snr, 2).unwrap();
        assert!((m2 - (-(256.0) * PI * snr / 4.0).exp()).abs() < 1e-15);

        let q = sep_waterfall_approx(RisMode::Reflector, 8, snr, 16).unwrap();
        assert!((q - (-3.0 * 64.0 * PI * PI * snr / (32.0 * 15.0)).exp()).abs() < 1e-15);
        assert!(sep_waterfall_approx(RisMode::Reflector, 8, snr, 8).is_err());
    }

    #[test]
    fn high_snr_approximation_shape() {
        let a = sep_high_snr_approx_reflector(32, 1.0).unwrap();
        let b = sep_high_snr_approx_reflector(32, 4.0).unwrap();
        assert!((b / a - 0.5).abs() < 1e-6);

        let decay = (-PI * PI / (2.0 * (16.0 - PI * PI))).exp();
        assert!((decay - 0.4471).abs() < 1e-4);
        for snr in [2.0, 50.0] {
            let r = sep_high_snr_approx_reflector(33, snr).unwrap()
                / sep_high_snr_approx_reflector(32, snr).unwrap();
            // The SNR^{-1/2} prefactor also carries N^{-1/2}.
            assert!((r / (decay * (32.0f64 / 33.0).sqrt()) - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn exact_integral_slope_at_high_snr() {
        let n = 32;
        let lo = 1e3 / n as f64;
        let hi = 1e4 / n as f64;
        let slope = (sep_bpsk_reflector(n, hi).unwrap().ln() - sep_bpsk_reflector(n, lo).unwrap().ln())
            / (hi / lo).ln();
        assert!((slope + 0.5).abs() < 0.05, "slope {slope}");
    }

    #[test]
    fn required_snr_bisection() {
        let curve = |db: f64| Ok((-db_to_linear(db)).exp());
        let x = required_snr_db(curve, (-1.0f64).exp(), (-20.0, 20.0)).unwrap();
        assert!(x.abs() <= 0.01);
        let a = required_snr_db(curve, 1e-2, (-20.0, 20.0)).unwrap();
        let b = required_snr_db(curve, 1e-4, (-20.0, 20.0)).unwrap();
        assert!(a < b);
        assert!(matches!(
            required_snr_db(curve, 1e-300, (-20.0, 20.0)),
            Err(Error::NotBracketed { .. })
        ));
        assert!(required_snr_db(curve, 0.1, (5.0, -5.0)).is_err());
    }

    #[test]
    fn upper_bound_doubling_gap() {
        // Bound-based required SNR at pe = 1e-3. Gap tends to 6.02 dB once the
        // operating point is inside the waterfall regime; at N = 16 it is
        // not, and the gap is ~7.4 dB.
        let req = |n: usize| {
            required_snr_db(|db| sep_bpsk_ub(n, db_to_linear(db)), 1e-3, (-60.0, 20.0)).unwrap()
        };
        let gaps: Vec<f64> = [16, 32, 64, 128].iter().map(|&n| req(n) - req(2 * n)).collect();
        assert!((gaps[0] - 7.39).abs() < 0.02, "{gaps:?}");
        for g in &gaps[1..] {
            assert!((g - 6.0).abs() < 0.6, "{gaps:?}");
        }
        assert!(gaps.windows(2).all(|w| w[1] < w[0]));
    }

    #[test]
    fn regimes() {
        assert_eq!(Regime::classify(32, 0.01), Regime::Waterfall);
        assert_eq!(Regime::classify(32, 0.1), Regime::Transition);
        assert_eq!(Regime::classify(32, 1.0), Regime::HighSnr);
    }

    #[test]
    fn invalid_specs() {
        assert!(MgfSpec::new(RisMode::Reflector, 0, 1.0).is_err());
        assert!(MgfSpec::new(RisMode::Reflector, 4, 0.0).is_err());
        assert!(MgfSpec::new(RisMode::Reflector, 4, f64::INFINITY).is_err());
        assert!(sep_mpsk(&spec(RisMode::Reflector, 4, 1.0), 1).is_err());
    }
}
