//! Instantaneous signal and SNR models for an RIS used as a reflector
//! (source → RIS → destination) or as a transmitter (feeder-illuminated RIS
//! that encodes the message in its phases).
//!
//! SNRs are expressed through the single knob `E_s/N₀` (linear); absolute
//! energies only appear when building received samples.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fading::FadingRealization;
use crate::numerics::{from_polar, Complex};
use crate::RisMode;

const TAU: f64 = 2.0 * PI;

/// How the RIS chooses its phase shifts `φᵢ`.
#[derive(Debug, Clone, PartialEq)]
pub enum PhasePolicy {
    /// Co-phasing with perfect channel-phase knowledge.
    Optimal,
    /// Co-phasing snapped to `2^bits` uniform levels.
    Quantized { bits: u32 },
    /// A fixed phase vector, radians.
    Explicit(Vec<f64>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct RisConfig {
    n: usize,
    mode: RisMode,
    policy: PhasePolicy,
}

impl RisConfig {
    pub fn new(n: usize, mode: RisMode, policy: PhasePolicy) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("tile count must be at least 1"));
        }
        match &policy {
            PhasePolicy::Quantized { bits } if *bits == 0 => {
                return Err(Error::invalid("quantized phases need at least 1 bit"));
            }
            PhasePolicy::Explicit(v) if v.len() != n => {
                return Err(Error::invalid(format!(
                    "explicit phase vector has {} entries for {n} tiles",
                    v.len()
                )));
            }
            _ => {}
        }
        Ok(RisConfig { n, mode, policy })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn mode(&self) -> RisMode {
        self.mode
    }

    pub fn policy(&self) -> &PhasePolicy {
        &self.policy
    }

    /// Phase vector applied on `ch`. `message` (1-based) only matters in
    /// transmitter mode.
    pub fn phases(&self, ch: &FadingRealization, message: usize, order: usize) -> Result<Vec<f64>> {
        if ch.len() != self.n {
            return Err(Error::invalid(format!(
                "realization has {} tiles, configuration expects {}",
                ch.len(),
                self.n
            )));
        }
        let optimal = || match self.mode {
            RisMode::Reflector => Ok(optimal_phases_reflector(ch)),
            RisMode::Transmitter => optimal_phases_transmitter(ch, message, order),
        };
        match &self.policy {
            PhasePolicy::Optimal => optimal(),
            PhasePolicy::Quantized { bits } => quantize_phases(&optimal()?, *bits),
            PhasePolicy::Explicit(v) => Ok(v.clone()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ModulationFamily {
    Psk,
    Qam,
}

impl ModulationFamily {
    pub fn as_str(self) -> &'static str {
        match self {
            ModulationFamily::Psk => "psk",
            ModulationFamily::Qam => "qam",
        }
    }
}

impl std::fmt::Display for ModulationFamily {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for ModulationFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "psk" => Ok(ModulationFamily::Psk),
            "qam" => Ok(ModulationFamily::Qam),
            other => Err(Error::invalid(format!(
                "unknown modulation family `{other}` (expected psk|qam)"
            ))),
        }
    }
}

/// Side length of a square QAM constellation, if `m` is one.
pub fn qam_side(m: usize) -> Option<usize> {
    let side = (m as f64).sqrt().round() as usize;
    (m >= 4 && side * side == m).then_some(side)
}

/// Constellation family, order and average symbol energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModulationSpec {
    family: ModulationFamily,
    order: usize,
    symbol_energy: f64,
}

impl ModulationSpec {
    pub fn new(family: ModulationFamily, order: usize, symbol_energy: f64) -> Result<Self> {
        if order < 2 {
            return Err(Error::invalid(format!(
                "modulation order must be at least 2, got {order}"
            )));
        }
        if family == ModulationFamily::Qam && qam_side(order).is_none() {
            return Err(Error::invalid(format!(
                "QAM order must be a perfect square >= 4, got {order}"
            )));
        }
        if !(symbol_energy.is_finite() && symbol_energy > 0.0) {
            return Err(Error::invalid(format!(
                "symbol energy must be positive, got {symbol_energy}"
            )));
        }
        Ok(ModulationSpec {
            family,
            order,
            symbol_energy,
        })
    }

    /// Unit-energy PSK of order `m`.
    pub fn psk(m: usize) -> Result<Self> {
        ModulationSpec::new(ModulationFamily::Psk, m, 1.0)
    }

    /// Unit-energy square QAM of order `m`.
    pub fn qam(m: usize) -> Result<Self> {
        ModulationSpec::new(ModulationFamily::Qam, m, 1.0)
    }

    pub fn family(&self) -> ModulationFamily {
        self.family
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn symbol_energy(&self) -> f64 {
        self.symbol_energy
    }

    /// Constellation points with average energy `E_s`. PSK point `k` sits at
    /// angle `2πk/M`; QAM points are listed row by row.
    pub fn constellation(&self) -> Vec<Complex> {
        let amp = self.symbol_energy.sqrt();
        match self.family {
            ModulationFamily::Psk => (0..self.order)
                .map(|k| from_polar(amp, message_phase(k + 1, self.order)))
                .collect(),
            ModulationFamily::Qam => {
                let side = qam_side(self.order).expect("validated at construction");
                let scale = amp / (2.0 * (self.order as f64 - 1.0) / 3.0).sqrt();
                let level = |k: usize| (2.0 * k as f64 + 1.0 - side as f64) * scale;
                (0..side)
                    .flat_map(|i| (0..side).map(move |q| Complex::new(level(i), level(q))))
                    .collect()
            }
        }
    }
}

/// Message-dependent phase `w_m = 2π(m − 1)/M` for 1-based `m`.
pub fn message_phase(m: usize, order: usize) -> f64 {
    TAU * (m as f64 - 1.0) / order as f64
}

/// Instantaneous SNR of one channel use.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SnrSample {
    pub gamma: f64,
    pub es_over_n0: f64,
}

fn check_snr(es_over_n0: f64) -> Result<()> {
    if es_over_n0 >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "E_s/N0 must be non-negative, got {es_over_n0}"
        )))
    }
}

fn check_len(ch: &FadingRealization, phases: &[f64]) -> Result<()> {
    if phases.len() == ch.len() {
        Ok(())
    } else {
        Err(Error::invalid(format!(
            "{} phases for {} tiles",
            phases.len(),
            ch.len()
        )))
    }
}

/// Co-phasing phases `φᵢ = θᵢ + ψᵢ`.
pub fn optimal_phases_reflector(ch: &FadingRealization) -> Vec<f64> {
    (0..ch.len()).map(|i| ch.theta(i) + ch.psi(i)).collect()
}

/// Composite reflector channel `Σ hᵢe^{jφᵢ}gᵢ`.
pub fn composite_channel(ch: &FadingRealization, phases: &[f64]) -> Result<Complex> {
    check_len(ch, phases)?;
    Ok(ch
        .h()
        .iter()
        .zip(ch.g())
        .zip(phases)
        .map(|((h, g), &phi)| h * from_polar(1.0, phi) * g)
        .sum())
}

/// `γ = |Σ αᵢβᵢe^{j(φᵢ−θᵢ−ψᵢ)}|²·E_s/N₀`.
pub fn instantaneous_snr_reflector(
    ch: &FadingRealization,
    phases: &[f64],
    es_over_n0: f64,
) -> Result<SnrSample> {
    check_len(ch, phases)?;
    check_snr(es_over_n0)?;
    let sum: Complex = (0..ch.len())
        .map(|i| {
            from_polar(
                ch.alpha(i) * ch.beta(i),
                phases[i] - ch.theta(i) - ch.psi(i),
            )
        })
        .sum();
    Ok(SnrSample {
        gamma: sum.norm_sqr() * es_over_n0,
        es_over_n0,
    })
}

/// Average SNR with co-phasing, `(N²π² + N(16 − π²))·E_s/(16N₀)`.
pub fn mean_snr_reflector(n: usize, es_over_n0: f64) -> Result<f64> {
    if n == 0 {
        return Err(Error::invalid("tile count must be at least 1"));
    }
    check_snr(es_over_n0)?;
    let n = n as f64;
    Ok((n * n * PI * PI + n * (16.0 - PI * PI)) * es_over_n0 / 16.0)
}

/// `r = (Σ hᵢe^{jφᵢ}gᵢ)·x + n`.
pub fn received_signal_reflector(
    ch: &FadingRealization,
    phases: &[f64],
    symbol: Complex,
    noise: Complex,
) -> Result<Complex> {
    Ok(composite_channel(ch, phases)? * symbol + noise)
}

/// `φᵢ = ψᵢ + w_m` for the 1-based message index `m` of an `M`-ary scheme.
pub fn optimal_phases_transmitter(
    ch: &FadingRealization,
    m: usize,
    order: usize,
) -> Result<Vec<f64>> {
    if order < 2 || m == 0 || m > order {
        return Err(Error::invalid(format!(
            "message index {m} out of range for order {order}"
        )));
    }
    let w = message_phase(m, order);
    Ok((0..ch.len()).map(|i| ch.psi(i) + w).collect())
}

/// `r = √E_s·Σ gᵢe^{jφᵢ} + n` with the phases encoding message `m`; equals
/// `√E_s·B·e^{jw_m} + n`. The feeder → RIS hop is unfaded.
pub fn received_signal_transmitter(
    ch: &FadingRealization,
    m: usize,
    spec: &ModulationSpec,
    noise: Complex,
) -> Result<Complex> {
    let phases = optimal_phases_transmitter(ch, m, spec.order())?;
    let sum: Complex = ch
        .g()
        .iter()
        .zip(&phases)
        .map(|(g, &phi)| g * from_polar(1.0, phi))
        .sum();
    Ok(sum * spec.symbol_energy().sqrt() + noise)
}

/// `γ = B²·E_s/N₀`.
pub fn instantaneous_snr_transmitter(ch: &FadingRealization, es_over_n0: f64) -> Result<SnrSample> {
    check_snr(es_over_n0)?;
    let b = ch.transmitter_amplitude();
    Ok(SnrSample {
        gamma: b * b * es_over_n0,
        es_over_n0,
    })
}

/// Snaps each phase to the nearest of `2^bits` levels `2πk/2^bits` on
/// `[0, 2π)`; exact midpoints go to the lower level.
pub fn quantize_phases(phases: &[f64], bits: u32) -> Result<Vec<f64>> {
    if bits == 0 || bits > 52 {
        return Err(Error::invalid(format!(
            "quantizer resolution must be 1..=52 bits, got {bits}"
        )));
    }
    let levels = 1u64 << bits;
    let step = TAU / levels as f64;
    Ok(phases
        .iter()
        .map(|&p| {
            let x = p.rem_euclid(TAU) / step;
            let k = x.floor();
            let k = if x - k > 0.5 { k + 1.0 } else { k } as u64 % levels;
            k as f64 * step
        })
        .collect())
}
