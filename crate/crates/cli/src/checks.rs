//! Quantitative checks behind `reproduce` and the acceptance suite.
//!
//! Each function computes one criterion at its stated tolerance and returns
//! a [`Check`] with the numbers that decided it.

use std::f64::consts::PI;

use rislink::fading::draw_realization;
use rislink::geometry::{
    fit_pathloss_exponent, logspace, los_power, relay_power, ris_ground_power, two_ray_power,
    TilePhasing, TileSet, TwoRayGeometry,
};
use rislink::link::{
    composite_channel, instantaneous_snr_reflector, mean_snr_reflector, optimal_phases_reflector,
    ModulationSpec,
};
use rislink::montecarlo::{simulate_reflector_sweep, simulate_transmitter_sweep, TrialPlan};
use rislink::numerics::RngStream;
use rislink::sep::{
    mgf, required_snr_db, sep_bpsk_reflector, sep_bpsk_ub, sep_mpsk, sep_mqam, sep_transmitter,
    MgfSpec,
};
use rislink::{db_to_linear, Complex, RisMode};

use crate::config::{snr_grid, Defaults, Opts, RunConfig};
use crate::{commands, on_workers, CliError};

#[derive(Debug, Clone, PartialEq)]
pub struct Check {
    pub id: u8,
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    fn new(id: u8, name: &str, passed: bool, detail: String) -> Self {
        Check {
            id,
            name: name.to_string(),
            passed,
            detail,
        }
    }

    fn failed(id: u8, name: &str, err: impl std::fmt::Display) -> Self {
        Check::new(id, name, false, format!("error: {err}"))
    }

    /// `PASS [id] name: detail` or `FAIL ...`.
    pub fn line(&self) -> String {
        let status = if self.passed { "PASS" } else { "FAIL" };
        format!("{status} [{}] {}: {}", self.id, self.name, self.detail)
    }
}

fn within(value: f64, target: f64, tol: f64) -> bool {
    (value - target).abs() <= tol
}

/// Fitted log-log exponents of the four path-loss models over
/// `d ∈ [10³, 10⁵]·λ` (λ = 1 m, both antennas 1 m high).
pub fn pathloss_exponents() -> rislink::Result<[(&'static str, f64); 4]> {
    let lambda = 1.0;
    let distances = logspace(1e3 * lambda, 1e5 * lambda, 41);
    let mut curves: [Vec<(f64, f64)>; 4] = Default::default();
    for &d in &distances {
        let g = TwoRayGeometry::new(1.0, 1.0, d, lambda)?;
        curves[0].push((d, los_power(1.0, &g)?.p_r));
        curves[1].push((d, two_ray_power(1.0, &g, Complex::new(-1.0, 0.0))?.p_r));
        let tiles = TileSet::specular(&g, 100, Complex::new(1.0, 0.0))?;
        curves[2].push((d, ris_ground_power(1.0, &g, &tiles, TilePhasing::Optimal)?.p_r));
        curves[3].push((d, relay_power(1.0, d / 2.0, d / 2.0, lambda)?.p_r));
    }
    Ok([
        ("los", fit_pathloss_exponent(&curves[0])?),
        ("two-ray", fit_pathloss_exponent(&curves[1])?),
        ("ris", fit_pathloss_exponent(&curves[2])?),
        ("relay", fit_pathloss_exponent(&curves[3])?),
    ])
}

pub fn criterion_1() -> Check {
    const NAME: &str = "path-loss exponents -2/-4/-2/-4 within 0.05";
    let fits = match pathloss_exponents() {
        Ok(f) => f,
        Err(e) => return Check::failed(1, NAME, e),
    };
    let expected = [-2.0, -4.0, -2.0, -4.0];
    let passed = fits.iter().zip(expected).all(|(&(_, s), e)| within(s, e, 0.05));
    let detail = fits
        .iter()
        .map(|(m, s)| format!("{m} {s:.4}"))
        .collect::<Vec<_>>()
        .join(", ");
    Check::new(1, NAME, passed, detail)
}

pub fn criterion_2() -> Check {
    const NAME: &str = "RIS gain (N+1)^2 to 1e-9 for N=1..256, 40.09 dB at N=100";
    let run = || -> rislink::Result<(f64, f64)> {
        let g = TwoRayGeometry::new(1.0, 1.0, 1e4, 1.0)?;
        let los = los_power(1.0, &g)?.p_r;
        let mut worst: f64 = 0.0;
        let mut gain_100 = 0.0;
        for n in 1..=256usize {
            let tiles = TileSet::specular(&g, n, Complex::new(1.0, 0.0))?;
            let p = ris_ground_power(1.0, &g, &tiles, TilePhasing::Optimal)?;
            let expected = ((n + 1) * (n + 1)) as f64;
            worst = worst.max((p.p_r / los / expected - 1.0).abs());
            if n == 100 {
                gain_100 = p.gain_db;
            }
        }
        Ok((worst, gain_100))
    };
    match run() {
        Ok((worst, gain)) => Check::new(
            2,
            NAME,
            worst <= 1e-9 && within(gain, 40.09, 0.01),
            format!("max relative error {worst:.2e}, N=100 gain {gain:.4} dB"),
        ),
        Err(e) => Check::failed(2, NAME, e),
    }
}

/// Sample mean of `γ` (co-phased, `E_s/N₀ = 1`) against its closed form.
pub fn criterion_3(realizations: usize) -> Check {
    const NAME: &str = "mean SNR within 1% for N=16,32,64";
    let mut parts = Vec::new();
    let mut passed = true;
    for (k, n) in [16usize, 32, 64].into_iter().enumerate() {
        let mut stream = RngStream::new(3, k as u64);
        let mut sum = 0.0;
        for _ in 0..realizations {
            let ch = draw_realization(&mut stream, n).expect("n >= 1");
            let phases = optimal_phases_reflector(&ch);
            sum += instantaneous_snr_reflector(&ch, &phases, 1.0).expect("valid").gamma;
        }
        let mean = sum / realizations as f64;
        let theory = mean_snr_reflector(n, 1.0).expect("valid");
        let rel = mean / theory - 1.0;
        passed &= rel.abs() <= 0.01;
        parts.push(format!("N={n} {:+.3}%", 100.0 * rel));
    }
    Check::new(3, NAME, passed, parts.join(", "))
}

/// Gaussian-model SEP against simulation on the −45..0 dB grid (1 dB
/// step) for every point whose analytic SEP is at least `1e-5`.
pub fn criterion_4(trials: u64) -> Check {
    const NAME: &str = "CLT SEP inside 95% CI for N=32,64 where pe >= 1e-5";
    let grid = snr_grid(-45.0, 0.0, 1.0).expect("static grid");
    let snrs: Vec<f64> = grid.iter().map(|&d| db_to_linear(d)).collect();
    let bpsk = ModulationSpec::psk(2).expect("valid");
    let mut passed = true;
    let mut parts = Vec::new();
    for n in [32usize, 64] {
        let plan = match TrialPlan::new(40 + n as u64, trials, rislink::montecarlo::DEFAULT_BATCH) {
            Ok(p) => p,
            Err(e) => return Check::failed(4, NAME, e),
        };
        let est = match simulate_reflector_sweep(&plan, n, &bpsk, &snrs) {
            Ok(e) => e,
            Err(e) => return Check::failed(4, NAME, e),
        };
        let mut checked = 0;
        let mut misses = Vec::new();
        for (e, &rho) in est.iter().zip(&snrs) {
            let pe = sep_bpsk_reflector(n, rho).expect("valid");
            if pe < 1e-5 {
                continue;
            }
            checked += 1;
            if !e.ci.contains(pe) {
                misses.push(format!(
                    "{} dB: analytic {:.3e} vs [{:.3e}, {:.3e}]",
                    e.snr_db, pe, e.ci.low, e.ci.high
                ));
            }
        }
        passed &= misses.is_empty();
        let mut part = format!("N={n}: {}/{checked} points outside", misses.len());
        if let Some(worst) = misses.last() {
            part.push_str(&format!(" (deepest {worst})"));
        }
        parts.push(part);
    }
    Check::new(4, NAME, passed, parts.join("; "))
}

/// SNR (dB) at which the reflector BPSK SEP reaches `1e-3`.
pub fn required_snr_reflector(n: usize) -> rislink::Result<f64> {
    required_snr_db(|db| sep_bpsk_reflector(n, db_to_linear(db)), 1e-3, (-80.0, 20.0))
}

pub fn doubling_gaps() -> rislink::Result<Vec<(usize, f64)>> {
    [16usize, 32, 64]
        .into_iter()
        .map(|n| Ok((n, required_snr_reflector(n)? - required_snr_reflector(2 * n)?)))
        .collect()
}

pub fn criterion_5() -> Check {
    const NAME: &str = "6.0 +/- 0.5 dB per doubling of N at pe=1e-3";
    match doubling_gaps() {
        Ok(gaps) => Check::new(
            5,
            NAME,
            gaps.iter().all(|&(_, g)| within(g, 6.0, 0.5)),
            gaps.iter()
                .map(|(n, g)| format!("{n}->{}: {g:.2} dB", 2 * n))
                .collect::<Vec<_>>()
                .join(", "),
        ),
        Err(e) => Check::failed(5, NAME, e),
    }
}

/// Crossing of `target` by a decreasing simulated curve, interpolated
/// linearly in `ln pe` between grid points.
fn crossing_db(grid: &[f64], pe: &[f64], target: f64) -> Option<f64> {
    grid.windows(2).zip(pe.windows(2)).find_map(|(x, y)| {
        if y[0] >= target && y[1] < target && y[1] > 0.0 {
            let t = (y[0].ln() - target.ln()) / (y[0].ln() - y[1].ln());
            Some(x[0] + t * (x[1] - x[0]))
        } else {
            None
        }
    })
}

/// Reflector-minus-transmitter required SNR at `pe = 1e-3`, `N = 32`,
/// binary signaling: `(analytic, simulated)`.
pub fn transmitter_gain(trials: u64) -> rislink::Result<(f64, Option<f64>)> {
    let n = 32;
    let refl = required_snr_reflector(n)?;
    let trans = required_snr_db(|db| sep_transmitter(n, db_to_linear(db), 2), 1e-3, (-80.0, 20.0))?;
    if trials == 0 {
        return Ok((refl - trans, None));
    }
    let plan = TrialPlan::new(6, trials, rislink::montecarlo::DEFAULT_BATCH)?;
    let window = |center: f64| snr_grid(center - 2.0, center + 2.0, 0.1).expect("static grid");
    let (grid_r, grid_t) = (window(refl), window(trans));
    let lin = |g: &[f64]| g.iter().map(|&d| db_to_linear(d)).collect::<Vec<_>>();
    let sim_r = simulate_reflector_sweep(&plan, n, &ModulationSpec::psk(2)?, &lin(&grid_r))?;
    let sim_t = simulate_transmitter_sweep(&plan, n, 2, &lin(&grid_t))?;
    let pe = |v: &[rislink::montecarlo::SepEstimate]| v.iter().map(|e| e.pe_hat).collect::<Vec<_>>();
    let sim = crossing_db(&grid_r, &pe(&sim_r), 1e-3)
        .zip(crossing_db(&grid_t, &pe(&sim_t), 1e-3))
        .map(|(r, t)| r - t);
    Ok((refl - trans, sim))
}

pub fn criterion_6(trials: u64) -> Check {
    const NAME: &str = "transmitter needs 1.0 +/- 0.3 dB less SNR (N=32, pe=1e-3)";
    match transmitter_gain(trials) {
        Ok((analytic, sim)) => {
            let sim_ok = sim.is_some_and(|s| within(s, 1.0, 0.3));
            let sim_text = sim.map_or("no crossing".to_string(), |s| format!("{s:.2} dB"));
            Check::new(
                6,
                NAME,
                within(analytic, 1.0, 0.3) && sim_ok,
                format!("analytic {analytic:.2} dB, simulated {sim_text}"),
            )
        }
        Err(e) => Check::failed(6, NAME, e),
    }
}

/// Largest `|composite(perturbed)| / |composite(optimal)| − 1` seen, with
/// the number of strict violations.
pub fn argmax_dominance(realizations: usize, perturbations: usize) -> (usize, f64) {
    let mut stream = RngStream::new(77, 0);
    let mut violations = 0;
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..realizations {
        let ch = draw_realization(&mut stream, 32).expect("n >= 1");
        let best = optimal_phases_reflector(&ch);
        let top = composite_channel(&ch, &best).expect("valid").norm();
        let mut phases = best.clone();
        for _ in 0..perturbations {
            let scale = stream.uniform() * PI;
            for (p, b) in phases.iter_mut().zip(&best) {
                *p = b + scale * (2.0 * stream.uniform() - 1.0);
            }
            let value = composite_channel(&ch, &phases).expect("valid").norm();
            let excess = value / top - 1.0;
            worst = worst.max(excess);
            if excess > 1e-12 {
                violations += 1;
            }
        }
    }
    (violations, worst)
}

pub fn criterion_7() -> Check {
    const NAME: &str = "bound, QPSK=4-QAM, MGF and argmax consistency";
    let run = || -> rislink::Result<(bool, String)> {
        let grid = snr_grid(-45.0, 0.0, 0.5).expect("static grid");
        let mut bound_violations = 0;
        let mut qpsk_gap: f64 = 0.0;
        let mut mgf0_gap: f64 = 0.0;
        let mut mean_gap: f64 = 0.0;
        for n in [1usize, 2, 4, 8, 16, 32, 64, 128, 256] {
            for &db in &grid {
                let rho = db_to_linear(db);
                if sep_bpsk_ub(n, rho)? < sep_bpsk_reflector(n, rho)? {
                    bound_violations += 1;
                }
                let spec = MgfSpec::new(RisMode::Reflector, n, rho)?;
                qpsk_gap = qpsk_gap.max((sep_mpsk(&spec, 4)? - sep_mqam(&spec, 4)?).abs());
                for mode in [RisMode::Reflector, RisMode::Transmitter] {
                    mgf0_gap = mgf0_gap.max((mgf(&MgfSpec::new(mode, n, rho)?, 0.0)? - 1.0).abs());
                }
                let mean = mean_snr_reflector(n, rho)?;
                let h = 1e-4 / mean;
                let slope = (mgf(&spec, h)? - mgf(&spec, -h)?) / (2.0 * h);
                mean_gap = mean_gap.max((slope / mean - 1.0).abs());
            }
        }
        let (violations, worst) = argmax_dominance(1000, 1000);
        let passed = bound_violations == 0
            && qpsk_gap <= 1e-9
            && mgf0_gap == 0.0
            && mean_gap <= 1e-4
            && violations == 0;
        Ok((
            passed,
            format!(
                "bound violations {bound_violations}, max |QPSK-4QAM| {qpsk_gap:.1e}, \
                 max |MGF(0)-1| {mgf0_gap:.1e}, max MGF-mean error {mean_gap:.1e}, \
                 argmax violations {violations} (max excess {worst:.1e})"
            ),
        ))
    };
    match run() {
        Ok((passed, detail)) => Check::new(7, NAME, passed, detail),
        Err(e) => Check::failed(7, NAME, e),
    }
}

/// Log-log slope of the reflector BPSK SEP at `N = 32` over
/// `N·E_s/N₀ ∈ [10³, 10⁴]`.
pub fn high_snr_slope() -> rislink::Result<f64> {
    let n = 32;
    let points = logspace(1e3 / n as f64, 1e4 / n as f64, 11)
        .into_iter()
        .map(|rho| Ok((rho, sep_bpsk_reflector(n, rho)?)))
        .collect::<rislink::Result<Vec<_>>>()?;
    fit_pathloss_exponent(&points)
}

pub fn criterion_8() -> Check {
    const NAME: &str = "high-SNR log-log slope -1/2 +/- 0.05 at N=32";
    match high_snr_slope() {
        Ok(s) => Check::new(8, NAME, within(s, -0.5, 0.05), format!("slope {s:.4} over N*Es/N0 in [1e3, 1e4]")),
        Err(e) => Check::failed(8, NAME, e),
    }
}

/// `sep-sim` CSV for `N = 32` BPSK on the −45..0 dB grid (5 dB step).
pub fn determinism_csv(trials: u64, workers: usize) -> Result<String, CliError> {
    let opts = Opts {
        n: vec![32],
        snr_step: Some(5.0),
        trials: Some(trials),
        seed: Some(2024),
        ..Default::default()
    };
    let config = RunConfig::resolve(&opts, &Defaults::default())?;
    on_workers(Some(workers), || commands::cmd_sep_sim(&config))
}

pub fn criterion_9(trials: u64) -> Check {
    const NAME: &str = "sep-sim CSV byte-identical with 1, 4 and 16 workers";
    let runs: Result<Vec<String>, CliError> =
        [1, 4, 16].into_iter().map(|w| determinism_csv(trials, w)).collect();
    match runs {
        Ok(runs) => {
            let same = runs.iter().all(|r| r.as_bytes() == runs[0].as_bytes());
            Check::new(
                9,
                NAME,
                same,
                format!("{} bytes per run, identical: {same}", runs[0].len()),
            )
        }
        Err(e) => Check::failed(9, NAME, e),
    }
}

/// Reflector SEP curves that must stay below the AWGN BPSK reference.
pub fn below_awgn(ns: &[usize], grid_db: &[f64]) -> rislink::Result<Vec<(usize, f64, f64, f64)>> {
    let mut rows = Vec::new();
    for &n in ns {
        for &db in grid_db {
            let rho = db_to_linear(db);
            rows.push((n, db, sep_bpsk_reflector(n, rho)?, rislink::sep::awgn_bpsk_sep(rho)));
        }
    }
    Ok(rows)
}
