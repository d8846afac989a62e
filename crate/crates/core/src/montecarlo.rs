//! Deterministic Monte Carlo estimation of the symbol error probability.
//!
//! Trial `t` of a [`TrialPlan`] draws from substream `⌊t / batch⌋` of the
//! master seed, in order within its batch. Every trial first draws the
//! channel, then the symbol, then one `CN(0, 1)` noise sample; the noise is
//! scaled per SNR point afterwards. A trial's random draws therefore do not
//! depend on the SNR, which lets a sweep evaluate every SNR point from the
//! same draws and still match a stand-alone run of any single point
//! bit-for-bit.
//!
//! Batches are independent and may run on any number of workers; counts
//! are merged in batch order.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::fading::draw_realization;
use crate::link::{message_phase, ModulationFamily, ModulationSpec};
use crate::numerics::{
    binomial_ci, from_polar, sample_standard_complex_gaussian, Complex, ConfidenceInterval,
    RngStream,
};
use crate::sep::{sep_exact, SepMethod, SepPoint};
use crate::{db_to_linear, linear_to_db, RisMode};

/// Confidence level of every reported interval.
pub const CI_LEVEL: f64 = 0.95;

/// Early stop needs at least this many errors...
pub const EARLY_STOP_ERRORS: u64 = 200;
/// ...and at least this many trials.
pub const EARLY_STOP_MIN_TRIALS: u64 = 100_000;

/// Batches evaluated between early-stop checks. Fixed so that the stopping
/// point does not depend on the worker count.
const WAVE: u64 = 256;

/// Default trials per substream.
pub const DEFAULT_BATCH: u64 = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TrialPlan {
    master_seed: u64,
    trials: u64,
    batch: u64,
    early_stop: bool,
}

impl TrialPlan {
    pub fn new(master_seed: u64, trials: u64, batch: u64) -> Result<Self> {
        if trials == 0 {
            return Err(Error::invalid("a trial plan needs at least one trial"));
        }
        if batch == 0 {
            return Err(Error::invalid("batch size must be at least 1"));
        }
        Ok(TrialPlan {
            master_seed,
            trials,
            batch,
            early_stop: false,
        })
    }

    /// Stop a point once it has [`EARLY_STOP_ERRORS`] errors and
    /// [`EARLY_STOP_MIN_TRIALS`] trials (checked at batch boundaries).
    pub fn with_early_stop(mut self, enabled: bool) -> Self {
        self.early_stop = enabled;
        self
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn trials(&self) -> u64 {
        self.trials
    }

    pub fn batch(&self) -> u64 {
        self.batch
    }

    pub fn early_stop(&self) -> bool {
        self.early_stop
    }

    /// Substream consumed by `trial`.
    pub fn substream_of(&self, trial: u64) -> u64 {
        trial / self.batch
    }

    fn batch_count(&self) -> u64 {
        self.trials.div_ceil(self.batch)
    }

    fn batch_len(&self, b: u64) -> u64 {
        self.batch.min(self.trials - b * self.batch)
    }
}

/// Error and trial counts of one estimation point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ErrorCount {
    pub errors: u64,
    pub trials: u64,
}

/// Runs `kernel` once per trial. The kernel sets `errors[j]` to whether the
/// trial produced a symbol error at point `j` (the slice is cleared before
/// each call).
pub fn count_errors<K>(plan: &TrialPlan, points: usize, kernel: K) -> Vec<ErrorCount>
where
    K: Fn(&mut RngStream, &mut [bool]) + Sync,
{
    let run_batch = |b: u64| -> Vec<u64> {
        let mut stream = RngStream::new(plan.master_seed, b);
        let mut flags = vec![false; points];
        let mut errors = vec![0u64; points];
        for _ in 0..plan.batch_len(b) {
            flags.iter_mut().for_each(|f| *f = false);
            kernel(&mut stream, &mut flags);
            for (e, &f) in errors.iter_mut().zip(&flags) {
                *e += f as u64;
            }
        }
        errors
    };

    let mut counts = vec![ErrorCount::default(); points];
    let mut done = vec![false; points];
    let total = plan.batch_count();
    let wave = if plan.early_stop { WAVE } else { total };
    let mut start = 0;
    while start < total && !done.iter().all(|&d| d) {
        let end = (start + wave).min(total);
        let results: Vec<Vec<u64>> = (start..end).into_par_iter().map(run_batch).collect();
        for (b, errors) in (start..end).zip(results) {
            let len = plan.batch_len(b);
            for j in 0..points {
                if done[j] {
                    continue;
                }
                counts[j].errors += errors[j];
                counts[j].trials += len;
                if plan.early_stop
                    && counts[j].errors >= EARLY_STOP_ERRORS
                    && counts[j].trials >= EARLY_STOP_MIN_TRIALS
                {
                    done[j] = true;
                }
            }
        }
        start = end;
    }
    counts
}

/// Runs `f` on a dedicated pool of `workers` threads.
pub fn with_workers<R, F>(workers: usize, f: F) -> Result<R>
where
    R: Send,
    F: FnOnce() -> R + Send,
{
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers.max(1))
        .build()
        .map_err(|e| Error::invalid(format!("cannot start {workers} workers: {e}")))?;
    Ok(pool.install(f))
}

/// Simulated SEP at one operating point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SepEstimate {
    pub errors: u64,
    pub trials: u64,
    pub pe_hat: f64,
    pub ci: ConfidenceInterval,
    pub snr_db: f64,
    pub n: usize,
    pub m: usize,
    pub mode: RisMode,
}

impl SepEstimate {
    fn from_count(count: ErrorCount, es_over_n0: f64, n: usize, m: usize, mode: RisMode) -> Result<Self> {
        Ok(SepEstimate {
            errors: count.errors,
            trials: count.trials,
            pe_hat: count.errors as f64 / count.trials as f64,
            ci: binomial_ci(count.errors, count.trials, CI_LEVEL)?,
            snr_db: linear_to_db(es_over_n0),
            n,
            m,
            mode,
        })
    }
}

fn check_snrs(snrs: &[f64]) -> Result<()> {
    if snrs.is_empty() {
        return Err(Error::invalid("SNR grid is empty"));
    }
    match snrs.iter().find(|&&s| !(s > 0.0)) {
        Some(s) => Err(Error::invalid(format!(
            "E_s/N0 must be positive (use infinity for a noiseless run), got {s}"
        ))),
        None => Ok(()),
    }
}

/// Noise amplitude for unit-variance complex noise at `N₀ = E_s/ρ`.
fn noise_scales(symbol_energy: f64, snrs: &[f64]) -> Vec<f64> {
    snrs.iter().map(|&rho| (symbol_energy / rho).sqrt()).collect()
}

fn nearest(points: &[Complex], gain: f64, r: Complex) -> usize {
    let mut best = 0;
    let mut best_dist = f64::INFINITY;
    for (k, p) in points.iter().enumerate() {
        let dist = (r - p * gain).norm_sqr();
        if dist < best_dist {
            best = k;
            best_dist = dist;
        }
    }
    best
}

/// Reflector-mode SEP with co-phased tiles at each SNR of `snrs` (linear).
///
/// Per trial: draw the channel, apply the optimal phases (the composite
/// channel becomes the real amplitude `A = Σαᵢβᵢ`), send a uniformly drawn
/// symbol, add `CN(0, N₀)` noise and detect `argmin |r − A·x'|`.
pub fn simulate_reflector_sweep(
    plan: &TrialPlan,
    n: usize,
    spec: &ModulationSpec,
    snrs: &[f64],
) -> Result<Vec<SepEstimate>> {
    check_snrs(snrs)?;
    if n == 0 {
        return Err(Error::invalid("tile count must be at least 1"));
    }
    let points = spec.constellation();
    let scales = noise_scales(spec.symbol_energy(), snrs);
    let counts = count_errors(plan, snrs.len(), |stream, errors| {
        let ch = draw_realization(stream, n).expect("n >= 1");
        let gain = ch.reflector_amplitude();
        let sent = stream.index_below(points.len());
        let noise = sample_standard_complex_gaussian(stream);
        let clean = points[sent] * gain;
        for (e, &sigma) in errors.iter_mut().zip(&scales) {
            *e = nearest(&points, gain, clean + noise * sigma) != sent;
        }
    });
    counts
        .into_iter()
        .zip(snrs)
        .map(|(c, &rho)| SepEstimate::from_count(c, rho, n, spec.order(), RisMode::Reflector))
        .collect()
}

pub fn simulate_reflector_sep(
    plan: &TrialPlan,
    n: usize,
    spec: &ModulationSpec,
    es_over_n0: f64,
) -> Result<SepEstimate> {
    Ok(simulate_reflector_sweep(plan, n, spec, &[es_over_n0])?[0])
}

/// Transmitter-mode SEP of unit-energy `M`-ary phase signaling.
///
/// Per trial: draw only the RIS → destination coefficients `gᵢ`, pick a
/// message `m`, form `r = √E_s·B·e^{jw_m} + n` with `B = Σβᵢ` and detect
/// `argmin_m' |r − √E_s·B·e^{jw_m'}|`.
pub fn simulate_transmitter_sweep(
    plan: &TrialPlan,
    n: usize,
    m: usize,
    snrs: &[f64],
) -> Result<Vec<SepEstimate>> {
    check_snrs(snrs)?;
    if n == 0 {
        return Err(Error::invalid("tile count must be at least 1"));
    }
    if m < 2 {
        return Err(Error::invalid(format!("modulation order must be at least 2, got {m}")));
    }
    let points: Vec<Complex> = (1..=m).map(|k| from_polar(1.0, message_phase(k, m))).collect();
    let scales = noise_scales(1.0, snrs);
    let counts = count_errors(plan, snrs.len(), |stream, errors| {
        let gain: f64 = (0..n)
            .map(|_| sample_standard_complex_gaussian(stream).norm())
            .sum();
        let sent = stream.index_below(m);
        let noise = sample_standard_complex_gaussian(stream);
        let clean = points[sent] * gain;
        for (e, &sigma) in errors.iter_mut().zip(&scales) {
            *e = nearest(&points, gain, clean + noise * sigma) != sent;
        }
    });
    counts
        .into_iter()
        .zip(snrs)
        .map(|(c, &rho)| SepEstimate::from_count(c, rho, n, m, RisMode::Transmitter))
        .collect()
}

pub fn simulate_transmitter_sep(
    plan: &TrialPlan,
    n: usize,
    m: usize,
    es_over_n0: f64,
) -> Result<SepEstimate> {
    Ok(simulate_transmitter_sweep(plan, n, m, &[es_over_n0])?[0])
}

/// One simulated configuration of a sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub mode: RisMode,
    pub n: usize,
    pub modulation: ModulationSpec,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub config: SimConfig,
    pub estimate: SepEstimate,
    pub analytic: SepPoint,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepResult {
    pub rows: Vec<SweepRow>,
}

impl SweepResult {
    /// Rows of one configuration in grid order.
    pub fn curve(&self, config: &SimConfig) -> Vec<&SweepRow> {
        self.rows.iter().filter(|r| &r.config == config).collect()
    }
}

/// Simulates every configuration over the dB grid and pairs each estimate
/// with the analytic SEP. Rows are ordered by configuration, then SNR.
pub fn sweep(grid_db: &[f64], configs: &[SimConfig], plan: &TrialPlan) -> Result<SweepResult> {
    if grid_db.is_empty() {
        return Err(Error::invalid("SNR grid is empty"));
    }
    let snrs: Vec<f64> = grid_db.iter().map(|&db| db_to_linear(db)).collect();
    let mut rows = Vec::with_capacity(grid_db.len() * configs.len());
    for config in configs {
        let m = config.modulation.order();
        let estimates = match config.mode {
            RisMode::Reflector => simulate_reflector_sweep(plan, config.n, &config.modulation, &snrs)?,
            RisMode::Transmitter => {
                if config.modulation.family() != ModulationFamily::Psk {
                    return Err(Error::invalid(
                        "the RIS transmitter encodes data in phases only; use psk",
                    ));
                }
                simulate_transmitter_sweep(plan, config.n, m, &snrs)?
            }
        };
        for ((estimate, &db), &rho) in estimates.into_iter().zip(grid_db).zip(&snrs) {
            let pe = sep_exact(config.mode, config.modulation.family(), config.n, rho, m)?;
            rows.push(SweepRow {
                config: *config,
                estimate: SepEstimate { snr_db: db, ..estimate },
                analytic: SepPoint {
                    snr_db: db,
                    pe,
                    method: SepMethod::Exact,
                },
            });
        }
    }
    Ok(SweepResult { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sep::awgn_bpsk_sep;

    fn bpsk() -> ModulationSpec {
        ModulationSpec::psk(2).unwrap()
    }

    #[test]
    fn plan_validation_and_mapping() {
        assert!(TrialPlan::new(1, 0, 10).is_err());
        assert!(TrialPlan::new(1, 10, 0).is_err());
        let p = TrialPlan::new(1, 25, 10).unwrap();
        assert_eq!(p.substream_of(0), 0);
        assert_eq!(p.substream_of(9), 0);
        assert_eq!(p.substream_of(10), 1);
        assert_eq!(p.batch_count(), 3);
        assert_eq!(p.batch_len(2), 5);
    }

    #[test]
    fn engine_counts_every_trial() {
        let plan = TrialPlan::new(3, 1001, 100).unwrap();
        let counts = count_errors(&plan, 2, |s, e| {
            e[0] = true;
            e[1] = s.uniform() < 0.5;
        });
        assert_eq!(counts[0], ErrorCount { errors: 1001, trials: 1001 });
        assert_eq!(counts[1].trials, 1001);
        assert!(counts[1].errors > 400 && counts[1].errors < 600);
    }

    #[test]
    fn noiseless_detection_is_error_free() {
        let plan = TrialPlan::new(5, 20_000, 1000).unwrap();
        for spec in [bpsk(), ModulationSpec::psk(8).unwrap(), ModulationSpec::qam(16).unwrap()] {
            let r = simulate_reflector_sep(&plan, 4, &spec, f64::INFINITY).unwrap();
            assert_eq!(r.errors, 0);
            assert_eq!(r.trials, 20_000);
        }
        let t = simulate_transmitter_sep(&plan, 4, 8, f64::INFINITY).unwrap();
        assert_eq!(t.errors, 0);
    }

    #[test]
    fn results_do_not_depend_on_worker_count() {
        let plan = TrialPlan::new(99, 50_000, 777).unwrap();
        let snrs = [0.001, 0.01, 0.05];
        let run = || simulate_reflector_sweep(&plan, 16, &bpsk(), &snrs).unwrap();
        let one = with_workers(1, run).unwrap();
        let four = with_workers(4, run).unwrap();
        assert_eq!(one, four);
        let t1 = with_workers(1, || simulate_transmitter_sweep(&plan, 8, 4, &snrs).unwrap()).unwrap();
        let t3 = with_workers(3, || simulate_transmitter_sweep(&plan, 8, 4, &snrs).unwrap()).unwrap();
        assert_eq!(t1, t3);
    }

    #[test]
    fn sweep_points_match_single_runs() {
        let plan = TrialPlan::new(7, 30_000, 1000).unwrap();
        let snrs = [0.002, 0.02];
        let swept = simulate_reflector_sweep(&plan, 8, &bpsk(), &snrs).unwrap();
        for (k, &rho) in snrs.iter().enumerate() {
            assert_eq!(swept[k], simulate_reflector_sep(&plan, 8, &bpsk(), rho).unwrap());
        }

        let configs = [
            SimConfig { mode: RisMode::Reflector, n: 8, modulation: bpsk() },
            SimConfig { mode: RisMode::Transmitter, n: 8, modulation: ModulationSpec::psk(4).unwrap() },
        ];
        let grid = [-20.0, -15.0];
        let a = sweep(&grid, &configs, &plan).unwrap();
        let reversed: Vec<SimConfig> = configs.iter().rev().copied().collect();
        let b = sweep(&grid, &reversed, &plan).unwrap();
        for c in &configs {
            assert_eq!(a.curve(c), b.curve(c));
        }
        let single = sweep(&[-15.0], &configs[..1], &plan).unwrap();
        let direct = simulate_reflector_sep(&plan, 8, &bpsk(), db_to_linear(-15.0)).unwrap();
        assert_eq!(single.rows[0].estimate.errors, direct.errors);
        assert_eq!(single.rows[0].estimate.trials, direct.trials);
        assert!(sweep(&[], &configs, &plan).is_err());
    }

    #[test]
    fn early_stop_is_deterministic() {
        let plan = TrialPlan::new(1, 2_000_000, 1000).unwrap().with_early_stop(true);
        let snrs = [0.001, 0.05];
        let a = with_workers(1, || simulate_reflector_sweep(&plan, 8, &bpsk(), &snrs).unwrap()).unwrap();
        let b = with_workers(4, || simulate_reflector_sweep(&plan, 8, &bpsk(), &snrs).unwrap()).unwrap();
        assert_eq!(a, b);
        // The high-error point stops at the first batch boundary past 1e5 trials.
        assert_eq!(a[0].trials, EARLY_STOP_MIN_TRIALS);
        assert!(a[1].trials <= plan.trials());
        assert!(a[0].errors >= EARLY_STOP_ERRORS);
    }

    #[test]
    fn estimator_covers_awgn_bpsk() {
        let rho = db_to_linear(2.0);
        let truth = awgn_bpsk_sep(rho);
        let sigma = (1.0 / rho).sqrt();
        let experiments = 200;
        let covered = (0..experiments)
            .filter(|&k| {
                let plan = TrialPlan::new(1000 + k, 20_000, 1000).unwrap();
                let c = count_errors(&plan, 1, |s, e| {
                    let x = if s.index_below(2) == 0 { 1.0 } else { -1.0 };
                    let r = x + sample_standard_complex_gaussian(s).re * sigma;
                    e[0] = (r >= 0.0) != (x > 0.0);
                })[0];
                binomial_ci(c.errors, c.trials, CI_LEVEL).unwrap().contains(truth)
            })
            .count();
        assert!(covered as f64 / experiments as f64 >= 0.94, "{covered}/200");
    }

    #[test]
    fn bpsk_negation_symmetry() {
        // Negating every transmitted symbol leaves the error statistics unchanged.
        let plan = TrialPlan::new(31, 400_000, 4096).unwrap();
        let rho: f64 = 0.004;
        let sigma = (1.0 / rho).sqrt();
        let run = |sign: f64| {
            count_errors(&plan, 1, |s, e| {
                let ch = draw_realization(s, 16).unwrap();
                let a = ch.reflector_amplitude();
                let x = sign * if s.index_below(2) == 0 { 1.0 } else { -1.0 };
                let r = a * x + sample_standard_complex_gaussian(s).re * sigma;
                e[0] = (r >= 0.0) != (x > 0.0);
            })[0]
        };
        let (p, q) = (run(1.0), run(-1.0));
        let ci = binomial_ci(p.errors, p.trials, 0.999).unwrap();
        assert!(ci.contains(q.errors as f64 / q.trials as f64), "{p:?} vs {q:?}");
        assert_eq!(p.trials, q.trials);
    }

    #[test]
    fn simulation_agrees_with_analysis_at_moderate_error_rates() {
        // Well above pe = 1e-2 the Gaussian model is accurate to ~0.1% at N = 32.
        let plan = TrialPlan::new(2, 400_000, 4096).unwrap();
        let snrs: Vec<f64> = [-40.0, -35.0, -30.0].iter().map(|&d| db_to_linear(d)).collect();
        let r = simulate_reflector_sweep(&plan, 32, &bpsk(), &snrs).unwrap();
        for (est, &rho) in r.iter().zip(&snrs) {
            let pe = crate::sep::sep_bpsk_reflector(32, rho).unwrap();
            assert!(est.ci.contains(pe), "{est:?} vs {pe}");
        }
        let t = simulate_transmitter_sweep(&plan, 32, 4, &snrs).unwrap();
        for (est, &rho) in t.iter().zip(&snrs) {
            let pe = crate::sep::sep_transmitter(32, rho, 4).unwrap();
            assert!(est.ci.contains(pe), "{est:?} vs {pe}");
        }
    }

    #[test]
    fn rejects_bad_inputs() {
        let plan = TrialPlan::new(1, 10, 10).unwrap();
        assert!(simulate_reflector_sep(&plan, 0, &bpsk(), 1.0).is_err());
        assert!(simulate_reflector_sep(&plan, 4, &bpsk(), 0.0).is_err());
        assert!(simulate_reflector_sweep(&plan, 4, &bpsk(), &[]).is_err());
        assert!(simulate_transmitter_sep(&plan, 4, 1, 1.0).is_err());
    }
}
