//! Command-line flags, the optional `key = value` config file, and the
//! validated [`RunConfig`] they resolve to.
//!
//! Config-file keys are the long flag names without dashes
//! (`snr-start = -45`, `n = 16, 32`). A flag given on the command line
//! replaces the file's value for that key.

use std::collections::HashMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rislink::link::{ModulationFamily, ModulationSpec};
use rislink::RisMode;

use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "rislink", version, about = "RIS-assisted link simulation and error-probability analysis")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Received power versus distance for the LOS, two-ray, RIS and relay models.
    Pathloss(Opts),
    /// Analytic SEP curves (exact, upper bound, waterfall factor).
    SepTheory(Opts),
    /// Monte Carlo SEP with 95% confidence intervals.
    SepSim(Opts),
    /// Regenerate a figure's data and check it against the expected behavior.
    Reproduce {
        figure: Figure,
        #[command(flatten)]
        opts: Opts,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Figure {
    Fig6,
    Fig7,
    Scaling,
}

#[derive(Debug, Clone, Default, Args)]
pub struct Opts {
    /// RIS operating mode: reflector or transmitter.
    #[arg(long)]
    pub mode: Option<String>,
    /// Number of tiles; repeat or comma-separate for several.
    #[arg(long = "n", value_delimiter = ',')]
    pub n: Vec<usize>,
    /// Modulation order.
    #[arg(long)]
    pub m: Option<usize>,
    /// Modulation family: psk or qam.
    #[arg(long)]
    pub family: Option<String>,
    /// First E_s/N0 of the grid, dB.
    #[arg(long, allow_negative_numbers = true)]
    pub snr_start: Option<f64>,
    /// Last E_s/N0 of the grid, dB.
    #[arg(long, allow_negative_numbers = true)]
    pub snr_stop: Option<f64>,
    /// Grid step, dB.
    #[arg(long)]
    pub snr_step: Option<f64>,
    /// Monte Carlo trials per grid point.
    #[arg(long)]
    pub trials: Option<u64>,
    /// Master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Trials per random substream.
    #[arg(long)]
    pub batch: Option<u64>,
    /// Stop a point after 200 errors and 1e5 trials.
    #[arg(long)]
    pub early_stop: bool,
    /// Output file (directory for `reproduce`); stdout when omitted.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Key-value config file; flags override it.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Path-loss models: los, two-ray, ris, relay (comma-separated).
    #[arg(long, value_delimiter = ',')]
    pub models: Vec<String>,
    /// Transmitter height, m.
    #[arg(long)]
    pub ht: Option<f64>,
    /// Receiver height, m.
    #[arg(long)]
    pub hr: Option<f64>,
    /// Wavelength, m.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// First horizontal distance, m.
    #[arg(long)]
    pub d_start: Option<f64>,
    /// Last horizontal distance, m.
    #[arg(long)]
    pub d_stop: Option<f64>,
    /// Number of log-spaced distances.
    #[arg(long)]
    pub d_points: Option<usize>,
    /// Transmit power, W.
    #[arg(long)]
    pub pt: Option<f64>,
    /// Real ground reflection coefficient of the two-ray model.
    #[arg(long, allow_negative_numbers = true)]
    pub reflection: Option<f64>,
}

const KEYS: &[&str] = &[
    "mode", "n", "m", "family", "snr-start", "snr-stop", "snr-step", "trials", "seed", "batch",
    "early-stop", "out", "models", "ht", "hr", "lambda", "d-start", "d-stop", "d-points", "pt",
    "reflection",
];

/// Parses `key = value` lines; `#` starts a comment.
pub fn parse_config_file(text: &str) -> Result<HashMap<String, String>, CliError> {
    let mut map = HashMap::new();
    for (i, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| {
            CliError::Validation(format!("config line {}: expected key = value, got {raw:?}", i + 1))
        })?;
        let key = key.trim().replace('_', "-");
        if !KEYS.contains(&key.as_str()) {
            return Err(CliError::Validation(format!("config line {}: unknown key {key:?}", i + 1)));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

struct Layered<'a> {
    file: &'a HashMap<String, String>,
}

impl Layered<'_> {
    fn get<T: FromStr>(&self, flag: Option<T>, key: &str, default: T) -> Result<T, CliError>
    where
        T::Err: std::fmt::Display,
    {
        if let Some(v) = flag {
            return Ok(v);
        }
        match self.file.get(key) {
            Some(s) => s
                .parse()
                .map_err(|e| CliError::Validation(format!("config key {key}: {e}"))),
            None => Ok(default),
        }
    }

    fn list<T: FromStr + Clone>(&self, flag: &[T], key: &str, default: &[T]) -> Result<Vec<T>, CliError>
    where
        T::Err: std::fmt::Display,
    {
        if !flag.is_empty() {
            return Ok(flag.to_vec());
        }
        match self.file.get(key) {
            Some(s) => s
                .split(',')
                .map(|v| {
                    v.trim()
                        .parse()
                        .map_err(|e| CliError::Validation(format!("config key {key}: {e}")))
                })
                .collect(),
            None => Ok(default.to_vec()),
        }
    }
}

/// Path-loss geometry shared by all distances.
#[derive(Debug, Clone, PartialEq)]
pub struct GeometryConfig {
    pub ht: f64,
    pub hr: f64,
    pub lambda: f64,
    pub distances: Vec<f64>,
    pub pt: f64,
    pub reflection: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mode: RisMode,
    pub n: Vec<usize>,
    pub modulation: ModulationSpec,
    pub snr_db: Vec<f64>,
    pub trials: u64,
    pub seed: u64,
    pub batch: u64,
    pub early_stop: bool,
    pub out: Option<PathBuf>,
    pub models: Vec<String>,
    pub geometry: GeometryConfig,
}

pub const MODELS: &[&str] = &["los", "two-ray", "ris", "relay"];

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

/// Inclusive grid `start, start + step, …, stop`.
pub fn snr_grid(start: f64, stop: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if !(start.is_finite() && stop.is_finite()) {
        return Err(invalid("SNR grid bounds must be finite"));
    }
    if !(step > 0.0) {
        return Err(invalid(format!("snr-step must be positive, got {step}")));
    }
    if stop < start {
        return Err(invalid(format!("snr-stop ({stop}) is below snr-start ({start})")));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|k| start + k as f64 * step).collect())
}

impl RunConfig {
    /// Merges flags over the config file (if any) and validates everything.
    pub fn resolve(opts: &Opts, defaults: &Defaults) -> Result<RunConfig, CliError> {
        let file = match &opts.config {
            Some(path) => parse_config_file(&read_config(path)?)?,
            None => HashMap::new(),
        };
        let l = Layered { file: &file };

        let mode: RisMode = l
            .get(opts.mode.clone(), "mode", "reflector".into())?
            .parse::<RisMode>()?;
        let n = l.list(&opts.n, "n", &defaults.n)?;
        if n.is_empty() || n.contains(&0) {
            return Err(invalid("every --n must be at least 1"));
        }
        let family: ModulationFamily = l
            .get(opts.family.clone(), "family", "psk".into())?
            .parse::<ModulationFamily>()?;
        let m = l.get(opts.m, "m", 2)?;
        let modulation = ModulationSpec::new(family, m, 1.0)?;
        if mode == RisMode::Transmitter && family == ModulationFamily::Qam {
            return Err(invalid("the RIS transmitter encodes data in phases only; use --family psk"));
        }

        let snr_db = snr_grid(
            l.get(opts.snr_start, "snr-start", defaults.snr_start)?,
            l.get(opts.snr_stop, "snr-stop", defaults.snr_stop)?,
            l.get(opts.snr_step, "snr-step", defaults.snr_step)?,
        )?;
        let trials = l.get(opts.trials, "trials", defaults.trials)?;
        if trials < 1 {
            return Err(invalid("trials must be at least 1"));
        }
        let batch = l.get(opts.batch, "batch", rislink::montecarlo::DEFAULT_BATCH)?;
        if batch < 1 {
            return Err(invalid("batch must be at least 1"));
        }
        let early_stop = opts.early_stop || l.get(None, "early-stop", false)?;

        let models = l.list(&opts.models, "models", &defaults.models)?;
        if models.is_empty() {
            return Err(invalid("model list is empty"));
        }
        if let Some(bad) = models.iter().find(|m| !MODELS.contains(&m.as_str())) {
            return Err(invalid(format!("unknown model {bad:?}; expected one of {MODELS:?}")));
        }

        let d_start = l.get(opts.d_start, "d-start", 1e3)?;
        let d_stop = l.get(opts.d_stop, "d-stop", 1e5)?;
        let d_points = l.get(opts.d_points, "d-points", 41)?;
        if !(d_start > 0.0 && d_stop >= d_start) || d_points < 1 {
            return Err(invalid(format!(
                "distances must satisfy 0 < d-start <= d-stop with d-points >= 1, got {d_start}, {d_stop}, {d_points}"
            )));
        }
        let geometry = GeometryConfig {
            ht: l.get(opts.ht, "ht", 1.0)?,
            hr: l.get(opts.hr, "hr", 1.0)?,
            lambda: l.get(opts.lambda, "lambda", 1.0)?,
            distances: rislink::geometry::logspace(d_start, d_stop, d_points),
            pt: l.get(opts.pt, "pt", 1.0)?,
            reflection: l.get(opts.reflection, "reflection", -1.0)?,
        };
        // Checks every geometry invariant once before any computation.
        rislink::geometry::TwoRayGeometry::new(geometry.ht, geometry.hr, d_start, geometry.lambda)?;
        if !(geometry.pt.is_finite() && geometry.pt >= 0.0) {
            return Err(invalid(format!("pt must be non-negative, got {}", geometry.pt)));
        }
        if !(geometry.reflection.abs() <= 1.0) {
            return Err(invalid(format!("|reflection| must not exceed 1, got {}", geometry.reflection)));
        }

        let out = opts
            .out
            .clone()
            .or_else(|| file.get("out").map(PathBuf::from));

        Ok(RunConfig {
            mode,
            n,
            modulation,
            snr_db,
            trials,
            seed: l.get(opts.seed, "seed", 1)?,
            batch,
            early_stop,
            out,
            models,
            geometry,
        })
    }
}

fn read_config(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path)
        .map_err(|e| invalid(format!("cannot read config {}: {e}", path.display())))
}

/// Per-command defaults for keys left unset.
#[derive(Debug, Clone)]
pub struct Defaults {
    pub n: Vec<usize>,
    pub snr_start: f64,
    pub snr_stop: f64,
    pub snr_step: f64,
    pub trials: u64,
    pub models: Vec<String>,
}

impl Default for Defaults {
    fn default() -> Self {
        Defaults {
            n: vec![32],
            snr_start: -45.0,
            snr_stop: 0.0,
            snr_step: 1.0,
            trials: 100_000,
            models: MODELS.iter().map(|s| s.to_string()).collect(),
        }
    }
}

impl Defaults {
    pub fn pathloss() -> Self {
        Defaults {
            n: vec![100],
            ..Default::default()
        }
    }
}
