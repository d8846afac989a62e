//! The CSV-producing subcommands.

use rislink::geometry::{
    los_power, ris_ground_power, relay_power, two_ray_power, TilePhasing, TileSet, TwoRayGeometry,
};
use rislink::montecarlo::{sweep, SimConfig, TrialPlan};
use rislink::sep::{sep_exact, sep_upper_bound, sep_waterfall_approx, Regime};
use rislink::{db_to_linear, Complex};

use crate::config::RunConfig;
use crate::format::{fmt_num, CsvTable};
use crate::CliError;

pub const PATHLOSS_HEADER: &[&str] = &[
    "model", "d_m", "lambda_m", "ht_m", "hr_m", "N", "pr_watts", "gain_db_vs_los",
];
pub const SEP_THEORY_HEADER: &[&str] = &[
    "mode", "N", "M", "family", "snr_db", "pe_exact", "pe_ub", "pe_waterfall", "regime_flag",
];
pub const SEP_SIM_HEADER: &[&str] = &[
    "mode", "N", "M", "snr_db", "trials", "errors", "pe_hat", "ci_low", "ci_high", "pe_exact",
];

/// One row per (model, distance); RIS rows repeat for every `N`.
pub fn cmd_pathloss(config: &RunConfig) -> Result<String, CliError> {
    let g = &config.geometry;
    let mut table = CsvTable::new(PATHLOSS_HEADER);
    let mut emit = |model: &str, d: f64, n: Option<usize>, p_r: f64, gain: f64| {
        let n = n.map(|n| n.to_string()).unwrap_or_default();
        table.row([
            model.to_string(),
            fmt_num(d),
            fmt_num(g.lambda),
            fmt_num(g.ht),
            fmt_num(g.hr),
            n,
            fmt_num(p_r),
            fmt_num(gain),
        ]);
    };
    for model in &config.models {
        for &d in &g.distances {
            let geom = TwoRayGeometry::new(g.ht, g.hr, d, g.lambda)?;
            match model.as_str() {
                "los" => {
                    let p = los_power(g.pt, &geom)?;
                    emit("los", d, None, p.p_r, p.gain_db);
                }
                "two-ray" => {
                    let p = two_ray_power(g.pt, &geom, Complex::new(g.reflection, 0.0))?;
                    emit("two-ray", d, None, p.p_r, p.gain_db);
                }
                "ris" => {
                    for &n in &config.n {
                        let tiles = TileSet::specular(&geom, n, Complex::new(1.0, 0.0))?;
                        let p = ris_ground_power(g.pt, &geom, &tiles, TilePhasing::Optimal)?;
                        emit("ris", d, Some(n), p.p_r, p.gain_db);
                    }
                }
                "relay" => {
                    let p = relay_power(g.pt, d / 2.0, d / 2.0, g.lambda)?;
                    emit("relay", d, None, p.p_r, p.gain_db);
                }
                other => return Err(CliError::Validation(format!("unknown model {other:?}"))),
            }
        }
    }
    Ok(table.finish())
}

pub fn cmd_sep_theory(config: &RunConfig) -> Result<String, CliError> {
    let family = config.modulation.family();
    let m = config.modulation.order();
    let mut table = CsvTable::new(SEP_THEORY_HEADER);
    for &n in &config.n {
        for &db in &config.snr_db {
            let rho = db_to_linear(db);
            let exact = sep_exact(config.mode, family, n, rho, m)?;
            let ub = sep_upper_bound(config.mode, family, n, rho, m)?;
            let wf = sep_waterfall_approx(config.mode, n, rho, m)?;
            table.row([
                config.mode.as_str().to_string(),
                n.to_string(),
                m.to_string(),
                family.as_str().to_string(),
                fmt_num(db),
                fmt_num(exact),
                fmt_num(ub),
                fmt_num(wf),
                Regime::classify(n, rho).as_str().to_string(),
            ]);
        }
    }
    Ok(table.finish())
}

pub fn trial_plan(config: &RunConfig) -> Result<TrialPlan, CliError> {
    Ok(TrialPlan::new(config.seed, config.trials, config.batch)?
        .with_early_stop(config.early_stop))
}

/// Runs on the current rayon pool; see [`crate::run`] for worker control.
pub fn cmd_sep_sim(config: &RunConfig) -> Result<String, CliError> {
    let plan = trial_plan(config)?;
    let configs: Vec<SimConfig> = config
        .n
        .iter()
        .map(|&n| SimConfig {
            mode: config.mode,
            n,
            modulation: config.modulation,
        })
        .collect();
    let result = sweep(&config.snr_db, &configs, &plan)?;
    let mut table = CsvTable::new(SEP_SIM_HEADER);
    for row in &result.rows {
        let e = &row.estimate;
        table.row([
            e.mode.as_str().to_string(),
            e.n.to_string(),
            e.m.to_string(),
            fmt_num(e.snr_db),
            e.trials.to_string(),
            e.errors.to_string(),
            fmt_num(e.pe_hat),
            fmt_num(e.ci.low),
            fmt_num(e.ci.high),
            fmt_num(row.analytic.pe),
        ]);
    }
    Ok(table.finish())
}
