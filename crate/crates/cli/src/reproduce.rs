//! Figure recipes: write the figure's CSVs and check the behavior it shows.

use std::path::{Path, PathBuf};

use crate::checks::{self, Check};
use crate::commands::{cmd_pathloss, cmd_sep_sim, cmd_sep_theory};
use crate::config::{Defaults, Figure, Opts, RunConfig};
use crate::format::{fmt_num, CsvTable};
use crate::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub files: Vec<PathBuf>,
    pub checks: Vec<Check>,
    pub summary: String,
}

fn write(dir: &Path, name: &str, csv: &str, files: &mut Vec<PathBuf>) -> Result<(), CliError> {
    std::fs::create_dir_all(dir)
        .map_err(|e| CliError::Io(format!("cannot create {}: {e}", dir.display())))?;
    let path = dir.join(name);
    std::fs::write(&path, csv)
        .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?;
    files.push(path);
    Ok(())
}

fn with_defaults(opts: &Opts, n: &[usize], step: f64) -> Opts {
    let mut o = opts.clone();
    o.out = None;
    if o.n.is_empty() {
        o.n = n.to_vec();
    }
    o.snr_step = o.snr_step.or(Some(step));
    o
}

/// Writes the figure's CSVs into `--out` (default: current directory).
pub fn cmd_reproduce(figure: Figure, opts: &Opts) -> Result<Report, CliError> {
    let dir = opts.out.clone().unwrap_or_else(|| PathBuf::from("."));
    let mut files = Vec::new();
    let mut checks = Vec::new();

    match figure {
        Figure::Scaling => {
            let config = RunConfig::resolve(&with_defaults(opts, &[100], 1.0), &Defaults::pathloss())?;
            write(&dir, "scaling.csv", &cmd_pathloss(&config)?, &mut files)?;
            checks.push(checks::criterion_1());
            checks.push(checks::criterion_2());
        }
        Figure::Fig6 => {
            let config = RunConfig::resolve(&with_defaults(opts, &[16, 32], 0.5), &Defaults::default())?;
            write(&dir, "fig6.csv", &cmd_sep_theory(&config)?, &mut files)?;
            let rows = checks::below_awgn(&config.n, &config.snr_db)?;
            let mut table = CsvTable::new(&["N", "snr_db", "pe_ris", "pe_awgn"]);
            for &(n, db, ris, awgn) in &rows {
                table.row([n.to_string(), fmt_num(db), fmt_num(ris), fmt_num(awgn)]);
            }
            write(&dir, "fig6_awgn.csv", &table.finish(), &mut files)?;
            let above = rows.iter().filter(|r| r.2 >= r.3).count();
            checks.push(Check {
                id: 0,
                name: "RIS SEP below the AWGN reference at every grid point".into(),
                passed: above == 0,
                detail: format!("{above} of {} points at or above AWGN", rows.len()),
            });
        }
        Figure::Fig7 => {
            let ns = [8, 16, 32, 64, 128, 256];
            let config = RunConfig::resolve(&with_defaults(opts, &ns, 0.5), &Defaults::default())?;
            write(&dir, "fig7.csv", &cmd_sep_theory(&config)?, &mut files)?;
            let mut table = CsvTable::new(&["N", "required_snr_db", "gap_to_2N_db"]);
            for &n in &config.n {
                let req = checks::required_snr_reflector(n)?;
                let gap = checks::required_snr_reflector(2 * n)
                    .map(|r| fmt_num(req - r))
                    .unwrap_or_default();
                table.row([n.to_string(), fmt_num(req), gap]);
            }
            write(&dir, "fig7_gaps.csv", &table.finish(), &mut files)?;
            if opts.trials.is_some() {
                let sim = RunConfig::resolve(&with_defaults(opts, &ns, 1.0), &Defaults::default())?;
                write(&dir, "fig7_sim.csv", &cmd_sep_sim(&sim)?, &mut files)?;
            }
            checks.push(checks::criterion_5());
        }
    }

    let mut summary = String::new();
    for f in &files {
        summary.push_str(&format!("wrote {}\n", f.display()));
    }
    for c in &checks {
        summary.push_str(&c.line());
        summary.push('\n');
    }
    Ok(Report {
        files,
        checks,
        summary,
    })
}
