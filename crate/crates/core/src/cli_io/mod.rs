//! Configuration, the command implementations behind the `wrist` binary,
//! and the reproduction report.

mod analyze;
mod config;
mod montecarlo;
mod reproduce;
mod simulate;

use std::fs;
use std::path::PathBuf;

pub use analyze::{cmd_analyze, Analysis, Outcome, POSITION_SENSE};
pub use config::{Mode, MonteCarloConfig, ReproduceConfig, RunConfig};
pub use montecarlo::{cmd_montecarlo, simulate_staircase, MonteCarloRow, MonteCarloSummary};
pub use reproduce::{
    cmd_reproduce_paper, shuffle_column, CorrelationRef, FooterRef, PairwiseRef, PaperReference, ReportRow,
    Reproduction, Status,
};
pub use simulate::{cmd_simulate, cmd_validate, write_violations, Simulation};

use crate::error::{Error, Result};
use crate::participant::{bundled_participants, load_participants, ParticipantRecord};

/// What a command printed and wrote. `ok` is false when the command ran but
/// found failures (failed checks, invalid rows, failed sessions).
#[derive(Debug, Clone)]
pub struct CommandOutput {
    pub summary: String,
    pub artifacts: Vec<PathBuf>,
    pub ok: bool,
}

/// The configured input table, or the bundled one.
pub fn load_input(cfg: &RunConfig) -> Result<Vec<ParticipantRecord>> {
    match &cfg.input {
        Some(p) => load_participants(p),
        None => Ok(bundled_participants()),
    }
}

/// Runs `cfg.mode`, writing artifacts under `cfg.out`.
pub fn run(cfg: &RunConfig) -> Result<CommandOutput> {
    cfg.validate()?;
    let out = &cfg.out;
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    match cfg.mode {
        Mode::Simulate => {
            let sim = cmd_simulate(cfg, out)?;
            let mut summary = format!("simulated {} session(s), {} failed\n", sim.sessions.len(), sim.failures.len());
            for (i, e) in &sim.failures {
                summary.push_str(&format!("session {i}: {e}\n"));
            }
            let block_errors = sim.block_errors();
            for e in &block_errors {
                summary.push_str(&format!("{e}\n"));
            }
            Ok(CommandOutput {
                summary,
                ok: sim.failures.is_empty() && block_errors.is_empty(),
                artifacts: sim.artifacts,
            })
        }
        Mode::Analyze => {
            let a = cmd_analyze(&load_input(cfg)?, cfg.seed, cfg.normality_resamples)?;
            let artifacts = a.write(out)?;
            Ok(CommandOutput { summary: a.text(), ok: a.violations.is_empty(), artifacts })
        }
        Mode::ReproducePaper => {
            let mut records = load_input(cfg)?;
            if let Some(col) = &cfg.reproduce.shuffle_column {
                records = shuffle_column(&records, col, cfg.seed)?;
            }
            let rep = cmd_reproduce_paper(&records, &PaperReference::bundled()?, cfg.seed, cfg.normality_resamples)?;
            let artifacts = rep.write(out)?;
            Ok(CommandOutput { summary: rep.text(), ok: rep.passed(), artifacts })
        }
        Mode::Montecarlo => {
            let mc = cmd_montecarlo(cfg)?;
            let artifacts = mc.write(out)?;
            Ok(CommandOutput { summary: mc.text(), ok: mc.all_within_tolerance(), artifacts })
        }
        Mode::Validate => {
            let records = load_input(cfg)?;
            let v = cmd_validate(&records);
            let path = out.join("violations.csv");
            write_violations(&path, &v)?;
            let mut summary = format!("{} record(s), {} violation(s)\n", records.len(), v.len());
            for (pid, viol) in &v {
                summary.push_str(&format!("P{pid} {viol}\n"));
            }
            Ok(CommandOutput { summary, ok: v.is_empty(), artifacts: vec![path] })
        }
    }
}
