use std::fs;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::participant::{validate_participant, write_participants, ParticipantRecord, Violation};
use crate::protocol::{heterogeneous_cohort, simulate_cohort, write_session, SessionResult};

use super::config::RunConfig;

#[derive(Debug, Clone)]
pub struct Simulation {
    pub sessions: Vec<SessionResult>,
    /// Sessions that could not run at all, by cohort index.
    pub failures: Vec<(usize, String)>,
    pub artifacts: Vec<PathBuf>,
}

impl Simulation {
    pub fn records(&self) -> Vec<ParticipantRecord> {
        self.sessions.iter().map(|s| s.record.clone()).collect()
    }

    /// Block-level errors across all sessions.
    pub fn block_errors(&self) -> Vec<String> {
        self.sessions.iter().flat_map(|s| s.errors.iter().map(move |e| format!("P{}: {e}", s.pid))).collect()
    }
}

/// Simulates the configured cohort (or a generated heterogeneous one) and
/// writes one directory per session plus the merged participant table.
/// Sessions run in parallel; every file is written afterwards from this
/// thread, in cohort order.
pub fn cmd_simulate(cfg: &RunConfig, out: &Path) -> Result<Simulation> {
    let cohort =
        if cfg.cohort.is_empty() { heterogeneous_cohort(cfg.participants, cfg.seed) } else { cfg.cohort.clone() };
    if cohort.is_empty() {
        return Err(Error::Config("cohort is empty".into()));
    }
    let results = simulate_cohort(&cohort, &cfg.session, cfg.seed);
    let mut sessions = Vec::new();
    let mut failures = Vec::new();
    for (i, r) in results.into_iter().enumerate() {
        match r {
            Ok(s) => sessions.push(s),
            Err(e) => failures.push((i, e.to_string())),
        }
    }
    let mut artifacts = Vec::new();
    let sessions_dir = out.join("sessions");
    for s in &sessions {
        let dir = sessions_dir.join(format!("p{:02}", s.pid));
        write_session(&dir, s)?;
        artifacts.push(dir);
    }
    fs::create_dir_all(out).map_err(|e| Error::io(out, e))?;
    let table = out.join("participants.csv");
    let records: Vec<ParticipantRecord> = sessions.iter().map(|s| s.record.clone()).collect();
    write_participants(fs::File::create(&table).map_err(|e| Error::io(&table, e))?, &records)?;
    artifacts.push(table);
    Ok(Simulation { sessions, failures, artifacts })
}

/// Record invariant violations for every row, in table order.
pub fn cmd_validate(records: &[ParticipantRecord]) -> Vec<(u32, Violation)> {
    records.iter().flat_map(|r| validate_participant(r).into_iter().map(move |v| (r.pid, v))).collect()
}

pub fn write_violations(path: &Path, violations: &[(u32, Violation)]) -> Result<()> {
    let f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(f);
    w.write_record(["pid", "field", "message"])?;
    for (pid, v) in violations {
        w.write_record([pid.to_string().as_str(), v.field, v.message.as_str()])?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}
