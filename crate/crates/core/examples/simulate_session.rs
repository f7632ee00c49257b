//! Run one complete simulated session (gauge matching, three discrimination
//! staircases, two active reproductions, kettle and door) and write its logs.
//!
//! `cargo run --release --example simulate_session -- [out_dir]`

use std::path::PathBuf;

use wrist_testbed::participant::validate_participant;
use wrist_testbed::protocol::{
    counterbalance_order, run_session, session_rng, write_session, ParticipantProfile, SessionConfig,
};
use wrist_testbed::psychophysics::ObserverModel;

pub fn main() -> Result<(), Box<dyn std::error::Error>> {
    run(std::env::args().nth(1))
}

pub fn run(arg: Option<String>) -> Result<(), Box<dyn std::error::Error>> {
    let out = arg.map(PathBuf::from).unwrap_or_else(|| std::env::temp_dir().join("wrist_session_example"));

    let profile = ParticipantProfile { pid: 1, ..ParticipantProfile::default() };
    let observer = ObserverModel::default();
    let config = SessionConfig::default();
    let order = counterbalance_order(0, 2024);
    let mut rng = session_rng(2024, 0, &observer);

    let session = run_session(&profile, &observer, &config, &order, &mut rng)?;
    println!("cROM {:.1} deg, neutral {:.1} deg", session.crom.crom_deg, session.crom.neutral_deg);
    println!("{:<16}{:>10}{:>9}{:>8}{:>9}", "block", "measure", "weber%", "trials", "ignored");
    for b in &session.blocks {
        let fmt = |v: Option<f64>| v.map(|x| format!("{x:.2}")).unwrap_or_else(|| "-".into());
        println!(
            "{:<16}{:>10}{:>9}{:>8}{:>9}",
            b.kind.label(),
            fmt(b.measure),
            fmt(b.weber_pct),
            b.trials.len(),
            b.ignored_trials
        );
        for n in &b.notes {
            println!("    {n}");
        }
    }
    let violations = validate_participant(&session.record);
    println!("record violations: {}", violations.len());

    write_session(&out, &session)?;
    println!("logs in {}", out.display());
    Ok(())
}
