//! The two virtual daily-living tasks: a scripted kettle pour and the
//! door-opening state machine driven by an optimal and an exploring user.
//!
//! `cargo run --example adl_tasks`

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wrist_testbed::adl::{
    kettle_step, optimal_sequence, run_adl, AdlTask, ExploringDoorUser, KettleParams, KettleState, OptimalDoorScript,
    ScriptedPour,
};

pub fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let params = KettleParams::default();

    for (stop, label) in [(0.74, "careful"), (0.95, "late stop"), (0.5, "early stop")] {
        let mut pour = ScriptedPour::new(3.0, 40.0, stop, 0.15);
        let run = run_adl(AdlTask::Kettle { controller: &mut pour, params: params.clone(), dt: 0.01 }, &mut rng)?;
        let fill = run.log.last().and_then(|r| r.fill).unwrap_or(f64::NAN);
        println!("kettle, {label:<11} {:?}  fill {fill:.3}  Tk {:?}", run.outcome, run.completion_time);
    }

    // a closure is a controller too: hold 60 deg until the cup is over the line
    let mut s = KettleState::default();
    while !s.is_terminal() {
        let tilt = if s.fill < 0.8 { 60.0 } else { 0.0 };
        s = kettle_step(&s, &params, tilt, 0.01)?;
    }
    println!("kettle, hand loop    {:?}  fill {:.3}", s.outcome, s.fill);

    println!("\ndoor, optimal sequence of {} inputs:", optimal_sequence().len());
    let run =
        run_adl(AdlTask::Door { controller: &mut OptimalDoorScript { action_s: 2.0 }, timeout_s: 300.0 }, &mut rng)?;
    for row in &run.log {
        println!("  {:>6.1}s  {:<22} -> {}", row.t, row.input, row.state);
    }
    let mut user = ExploringDoorUser { mean_action_s: 3.0, error_rate: 0.25, pace_cv: 0.3 };
    for _ in 0..3 {
        let r = run_adl(AdlTask::Door { controller: &mut user, timeout_s: 300.0 }, &mut rng)?;
        println!("exploring user: Td {:.1} s over {} inputs", r.completion_time.unwrap_or(f64::NAN), r.log.len() - 1);
    }
    Ok(())
}
