//! Validate the 3-down/1-up staircases against an analytic same-different
//! observer: many simulated tracks per modality, median JND vs the stimulus
//! difference detected 79.4% of the time.
//!
//! `cargo run --release --example staircase_montecarlo -- [runs]`

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wrist_testbed::cli_io::{cmd_montecarlo, simulate_staircase, RunConfig};
use wrist_testbed::psychophysics::{
    convergence_level, solve_threshold, Modality, ObserverModel, Response, Staircase, StaircaseConfig,
};

pub fn main() -> Result<(), Box<dyn std::error::Error>> {
    run(std::env::args().nth(1))
}

pub fn run(arg: Option<String>) -> Result<(), Box<dyn std::error::Error>> {
    let runs = arg.map(|s| s.parse()).transpose()?.unwrap_or(500);

    // one track in detail
    let observer = ObserverModel::default();
    let cfg = StaircaseConfig::velocity();
    let mut sc = Staircase::new(cfg.clone())?;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    while !sc.is_terminated() {
        let delta = sc.delta();
        let different = observer.respond_2ifc(Modality::Velocity, cfg.reference, cfg.reference + delta, &mut rng);
        sc.respond(if different { Response::Correct } else { Response::Incorrect })?;
    }
    let trace: Vec<String> =
        sc.trace().iter().map(|r| format!("{}{}", r.delta, if r.reversal_flag { "*" } else { "" })).collect();
    println!("velocity track (* = reversal): {}", trace.join(" "));
    let jnd = sc.jnd()?;
    let s = observer.velocity;
    let target =
        solve_threshold(s.sigma, s.criterion, observer.lapse_rate, convergence_level(3), 60.0).unwrap_or(f64::NAN);
    println!("JND {:.2} dps (Weber {:.1}%), analytic point {target:.2} dps", jnd.jnd_abs, jnd.weber_pct);

    // simulate_staircase also randomises interval order, so it draws a different stream
    let other = simulate_staircase(&cfg, &observer, Modality::Velocity, &mut ChaCha8Rng::seed_from_u64(5))?;
    println!("another track: {other:?}\n");

    let mut run_cfg = RunConfig { runs, ..RunConfig::default() };
    // at 0.5 the torque step is a third of the threshold and the median is
    // pulled upward by the coarse grid
    run_cfg.montecarlo.sensitivity_scales = vec![0.5, 1.0, 1.5];
    let t0 = std::time::Instant::now();
    let summary = cmd_montecarlo(&run_cfg)?;
    print!("{}", summary.text());
    println!("{} tracks in {:.2?}", runs * summary.rows.len(), t0.elapsed());
    Ok(())
}
