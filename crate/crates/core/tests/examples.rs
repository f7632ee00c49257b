//! Every example compiles into this test and runs end to end.

#[allow(dead_code)]
#[path = "../examples/adl_tasks.rs"]
mod adl_tasks;
#[allow(dead_code)]
#[path = "../examples/correlation_report.rs"]
mod correlation_report;
#[allow(dead_code)]
#[path = "../examples/haptic_walls.rs"]
mod haptic_walls;
#[allow(dead_code)]
#[path = "../examples/plant_velocity_filter.rs"]
mod plant_velocity_filter;
#[allow(dead_code)]
#[path = "../examples/reproduce_paper.rs"]
mod reproduce_paper;
#[allow(dead_code)]
#[path = "../examples/simulate_session.rs"]
mod simulate_session;
#[allow(dead_code)]
#[path = "../examples/staircase_montecarlo.rs"]
mod staircase_montecarlo;

#[test]
fn reproduce_paper_runs() {
    reproduce_paper::main().unwrap();
}

#[test]
fn staircase_montecarlo_runs() {
    staircase_montecarlo::run(Some("50".into())).unwrap();
}

#[test]
fn simulate_session_runs() {
    let dir = tempfile::tempdir().unwrap();
    simulate_session::run(Some(dir.path().to_string_lossy().into_owned())).unwrap();
    assert!(dir.path().join("participant.csv").exists());
}

#[test]
fn plant_velocity_filter_runs() {
    plant_velocity_filter::main().unwrap();
}

#[test]
fn haptic_walls_runs() {
    haptic_walls::main().unwrap();
}

#[test]
fn adl_tasks_runs() {
    adl_tasks::main().unwrap();
}

#[test]
fn correlation_report_runs() {
    correlation_report::run(None).unwrap();
}
