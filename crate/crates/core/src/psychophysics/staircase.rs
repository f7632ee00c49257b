//! Transformed up-down staircase (n-down-1-up) with reversal bookkeeping.

use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaircaseConfig {
    /// Reference stimulus, in the modality's units.
    pub reference: f64,
    pub initial_delta: f64,
    pub step_down: f64,
    pub step_up: f64,
    pub n_down: u32,
    pub max_trials: u32,
    pub stop_reversals: usize,
    pub jnd_reversals: usize,
    pub delta_floor: f64,
    pub delta_ceiling: f64,
}

impl StaircaseConfig {
    pub fn position(reference_deg: f64) -> Self {
        Self {
            reference: reference_deg,
            initial_delta: 8.0,
            step_down: 1.0,
            step_up: 1.0,
            delta_floor: 1.51,
            delta_ceiling: 20.0,
            ..Self::base()
        }
    }

    pub fn velocity() -> Self {
        Self {
            reference: 60.0,
            initial_delta: 16.0,
            step_down: 1.5,
            step_up: 1.5,
            delta_floor: 0.5,
            delta_ceiling: 60.0,
            ..Self::base()
        }
    }

    pub fn torque() -> Self {
        Self {
            reference: 500.0,
            initial_delta: 150.0,
            step_down: 15.0,
            step_up: 15.0,
            delta_floor: 5.0,
            delta_ceiling: 500.0,
            ..Self::base()
        }
    }

    fn base() -> Self {
        Self {
            reference: 1.0,
            initial_delta: 1.0,
            step_down: 1.0,
            step_up: 1.0,
            n_down: 3,
            max_trials: 50,
            stop_reversals: 8,
            jnd_reversals: 4,
            delta_floor: 1.0,
            delta_ceiling: 1.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.delta_floor > 0.0
            && self.delta_floor <= self.initial_delta
            && self.initial_delta <= self.delta_ceiling
            && self.step_down > 0.0
            && self.step_up > 0.0
            && self.n_down >= 1
            && self.max_trials >= 1
            && self.jnd_reversals >= 1
            && self.jnd_reversals <= self.stop_reversals
            && self.reference != 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::Domain(format!("invalid staircase config: {self:?}")))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Direction {
    None,
    Descending,
    Ascending,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Response {
    Correct,
    Incorrect,
    /// Trial discarded (e.g. the participant left the tolerance region).
    Ignored,
}

impl fmt::Display for Response {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Response::Correct => "correct",
            Response::Incorrect => "incorrect",
            Response::Ignored => "ignored",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Termination {
    Reversals,
    MaxTrials,
}

impl fmt::Display for Termination {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Termination::Reversals => "reversals",
            Termination::MaxTrials => "max_trials",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StaircaseState {
    pub current_delta: f64,
    pub consecutive_correct: u32,
    pub direction: Direction,
    pub reversal_deltas: Vec<f64>,
    pub trials_completed: u32,
    pub ignored_trials: u32,
    pub terminated: Option<Termination>,
}

impl StaircaseState {
    pub fn new(config: &StaircaseConfig) -> Self {
        Self {
            current_delta: config.initial_delta,
            consecutive_correct: 0,
            direction: Direction::None,
            reversal_deltas: Vec::new(),
            trials_completed: 0,
            ignored_trials: 0,
            terminated: None,
        }
    }

    pub fn is_terminated(&self) -> bool {
        self.terminated.is_some()
    }
}

/// What one update did, for trace logging.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpdateOutcome {
    pub moved: Option<Direction>,
    pub reversal: bool,
}

/// Applies one response and returns the new state.
///
/// A direction change records the delta held before the change as a reversal.
/// A step blocked by the floor or ceiling also records a reversal at that
/// bound, so a track pinned at a bound still terminates and reports the bound.
pub fn staircase_update(
    state: &StaircaseState,
    config: &StaircaseConfig,
    response: Response,
) -> Result<StaircaseState> {
    let mut next = state.clone();
    apply(&mut next, config, response)?;
    Ok(next)
}

pub(crate) fn apply(s: &mut StaircaseState, config: &StaircaseConfig, response: Response) -> Result<UpdateOutcome> {
    if let Some(reason) = s.terminated {
        return Err(Error::State(format!("staircase already terminated ({reason})")));
    }
    let mut out = UpdateOutcome { moved: None, reversal: false };
    let requested = match response {
        Response::Ignored => {
            s.ignored_trials += 1;
            return Ok(out);
        }
        Response::Correct => {
            s.consecutive_correct += 1;
            if s.consecutive_correct >= config.n_down {
                s.consecutive_correct = 0;
                Some(Direction::Descending)
            } else {
                None
            }
        }
        Response::Incorrect => {
            s.consecutive_correct = 0;
            Some(Direction::Ascending)
        }
    };
    s.trials_completed += 1;

    if let Some(dir) = requested {
        let before = s.current_delta;
        let target = match dir {
            Direction::Descending => (before - config.step_down).max(config.delta_floor),
            _ => (before + config.step_up).min(config.delta_ceiling),
        };
        let blocked = target == before;
        let turned = s.direction != Direction::None && s.direction != dir;
        if turned || blocked {
            s.reversal_deltas.push(before);
            out.reversal = true;
        }
        s.direction = dir;
        s.current_delta = target;
        out.moved = Some(dir);
    }

    if s.reversal_deltas.len() >= config.stop_reversals {
        s.terminated = Some(Termination::Reversals);
    } else if s.trials_completed >= config.max_trials {
        s.terminated = Some(Termination::MaxTrials);
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JndResult {
    pub jnd_abs: f64,
    pub weber_pct: f64,
    pub reversal_trace: Vec<f64>,
    pub trials_used: u32,
}

pub(crate) fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// JND as the median of the last `jnd_reversals` reversal deltas.
pub fn staircase_jnd(state: &StaircaseState, config: &StaircaseConfig) -> Result<JndResult> {
    let revs = &state.reversal_deltas;
    if revs.len() < config.jnd_reversals {
        return Err(Error::InsufficientData { needed: config.jnd_reversals, got: revs.len() });
    }
    let jnd = median(&revs[revs.len() - config.jnd_reversals..]);
    Ok(JndResult {
        jnd_abs: jnd,
        weber_pct: 100.0 * jnd / config.reference,
        reversal_trace: revs.clone(),
        trials_used: state.trials_completed,
    })
}

/// One row of a staircase trace log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub trial: u32,
    pub delta: f64,
    pub response: String,
    pub reversal_flag: bool,
    pub terminated_reason: String,
}

/// A staircase that records its own trace as it is driven.
#[derive(Debug, Clone)]
pub struct Staircase {
    config: StaircaseConfig,
    state: StaircaseState,
    trace: Vec<TraceRow>,
}

impl Staircase {
    pub fn new(config: StaircaseConfig) -> Result<Self> {
        config.validate()?;
        let state = StaircaseState::new(&config);
        Ok(Self { config, state, trace: Vec::new() })
    }

    pub fn config(&self) -> &StaircaseConfig {
        &self.config
    }

    pub fn state(&self) -> &StaircaseState {
        &self.state
    }

    pub fn delta(&self) -> f64 {
        self.state.current_delta
    }

    pub fn is_terminated(&self) -> bool {
        self.state.is_terminated()
    }

    pub fn respond(&mut self, response: Response) -> Result<UpdateOutcome> {
        let delta = self.state.current_delta;
        let out = apply(&mut self.state, &self.config, response)?;
        self.trace.push(TraceRow {
            trial: self.trace.len() as u32 + 1,
            delta,
            response: response.to_string(),
            reversal_flag: out.reversal,
            terminated_reason: self.state.terminated.map(|t| t.to_string()).unwrap_or_default(),
        });
        Ok(out)
    }

    pub fn jnd(&self) -> Result<JndResult> {
        staircase_jnd(&self.state, &self.config)
    }

    pub fn trace(&self) -> &[TraceRow] {
        &self.trace
    }
}

pub fn write_trace<W: Write>(writer: W, rows: &[TraceRow]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    if rows.is_empty() {
        w.write_record(["trial", "delta", "response", "reversal_flag", "terminated_reason"])?;
    }
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io("<trace writer>", e))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use Response::*;

    fn cfg() -> StaircaseConfig {
        StaircaseConfig {
            reference: 33.27,
            initial_delta: 8.0,
            step_down: 1.0,
            step_up: 1.0,
            delta_floor: 1.0,
            delta_ceiling: 20.0,
            ..StaircaseConfig::base()
        }
    }

    fn run(responses: &[Response]) -> StaircaseState {
        let c = cfg();
        let mut s = StaircaseState::new(&c);
        for &r in responses {
            s = staircase_update(&s, &c, r).unwrap();
        }
        s
    }

    #[test]
    fn two_correct_do_not_move() {
        let s = run(&[Correct, Correct]);
        assert_eq!(s.current_delta, 8.0);
        assert_eq!(s.consecutive_correct, 2);
        assert_eq!(s.trials_completed, 2);
    }

    #[test]
    fn down_then_up_records_turning_point() {
        let s = run(&[Correct, Correct, Correct]);
        assert_eq!(s.current_delta, 7.0);
        assert!(s.reversal_deltas.is_empty());
        let s = run(&[Correct, Correct, Correct, Incorrect]);
        assert_eq!(s.current_delta, 8.0);
        assert_eq!(s.reversal_deltas, vec![7.0]);
    }

    #[test]
    fn alternating_runs_stop_after_eight_reversals() {
        let c = cfg();
        let mut s = StaircaseState::new(&c);
        let cycle = [Correct, Correct, Correct, Incorrect];
        let mut i = 0;
        while !s.is_terminated() {
            s = staircase_update(&s, &c, cycle[i % 4]).unwrap();
            i += 1;
        }
        assert_eq!(s.terminated, Some(Termination::Reversals));
        assert_eq!(s.reversal_deltas.len(), 8);
        assert_eq!(s.trials_completed, 19);
        assert!(s.trials_completed < 50);
    }

    #[test]
    fn ignored_leaves_track_untouched() {
        let s = run(&[Correct, Ignored, Ignored]);
        assert_eq!(s.consecutive_correct, 1);
        assert_eq!(s.trials_completed, 1);
        assert_eq!(s.ignored_trials, 2);
    }

    #[test]
    fn update_after_termination_fails() {
        let c = StaircaseConfig { max_trials: 2, ..cfg() };
        let mut s = StaircaseState::new(&c);
        s = staircase_update(&s, &c, Incorrect).unwrap();
        s = staircase_update(&s, &c, Incorrect).unwrap();
        assert_eq!(s.terminated, Some(Termination::MaxTrials));
        assert!(matches!(staircase_update(&s, &c, Correct), Err(Error::State(_))));
    }

    #[test]
    fn pinned_floor_terminates_at_floor() {
        let c = cfg();
        let mut s = StaircaseState::new(&c);
        while !s.is_terminated() {
            s = staircase_update(&s, &c, Correct).unwrap();
        }
        assert_eq!(s.terminated, Some(Termination::Reversals));
        let j = staircase_jnd(&s, &c).unwrap();
        assert_eq!(j.jnd_abs, c.delta_floor);
    }

    #[test]
    fn jnd_median_of_last_four() {
        let c = cfg();
        let s = StaircaseState { reversal_deltas: vec![9.0, 2.0, 6.0, 4.0, 6.0, 4.0], ..StaircaseState::new(&c) };
        assert_eq!(staircase_jnd(&s, &c).unwrap().jnd_abs, 5.0);
    }

    #[test]
    fn jnd_weber_table_values() {
        let pos = StaircaseConfig { reference: 33.27, ..cfg() };
        let s = StaircaseState { reversal_deltas: vec![4.74; 4], ..StaircaseState::new(&pos) };
        assert!((staircase_jnd(&s, &pos).unwrap().weber_pct - 14.25).abs() < 0.005);
        let tq = StaircaseConfig::torque();
        let s = StaircaseState { reversal_deltas: vec![59.65; 4], ..StaircaseState::new(&tq) };
        assert!((staircase_jnd(&s, &tq).unwrap().weber_pct - 11.93).abs() < 1e-9);
    }

    #[test]
    fn jnd_needs_four_reversals() {
        let c = cfg();
        let s = run(&[Correct, Correct, Correct, Incorrect]);
        assert!(matches!(staircase_jnd(&s, &c), Err(Error::InsufficientData { needed: 4, got: 1 })));
    }

    #[test]
    fn trace_rows_follow_updates() {
        let mut sc = Staircase::new(cfg()).unwrap();
        for r in [Correct, Correct, Correct, Incorrect] {
            sc.respond(r).unwrap();
        }
        let t = sc.trace();
        assert_eq!(t.len(), 4);
        assert_eq!(t[2].delta, 8.0);
        assert_eq!(t[3].delta, 7.0);
        assert!(t[3].reversal_flag);
        let mut buf = Vec::new();
        write_trace(&mut buf, t).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("trial,delta,response,reversal_flag,terminated_reason\n"));
    }

    #[test]
    fn invalid_configs() {
        assert!(Staircase::new(StaircaseConfig { delta_floor: 0.0, ..cfg() }).is_err());
        assert!(Staircase::new(StaircaseConfig { initial_delta: 30.0, ..cfg() }).is_err());
        assert!(Staircase::new(StaircaseConfig { n_down: 0, ..cfg() }).is_err());
    }
}
