use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::units::{Angle, Seconds};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct KettleParams {
    pub tilt_threshold_deg: Angle,
    /// Fill units per second per degree of tilt beyond the threshold.
    pub flow_gain: f64,
    pub cup_capacity: f64,
    pub target_low: f64,
    pub target_high: f64,
    pub time_limit_s: Seconds,
}

impl Default for KettleParams {
    fn default() -> Self {
        Self {
            tilt_threshold_deg: 20.0,
            flow_gain: 0.02,
            cup_capacity: 1.0,
            target_low: 0.7,
            target_high: 0.9,
            time_limit_s: 20.0,
        }
    }
}

impl KettleParams {
    pub fn validate(&self) -> Result<()> {
        if !(0.0 < self.target_low && self.target_low < self.target_high && self.target_high <= self.cup_capacity) {
            return Err(Error::Domain("kettle band must satisfy 0 < low < high <= capacity".into()));
        }
        if !(self.flow_gain > 0.0) || !(self.time_limit_s > 0.0) {
            return Err(Error::Domain("kettle flow gain and time limit must be positive".into()));
        }
        Ok(())
    }

    pub fn flow(&self, tilt: Angle) -> f64 {
        self.flow_gain * (tilt - self.tilt_threshold_deg).max(0.0)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KettleOutcome {
    InProgress,
    Success,
    Overfilled,
    Underfilled,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KettleState {
    pub fill: f64,
    pub elapsed: Seconds,
    pub outcome: KettleOutcome,
    /// End of the last step with positive flow.
    pub last_flow_t: Option<Seconds>,
}

impl Default for KettleState {
    fn default() -> Self {
        Self { fill: 0.0, elapsed: 0.0, outcome: KettleOutcome::InProgress, last_flow_t: None }
    }
}

impl KettleState {
    pub fn is_terminal(&self) -> bool {
        self.outcome != KettleOutcome::InProgress
    }

    /// Completion time of a successful pour: when the liquid stopped flowing.
    pub fn completion_time(&self) -> Option<Seconds> {
        match self.outcome {
            KettleOutcome::Success => Some(self.last_flow_t.unwrap_or(0.0)),
            _ => None,
        }
    }
}

/// Integrates the pour over `dt` at the given kettle tilt.
pub fn kettle_step(state: &KettleState, params: &KettleParams, tilt: Angle, dt: Seconds) -> Result<KettleState> {
    if state.is_terminal() {
        return Err(Error::State(format!("kettle trial already ended: {:?}", state.outcome)));
    }
    if !(dt > 0.0) || !tilt.is_finite() {
        return Err(Error::Domain("kettle step needs dt > 0 and a finite tilt".into()));
    }
    let flow = params.flow(tilt);
    let mut next = *state;
    next.fill += flow * dt;
    next.elapsed += dt;
    if flow > 0.0 {
        next.last_flow_t = Some(next.elapsed);
    }
    if next.fill > params.target_high {
        next.outcome = KettleOutcome::Overfilled;
    } else if next.elapsed >= params.time_limit_s - 1e-9 {
        next.outcome = if next.fill < params.target_low { KettleOutcome::Underfilled } else { KettleOutcome::Success };
    }
    Ok(next)
}

/// Supplies the kettle tilt over time.
pub trait KettleController {
    fn tilt(&mut self, t: Seconds, state: &KettleState) -> Angle;
}

impl<F: FnMut(Seconds, &KettleState) -> Angle> KettleController for F {
    fn tilt(&mut self, t: Seconds, state: &KettleState) -> Angle {
        self(t, state)
    }
}

/// Lifts the kettle, pours at a fixed tilt until the cup looks full enough,
/// then sets it down. The stop decision lags the fill by a reaction time.
#[derive(Debug, Clone, PartialEq)]
pub struct ScriptedPour {
    pub approach_s: Seconds,
    pub pour_tilt: Angle,
    pub stop_fill: f64,
    pub reaction_s: Seconds,
    seen_full_at: Option<Seconds>,
    done: bool,
}

impl ScriptedPour {
    pub fn new(approach_s: Seconds, pour_tilt: Angle, stop_fill: f64, reaction_s: Seconds) -> Self {
        Self { approach_s, pour_tilt, stop_fill, reaction_s, seen_full_at: None, done: false }
    }
}

impl KettleController for ScriptedPour {
    fn tilt(&mut self, t: Seconds, state: &KettleState) -> Angle {
        if self.done || t < self.approach_s {
            return 0.0;
        }
        if state.fill >= self.stop_fill && self.seen_full_at.is_none() {
            self.seen_full_at = Some(t);
        }
        match self.seen_full_at {
            Some(t0) if t - t0 >= self.reaction_s => {
                self.done = true;
                0.0
            }
            _ => self.pour_tilt,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn below_threshold_underfills() {
        let p = KettleParams::default();
        let mut s = KettleState::default();
        let dt = 0.01;
        while !s.is_terminal() {
            s = kettle_step(&s, &p, 10.0, dt).unwrap();
        }
        assert_eq!(s.outcome, KettleOutcome::Underfilled);
        assert!((s.elapsed - p.time_limit_s).abs() < dt);
        assert_eq!(s.completion_time(), None);
        assert!(kettle_step(&s, &p, 30.0, dt).is_err());
    }

    #[test]
    fn linear_fill_time() {
        // tilt 40 -> flow 0.4 /s; reaches 0.7 at 1.75 s
        let p = KettleParams::default();
        let dt = 1e-3;
        let mut s = KettleState::default();
        let mut steps = 0;
        while s.fill < p.target_low - 1e-9 {
            s = kettle_step(&s, &p, 40.0, dt).unwrap();
            steps += 1;
        }
        assert_eq!(steps, 1750);
        assert!((s.elapsed - 1.75).abs() < 1e-9);
    }

    #[test]
    fn overfill_is_immediate() {
        let p = KettleParams::default();
        let mut s = KettleState::default();
        while !s.is_terminal() {
            s = kettle_step(&s, &p, 60.0, 0.01).unwrap();
        }
        assert_eq!(s.outcome, KettleOutcome::Overfilled);
        assert!(s.elapsed < p.time_limit_s);
    }
}
