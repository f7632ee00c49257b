use std::fmt;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::units::{Angle, Seconds};

/// Progress through checking the lock, fetching the key and opening the door.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum DoorState {
    Start,
    KnobGrasped,
    KnobTurnedLocked,
    KnobReleased,
    NearKey,
    KeyGrasped,
    KeyAtKeyhole,
    KeyInserted,
    DeadboltUnlocked,
    KnobGraspedUnlocked,
    KnobTurnedOpen,
    DoorOpen,
}

impl DoorState {
    pub const ALL: [DoorState; 12] = [
        DoorState::Start,
        DoorState::KnobGrasped,
        DoorState::KnobTurnedLocked,
        DoorState::KnobReleased,
        DoorState::NearKey,
        DoorState::KeyGrasped,
        DoorState::KeyAtKeyhole,
        DoorState::KeyInserted,
        DoorState::DeadboltUnlocked,
        DoorState::KnobGraspedUnlocked,
        DoorState::KnobTurnedOpen,
        DoorState::DoorOpen,
    ];
}

impl fmt::Display for DoorState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Inputs from the two contralateral buttons and the grip rotation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum DoorEvent {
    /// Moves the hand avatar toward/away from objects; grasps and releases.
    BluePress,
    /// Pushes or pulls whatever the hand holds.
    YellowPress,
    RotatePastThreshold,
    /// Grip returned below the rotation threshold; re-arms rotation input.
    RotateBack,
}

impl DoorEvent {
    pub const ALL: [DoorEvent; 4] =
        [DoorEvent::BluePress, DoorEvent::YellowPress, DoorEvent::RotatePastThreshold, DoorEvent::RotateBack];
}

impl fmt::Display for DoorEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Debug::fmt(self, f)
    }
}

/// Total transition function; events not enabled in a state leave it unchanged.
pub fn door_transition(state: DoorState, event: DoorEvent) -> DoorState {
    use DoorEvent::*;
    use DoorState::*;
    match (state, event) {
        (Start, BluePress) => KnobGrasped,
        (KnobGrasped, RotatePastThreshold) => KnobTurnedLocked,
        (KnobTurnedLocked, BluePress) => KnobReleased,
        (KnobReleased, BluePress) => NearKey,
        (NearKey, BluePress) => KeyGrasped,
        (KeyGrasped, BluePress) => KeyAtKeyhole,
        (KeyAtKeyhole, YellowPress) => KeyInserted,
        (KeyInserted, RotatePastThreshold) => DeadboltUnlocked,
        (DeadboltUnlocked, BluePress) => KnobGraspedUnlocked,
        (KnobGraspedUnlocked, RotatePastThreshold) => KnobTurnedOpen,
        (KnobTurnedOpen, YellowPress) => DoorOpen,
        (s, _) => s,
    }
}

/// The single event that advances `state`, if any.
pub fn enabling_event(state: DoorState) -> Option<DoorEvent> {
    DoorEvent::ALL.into_iter().find(|&e| door_transition(state, e) != state)
}

/// The eleven-event sequence from `Start` to `DoorOpen`.
pub fn optimal_sequence() -> Vec<DoorEvent> {
    let mut s = DoorState::Start;
    let mut out = Vec::new();
    while let Some(e) = enabling_event(s) {
        out.push(e);
        s = door_transition(s, e);
    }
    out
}

/// Turns a grip-angle stream into rotation events with hysteresis at the
/// threshold: one `RotatePastThreshold` per excursion, then `RotateBack`.
#[derive(Debug, Clone, PartialEq)]
pub struct RotationDetector {
    pub threshold_deg: Angle,
    past: bool,
}

impl RotationDetector {
    pub fn new(threshold_deg: Angle) -> Self {
        Self { threshold_deg, past: false }
    }

    pub fn feed(&mut self, angle_from_neutral: Angle) -> Option<DoorEvent> {
        let beyond = angle_from_neutral.abs() >= self.threshold_deg;
        match (self.past, beyond) {
            (false, true) => {
                self.past = true;
                Some(DoorEvent::RotatePastThreshold)
            }
            (true, false) => {
                self.past = false;
                Some(DoorEvent::RotateBack)
            }
            _ => None,
        }
    }
}

impl Default for RotationDetector {
    fn default() -> Self {
        Self::new(30.0)
    }
}

/// Chooses the next input and how long it takes to produce.
pub trait DoorController {
    fn next_action(&mut self, state: DoorState, rng: &mut dyn rand::RngCore) -> Option<(DoorEvent, Seconds)>;
}

/// Always presses the right input, at a fixed pace.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OptimalDoorScript {
    pub action_s: Seconds,
}

impl DoorController for OptimalDoorScript {
    fn next_action(&mut self, state: DoorState, _rng: &mut dyn rand::RngCore) -> Option<(DoorEvent, Seconds)> {
        enabling_event(state).map(|e| (e, self.action_s))
    }
}

/// A user who sometimes tries the wrong input and whose pace varies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ExploringDoorUser {
    pub mean_action_s: Seconds,
    /// Probability of trying a random input instead of the enabling one.
    pub error_rate: f64,
    /// Relative spread of action durations.
    pub pace_cv: f64,
}

impl DoorController for ExploringDoorUser {
    fn next_action(&mut self, state: DoorState, rng: &mut dyn rand::RngCore) -> Option<(DoorEvent, Seconds)> {
        let right = enabling_event(state)?;
        let event = if rng.random::<f64>() < self.error_rate {
            DoorEvent::ALL[rng.random_range(0..DoorEvent::ALL.len())]
        } else {
            right
        };
        let jitter = 1.0 + self.pace_cv * crate::psychophysics::gaussian(1.0, rng);
        Some((event, (self.mean_action_s * jitter).max(0.2 * self.mean_action_s)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invalid_event_is_noop() {
        assert_eq!(door_transition(DoorState::Start, DoorEvent::YellowPress), DoorState::Start);
        for e in DoorEvent::ALL {
            assert_eq!(door_transition(DoorState::DoorOpen, e), DoorState::DoorOpen);
            assert_eq!(door_transition(DoorState::KnobGrasped, DoorEvent::RotateBack), DoorState::KnobGrasped);
        }
    }

    #[test]
    fn optimal_path_has_eleven_events() {
        use DoorEvent::*;
        let seq = optimal_sequence();
        assert_eq!(
            seq,
            vec![
                BluePress,
                RotatePastThreshold,
                BluePress,
                BluePress,
                BluePress,
                BluePress,
                YellowPress,
                RotatePastThreshold,
                BluePress,
                RotatePastThreshold,
                YellowPress
            ]
        );
        let end = seq.iter().fold(DoorState::Start, |s, &e| door_transition(s, e));
        assert_eq!(end, DoorState::DoorOpen);
    }

    #[test]
    fn rotation_detector_hysteresis() {
        let mut d = RotationDetector::default();
        let events: Vec<_> =
            [0.0, 10.0, 31.0, 40.0, 35.0, 20.0, 5.0, -32.0].iter().filter_map(|&a| d.feed(a)).collect();
        assert_eq!(events, vec![DoorEvent::RotatePastThreshold, DoorEvent::RotateBack, DoorEvent::RotatePastThreshold]);
    }
}
