use std::fmt;
use std::io::Write;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::adl::{run_adl, AdlLogRow, AdlTask, ExploringDoorUser, ScriptedPour};
use crate::error::{Error, Result};
use crate::plant::TrajectorySample;
use crate::psychophysics::{gaussian, Modality, ObserverModel, Response, Staircase, Termination, TraceRow};
use crate::units::{Angle, Seconds};

use super::features::{ramp_midrange_rate, smoothstep_duration_for_rate, steady_state_angle, MIDRANGE_WINDOW};
use super::profile::{ParticipantProfile, SessionConfig};
use super::rig::Rig;
use super::CromMeasurement;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BlockKind {
    GaugeMatch,
    PosDiscrim,
    VelDiscrim,
    TorqueDiscrim,
    PosAdjust,
    VelAdjust,
    KettleADL,
    DoorADL,
}

impl BlockKind {
    pub const ALL: [BlockKind; 8] = [
        BlockKind::GaugeMatch,
        BlockKind::PosDiscrim,
        BlockKind::VelDiscrim,
        BlockKind::TorqueDiscrim,
        BlockKind::PosAdjust,
        BlockKind::VelAdjust,
        BlockKind::KettleADL,
        BlockKind::DoorADL,
    ];

    /// The five robotic psychometric blocks.
    pub const PSYCHOMETRIC: [BlockKind; 5] = [
        BlockKind::PosDiscrim,
        BlockKind::VelDiscrim,
        BlockKind::TorqueDiscrim,
        BlockKind::PosAdjust,
        BlockKind::VelAdjust,
    ];

    pub fn label(self) -> &'static str {
        match self {
            BlockKind::GaugeMatch => "gauge_match",
            BlockKind::PosDiscrim => "pos_discrim",
            BlockKind::VelDiscrim => "vel_discrim",
            BlockKind::TorqueDiscrim => "torque_discrim",
            BlockKind::PosAdjust => "pos_adjust",
            BlockKind::VelAdjust => "vel_adjust",
            BlockKind::KettleADL => "kettle_adl",
            BlockKind::DoorADL => "door_adl",
        }
    }

    pub fn from_label(s: &str) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.label() == s)
    }

    pub fn modality(self) -> Option<Modality> {
        match self {
            BlockKind::PosDiscrim => Some(Modality::Position),
            BlockKind::VelDiscrim => Some(Modality::Velocity),
            BlockKind::TorqueDiscrim => Some(Modality::Torque),
            _ => None,
        }
    }

    pub fn is_adl(self) -> bool {
        matches!(self, BlockKind::KettleADL | BlockKind::DoorADL)
    }
}

impl fmt::Display for BlockKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GaugeTrial {
    pub trial: u32,
    pub target_deg: Angle,
    /// Mean encoder angle during the hold.
    pub rendered_deg: Angle,
    pub reported_deg: Angle,
    pub abs_error_deg: f64,
}

/// Timing of one presentation interval on the block clock.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntervalRecord {
    pub start_s: Seconds,
    pub hold_start_s: Seconds,
    pub hold_end_s: Seconds,
    /// Back at home after the presentation.
    pub home_s: Seconds,
    pub commanded: f64,
    pub rendered: f64,
}

/// One two-interval trial. Flat so that it serializes to a single CSV row.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiscriminationTrial {
    /// Presentation count, including ignored trials.
    pub trial: u32,
    pub delta: f64,
    pub reference: f64,
    pub comparison: f64,
    pub comparison_first: bool,
    pub response: Response,
    pub i1_start_s: Seconds,
    pub i1_hold_start_s: Seconds,
    pub i1_hold_end_s: Seconds,
    pub i1_home_s: Seconds,
    pub i1_commanded: f64,
    pub i1_rendered: f64,
    pub i2_start_s: Seconds,
    pub i2_hold_start_s: Seconds,
    pub i2_hold_end_s: Seconds,
    pub i2_home_s: Seconds,
    pub i2_commanded: f64,
    pub i2_rendered: f64,
}

impl DiscriminationTrial {
    pub fn intervals(&self) -> [IntervalRecord; 2] {
        [
            IntervalRecord {
                start_s: self.i1_start_s,
                hold_start_s: self.i1_hold_start_s,
                hold_end_s: self.i1_hold_end_s,
                home_s: self.i1_home_s,
                commanded: self.i1_commanded,
                rendered: self.i1_rendered,
            },
            IntervalRecord {
                start_s: self.i2_start_s,
                hold_start_s: self.i2_hold_start_s,
                hold_end_s: self.i2_hold_end_s,
                home_s: self.i2_home_s,
                commanded: self.i2_commanded,
                rendered: self.i2_rendered,
            },
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdjustmentTrial {
    pub trial: u32,
    pub target: f64,
    /// Feature extracted from the robot's presentation.
    pub presented: Option<f64>,
    /// What the participant set out to produce.
    pub aimed: f64,
    pub produced: Option<f64>,
    pub abs_error: Option<f64>,
    pub note: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdlTrial {
    pub trial: u32,
    pub outcome: String,
    pub completion_time_s: Option<Seconds>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum BlockTrials {
    Gauge(Vec<GaugeTrial>),
    Discrimination(Vec<DiscriminationTrial>),
    Adjustment(Vec<AdjustmentTrial>),
    Adl(Vec<AdlTrial>),
    None,
}

impl BlockTrials {
    pub fn len(&self) -> usize {
        match self {
            BlockTrials::Gauge(v) => v.len(),
            BlockTrials::Discrimination(v) => v.len(),
            BlockTrials::Adjustment(v) => v.len(),
            BlockTrials::Adl(v) => v.len(),
            BlockTrials::None => 0,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        fn rows<W: Write, T: Serialize>(w: W, rows: &[T]) -> Result<()> {
            let mut w = csv::Writer::from_writer(w);
            for r in rows {
                w.serialize(r)?;
            }
            w.flush().map_err(|e| Error::io("<trial log>", e))?;
            Ok(())
        }
        match self {
            BlockTrials::Gauge(v) => rows(writer, v),
            BlockTrials::Discrimination(v) => rows(writer, v),
            BlockTrials::Adjustment(v) => rows(writer, v),
            BlockTrials::Adl(v) => rows(writer, v),
            BlockTrials::None => Ok(()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BlockResult {
    pub kind: BlockKind,
    /// MEg, JND, ME or completion time; present iff `complete`.
    pub measure: Option<f64>,
    pub weber_pct: Option<f64>,
    pub complete: bool,
    pub trials: BlockTrials,
    pub staircase_trace: Vec<TraceRow>,
    pub termination: Option<Termination>,
    pub trials_completed: u32,
    pub ignored_trials: u32,
    pub adl_logs: Vec<Vec<AdlLogRow>>,
    pub trajectory: Vec<TrajectorySample>,
    pub notes: Vec<String>,
}

impl BlockResult {
    fn new(kind: BlockKind, trials: BlockTrials) -> Self {
        Self {
            kind,
            measure: None,
            weber_pct: None,
            complete: false,
            trials,
            staircase_trace: Vec::new(),
            termination: None,
            trials_completed: 0,
            ignored_trials: 0,
            adl_logs: Vec::new(),
            trajectory: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// A block that could not run.
    pub fn failed(kind: BlockKind, note: impl Into<String>) -> Self {
        let mut b = Self::new(kind, BlockTrials::None);
        b.notes.push(note.into());
        b
    }

    fn finish(mut self, measure: Option<f64>) -> Self {
        self.complete = measure.is_some();
        self.measure = measure;
        self
    }
}

fn mean(v: &[f64]) -> Option<f64> {
    (!v.is_empty()).then(|| v.iter().sum::<f64>() / v.len() as f64)
}

fn mean_angle(s: &[TrajectorySample]) -> Angle {
    s.iter().map(|p| p.angle_deg).sum::<f64>() / s.len().max(1) as f64
}

fn new_rig(profile: &ParticipantProfile, config: &SessionConfig) -> Result<Rig> {
    Ok(Rig::new(config.plant.clone(), config.rig.clone(), profile.neutral_deg)?.with_recording(config.log_trajectories))
}

/// Evenly spaced gauge targets over the central `span` of the cROM, shuffled.
pub fn gauge_targets<R: Rng + ?Sized>(profile: &ParticipantProfile, n: usize, span: f64, rng: &mut R) -> Vec<Angle> {
    let crom = profile.pron_limit_deg - profile.sup_limit_deg;
    let margin = 0.5 * (1.0 - span) * crom;
    let (lo, hi) = (profile.sup_limit_deg + margin, profile.pron_limit_deg - margin);
    let mut t: Vec<Angle> = (0..n).map(|i| lo + (hi - lo) * i as f64 / (n - 1).max(1) as f64).collect();
    t.shuffle(rng);
    t
}

/// Contralateral gauge matching: the robot places the wrist, the participant
/// points the protractor. MEg is the mean absolute pointing error.
pub fn run_gauge_block<R: Rng + ?Sized>(
    profile: &ParticipantProfile,
    observer: &ObserverModel,
    config: &SessionConfig,
    rng: &mut R,
) -> Result<BlockResult> {
    profile.measure_crom()?;
    let mut rig = new_rig(profile, config)?;
    let mut trials = Vec::with_capacity(config.gauge_trials);
    for (i, target) in gauge_targets(profile, config.gauge_trials, config.gauge_span, rng).into_iter().enumerate() {
        rig.move_to(target, config.rig.move_s)?;
        let hold = rig.hold(target, config.timing.hold_s)?;
        let rendered = mean_angle(&hold);
        let reported = observer.point_gauge(rendered, rng);
        rig.return_home()?;
        trials.push(GaugeTrial {
            trial: i as u32 + 1,
            target_deg: target,
            rendered_deg: rendered,
            reported_deg: reported,
            abs_error_deg: (reported - rendered).abs(),
        });
    }
    let meg = mean(&trials.iter().map(|t| t.abs_error_deg).collect::<Vec<_>>());
    let mut b = BlockResult::new(BlockKind::GaugeMatch, BlockTrials::Gauge(trials));
    b.trials_completed = config.gauge_trials as u32;
    b.trajectory = rig.take_trajectory();
    Ok(b.finish(meg))
}

/// Stimulus value of one interval as rendered and perceived, with its hold
/// window and whether the participant broke the hold.
struct Presented {
    rendered: f64,
    hold_start: Seconds,
    hold_end: Seconds,
    breached: bool,
}

fn present<R: Rng + ?Sized>(
    rig: &mut Rig,
    modality: Modality,
    value: f64,
    crom: &CromMeasurement,
    observer: &ObserverModel,
    config: &SessionConfig,
    rng: &mut R,
) -> Result<Presented> {
    let home = rig.home();
    let hold_s = config.timing.hold_s;
    Ok(match modality {
        Modality::Position => {
            rig.move_to(home + value, config.rig.move_s)?;
            let hold_start = rig.time();
            let hold = rig.hold(home + value, hold_s)?;
            Presented { rendered: mean_angle(&hold) - home, hold_start, hold_end: rig.time(), breached: false }
        }
        Modality::Velocity => {
            let end = home + crom.position_reference();
            let mut seg = rig.guide(home, end, value)?;
            let hold_start = rig.time();
            seg.extend(rig.hold(end, hold_s)?);
            let hold_end = rig.time();
            match ramp_midrange_rate(&seg, MIDRANGE_WINDOW) {
                Ok(rate) => Presented { rendered: rate, hold_start, hold_end, breached: false },
                Err(_) => Presented { rendered: f64::NAN, hold_start, hold_end, breached: true },
            }
        }
        Modality::Torque => {
            let start = rig.time();
            let out = rig.torque_hold(value, hold_s, observer.hold_noise_sd, rng)?;
            let hold_start = start + config.rig.torque_ramp_s;
            Presented {
                rendered: out.perceived_mnm,
                hold_start,
                hold_end: rig.time().max(hold_start),
                breached: out.breached,
            }
        }
    })
}

/// Two-interval same-different block driven by a 3-down-1-up staircase.
pub fn run_discrimination_block<R: Rng + ?Sized>(
    kind: BlockKind,
    profile: &ParticipantProfile,
    observer: &ObserverModel,
    config: &SessionConfig,
    rng: &mut R,
) -> Result<BlockResult> {
    let modality = kind.modality().ok_or_else(|| Error::Domain(format!("{kind} is not a discrimination block")))?;
    let crom = profile.measure_crom()?;
    let sc_config = match modality {
        Modality::Position => {
            let mut c = config.position_staircase.clone();
            c.reference = crom.position_reference();
            c
        }
        Modality::Velocity => config.velocity_staircase.clone(),
        Modality::Torque => config.torque_staircase.clone(),
    };
    let reference = sc_config.reference;
    let mut staircase = Staircase::new(sc_config)?;
    let mut rig = new_rig(profile, config)?;
    let mut trials = Vec::new();
    let mut notes = Vec::new();
    while !staircase.is_terminated() {
        if staircase.state().ignored_trials >= config.max_ignored_trials {
            notes.push(format!("abandoned after {} ignored trials", config.max_ignored_trials));
            break;
        }
        let delta = staircase.delta();
        let comparison = reference + delta;
        let comparison_first = rng.random_bool(0.5);
        let order = if comparison_first { [comparison, reference] } else { [reference, comparison] };
        let mut iv = [IntervalRecord {
            start_s: 0.0,
            hold_start_s: 0.0,
            hold_end_s: 0.0,
            home_s: 0.0,
            commanded: 0.0,
            rendered: 0.0,
        }; 2];
        let mut breached = false;
        for (k, &value) in order.iter().enumerate() {
            if k == 1 {
                rig.rest(config.timing.inter_interval_s)?;
            }
            let start_s = rig.time();
            let p = present(&mut rig, modality, value, &crom, observer, config, rng)?;
            rig.return_home()?;
            breached |= p.breached;
            iv[k] = IntervalRecord {
                start_s,
                hold_start_s: p.hold_start,
                hold_end_s: p.hold_end,
                home_s: rig.time(),
                commanded: value,
                rendered: p.rendered,
            };
        }
        let response = if breached {
            Response::Ignored
        } else if observer.respond_2ifc(modality, iv[0].rendered, iv[1].rendered, rng) {
            Response::Correct
        } else {
            Response::Incorrect
        };
        staircase.respond(response)?;
        // the next trial starts after the participant is back at rest
        rig.rest(config.timing.inter_interval_s)?;
        trials.push(DiscriminationTrial {
            trial: trials.len() as u32 + 1,
            delta,
            reference,
            comparison,
            comparison_first,
            response,
            i1_start_s: iv[0].start_s,
            i1_hold_start_s: iv[0].hold_start_s,
            i1_hold_end_s: iv[0].hold_end_s,
            i1_home_s: iv[0].home_s,
            i1_commanded: iv[0].commanded,
            i1_rendered: iv[0].rendered,
            i2_start_s: iv[1].start_s,
            i2_hold_start_s: iv[1].hold_start_s,
            i2_hold_end_s: iv[1].hold_end_s,
            i2_home_s: iv[1].home_s,
            i2_commanded: iv[1].commanded,
            i2_rendered: iv[1].rendered,
        });
    }
    let state = staircase.state().clone();
    let mut b = BlockResult::new(kind, BlockTrials::Discrimination(trials));
    b.staircase_trace = staircase.trace().to_vec();
    b.termination = state.terminated;
    b.trials_completed = state.trials_completed;
    b.ignored_trials = state.ignored_trials;
    b.trajectory = rig.take_trajectory();
    b.notes = notes;
    match staircase.jnd() {
        Ok(j) => {
            b.weber_pct = Some(j.weber_pct);
            Ok(b.finish(Some(j.jnd_abs)))
        }
        Err(e) => {
            b.notes.push(format!("incomplete: {e}"));
            Ok(b.finish(None))
        }
    }
}

/// Ipsilateral reproduction: the robot presents a target, the participant
/// reproduces it actively. ME is the mean absolute difference of the
/// extracted features.
pub fn run_adjustment_block<R: Rng + ?Sized>(
    kind: BlockKind,
    profile: &ParticipantProfile,
    observer: &ObserverModel,
    config: &SessionConfig,
    rng: &mut R,
) -> Result<BlockResult> {
    if !matches!(kind, BlockKind::PosAdjust | BlockKind::VelAdjust) {
        return Err(Error::Domain(format!("{kind} is not an adjustment block")));
    }
    let crom = profile.measure_crom()?;
    let mut rig = new_rig(profile, config)?;
    let home = rig.home();
    let timing = config.timing;
    let settle = config.rig.settle_s;
    let mut trials = Vec::with_capacity(config.adjustment_trials);
    for i in 0..config.adjustment_trials {
        let mut note = String::new();
        let (target, presented, aimed, produced) = if kind == BlockKind::PosAdjust {
            let (lo, hi) = config.position_target_range;
            let target = rng.random_range(lo..hi) * (profile.pron_limit_deg - home);
            let mut seg = rig.move_to(home + target, config.rig.move_s)?;
            seg.extend(rig.hold(home + target, timing.hold_s)?);
            let presented = steady_state_angle(&seg).map(|a| a - home);
            rig.return_home()?;
            rig.rest(timing.inter_interval_s)?;
            let aimed =
                observer.reproduce_value(presented.as_ref().copied().unwrap_or(target), observer.position_repro, rng);
            let seg = rig.active_move(home + aimed, config.rig.move_s, settle)?;
            let produced = steady_state_angle(&seg).map(|a| a - home);
            (target, presented, aimed, produced)
        } else {
            let (lo, hi) = config.velocity_target_range_dps;
            let target = rng.random_range(lo..hi);
            let amp = crom.position_reference();
            let mut seg = rig.guide(home, home + amp, target)?;
            seg.extend(rig.hold(home + amp, timing.hold_s)?);
            let presented = ramp_midrange_rate(&seg, MIDRANGE_WINDOW);
            rig.return_home()?;
            rig.rest(timing.inter_interval_s)?;
            let aimed = observer
                .reproduce_value(presented.as_ref().copied().unwrap_or(target), observer.velocity_repro, rng)
                .max(1.0);
            let duration = smoothstep_duration_for_rate(amp, aimed);
            let seg = rig.active_move(home + amp, duration, settle)?;
            (target, presented, aimed, ramp_midrange_rate(&seg, MIDRANGE_WINDOW))
        };
        rig.return_home()?;
        rig.rest(timing.inter_interval_s)?;
        let abs_error = match (&presented, &produced) {
            (Ok(p), Ok(q)) => Some((q - p).abs()),
            (Err(e), _) | (_, Err(e)) => {
                note = format!("excluded: {e}");
                None
            }
        };
        trials.push(AdjustmentTrial {
            trial: i as u32 + 1,
            target,
            presented: presented.ok(),
            aimed,
            produced: produced.ok(),
            abs_error,
            note,
        });
    }
    let errors: Vec<f64> = trials.iter().filter_map(|t| t.abs_error).collect();
    let excluded = trials.len() - errors.len();
    let mut b = BlockResult::new(kind, BlockTrials::Adjustment(trials));
    b.trials_completed = errors.len() as u32;
    if excluded > 0 {
        b.notes.push(format!("{excluded} trial(s) excluded from ME"));
    }
    b.trajectory = rig.take_trajectory();
    Ok(b.finish(mean(&errors)))
}

/// Kettle (mean Tk over successful pours) or door (Td) block.
pub fn run_adl_block<R: Rng>(
    kind: BlockKind,
    profile: &ParticipantProfile,
    config: &SessionConfig,
    rng: &mut R,
) -> Result<BlockResult> {
    let behaviour = &profile.adl;
    let mut trials = Vec::new();
    let mut logs = Vec::new();
    let mut notes = Vec::new();
    match kind {
        BlockKind::KettleADL => {
            for i in 0..config.kettle_trials {
                let approach = (behaviour.pour_approach_s + gaussian(behaviour.pour_approach_sd, rng)).max(0.5);
                let stop = behaviour.pour_stop_fill + gaussian(behaviour.pour_stop_sd, rng);
                let mut pour = ScriptedPour::new(approach, behaviour.pour_tilt_deg, stop, behaviour.pour_reaction_s);
                let task =
                    AdlTask::Kettle { controller: &mut pour, params: config.kettle.clone(), dt: config.kettle_dt_s };
                let run = run_adl(task, rng)?;
                trials.push(AdlTrial {
                    trial: i as u32 + 1,
                    outcome: format!("{:?}", run.outcome),
                    completion_time_s: run.completion_time,
                });
                logs.push(run.log);
            }
        }
        BlockKind::DoorADL => {
            let mut user = ExploringDoorUser {
                mean_action_s: behaviour.door_action_s,
                error_rate: behaviour.door_error_rate,
                pace_cv: behaviour.door_pace_cv,
            };
            match run_adl(AdlTask::Door { controller: &mut user, timeout_s: config.door_timeout_s }, rng) {
                Ok(run) => {
                    trials.push(AdlTrial {
                        trial: 1,
                        outcome: format!("{:?}", run.outcome),
                        completion_time_s: run.completion_time,
                    });
                    logs.push(run.log);
                }
                Err(e @ Error::Timeout(_)) => {
                    notes.push(format!("door not opened: {e}"));
                    trials.push(AdlTrial { trial: 1, outcome: "Timeout".into(), completion_time_s: None });
                }
                Err(e) => return Err(e),
            }
        }
        _ => return Err(Error::Domain(format!("{kind} is not an ADL block"))),
    }
    let times: Vec<f64> = trials.iter().filter_map(|t| t.completion_time_s).collect();
    let mut b = BlockResult::new(kind, BlockTrials::Adl(trials));
    b.trials_completed = times.len() as u32;
    b.adl_logs = logs;
    b.notes = notes;
    if times.is_empty() {
        b.notes.push("no successful trial".into());
    }
    Ok(b.finish(mean(&times)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rng() -> ChaCha8Rng {
        ChaCha8Rng::seed_from_u64(11)
    }

    #[test]
    fn noiseless_gauge_is_rounding_only() {
        let b = run_gauge_block(
            &ParticipantProfile::default(),
            &ObserverModel::noiseless(),
            &SessionConfig::default(),
            &mut rng(),
        )
        .unwrap();
        assert!(b.complete);
        assert!(b.measure.unwrap() <= 0.5);
        let BlockTrials::Gauge(t) = &b.trials else { panic!() };
        assert_eq!(t.len(), 20);
        let mut targets: Vec<f64> = t.iter().map(|x| x.target_deg).collect();
        targets.sort_by(f64::total_cmp);
        targets.dedup();
        assert_eq!(targets.len(), 20);
    }

    #[test]
    fn gauge_bias_propagates() {
        let obs = ObserverModel { gauge_bias_deg: 3.0, ..ObserverModel::noiseless() };
        let b = run_gauge_block(&ParticipantProfile::default(), &obs, &SessionConfig::default(), &mut rng()).unwrap();
        assert!((b.measure.unwrap() - 3.0).abs() <= 0.5);
    }

    #[test]
    fn perfect_discriminator_hits_floor() {
        let cfg = SessionConfig::default();
        for kind in [BlockKind::PosDiscrim, BlockKind::VelDiscrim, BlockKind::TorqueDiscrim] {
            let b = run_discrimination_block(
                kind,
                &ParticipantProfile::default(),
                &ObserverModel::noiseless(),
                &cfg,
                &mut rng(),
            )
            .unwrap();
            let floor = match kind {
                BlockKind::PosDiscrim => cfg.position_staircase.delta_floor,
                BlockKind::VelDiscrim => cfg.velocity_staircase.delta_floor,
                _ => cfg.torque_staircase.delta_floor,
            };
            assert!(b.complete, "{kind}");
            assert!((b.measure.unwrap() - floor).abs() < 1e-12, "{kind}: {:?}", b.measure);
        }
    }

    #[test]
    fn discrimination_timing_contract() {
        let b = run_discrimination_block(
            BlockKind::PosDiscrim,
            &ParticipantProfile::default(),
            &ObserverModel::default(),
            &SessionConfig::default(),
            &mut rng(),
        )
        .unwrap();
        let BlockTrials::Discrimination(trials) = &b.trials else { panic!() };
        assert!(!trials.is_empty());
        for t in trials {
            let [a, c] = t.intervals();
            assert!((c.start_s - a.home_s - 1.75).abs() < 1e-6);
            for i in [a, c] {
                assert!((i.hold_end_s - i.hold_start_s - 2.0).abs() < 1e-6);
            }
        }
    }

    #[test]
    fn torque_drift_beyond_tolerance_is_rejected() {
        let obs = ObserverModel { hold_noise_sd: 500.0, ..ObserverModel::default() };
        let b = run_discrimination_block(
            BlockKind::TorqueDiscrim,
            &ParticipantProfile::default(),
            &obs,
            &SessionConfig::default(),
            &mut rng(),
        )
        .unwrap();
        assert!(!b.complete);
        assert!(b.measure.is_none());
        assert!(b.ignored_trials > 0);
        assert_eq!(b.trials_completed, 0);
    }

    #[test]
    fn noiseless_adjustment_residuals() {
        let cfg = SessionConfig::default();
        for kind in [BlockKind::PosAdjust, BlockKind::VelAdjust] {
            let b = run_adjustment_block(
                kind,
                &ParticipantProfile::default(),
                &ObserverModel::noiseless(),
                &cfg,
                &mut rng(),
            )
            .unwrap();
            assert_eq!(b.trials.len(), 21);
            assert!(b.measure.unwrap() < 0.3, "{kind}: {:?}", b.measure);
        }
    }

    #[test]
    fn position_bias_propagates() {
        let mut obs = ObserverModel::noiseless();
        obs.position_repro.bias = 2.0;
        let b = run_adjustment_block(
            BlockKind::PosAdjust,
            &ParticipantProfile::default(),
            &obs,
            &SessionConfig::default(),
            &mut rng(),
        )
        .unwrap();
        assert!((b.measure.unwrap() - 2.0).abs() < 0.3);
    }

    #[test]
    fn adl_blocks_complete() {
        let cfg = SessionConfig::default();
        let p = ParticipantProfile::default();
        let k = run_adl_block(BlockKind::KettleADL, &p, &cfg, &mut rng()).unwrap();
        assert!(k.complete, "{:?}", k.trials);
        let d = run_adl_block(BlockKind::DoorADL, &p, &cfg, &mut rng()).unwrap();
        assert!(d.measure.unwrap() >= 11.0 * 0.2 * p.adl.door_action_s);
    }
}
