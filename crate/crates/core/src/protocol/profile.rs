use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::adl::KettleParams;
use crate::error::{Error, Result};
use crate::plant::PlantParams;
use crate::psychophysics::{ObserverModel, Reproduction, Sensitivity, StaircaseConfig};
use crate::units::{Angle, AngularVelocity, Seconds};

use super::rig::RigConfig;

/// How a simulated participant goes about the two ADL tasks.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AdlBehaviour {
    /// Time to reach, grasp and lift the kettle before pouring.
    pub pour_approach_s: Seconds,
    pub pour_approach_sd: Seconds,
    pub pour_tilt_deg: Angle,
    /// Fill level at which the participant decides to stop.
    pub pour_stop_fill: f64,
    pub pour_stop_sd: f64,
    pub pour_reaction_s: Seconds,
    pub door_action_s: Seconds,
    pub door_error_rate: f64,
    pub door_pace_cv: f64,
}

impl Default for AdlBehaviour {
    fn default() -> Self {
        Self {
            pour_approach_s: 6.0,
            pour_approach_sd: 1.0,
            pour_tilt_deg: 40.0,
            pour_stop_fill: 0.74,
            pour_stop_sd: 0.015,
            pour_reaction_s: 0.15,
            door_action_s: 3.0,
            door_error_rate: 0.25,
            door_pace_cv: 0.3,
        }
    }
}

/// Demographics, clinical scores and motor range of one simulated participant.
/// The clinical scores are carried through to the output table unchanged.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ParticipantProfile {
    pub pid: u32,
    pub age: u32,
    pub gender: String,
    pub handedness_li: f64,
    pub emnsa: u32,
    pub fma_hw: u32,
    pub moca: u32,
    pub neutral_deg: Angle,
    pub pron_limit_deg: Angle,
    pub sup_limit_deg: Angle,
    pub adl: AdlBehaviour,
}

impl Default for ParticipantProfile {
    fn default() -> Self {
        Self {
            pid: 1,
            age: 30,
            gender: "F".into(),
            handedness_li: 100.0,
            emnsa: 8,
            fma_hw: 30,
            moca: 28,
            neutral_deg: 0.0,
            pron_limit_deg: 57.0,
            sup_limit_deg: -57.0,
            adl: AdlBehaviour::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SimulatedParticipant {
    pub profile: ParticipantProfile,
    pub observer: ObserverModel,
}

/// Hold and inter-interval durations of every presentation.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrialTiming {
    pub hold_s: Seconds,
    pub inter_interval_s: Seconds,
}

impl Default for TrialTiming {
    fn default() -> Self {
        Self { hold_s: 2.0, inter_interval_s: 1.75 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SessionConfig {
    pub plant: PlantParams,
    pub rig: RigConfig,
    pub timing: TrialTiming,
    /// Its `reference` is replaced by 30% of each participant's cROM.
    pub position_staircase: StaircaseConfig,
    pub velocity_staircase: StaircaseConfig,
    pub torque_staircase: StaircaseConfig,
    /// Ignored torque trials allowed before the block is abandoned.
    pub max_ignored_trials: u32,
    pub gauge_trials: usize,
    /// Fraction of the cROM, centered, that gauge targets span.
    pub gauge_span: f64,
    pub adjustment_trials: usize,
    /// Position targets as fractions of the neutral-to-pronation-limit range.
    pub position_target_range: (f64, f64),
    pub velocity_target_range_dps: (AngularVelocity, AngularVelocity),
    pub kettle: KettleParams,
    pub kettle_dt_s: Seconds,
    pub kettle_trials: usize,
    pub door_timeout_s: Seconds,
    /// Keep full device trajectories in block results.
    pub log_trajectories: bool,
}

impl Default for SessionConfig {
    fn default() -> Self {
        Self {
            plant: PlantParams::default(),
            rig: RigConfig::default(),
            timing: TrialTiming::default(),
            position_staircase: StaircaseConfig::position(33.0),
            velocity_staircase: StaircaseConfig::velocity(),
            torque_staircase: StaircaseConfig::torque(),
            max_ignored_trials: 50,
            gauge_trials: 20,
            gauge_span: 0.9,
            adjustment_trials: 21,
            position_target_range: (0.2, 0.8),
            velocity_target_range_dps: (15.0, 90.0),
            kettle: KettleParams::default(),
            kettle_dt_s: 0.01,
            kettle_trials: 3,
            door_timeout_s: 300.0,
            log_trajectories: false,
        }
    }
}

impl SessionConfig {
    pub fn validate(&self) -> Result<()> {
        self.plant.validate()?;
        self.position_staircase.validate()?;
        self.velocity_staircase.validate()?;
        self.torque_staircase.validate()?;
        self.kettle.validate()?;
        let (lo, hi) = self.position_target_range;
        if !(0.0 <= lo && lo < hi && hi <= 1.0) {
            return Err(Error::Config(format!("position_target_range {lo}..{hi} must lie in [0, 1]")));
        }
        let (vlo, vhi) = self.velocity_target_range_dps;
        if !(0.0 < vlo && vlo < vhi) {
            return Err(Error::Config(format!(
                "velocity_target_range_dps {vlo}..{vhi} must be positive and increasing"
            )));
        }
        if !(0.0 < self.gauge_span && self.gauge_span <= 1.0) {
            return Err(Error::Config(format!("gauge_span {} must lie in (0, 1]", self.gauge_span)));
        }
        if self.gauge_trials < 2 || self.adjustment_trials == 0 || self.kettle_trials == 0 {
            return Err(Error::Config("gauge_trials >= 2, adjustment_trials and kettle_trials >= 1".into()));
        }
        if !(self.timing.hold_s > 0.0 && self.timing.inter_interval_s >= 0.0) {
            return Err(Error::Config("hold_s must be positive and inter_interval_s non-negative".into()));
        }
        if !(self.kettle_dt_s > 0.0 && self.door_timeout_s > 0.0) {
            return Err(Error::Config("kettle_dt_s and door_timeout_s must be positive".into()));
        }
        Ok(())
    }
}

/// Stable per-index seed derivation (splitmix64 finalizer).
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn round_to(v: f64, places: i32) -> f64 {
    let f = 10f64.powi(places);
    (v * f).round() / f
}

/// `n` participants with varied sensitivity, motor noise and ADL behaviour.
pub fn heterogeneous_cohort(n: usize, seed: u64) -> Vec<SimulatedParticipant> {
    (0..n)
        .map(|i| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, i as u64));
            let crom = round_to(rng.random_range(105.0..120.0), 1);
            let neutral = round_to(rng.random_range(-3.0..3.0), 1);
            let handedness = if rng.random_bool(0.6) { 100.0 } else { round_to(rng.random_range(-100.0..100.0), 2) };
            let sens = |rng: &mut ChaCha8Rng, lo: f64, hi: f64| {
                let sigma = rng.random_range(lo..hi);
                Sensitivity { sigma, criterion: sigma * rng.random_range(0.5..1.0) }
            };
            let observer = ObserverModel {
                position: sens(&mut rng, 1.5, 4.0),
                velocity: sens(&mut rng, 3.0, 9.0),
                torque: sens(&mut rng, 25.0, 80.0),
                lapse_rate: rng.random_range(0.0..0.04),
                position_repro: Reproduction {
                    bias: rng.random_range(-2.0..2.0),
                    noise_sd: rng.random_range(3.0..7.0),
                },
                velocity_repro: Reproduction {
                    bias: rng.random_range(-4.0..4.0),
                    noise_sd: rng.random_range(8.0..20.0),
                },
                gauge_bias_deg: rng.random_range(-3.0..3.0),
                gauge_noise_sd: rng.random_range(5.0..12.0),
                hold_noise_sd: rng.random_range(0.5..2.0),
                rng_seed: rng.random(),
            };
            let adl = AdlBehaviour {
                pour_approach_s: rng.random_range(4.0..10.0),
                pour_tilt_deg: rng.random_range(35.0..45.0),
                pour_stop_fill: rng.random_range(0.72..0.76),
                pour_reaction_s: rng.random_range(0.1..0.2),
                door_action_s: rng.random_range(1.5..5.0),
                door_error_rate: rng.random_range(0.1..0.45),
                ..AdlBehaviour::default()
            };
            let profile = ParticipantProfile {
                pid: i as u32 + 1,
                age: rng.random_range(19..62),
                gender: if rng.random_bool(0.5) { "F" } else { "M" }.into(),
                handedness_li: handedness,
                emnsa: 8,
                fma_hw: 30,
                moca: rng.random_range(24..=30),
                neutral_deg: neutral,
                pron_limit_deg: neutral + crom / 2.0,
                sup_limit_deg: neutral - crom / 2.0,
                adl,
            };
            SimulatedParticipant { profile, observer }
        })
        .collect()
}
