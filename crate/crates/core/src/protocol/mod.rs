//! Session orchestration: cROM, gauge matching, the counterbalanced robotic
//! and ADL blocks, and assembly of the per-participant measures.

mod blocks;
pub mod features;
mod profile;
mod rig;

use std::fs;
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

pub use blocks::{
    gauge_targets, run_adjustment_block, run_adl_block, run_discrimination_block, run_gauge_block, AdjustmentTrial,
    AdlTrial, BlockKind, BlockResult, BlockTrials, DiscriminationTrial, GaugeTrial, IntervalRecord,
};
pub use features::{
    ramp_midrange_rate, smoothstep_duration_for_rate, steady_state_angle, MIDRANGE_WINDOW, STEADY_MIN_S,
    STEADY_SPEED_DPS,
};
pub use profile::{
    derive_seed, heterogeneous_cohort, AdlBehaviour, ParticipantProfile, SessionConfig, SimulatedParticipant,
    TrialTiming,
};
pub use rig::{Rig, RigConfig, TorqueInterval};

use crate::adl::write_adl_log;
use crate::error::{Error, Result};
use crate::participant::{write_participants, ParticipantRecord, POSITION_REFERENCE_FRACTION};
use crate::plant::write_trajectory;
use crate::psychophysics::{write_trace, ObserverModel};
use crate::units::Angle;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CromMeasurement {
    pub neutral_deg: Angle,
    pub crom_deg: Angle,
}

impl CromMeasurement {
    /// Position reference: 30% of the cROM, in pronation from neutral.
    pub fn position_reference(&self) -> Angle {
        POSITION_REFERENCE_FRACTION * self.crom_deg
    }
}

/// Comfortable range of motion between the self-reported limits.
pub fn measure_crom(pron_limit: Angle, sup_limit: Angle) -> Result<Angle> {
    if !(pron_limit > sup_limit) {
        return Err(Error::Domain(format!("pronation limit {pron_limit} must exceed supination limit {sup_limit}")));
    }
    Ok(pron_limit - sup_limit)
}

impl ParticipantProfile {
    pub fn measure_crom(&self) -> Result<CromMeasurement> {
        Ok(CromMeasurement {
            neutral_deg: self.neutral_deg,
            crom_deg: measure_crom(self.pron_limit_deg, self.sup_limit_deg)?,
        })
    }
}

/// Block order for participant `index`: gauge matching first, then the five
/// psychometric blocks with the two ADLs in the middle.
///
/// Two ADL layouts alternate with index parity and the kettle/door order with
/// `index / 2`. The psychometric blocks follow a cyclic Latin square over a
/// seed-shuffled base order, so every block visits every slot equally often.
pub fn counterbalance_order(index: usize, seed: u64) -> Vec<BlockKind> {
    const LAYOUTS: [[bool; 7]; 2] =
        [[false, false, true, true, false, false, false], [false, false, true, false, true, false, false]];
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, u64::MAX));
    let mut base = BlockKind::PSYCHOMETRIC;
    base.shuffle(&mut rng);
    let offset = rng.random_range(0..base.len());
    let adls = if (index / 2).is_multiple_of(2) {
        [BlockKind::KettleADL, BlockKind::DoorADL]
    } else {
        [BlockKind::DoorADL, BlockKind::KettleADL]
    };
    let row = index % base.len();
    let mut order = vec![BlockKind::GaugeMatch];
    let (mut p, mut a) = (0, 0);
    for is_adl in LAYOUTS[index % 2] {
        if is_adl {
            order.push(adls[a]);
            a += 1;
        } else {
            order.push(base[(p + row + offset) % base.len()]);
            p += 1;
        }
    }
    order
}

#[derive(Debug, Clone, PartialEq)]
pub struct SessionResult {
    pub pid: u32,
    pub order: Vec<BlockKind>,
    pub crom: CromMeasurement,
    pub blocks: Vec<BlockResult>,
    /// Measures in the participant-table layout; missing measures are NaN.
    pub record: ParticipantRecord,
    pub errors: Vec<String>,
}

impl SessionResult {
    pub fn block(&self, kind: BlockKind) -> Option<&BlockResult> {
        self.blocks.iter().find(|b| b.kind == kind)
    }
}

/// Runs every block of `order` for one participant. Block errors are
/// recorded and the session moves on.
pub fn run_session<R: Rng>(
    profile: &ParticipantProfile,
    observer: &ObserverModel,
    config: &SessionConfig,
    order: &[BlockKind],
    rng: &mut R,
) -> Result<SessionResult> {
    config.validate()?;
    observer.validate()?;
    let crom = profile.measure_crom()?;
    let mut blocks = Vec::with_capacity(order.len());
    let mut errors = Vec::new();
    for &kind in order {
        let res = match kind {
            BlockKind::GaugeMatch => run_gauge_block(profile, observer, config, rng),
            BlockKind::PosDiscrim | BlockKind::VelDiscrim | BlockKind::TorqueDiscrim => {
                run_discrimination_block(kind, profile, observer, config, rng)
            }
            BlockKind::PosAdjust | BlockKind::VelAdjust => run_adjustment_block(kind, profile, observer, config, rng),
            BlockKind::KettleADL | BlockKind::DoorADL => run_adl_block(kind, profile, config, rng),
        };
        match res {
            Ok(b) => blocks.push(b),
            Err(e) => {
                errors.push(format!("{kind}: {e}"));
                blocks.push(BlockResult::failed(kind, e.to_string()));
            }
        }
    }
    let get = |k: BlockKind| blocks.iter().find(|b| b.kind == k);
    let measure = |k: BlockKind| get(k).and_then(|b| b.measure).unwrap_or(f64::NAN);
    let weber = |k: BlockKind| get(k).and_then(|b| b.weber_pct).unwrap_or(f64::NAN);
    let record = ParticipantRecord {
        pid: profile.pid,
        age: profile.age,
        gender: profile.gender.clone(),
        handedness_li: profile.handedness_li,
        emnsa: profile.emnsa,
        fma_hw: profile.fma_hw,
        moca: profile.moca,
        neutral_deg: crom.neutral_deg,
        crom_deg: crom.crom_deg,
        meg_deg: measure(BlockKind::GaugeMatch),
        jndp_deg: measure(BlockKind::PosDiscrim),
        kp_pct: weber(BlockKind::PosDiscrim),
        jndv_dps: measure(BlockKind::VelDiscrim),
        kv_pct: weber(BlockKind::VelDiscrim),
        jndt_mnm: measure(BlockKind::TorqueDiscrim),
        kt_pct: weber(BlockKind::TorqueDiscrim),
        mep_deg: measure(BlockKind::PosAdjust),
        mev_dps: measure(BlockKind::VelAdjust),
        tk_s: measure(BlockKind::KettleADL),
        td_s: measure(BlockKind::DoorADL),
    };
    Ok(SessionResult { pid: profile.pid, order: order.to_vec(), crom, blocks, record, errors })
}

/// Rng for participant `index` of a run seeded with `seed`.
pub fn session_rng(seed: u64, index: usize, observer: &ObserverModel) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(derive_seed(seed ^ observer.rng_seed, index as u64))
}

/// Runs one session per participant in parallel. Each session owns its rng,
/// so the result does not depend on scheduling.
pub fn simulate_cohort(
    participants: &[SimulatedParticipant],
    config: &SessionConfig,
    seed: u64,
) -> Vec<Result<SessionResult>> {
    participants
        .par_iter()
        .enumerate()
        .map(|(i, p)| {
            let order = counterbalance_order(i, seed);
            let mut rng = session_rng(seed, i, &p.observer);
            run_session(&p.profile, &p.observer, config, &order, &mut rng)
        })
        .collect()
}

fn create(path: &Path) -> Result<fs::File> {
    fs::File::create(path).map_err(|e| Error::io(path, e))
}

/// Writes a session directory: the participant row, the block order, and
/// per-block trial logs, staircase traces, ADL logs and trajectories.
pub fn write_session(dir: &Path, session: &SessionResult) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    write_participants(create(&dir.join("participant.csv"))?, std::slice::from_ref(&session.record))?;
    let mut w = csv::Writer::from_writer(create(&dir.join("blocks.csv"))?);
    w.write_record(["slot", "block", "complete", "measure", "weber_pct", "trials", "ignored", "notes"])?;
    for (i, b) in session.blocks.iter().enumerate() {
        let opt = |v: Option<f64>| v.map(|x| x.to_string()).unwrap_or_default();
        w.write_record([
            i.to_string(),
            b.kind.label().to_string(),
            b.complete.to_string(),
            opt(b.measure),
            opt(b.weber_pct),
            b.trials.len().to_string(),
            b.ignored_trials.to_string(),
            b.notes.join("; "),
        ])?;
    }
    w.flush().map_err(|e| Error::io(dir.join("blocks.csv"), e))?;
    for (i, b) in session.blocks.iter().enumerate() {
        let stem = format!("block_{i:02}_{}", b.kind.label());
        b.trials.write_csv(create(&dir.join(format!("{stem}.csv")))?)?;
        if !b.staircase_trace.is_empty() {
            write_trace(create(&dir.join(format!("{stem}_staircase.csv")))?, &b.staircase_trace)?;
        }
        for (t, log) in b.adl_logs.iter().enumerate() {
            write_adl_log(create(&dir.join(format!("{stem}_trial{:02}.csv", t + 1)))?, log)?;
        }
        if !b.trajectory.is_empty() {
            write_trajectory(create(&dir.join(format!("{stem}_trajectory.csv")))?, &b.trajectory)?;
        }
    }
    Ok(())
}
