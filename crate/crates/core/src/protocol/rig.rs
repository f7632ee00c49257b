//! The simulated device with its stimulus controllers, stepped segment by
//! segment on a virtual clock.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::haptics::{
    smoothstep, tracking_torque, wall_torque, MovingGap, PdGains, TrajectorySpec, WallGains, WallPair,
};
use crate::plant::{Plant, PlantParams, PlantState, TrajectorySample};
use crate::psychophysics::gaussian;
use crate::units::{nm_to_mnm, Angle, AngularVelocity, Seconds, TorqueMilli};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RigConfig {
    pub walls: WallGains,
    pub gap_half_width_deg: Angle,
    /// Robot position/velocity tracking.
    pub tracking: PdGains,
    /// The simulated participant's own limb control.
    pub human: PdGains,
    pub human_max_mnm: TorqueMilli,
    pub torque_ramp_s: Seconds,
    /// Duration of passive point-to-point moves.
    pub move_s: Seconds,
    pub return_s: Seconds,
    /// Stillness the participant holds after an active reproduction.
    pub settle_s: Seconds,
    /// Additive torque for free-space motion; zero for the pronation axis.
    pub gravity_comp_mnm: TorqueMilli,
    /// Allowed excursion from home while resisting a torque.
    pub hold_tolerance_deg: Angle,
}

impl Default for RigConfig {
    fn default() -> Self {
        Self {
            walls: WallGains::default(),
            gap_half_width_deg: 1.5,
            tracking: PdGains { kp: 20.0, kd: 0.5 },
            human: PdGains { kp: 20.0, kd: 0.5 },
            human_max_mnm: 3000.0,
            torque_ramp_s: 0.5,
            move_s: 1.0,
            return_s: 1.0,
            settle_s: 1.0,
            gravity_comp_mnm: 0.0,
            hold_tolerance_deg: 5.0,
        }
    }
}

/// Outcome of one torque interval.
#[derive(Debug, Clone, PartialEq)]
pub struct TorqueInterval {
    pub samples: Vec<TrajectorySample>,
    /// The handle left the tolerance region; the interval was cut short.
    pub breached: bool,
    /// Mean magnitude of the participant's torque over the plateau.
    pub perceived_mnm: TorqueMilli,
}

pub struct Rig {
    plant: Plant,
    cfg: RigConfig,
    home: Angle,
    record: bool,
    trajectory: Vec<TrajectorySample>,
}

impl Rig {
    /// A rig at rest at `home`.
    pub fn new(params: PlantParams, cfg: RigConfig, home: Angle) -> Result<Self> {
        let plant = Plant::new(params, PlantState::at_rest(home))?;
        Ok(Self { plant, cfg, home, record: false, trajectory: Vec::new() })
    }

    /// Keep every sample for later export.
    pub fn with_recording(mut self, on: bool) -> Self {
        self.record = on;
        self
    }

    pub fn config(&self) -> &RigConfig {
        &self.cfg
    }

    pub fn home(&self) -> Angle {
        self.home
    }

    pub fn time(&self) -> Seconds {
        self.plant.time()
    }

    pub fn state(&self) -> PlantState {
        self.plant.state()
    }

    pub fn take_trajectory(&mut self) -> Vec<TrajectorySample> {
        std::mem::take(&mut self.trajectory)
    }

    fn steps(&self, duration: Seconds) -> usize {
        (duration / self.plant.params().dt_s).round().max(0.0) as usize
    }

    /// Steps for `duration`; `ctl` maps (true state, segment time) to
    /// (motor, human) torques and may stop the segment early by returning `None`.
    fn run<F>(&mut self, duration: Seconds, mut ctl: F) -> Result<Vec<TrajectorySample>>
    where
        F: FnMut(&PlantState, Seconds) -> Option<(TorqueMilli, TorqueMilli)>,
    {
        let n = self.steps(duration);
        let dt = self.plant.params().dt_s;
        let mut out = Vec::with_capacity(n);
        for i in 0..n {
            let s = self.plant.state();
            let Some((motor, human)) = ctl(&s, i as f64 * dt) else { break };
            out.push(self.plant.step(motor + self.cfg.gravity_comp_mnm, human)?);
        }
        if self.record {
            self.trajectory.extend_from_slice(&out);
        }
        Ok(out)
    }

    /// Model-based feedforward (mNm) for a reference with the given rate and
    /// acceleration in degrees.
    fn feedforward(&self, v: AngularVelocity, a: f64) -> TorqueMilli {
        let p = self.plant.params();
        nm_to_mnm(p.inertia_j * a.to_radians() + p.damping_b * v.to_radians())
    }

    /// Passive smoothstep move from the current angle, held between walls
    /// that travel with the reference.
    pub fn move_to(&mut self, target: Angle, duration: Seconds) -> Result<Vec<TrajectorySample>> {
        let spec = TrajectorySpec::new(self.plant.state().angle_deg, target, duration)?;
        let (gains, walls, half) = (self.cfg.tracking, self.cfg.walls, self.cfg.gap_half_width_deg);
        let amp = spec.to_deg - spec.from_deg;
        let (j_ff, b_ff) = (self.feedforward(0.0, 1.0), self.feedforward(1.0, 0.0));
        self.run(duration, move |s, t| {
            let u = (t / duration).clamp(0.0, 1.0);
            let r = spec.from_deg + amp * smoothstep(u);
            let v = amp * 6.0 * u * (1.0 - u) / duration;
            let a = amp * 6.0 * (1.0 - 2.0 * u) / (duration * duration);
            let wp = WallPair::around(r, half, walls);
            let motor = tracking_torque(s, r, v, gains) + j_ff * a + b_ff * v;
            Some((motor + wall_torque(s.angle_deg, s.velocity_dps, &wp), 0.0))
        })
    }

    /// Holds the handle between stiff walls centered on `center`.
    pub fn hold(&mut self, center: Angle, duration: Seconds) -> Result<Vec<TrajectorySample>> {
        let wp = WallPair::around(center, self.cfg.gap_half_width_deg, self.cfg.walls);
        let gains = self.cfg.tracking;
        self.run(duration, move |s, _| {
            Some((tracking_torque(s, center, 0.0, gains) + wall_torque(s.angle_deg, s.velocity_dps, &wp), 0.0))
        })
    }

    pub fn return_home(&mut self) -> Result<Vec<TrajectorySample>> {
        self.move_to(self.home, self.cfg.return_s)
    }

    /// Waits at home.
    pub fn rest(&mut self, duration: Seconds) -> Result<Vec<TrajectorySample>> {
        self.hold(self.home, duration)
    }

    /// Drives the handle with a gap moving at `velocity` from `start` until its
    /// center reaches `end`.
    pub fn guide(&mut self, start: Angle, end: Angle, velocity: AngularVelocity) -> Result<Vec<TrajectorySample>> {
        let gap = MovingGap {
            ref_velocity: velocity,
            half_width: self.cfg.gap_half_width_deg,
            start,
            end,
            gains: self.cfg.walls,
        };
        let gains = self.cfg.tracking;
        let b_ff = self.feedforward(1.0, 0.0);
        self.run(gap.arrival_time(), move |s, t| {
            let c = gap.center(t);
            let v = gap.center_velocity(t);
            let wp = gap.walls(t);
            Some((tracking_torque(s, c, v, gains) + b_ff * v + wall_torque(s.angle_deg, s.velocity_dps, &wp), 0.0))
        })
    }

    /// Ramps the motor to `target` and holds it for `hold_s` while the
    /// participant resists, keeping the handle near home. The held posture
    /// drifts as a random walk of `drift_sd` deg/√s.
    pub fn torque_hold<R: Rng + ?Sized>(
        &mut self,
        target: TorqueMilli,
        hold_s: Seconds,
        drift_sd: f64,
        rng: &mut R,
    ) -> Result<TorqueInterval> {
        const DRIFT_UPDATE_S: Seconds = 0.01;
        let ramp = self.cfg.torque_ramp_s;
        let (home, tol, gains, cap) = (self.home, self.cfg.hold_tolerance_deg, self.cfg.human, self.cfg.human_max_mnm);
        let mut offset = 0.0;
        let mut next_drift = 0.0;
        let mut breached = false;
        let mut plateau = (0.0, 0usize);
        let walk_sd = drift_sd * DRIFT_UPDATE_S.sqrt();
        let samples = self.run(ramp + hold_s, |s, t| {
            if (s.angle_deg - home).abs() > tol {
                breached = true;
                return None;
            }
            if t >= next_drift {
                offset += gaussian(walk_sd, rng);
                next_drift += DRIFT_UPDATE_S;
            }
            let motor = crate::haptics::torque_ramp(target, ramp, t);
            let human = (-motor + tracking_torque(s, home + offset, 0.0, gains)).clamp(-cap, cap);
            if t >= ramp {
                plateau.0 += human.abs();
                plateau.1 += 1;
            }
            Some((motor, human))
        })?;
        let perceived_mnm = if plateau.1 > 0 { plateau.0 / plateau.1 as f64 } else { 0.0 };
        Ok(TorqueInterval { samples, breached, perceived_mnm })
    }

    /// The participant moves the free handle along a smoothstep to `target`
    /// over `duration`, then tries to hold still for `settle_s`.
    pub fn active_move(
        &mut self,
        target: Angle,
        duration: Seconds,
        settle_s: Seconds,
    ) -> Result<Vec<TrajectorySample>> {
        let spec = TrajectorySpec::new(self.plant.state().angle_deg, target, duration)?;
        let amp = spec.to_deg - spec.from_deg;
        let (gains, cap) = (self.cfg.human, self.cfg.human_max_mnm);
        let (j_ff, b_ff) = (self.feedforward(0.0, 1.0), self.feedforward(1.0, 0.0));
        self.run(duration + settle_s, move |s, t| {
            let u = (t / duration).clamp(0.0, 1.0);
            let r = spec.from_deg + amp * smoothstep(u);
            let (v, a) = if t < duration {
                (amp * 6.0 * u * (1.0 - u) / duration, amp * 6.0 * (1.0 - 2.0 * u) / (duration * duration))
            } else {
                (0.0, 0.0)
            };
            let human = (tracking_torque(s, r, v, gains) + j_ff * a + b_ff * v).clamp(-cap, cap);
            Some((0.0, human))
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::protocol::features::{ramp_midrange_rate, steady_state_angle, MIDRANGE_WINDOW};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn rig() -> Rig {
        Rig::new(PlantParams::default(), RigConfig::default(), 2.0).unwrap()
    }

    fn mean_angle(s: &[TrajectorySample]) -> f64 {
        s.iter().map(|p| p.angle_deg).sum::<f64>() / s.len() as f64
    }

    #[test]
    fn passive_position_is_accurate() {
        let mut r = rig();
        r.move_to(35.0, 1.0).unwrap();
        let h = r.hold(35.0, 2.0).unwrap();
        assert!((mean_angle(&h) - 35.0).abs() < 0.05);
        r.return_home().unwrap();
        let rest = r.rest(0.5).unwrap();
        assert!((mean_angle(&rest) - 2.0).abs() < 0.05);
        assert!((r.time() - 4.5).abs() < 1e-6);
    }

    #[test]
    fn guided_velocity_is_close_to_command() {
        for v in [15.0, 60.0, 120.0] {
            let mut r = rig();
            let mut seg = r.guide(2.0, 35.0, v).unwrap();
            seg.extend(r.hold(35.0, 0.5).unwrap());
            let rate = ramp_midrange_rate(&seg, MIDRANGE_WINDOW).unwrap();
            assert!((rate / v - 1.0).abs() < 0.01, "{v}: {rate}");
        }
    }

    #[test]
    fn torque_hold_without_drift_reports_target() {
        let mut r = rig();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let out = r.torque_hold(500.0, 2.0, 0.0, &mut rng).unwrap();
        assert!(!out.breached);
        assert!((out.perceived_mnm - 500.0).abs() < 5.0, "{}", out.perceived_mnm);
        let max_dev = out.samples.iter().map(|p| (p.angle_deg - 2.0).abs()).fold(0.0, f64::max);
        assert!(max_dev < 1.0);
    }

    #[test]
    fn large_drift_breaches() {
        let mut r = rig();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let out = r.torque_hold(500.0, 2.0, 100.0, &mut rng).unwrap();
        assert!(out.breached);
    }

    #[test]
    fn active_move_settles_on_target() {
        let mut r = rig();
        let seg = r.active_move(30.0, 1.0, 1.0).unwrap();
        assert!((steady_state_angle(&seg).unwrap() - 30.0).abs() < 0.1);
    }
}
