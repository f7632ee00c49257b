//! Stimulus rendering primitives: virtual walls, smoothstep reference motion,
//! moving-gap velocity guidance, torque ramps and a home-position PD.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::plant::PlantState;
use crate::units::{nm_to_mnm, Angle, AngularVelocity, Seconds, TorqueMilli};

/// A pair of virtual walls bounding a free gap `[lower_deg, upper_deg]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WallPair {
    pub lower_deg: Angle,
    pub upper_deg: Angle,
    /// N·m/rad.
    pub stiffness: f64,
    /// N·m·s/rad.
    pub damping: f64,
}

impl WallPair {
    pub fn new(lower_deg: Angle, upper_deg: Angle, stiffness: f64, damping: f64) -> Result<Self> {
        if !(lower_deg <= upper_deg) {
            return Err(Error::Domain(format!("wall lower {lower_deg} above upper {upper_deg}")));
        }
        if !(stiffness > 0.0) || !(damping >= 0.0) {
            return Err(Error::Domain("wall stiffness must be positive, damping non-negative".into()));
        }
        Ok(Self { lower_deg, upper_deg, stiffness, damping })
    }

    /// Walls centered on `center` with the given half-width.
    pub fn around(center: Angle, half_width: Angle, gains: WallGains) -> Self {
        Self {
            lower_deg: center - half_width,
            upper_deg: center + half_width,
            stiffness: gains.stiffness,
            damping: gains.damping,
        }
    }

    pub fn center(&self) -> Angle {
        0.5 * (self.lower_deg + self.upper_deg)
    }

    pub fn width(&self) -> Angle {
        self.upper_deg - self.lower_deg
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct WallGains {
    pub stiffness: f64,
    pub damping: f64,
}

impl Default for WallGains {
    fn default() -> Self {
        Self { stiffness: 30.0, damping: 0.3 }
    }
}

/// Spring-damper torque (mNm) pushing the handle back into the gap.
///
/// Exactly zero inside `[lower, upper]`. Outside, the damping term acts only
/// while penetrating and the total never pulls further into the wall.
pub fn wall_torque(angle: Angle, velocity: AngularVelocity, walls: &WallPair) -> TorqueMilli {
    let w = velocity.to_radians();
    if angle > walls.upper_deg {
        let pen = (angle - walls.upper_deg).to_radians();
        nm_to_mnm(-(walls.stiffness * pen + walls.damping * w.max(0.0)))
    } else if angle < walls.lower_deg {
        let pen = (angle - walls.lower_deg).to_radians();
        nm_to_mnm(-(walls.stiffness * pen + walls.damping * w.min(0.0)))
    } else {
        0.0
    }
}

/// Point-to-point reference motion with cubic ease-in/ease-out.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySpec {
    pub from_deg: Angle,
    pub to_deg: Angle,
    pub duration_s: Seconds,
}

impl TrajectorySpec {
    pub fn new(from_deg: Angle, to_deg: Angle, duration_s: Seconds) -> Result<Self> {
        if !(duration_s > 0.0) {
            return Err(Error::Domain(format!("duration must be positive, got {duration_s}")));
        }
        Ok(Self { from_deg, to_deg, duration_s })
    }
}

/// `3u² − 2u³`.
#[inline]
pub fn smoothstep(u: f64) -> f64 {
    let u = u.clamp(0.0, 1.0);
    u * u * (3.0 - 2.0 * u)
}

#[inline]
fn smoothstep_slope(u: f64) -> f64 {
    if !(0.0..=1.0).contains(&u) {
        return 0.0;
    }
    6.0 * u * (1.0 - u)
}

/// Reference angle at time `t` (clamped to `[0, duration]`).
pub fn smoothstep_angle(spec: &TrajectorySpec, t: Seconds) -> Angle {
    let u = t / spec.duration_s;
    spec.from_deg + (spec.to_deg - spec.from_deg) * smoothstep(u)
}

/// Reference velocity (deg/s) of the smoothstep at time `t`.
pub fn smoothstep_velocity(spec: &TrajectorySpec, t: Seconds) -> AngularVelocity {
    let u = t / spec.duration_s;
    (spec.to_deg - spec.from_deg) * smoothstep_slope(u) / spec.duration_s
}

/// Walls translating rigidly at `ref_velocity`, centered on `start` at `t = 0`.
///
/// The center stops at `end` once reached. `end` on the wrong side of
/// `start` for the given velocity is treated as no clamp.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MovingGap {
    pub ref_velocity: AngularVelocity,
    pub half_width: Angle,
    pub start: Angle,
    pub end: Angle,
    pub gains: WallGains,
}

impl MovingGap {
    pub fn center(&self, t: Seconds) -> Angle {
        let c = self.start + self.ref_velocity * t.max(0.0);
        if self.ref_velocity >= 0.0 && self.end >= self.start {
            c.min(self.end)
        } else if self.ref_velocity < 0.0 && self.end <= self.start {
            c.max(self.end)
        } else {
            c
        }
    }

    /// Time at which the gap center reaches `end`.
    pub fn arrival_time(&self) -> Seconds {
        if self.ref_velocity == 0.0 {
            return f64::INFINITY;
        }
        ((self.end - self.start) / self.ref_velocity).max(0.0)
    }

    pub fn center_velocity(&self, t: Seconds) -> AngularVelocity {
        if t < self.arrival_time() {
            self.ref_velocity
        } else {
            0.0
        }
    }

    pub fn walls(&self, t: Seconds) -> WallPair {
        WallPair::around(self.center(t), self.half_width, self.gains)
    }
}

/// Free-function form of [`MovingGap::walls`].
pub fn moving_gap(
    ref_velocity: AngularVelocity,
    gap_halfwidth: Angle,
    start: Angle,
    end: Angle,
    t: Seconds,
    gains: WallGains,
) -> Result<WallPair> {
    if !(gap_halfwidth > 0.0) {
        return Err(Error::Domain(format!("gap half-width must be positive, got {gap_halfwidth}")));
    }
    Ok(MovingGap { ref_velocity, half_width: gap_halfwidth, start, end, gains }.walls(t))
}

/// Linear ramp from zero to `target` over `ramp_s`, then constant.
pub fn torque_ramp(target: TorqueMilli, ramp_s: Seconds, t: Seconds) -> TorqueMilli {
    if t <= 0.0 {
        0.0
    } else if t >= ramp_s {
        target
    } else {
        target * t / ramp_s
    }
}

/// PD gains in N·m/rad and N·m·s/rad.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PdGains {
    pub kp: f64,
    pub kd: f64,
}

impl Default for PdGains {
    fn default() -> Self {
        Self { kp: 2.0, kd: 0.1 }
    }
}

/// PD torque (mNm) toward `home_deg`.
pub fn home_torque(state: &PlantState, home_deg: Angle, gains: PdGains) -> TorqueMilli {
    tracking_torque(state, home_deg, 0.0, gains)
}

/// PD torque (mNm) toward a moving reference with velocity feedforward.
#[inline]
pub fn tracking_torque(state: &PlantState, ref_deg: Angle, ref_dps: AngularVelocity, gains: PdGains) -> TorqueMilli {
    let e = (ref_deg - state.angle_deg).to_radians();
    let de = (ref_dps - state.velocity_dps).to_radians();
    nm_to_mnm(gains.kp * e + gains.kd * de)
}
