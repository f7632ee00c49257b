//! Metric extraction from recorded trajectory segments.

use crate::error::{Error, Result};
use crate::plant::TrajectorySample;
use crate::units::{Angle, AngularVelocity, Seconds};

/// Speed below which the handle counts as still.
pub const STEADY_SPEED_DPS: AngularVelocity = 2.0;
pub const STEADY_MIN_S: Seconds = 0.5;
pub const MIDRANGE_WINDOW: (f64, f64) = (0.2, 0.8);
/// Smallest ramp amplitude from which a rate is extracted.
const MIN_RAMP_DEG: Angle = 0.5;

/// `u` in `[0, 1]` with `smoothstep(u) = y`.
pub fn smoothstep_inverse(y: f64) -> f64 {
    let y = y.clamp(0.0, 1.0);
    let (mut lo, mut hi) = (0.0, 1.0);
    for _ in 0..60 {
        let m = 0.5 * (lo + hi);
        if crate::haptics::smoothstep(m) < y {
            lo = m;
        } else {
            hi = m;
        }
    }
    0.5 * (lo + hi)
}

/// Duration of a smoothstep of amplitude `amp` whose midrange rate
/// (over [`MIDRANGE_WINDOW`]) equals `rate`.
pub fn smoothstep_duration_for_rate(amp: Angle, rate: AngularVelocity) -> Seconds {
    let (lo, hi) = MIDRANGE_WINDOW;
    (hi - lo) * amp.abs() / ((smoothstep_inverse(hi) - smoothstep_inverse(lo)) * rate.abs())
}

/// Mean angle over the last window in which `|velocity| < 2 dps` for at
/// least 0.5 s.
pub fn steady_state_angle(traj: &[TrajectorySample]) -> Result<Angle> {
    let mut best: Option<(usize, usize)> = None;
    let mut start: Option<usize> = None;
    let close = |s: usize, e: usize, best: &mut Option<(usize, usize)>| {
        if traj[e].t_s - traj[s].t_s >= STEADY_MIN_S - 1e-9 {
            *best = Some((s, e));
        }
    };
    for (i, p) in traj.iter().enumerate() {
        if p.velocity_dps.abs() < STEADY_SPEED_DPS {
            start.get_or_insert(i);
        } else if let Some(s) = start.take() {
            if i > s {
                close(s, i - 1, &mut best);
            }
        }
    }
    if let Some(s) = start {
        close(s, traj.len() - 1, &mut best);
    }
    let (s, e) = best.ok_or_else(|| {
        Error::Feature(format!("no window with |velocity| < {STEADY_SPEED_DPS} dps lasting {STEADY_MIN_S} s"))
    })?;
    let w = &traj[s..=e];
    Ok(w.iter().map(|p| p.angle_deg).sum::<f64>() / w.len() as f64)
}

/// First time the angle reaches `level`, linearly interpolated, searching
/// from index `from`.
fn crossing(traj: &[TrajectorySample], level: Angle, from: usize) -> Option<(usize, Seconds)> {
    for i in from.max(1)..traj.len() {
        let (a, b) = (&traj[i - 1], &traj[i]);
        if a.angle_deg < level && b.angle_deg >= level {
            let f = (level - a.angle_deg) / (b.angle_deg - a.angle_deg);
            return Some((i, a.t_s + f * (b.t_s - a.t_s)));
        }
    }
    None
}

/// Average rate of the rising ramp between the `window` fractions of its
/// amplitude. The ramp runs from the first sample to the maximum angle.
pub fn ramp_midrange_rate(traj: &[TrajectorySample], window: (f64, f64)) -> Result<AngularVelocity> {
    let (lo, hi) = window;
    if !(0.0 <= lo && lo < hi && hi <= 1.0) {
        return Err(Error::Domain(format!("midrange window {window:?} must satisfy 0 <= lo < hi <= 1")));
    }
    let first = traj.first().ok_or_else(|| Error::Feature("empty trajectory".into()))?;
    let (peak_idx, peak) = traj
        .iter()
        .enumerate()
        .map(|(i, p)| (i, p.angle_deg))
        .fold((0, f64::NEG_INFINITY), |m, x| if x.1 > m.1 { x } else { m });
    let amp = peak - first.angle_deg;
    if amp < MIN_RAMP_DEG {
        return Err(Error::Feature(format!("no rising ramp (amplitude {amp:.3} deg)")));
    }
    let rising = &traj[..=peak_idx];
    let l_lo = first.angle_deg + lo * amp;
    let l_hi = first.angle_deg + hi * amp;
    let (i_lo, t_lo) = if lo == 0.0 {
        (0, first.t_s)
    } else {
        crossing(rising, l_lo, 1).ok_or_else(|| Error::Feature("ramp never reaches the lower level".into()))?
    };
    let (_, t_hi) = if hi == 1.0 {
        (peak_idx, rising[peak_idx].t_s)
    } else {
        crossing(rising, l_hi, i_lo).ok_or_else(|| Error::Feature("ramp never reaches the upper level".into()))?
    };
    if !(t_hi > t_lo) {
        return Err(Error::Feature("degenerate midrange timing".into()));
    }
    Ok((l_hi - l_lo) / (t_hi - t_lo))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::haptics::{smoothstep_angle, smoothstep_velocity, TrajectorySpec};

    fn sample(t: f64, a: f64, v: f64) -> TrajectorySample {
        TrajectorySample { t_s: t, angle_deg: a, velocity_dps: v, motor_torque_mnm: 0.0, human_torque_mnm: 0.0 }
    }

    fn from_fn(n: usize, dt: f64, f: impl Fn(f64) -> (f64, f64)) -> Vec<TrajectorySample> {
        (0..n)
            .map(|i| {
                let t = i as f64 * dt;
                let (a, v) = f(t);
                sample(t, a, v)
            })
            .collect()
    }

    #[test]
    fn constant_is_steady() {
        let tr = from_fn(1000, 1e-3, |_| (30.0, 0.0));
        assert!((steady_state_angle(&tr).unwrap() - 30.0).abs() < 1e-12);
    }

    #[test]
    fn smoothstep_then_hold() {
        let spec = TrajectorySpec::new(0.0, 30.0, 1.0).unwrap();
        let tr = from_fn(2500, 1e-3, |t| (smoothstep_angle(&spec, t), smoothstep_velocity(&spec, t)));
        assert!((steady_state_angle(&tr).unwrap() - 30.0).abs() < 0.1);
    }

    #[test]
    fn ramp_never_settles() {
        let tr = from_fn(2000, 1e-3, |t| (10.0 * t, 10.0));
        assert!(matches!(steady_state_angle(&tr), Err(Error::Feature(_))));
    }

    #[test]
    fn linear_ramp_rate() {
        let tr = from_fn(1001, 1e-3, |t| (60.0 * t, 60.0));
        let r = ramp_midrange_rate(&tr, MIDRANGE_WINDOW).unwrap();
        assert!((r - 60.0).abs() < 1e-9);
    }

    #[test]
    fn smoothstep_rate_matches_inversion() {
        let (a, t) = (33.0, 1.2);
        // trigonometric root of the cubic 3u^2 - 2u^3 = 0.2
        let u20 = 0.5 + (((1.0f64 - 0.4).acos() - 2.0 * std::f64::consts::PI) / 3.0).cos();
        assert!((smoothstep_inverse(0.2) - u20).abs() < 1e-12);
        let expected = 0.6 * a / ((1.0 - 2.0 * u20) * t);
        assert!((smoothstep_duration_for_rate(a, expected) - t).abs() < 1e-9);
        let spec = TrajectorySpec::new(0.0, a, t).unwrap();
        let tr = from_fn(2000, 1e-3, |s| (smoothstep_angle(&spec, s), 0.0));
        let r = ramp_midrange_rate(&tr, MIDRANGE_WINDOW).unwrap();
        assert!((r / expected - 1.0).abs() < 0.005);
    }

    #[test]
    fn descending_is_error() {
        let tr = from_fn(1000, 1e-3, |t| (-30.0 * t, -30.0));
        assert!(matches!(ramp_midrange_rate(&tr, MIDRANGE_WINDOW), Err(Error::Feature(_))));
    }
}
