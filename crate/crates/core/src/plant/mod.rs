//! Discrete-time model of the single-axis wrist device.
//!
//! A rigid rotor with viscous damping, a one-sided spring-damper end stop at
//! the rotation limiter, an incremental encoder and the velocity signal chain.

mod filter;

use std::io::Write;

use serde::{Deserialize, Serialize};

pub use filter::{ButterworthLowPass, DerivativeFilter};

use crate::error::{ensure_finite, Error, Result};
use crate::units::{mnm_to_nm, Angle, AngularVelocity, Seconds, TorqueMilli};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PlantParams {
    /// Rotor plus handle inertia, kg·m².
    pub inertia_j: f64,
    /// Viscous damping, N·m·s/rad.
    pub damping_b: f64,
    /// Half-range of the rotation limiter, degrees.
    pub limiter_deg: Angle,
    /// N·m/rad.
    pub limiter_stiffness: f64,
    /// N·m·s/rad.
    pub limiter_damping: f64,
    pub encoder_counts_per_rev: u32,
    pub dt_s: Seconds,
    pub filter_cutoff_hz: f64,
}

impl Default for PlantParams {
    fn default() -> Self {
        Self {
            inertia_j: 0.005,
            damping_b: 0.01,
            limiter_deg: 60.0,
            limiter_stiffness: 50.0,
            limiter_damping: 0.5,
            encoder_counts_per_rev: 16384,
            dt_s: 1e-3,
            filter_cutoff_hz: 10.0,
        }
    }
}

impl PlantParams {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Domain(m));
        if !(self.inertia_j > 0.0) {
            return bad(format!("inertia_j must be positive, got {}", self.inertia_j));
        }
        if !(self.damping_b >= 0.0) {
            return bad(format!("damping_b must be non-negative, got {}", self.damping_b));
        }
        if !(self.dt_s > 0.0) {
            return bad(format!("dt_s must be positive, got {}", self.dt_s));
        }
        if !(self.limiter_deg > 0.0) || !(self.limiter_stiffness > 0.0) || !(self.limiter_damping >= 0.0) {
            return bad("limiter range and stiffness must be positive".into());
        }
        if self.encoder_counts_per_rev == 0 {
            return bad("encoder_counts_per_rev must be positive".into());
        }
        if !(self.filter_cutoff_hz > 0.0 && self.filter_cutoff_hz < 0.5 / self.dt_s) {
            return bad(format!(
                "filter_cutoff_hz {} must lie below Nyquist {}",
                self.filter_cutoff_hz,
                0.5 / self.dt_s
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct PlantState {
    pub angle_deg: Angle,
    pub velocity_dps: AngularVelocity,
    pub t: Seconds,
}

impl PlantState {
    pub fn at_rest(angle_deg: Angle) -> Self {
        Self { angle_deg, velocity_dps: 0.0, t: 0.0 }
    }

    pub fn kinetic_energy(&self, params: &PlantParams) -> f64 {
        let w = self.velocity_dps.to_radians();
        0.5 * params.inertia_j * w * w
    }
}

/// End-stop torque in N·m. Zero strictly inside the limiter range; outside,
/// a spring-damper that only ever pushes back toward the range.
pub fn limiter_torque(angle_deg: Angle, velocity_dps: AngularVelocity, params: &PlantParams) -> f64 {
    let lim = params.limiter_deg;
    if angle_deg > lim {
        let pen = (angle_deg - lim).to_radians();
        let t = -(params.limiter_stiffness * pen + params.limiter_damping * velocity_dps.to_radians());
        t.min(0.0)
    } else if angle_deg < -lim {
        let pen = (angle_deg + lim).to_radians();
        let t = -(params.limiter_stiffness * pen + params.limiter_damping * velocity_dps.to_radians());
        t.max(0.0)
    } else {
        0.0
    }
}

/// Advances the plant one `dt_s` with semi-implicit Euler.
pub fn step(
    state: PlantState,
    params: &PlantParams,
    motor_torque: TorqueMilli,
    human_torque: TorqueMilli,
) -> Result<PlantState> {
    ensure_finite("motor_torque", motor_torque)?;
    ensure_finite("human_torque", human_torque)?;
    ensure_finite("angle", state.angle_deg)?;
    ensure_finite("velocity", state.velocity_dps)?;
    Ok(step_unchecked(state, params, motor_torque, human_torque))
}

#[inline]
pub(crate) fn step_unchecked(
    state: PlantState,
    params: &PlantParams,
    motor_torque: TorqueMilli,
    human_torque: TorqueMilli,
) -> PlantState {
    let dt = params.dt_s;
    let omega = state.velocity_dps.to_radians();
    let torque = mnm_to_nm(motor_torque + human_torque) - params.damping_b * omega
        + limiter_torque(state.angle_deg, state.velocity_dps, params);
    let omega_next = omega + torque / params.inertia_j * dt;
    let theta_next = state.angle_deg.to_radians() + omega_next * dt;
    PlantState { angle_deg: theta_next.to_degrees(), velocity_dps: omega_next.to_degrees(), t: state.t + dt }
}

/// Quantizes an angle to the encoder grid (floor to the count below).
pub fn encode_position(angle: Angle, counts_per_rev: u32) -> Angle {
    let cpr = counts_per_rev as f64;
    let counts = angle * cpr / 360.0;
    let nearest = counts.round();
    // grid points reconstructed in floating point land within an ulp of an integer
    let c = if (counts - nearest).abs() <= 1e-9 { nearest } else { counts.floor() };
    c * 360.0 / cpr
}

/// One row of a trajectory log.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrajectorySample {
    pub t_s: Seconds,
    pub angle_deg: Angle,
    pub velocity_dps: AngularVelocity,
    pub motor_torque_mnm: TorqueMilli,
    pub human_torque_mnm: TorqueMilli,
}

pub fn write_trajectory<W: Write>(writer: W, samples: &[TrajectorySample]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    if samples.is_empty() {
        w.write_record(["t_s", "angle_deg", "velocity_dps", "motor_torque_mnm", "human_torque_mnm"])?;
    }
    for s in samples {
        w.serialize(s)?;
    }
    w.flush().map_err(|e| Error::io("<trajectory writer>", e))?;
    Ok(())
}

pub fn read_trajectory<R: std::io::Read>(reader: R) -> Result<Vec<TrajectorySample>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut out = Vec::new();
    for (i, row) in rdr.deserialize().enumerate() {
        out.push(row.map_err(|e: csv::Error| Error::Parse { line: i + 2, message: e.to_string() })?);
    }
    Ok(out)
}

/// Plant plus encoder and velocity estimator, stepping on a virtual clock.
#[derive(Debug, Clone)]
pub struct Plant {
    params: PlantParams,
    state: PlantState,
    filter: DerivativeFilter,
    measured_angle: Angle,
}

impl Plant {
    pub fn new(params: PlantParams, initial: PlantState) -> Result<Self> {
        params.validate()?;
        let filter = DerivativeFilter::new(params.filter_cutoff_hz, params.dt_s)?;
        let measured_angle = encode_position(initial.angle_deg, params.encoder_counts_per_rev);
        let mut plant = Self { params, state: initial, filter, measured_angle };
        plant.filter.estimate_velocity(measured_angle, plant.params.dt_s)?;
        Ok(plant)
    }

    pub fn params(&self) -> &PlantParams {
        &self.params
    }

    pub fn state(&self) -> PlantState {
        self.state
    }

    pub fn time(&self) -> Seconds {
        self.state.t
    }

    /// Encoder reading after the last step.
    pub fn measured_angle(&self) -> Angle {
        self.measured_angle
    }

    /// Filtered velocity estimate after the last step.
    pub fn measured_velocity(&self) -> AngularVelocity {
        self.filter.velocity()
    }

    pub fn measured_acceleration(&self) -> f64 {
        self.filter.acceleration()
    }

    pub fn step(&mut self, motor_torque: TorqueMilli, human_torque: TorqueMilli) -> Result<TrajectorySample> {
        self.state = step(self.state, &self.params, motor_torque, human_torque)?;
        self.measured_angle = encode_position(self.state.angle_deg, self.params.encoder_counts_per_rev);
        let v = self.filter.estimate_velocity(self.measured_angle, self.params.dt_s)?;
        Ok(TrajectorySample {
            t_s: self.state.t,
            angle_deg: self.measured_angle,
            velocity_dps: v,
            motor_torque_mnm: motor_torque,
            human_torque_mnm: human_torque,
        })
    }
}
