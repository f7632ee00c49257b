//! Encoder differentiation and second-order Butterworth smoothing.

use std::f64::consts::{PI, SQRT_2};

use crate::error::{Error, Result};
use crate::units::{Angle, AngularVelocity, Seconds};

/// Direct-form I biquad holding a second-order Butterworth low-pass.
#[derive(Debug, Clone, PartialEq)]
pub struct ButterworthLowPass {
    b: [f64; 3],
    a: [f64; 2],
    x: [f64; 2],
    y: [f64; 2],
}

impl ButterworthLowPass {
    /// Bilinear-transform discretization with the cutoff prewarped.
    pub fn new(cutoff_hz: f64, dt: Seconds) -> Result<Self> {
        if !(dt > 0.0) || !dt.is_finite() {
            return Err(Error::Domain(format!("sample period must be positive, got {dt}")));
        }
        let nyquist = 0.5 / dt;
        if !(cutoff_hz > 0.0 && cutoff_hz < nyquist) {
            return Err(Error::Domain(format!("cutoff {cutoff_hz} Hz must lie in (0, {nyquist}) Hz")));
        }
        let k = (PI * cutoff_hz * dt).tan();
        let k2 = k * k;
        let norm = 1.0 / (1.0 + SQRT_2 * k + k2);
        let b0 = k2 * norm;
        Ok(Self {
            b: [b0, 2.0 * b0, b0],
            a: [2.0 * (k2 - 1.0) * norm, (1.0 - SQRT_2 * k + k2) * norm],
            x: [0.0; 2],
            y: [0.0; 2],
        })
    }

    pub fn coefficients(&self) -> ([f64; 3], [f64; 2]) {
        (self.b, self.a)
    }

    /// Seeds the delay line as if `value` had been applied forever.
    pub fn prime(&mut self, value: f64) {
        self.x = [value; 2];
        self.y = [value; 2];
    }

    pub fn filter(&mut self, input: f64) -> f64 {
        let out = self.b[0] * input + self.b[1] * self.x[0] + self.b[2] * self.x[1]
            - self.a[0] * self.y[0]
            - self.a[1] * self.y[1];
        self.x = [input, self.x[0]];
        self.y = [out, self.y[0]];
        out
    }
}

/// Velocity and acceleration from a position stream: adjacent-sample
/// differences, each smoothed by its own Butterworth stage.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivativeFilter {
    dt: Seconds,
    velocity_lp: ButterworthLowPass,
    accel_lp: ButterworthLowPass,
    prev_angle: Option<Angle>,
    prev_velocity: Option<AngularVelocity>,
    velocity: AngularVelocity,
    acceleration: f64,
}

impl DerivativeFilter {
    pub fn new(cutoff_hz: f64, dt: Seconds) -> Result<Self> {
        Ok(Self {
            dt,
            velocity_lp: ButterworthLowPass::new(cutoff_hz, dt)?,
            accel_lp: ButterworthLowPass::new(cutoff_hz, dt)?,
            prev_angle: None,
            prev_velocity: None,
            velocity: 0.0,
            acceleration: 0.0,
        })
    }

    pub fn dt(&self) -> Seconds {
        self.dt
    }

    /// Feeds one encoder sample and returns the smoothed velocity (deg/s).
    ///
    /// The first sample only primes the differencer and yields zero. The
    /// sample period must equal the one the filter was designed for.
    pub fn estimate_velocity(&mut self, angle: Angle, dt: Seconds) -> Result<AngularVelocity> {
        if !(dt > 0.0) {
            return Err(Error::Domain(format!("dt must be positive, got {dt}")));
        }
        if (dt - self.dt).abs() > 1e-12 * self.dt.max(1.0) {
            return Err(Error::State(format!("filter designed for dt = {} s, fed dt = {dt} s", self.dt)));
        }
        let raw = match self.prev_angle.replace(angle) {
            Some(prev) => (angle - prev) / dt,
            None => 0.0,
        };
        self.velocity = self.velocity_lp.filter(raw);
        let raw_acc = match self.prev_velocity.replace(self.velocity) {
            Some(prev) => (self.velocity - prev) / dt,
            None => 0.0,
        };
        self.acceleration = self.accel_lp.filter(raw_acc);
        Ok(self.velocity)
    }

    pub fn velocity(&self) -> AngularVelocity {
        self.velocity
    }

    /// Smoothed acceleration in deg/s². Logged only; no metric reads it.
    pub fn acceleration(&self) -> f64 {
        self.acceleration
    }

    pub fn reset(&mut self) {
        self.velocity_lp.prime(0.0);
        self.accel_lp.prime(0.0);
        self.prev_angle = None;
        self.prev_velocity = None;
        self.velocity = 0.0;
        self.acceleration = 0.0;
    }
}
