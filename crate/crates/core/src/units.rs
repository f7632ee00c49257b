//! Scalar units used across the crate.
//!
//! Degrees are canonical for angles everywhere outside the plant integrator.
//! Pronation is positive.

/// Angle in degrees.
pub type Angle = f64;
/// Angular velocity in degrees per second.
pub type AngularVelocity = f64;
/// Torque in millinewton-meters.
pub type TorqueMilli = f64;
/// Time in seconds.
pub type Seconds = f64;

#[inline]
pub fn mnm_to_nm(t: TorqueMilli) -> f64 {
    t * 1e-3
}

#[inline]
pub fn nm_to_mnm(t: f64) -> TorqueMilli {
    t * 1e3
}
