//! Simulation and analysis toolkit for a single-axis wrist proprioception
//! testbed.
//!
//! The crate models the device (rigid rotor, end stop, encoder, Butterworth
//! velocity chain), renders haptic stimuli, runs adaptive psychophysical
//! assessments against simulated observers, scores two virtual daily-living
//! tasks, and ships the small-sample nonparametric statistics used to analyse
//! the resulting participant table.
//!
//! Runnable walkthroughs live in `examples/`.

// `!(x > 0.0)` is how the validators reject NaN along with non-positive values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod adl;
pub mod cli_io;
pub mod error;
pub mod haptics;
pub mod participant;
pub mod plant;
pub mod protocol;
pub mod psychophysics;
pub mod stats;
pub mod units;

pub use error::{Error, Result};
