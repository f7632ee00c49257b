//! Adaptive staircases, JND extraction and simulated observers.

mod observer;
mod staircase;

pub(crate) use observer::gaussian;
pub use observer::{
    convergence_level, p_respond_different, solve_threshold, Modality, ObserverModel, Reproduction, Sensitivity,
};
pub(crate) use staircase::median;
pub use staircase::{
    staircase_jnd, staircase_update, write_trace, Direction, JndResult, Response, Staircase, StaircaseConfig,
    StaircaseState, Termination, TraceRow, UpdateOutcome,
};
