//! Embedded logic of the spine node: length estimation from two distance
//! sensors, press detection and the lock/unlock state machine.
//!
//! The pin can only be pulled when an unlock has been commanded *and* an
//! external press has taken the spring load off the pin; locking engages the
//! pin in whichever hole is closest once the spine passes over it.

mod controller;
mod cusum;
mod fsm;
pub mod replay;
mod sensor;

pub use controller::{ControllerParams, SpineController, SpineSnapshot, TickOutput};
pub use cusum::{cusum_update, CusumDetector};
pub use fsm::{lock_fsm_step, nearest_hole, LockCommand, LockState, PinAction};
pub use sensor::{fuse_sensors, LengthEstimate, SensorHealth, SensorReading, SENSOR_RANGE};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LockError {
    #[error("invalid lock configuration: {0}")]
    Config(String),
    #[error("replay log: {0}")]
    Replay(String),
}

/// Lengths are compared on an integer nanometer lattice so that hand-derived
/// thresholds and tie-breaks do not depend on binary rounding.
pub(crate) fn to_nm(x: f64) -> i64 {
    (x * 1e9).round() as i64
}

pub(crate) fn from_nm(x: i64) -> f64 {
    x as f64 / 1e9
}

/// Evenly spaced lock holes from `h_min` to `h_max` inclusive.
pub fn hole_layout(h_min: f64, h_max: f64, spacing: f64) -> Result<Vec<f64>, LockError> {
    if !(spacing > 0.0) || !(h_min <= h_max) {
        return Err(LockError::Config(format!(
            "hole layout needs spacing > 0 and h_min <= h_max (got {spacing}, {h_min}, {h_max})"
        )));
    }
    let lo = to_nm(h_min);
    let hi = to_nm(h_max);
    let step = to_nm(spacing).max(1);
    Ok((0..)
        .map(|i| lo + i * step)
        .take_while(|&h| h <= hi)
        .map(from_nm)
        .collect())
}
