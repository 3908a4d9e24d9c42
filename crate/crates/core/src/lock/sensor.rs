use serde::{Deserialize, Serialize};

/// Valid range of a distance reading, meters.
pub const SENSOR_RANGE: (f64, f64) = (0.0, 0.5);

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensorReading {
    /// `None` when the sensor flagged the measurement invalid.
    pub value: Option<f64>,
    pub timestamp_us: u64,
}

impl SensorReading {
    pub fn valid(value: f64, timestamp_us: u64) -> Self {
        Self { value: Some(value), timestamp_us }
    }

    pub fn invalid(timestamp_us: u64) -> Self {
        Self { value: None, timestamp_us }
    }

    /// The measurement if it is flagged valid and inside the sensor range.
    pub fn usable(&self) -> Option<f64> {
        self.value
            .filter(|v| v.is_finite() && (SENSOR_RANGE.0..=SENSOR_RANGE.1).contains(v))
    }

    /// Marks the reading invalid if it is older than `max_age_us` at `now_us`.
    pub fn aged(self, now_us: u64, max_age_us: u64) -> Self {
        if now_us.saturating_sub(self.timestamp_us) > max_age_us {
            Self::invalid(self.timestamp_us)
        } else {
            self
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SensorHealth {
    Both,
    LeftOnly,
    RightOnly,
    DegradedHold,
}

impl SensorHealth {
    pub fn code(self) -> u8 {
        match self {
            SensorHealth::Both => 0,
            SensorHealth::LeftOnly => 1,
            SensorHealth::RightOnly => 2,
            SensorHealth::DegradedHold => 3,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Some(match code {
            0 => SensorHealth::Both,
            1 => SensorHealth::LeftOnly,
            2 => SensorHealth::RightOnly,
            3 => SensorHealth::DegradedHold,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LengthEstimate {
    pub h_est: f64,
    pub health: SensorHealth,
}

impl LengthEstimate {
    pub fn new(h_est: f64) -> Self {
        Self { h_est, health: SensorHealth::Both }
    }
}

/// Averages the two sensors, falls back to whichever one still works, and
/// holds the previous estimate when both have failed.
pub fn fuse_sensors(a: SensorReading, b: SensorReading, previous: LengthEstimate) -> LengthEstimate {
    match (a.usable(), b.usable()) {
        (Some(x), Some(y)) => LengthEstimate { h_est: 0.5 * (x + y), health: SensorHealth::Both },
        (Some(x), None) => LengthEstimate { h_est: x, health: SensorHealth::LeftOnly },
        (None, Some(y)) => LengthEstimate { h_est: y, health: SensorHealth::RightOnly },
        (None, None) => LengthEstimate { h_est: previous.h_est, health: SensorHealth::DegradedHold },
    }
}
