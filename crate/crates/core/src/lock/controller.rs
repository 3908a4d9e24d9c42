use serde::{Deserialize, Serialize};

use super::cusum::CusumDetector;
use super::fsm::{lock_fsm_step, LockCommand, LockState, PinAction};
use super::sensor::{fuse_sensors, LengthEstimate, SensorHealth, SensorReading};
use super::{hole_layout, LockError};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ControllerParams {
    pub holes: Vec<f64>,
    pub engage_tol: f64,
    pub kappa: f64,
    pub threshold: f64,
    pub tick_hz: f64,
    /// Readings older than this many ticks are treated as invalid.
    pub max_age_ticks: u32,
}

impl ControllerParams {
    pub fn tick_period_us(&self) -> u64 {
        (1e6 / self.tick_hz).round() as u64
    }

    pub fn validate(&self) -> Result<(), LockError> {
        if self.holes.is_empty() {
            return Err(LockError::Config("no lock holes".into()));
        }
        if self.holes.windows(2).any(|w| w[0] > w[1]) {
            return Err(LockError::Config("lock holes must be sorted ascending".into()));
        }
        if !(self.engage_tol > 0.0) {
            return Err(LockError::Config("engage_tol must be positive".into()));
        }
        if !(self.tick_hz > 0.0) {
            return Err(LockError::Config("tick rate must be positive".into()));
        }
        CusumDetector::new(0.0, self.kappa, self.threshold).map(|_| ())
    }
}

impl Default for ControllerParams {
    fn default() -> Self {
        Self {
            holes: hole_layout(0.08, 0.20, 0.02).expect("static layout"),
            engage_tol: 0.002,
            kappa: CusumDetector::DEFAULT_KAPPA,
            threshold: CusumDetector::DEFAULT_THRESHOLD,
            tick_hz: 100.0,
            max_age_ticks: 2,
        }
    }
}

/// State published by the spine node every tick.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SpineSnapshot {
    pub h_est: f64,
    pub lock_state: LockState,
    pub health: SensorHealth,
    pub alarm: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TickOutput {
    pub tick: u64,
    pub action: PinAction,
    pub snapshot: SpineSnapshot,
}

/// The spine node's single-owner logic bundle.
#[derive(Debug, Clone)]
pub struct SpineController {
    params: ControllerParams,
    state: LockState,
    estimate: LengthEstimate,
    detector: CusumDetector,
    tick: u64,
}

impl SpineController {
    pub fn new(params: ControllerParams, state: LockState, initial_h: f64) -> Result<Self, LockError> {
        params.validate()?;
        let mu = match state {
            LockState::Locked { h_lock } | LockState::UnlockPending { h_lock } => h_lock,
            _ => initial_h,
        };
        let detector = CusumDetector::new(mu, params.kappa, params.threshold)?;
        Ok(Self {
            params,
            state,
            estimate: LengthEstimate::new(initial_h),
            detector,
            tick: 0,
        })
    }

    pub fn state(&self) -> LockState {
        self.state
    }

    pub fn estimate(&self) -> LengthEstimate {
        self.estimate
    }

    pub fn params(&self) -> &ControllerParams {
        &self.params
    }

    pub fn tick_count(&self) -> u64 {
        self.tick
    }

    /// fuse -> cusum (only while unlock is pending) -> state machine.
    pub fn tick(
        &mut self,
        a: SensorReading,
        b: SensorReading,
        cmd: Option<LockCommand>,
        now_us: u64,
    ) -> Result<TickOutput, LockError> {
        let max_age = self.params.tick_period_us() * self.params.max_age_ticks as u64;
        let estimate = fuse_sensors(a.aged(now_us, max_age), b.aged(now_us, max_age), self.estimate);
        self.estimate = estimate;
        self.step_with_estimate(cmd)
    }

    /// Tick driven by an externally known length (simulation in the loop).
    pub fn tick_with_length(&mut self, h: f64, cmd: Option<LockCommand>) -> Result<TickOutput, LockError> {
        self.estimate = LengthEstimate::new(h);
        self.step_with_estimate(cmd)
    }

    fn step_with_estimate(&mut self, cmd: Option<LockCommand>) -> Result<TickOutput, LockError> {
        let alarm = match self.state {
            LockState::UnlockPending { .. } => {
                // a held estimate carries no new information
                let x = if self.estimate.health == SensorHealth::DegradedHold {
                    self.detector.mu_ref()
                } else {
                    self.estimate.h_est
                };
                self.detector.update(x)
            }
            _ => false,
        };
        let (next, action) = lock_fsm_step(
            self.state,
            cmd,
            self.estimate.h_est,
            alarm,
            &self.params.holes,
            self.params.engage_tol,
        )?;
        if let (LockState::Locked { .. }, LockState::UnlockPending { h_lock }) = (self.state, next) {
            self.detector.arm(h_lock);
        }
        self.state = next;
        let out = TickOutput {
            tick: self.tick,
            action,
            snapshot: SpineSnapshot {
                h_est: self.estimate.h_est,
                lock_state: self.state,
                health: self.estimate.health,
                alarm,
            },
        };
        self.tick += 1;
        Ok(out)
    }
}
