use serde::{Deserialize, Serialize};

use super::HarnessError;
use crate::lock::replay::{replay, LogRow, TraceRow};
use crate::lock::{ControllerParams, LockCommand, LockState, PinAction, SpineController};

/// The four lock/unlock demonstrations.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LockScenario {
    /// Pre-locked, commanded to stay locked.
    A,
    /// Pre-unlocked, commanded to stay unlocked.
    B,
    /// Pre-unlocked, commanded to lock at the shortest length.
    C,
    /// Pre-locked, commanded to unlock at the shortest length once pressed.
    D,
}

impl std::str::FromStr for LockScenario {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "a" => Ok(LockScenario::A),
            "b" => Ok(LockScenario::B),
            "c" => Ok(LockScenario::C),
            "d" => Ok(LockScenario::D),
            other => Err(format!("unknown lock scenario '{other}' (a|b|c|d)")),
        }
    }
}

impl LockScenario {
    pub const ALL: [LockScenario; 4] = [LockScenario::A, LockScenario::B, LockScenario::C, LockScenario::D];

    /// Initial lock state and the scripted sensor/command log at 100 Hz.
    pub fn script(self) -> (LockState, Vec<LogRow>) {
        let row = |t: u64, h: f64, cmd: Option<LockCommand>| LogRow::new(t, Some(h), Some(h), cmd);
        match self {
            LockScenario::A => {
                let rows = (0..100).map(|t| row(t, 0.12, Some(LockCommand::StayLocked))).collect();
                (LockState::Locked { h_lock: 0.12 }, rows)
            }
            LockScenario::B => {
                // free spine flexing through its travel
                let rows = (0..100)
                    .map(|t| {
                        let h = 0.14 + 0.05 * (t as f64 * std::f64::consts::TAU / 50.0).sin();
                        row(t, h, Some(LockCommand::StayUnlocked))
                    })
                    .collect();
                (LockState::Unlocked, rows)
            }
            LockScenario::C => {
                // pressed from full extension to the stop, then told to lock
                let mut rows = Vec::new();
                for t in 0..100u64 {
                    let h = if t < 40 { 0.2 - (0.2 - 0.081) * t as f64 / 40.0 } else { 0.081 };
                    let cmd = if t == 50 { Some(LockCommand::Lock) } else { None };
                    rows.push(row(t, h, cmd));
                }
                (LockState::Unlocked, rows)
            }
            LockScenario::D => {
                // unlock requested at tick 20, press ramp at ticks 40..43, release afterwards
                let mut rows = Vec::new();
                for t in 0..100u64 {
                    let h = match t {
                        0..=40 => 0.08,
                        41..=43 => 0.08 - 0.002 * (t - 40) as f64,
                        44..=59 => 0.074,
                        _ => (0.074 + 0.004 * (t - 59) as f64).min(0.2),
                    };
                    let cmd = if t == 20 { Some(LockCommand::Unlock) } else { None };
                    rows.push(row(t, h, cmd));
                }
                (LockState::Locked { h_lock: 0.08 }, rows)
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LockScenarioRun {
    pub scenario: LockScenario,
    pub initial: &'static str,
    pub final_state: LockState,
    pub engage_count: usize,
    pub retract_count: usize,
    pub trace: Vec<TraceRow>,
}

/// Drives the lock controller through one scripted scenario.
pub fn locktest(scenario: LockScenario, params: &ControllerParams) -> Result<LockScenarioRun, HarnessError> {
    let (initial, log) = scenario.script();
    let h0 = log[0].sensor_a_mm.unwrap_or(0.0) * 1e-3;
    let mut ctrl = SpineController::new(params.clone(), initial, h0)?;
    let outputs = replay(&mut ctrl, &log)?;
    let trace: Vec<TraceRow> = outputs
        .iter()
        .zip(&log)
        .map(|(o, r)| TraceRow::from_output(o, r.cmd.and_then(LockCommand::from_code)))
        .collect();
    let engage_count = outputs.iter().filter(|o| matches!(o.action, PinAction::EngagePin { .. })).count();
    let retract_count = outputs.iter().filter(|o| o.action == PinAction::RetractPin).count();
    Ok(LockScenarioRun {
        scenario,
        initial: initial.label(),
        final_state: ctrl.state(),
        engage_count,
        retract_count,
        trace,
    })
}
