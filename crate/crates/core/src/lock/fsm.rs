use serde::{Deserialize, Serialize};

use super::{to_nm, LockError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "state", rename_all = "snake_case")]
pub enum LockState {
    Locked { h_lock: f64 },
    /// Unlock commanded; waiting for a press to unload the pin.
    UnlockPending { h_lock: f64 },
    Unlocked,
    /// Lock commanded; waiting for the spine to pass over a hole.
    LockPending,
}

impl LockState {
    /// Wire code: 0 unlocked, 1 locked, 2 unlock pending, 3 lock pending.
    pub fn code(&self) -> u8 {
        match self {
            LockState::Unlocked => 0,
            LockState::Locked { .. } => 1,
            LockState::UnlockPending { .. } => 2,
            LockState::LockPending => 3,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            LockState::Unlocked => "unlocked",
            LockState::Locked { .. } => "locked",
            LockState::UnlockPending { .. } => "unlock_pending",
            LockState::LockPending => "lock_pending",
        }
    }

    /// Whether the pin is currently in a hole (spine length frozen).
    pub fn pin_engaged(&self) -> bool {
        matches!(self, LockState::Locked { .. } | LockState::UnlockPending { .. })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LockCommand {
    StayUnlocked,
    StayLocked,
    Lock,
    Unlock,
}

impl LockCommand {
    pub fn code(self) -> u8 {
        match self {
            LockCommand::StayUnlocked => 0,
            LockCommand::StayLocked => 1,
            LockCommand::Lock => 2,
            LockCommand::Unlock => 3,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Some(match code {
            0 => LockCommand::StayUnlocked,
            1 => LockCommand::StayLocked,
            2 => LockCommand::Lock,
            3 => LockCommand::Unlock,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "action", rename_all = "snake_case")]
pub enum PinAction {
    None,
    EngagePin { hole: f64 },
    RetractPin,
}

/// Hole closest to `h`; exact ties go to the shorter hole.
pub fn nearest_hole(h: f64, holes: &[f64]) -> Result<f64, LockError> {
    let target = to_nm(h);
    holes
        .iter()
        .copied()
        .min_by_key(|&hole| ((to_nm(hole) - target).abs(), to_nm(hole)))
        .ok_or_else(|| LockError::Config("lock hole list is empty".into()))
}

/// One transition of the lock state machine.
///
/// Inputs that make no sense in the current state (a press alarm while
/// unlocked, a lock command while locked) are ignored.
pub fn lock_fsm_step(
    state: LockState,
    cmd: Option<LockCommand>,
    h_est: f64,
    press_alarm: bool,
    holes: &[f64],
    engage_tol: f64,
) -> Result<(LockState, PinAction), LockError> {
    use LockCommand::*;
    use LockState::*;

    let state = match (state, cmd) {
        (Locked { h_lock }, Some(Unlock)) => return Ok((UnlockPending { h_lock }, PinAction::None)),
        (UnlockPending { h_lock }, Some(Lock)) => return Ok((Locked { h_lock }, PinAction::None)),
        (Unlocked, Some(Lock)) => LockPending,
        (LockPending, Some(Unlock)) => return Ok((Unlocked, PinAction::None)),
        (s, _) => s,
    };

    match state {
        UnlockPending { .. } if press_alarm => Ok((Unlocked, PinAction::RetractPin)),
        LockPending => {
            let hole = nearest_hole(h_est, holes)?;
            if to_nm((h_est - hole).abs()) <= to_nm(engage_tol) {
                Ok((Locked { h_lock: hole }, PinAction::EngagePin { hole }))
            } else {
                Ok((LockPending, PinAction::None))
            }
        }
        s => Ok((s, PinAction::None)),
    }
}
