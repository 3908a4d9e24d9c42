//! Wire frame layout (all integers little-endian):
//!
//! | offset | size | field                         |
//! |--------|------|-------------------------------|
//! | 0      | 4    | magic `SPQ1`                  |
//! | 4      | 1    | version (1)                   |
//! | 5      | 1    | msg_type (1 state, 2 command) |
//! | 6      | 4    | seq                           |
//! | 10     | 8    | t_us                          |
//! | 18     | 2    | payload_len                   |
//! | 20     | n    | payload                       |
//! | 20+n   | 4    | CRC-32 (IEEE) of bytes 0..20+n|

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lock::{LockCommand, SensorHealth};

pub const MAGIC: [u8; 4] = *b"SPQ1";
pub const VERSION: u8 = 1;
pub const HEADER_LEN: usize = 20;
pub const CRC_LEN: usize = 4;
pub const STATE_PAYLOAD_LEN: usize = 8;
pub const CMD_PAYLOAD_LEN: usize = 4;

const TYPE_STATE: u8 = 1;
const TYPE_CMD: u8 = 2;

#[derive(Debug, Error, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DecodeError {
    #[error("frame truncated")]
    Truncated,
    #[error("bad magic")]
    BadMagic,
    #[error("unsupported version {0}")]
    BadVersion(u8),
    #[error("payload length does not match frame or message type")]
    BadLength,
    #[error("crc mismatch")]
    BadCrc,
    #[error("unknown message type {0}")]
    UnknownType(u8),
    #[error("field {0} out of range")]
    BadEnum(&'static str),
}

/// Lock state as carried on the wire (hole position is not transmitted).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum WireLockState {
    Unlocked = 0,
    Locked = 1,
    UnlockPending = 2,
    LockPending = 3,
}

impl WireLockState {
    pub fn from_code(code: u8) -> Option<Self> {
        Some(match code {
            0 => WireLockState::Unlocked,
            1 => WireLockState::Locked,
            2 => WireLockState::UnlockPending,
            3 => WireLockState::LockPending,
            _ => return None,
        })
    }
}

impl From<crate::lock::LockState> for WireLockState {
    fn from(s: crate::lock::LockState) -> Self {
        WireLockState::from_code(s.code()).expect("lock state codes are 0..=3")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpineStateMsg {
    /// Estimated extension in tenths of a millimeter.
    pub h_est_dmm: u16,
    pub lock_state: WireLockState,
    pub health: SensorHealth,
    pub alarm: bool,
}

impl SpineStateMsg {
    pub fn h_est_m(&self) -> f64 {
        self.h_est_dmm as f64 / 1e4
    }

    /// Quantizes a length in meters to the wire resolution, saturating at the
    /// representable range.
    pub fn quantize_length(h: f64) -> u16 {
        (h * 1e4).round().clamp(0.0, u16::MAX as f64) as u16
    }

    pub fn from_snapshot(s: &crate::lock::SpineSnapshot) -> Self {
        Self {
            h_est_dmm: Self::quantize_length(s.h_est),
            lock_state: s.lock_state.into(),
            health: s.health,
            alarm: s.alarm,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SpineCmdMsg {
    pub cmd: LockCommand,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Message {
    State(SpineStateMsg),
    Cmd(SpineCmdMsg),
}

impl From<SpineStateMsg> for Message {
    fn from(m: SpineStateMsg) -> Self {
        Message::State(m)
    }
}

impl From<SpineCmdMsg> for Message {
    fn from(m: SpineCmdMsg) -> Self {
        Message::Cmd(m)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Frame {
    pub seq: u32,
    pub t_us: u64,
    pub msg: Message,
}

pub fn encode_frame(msg: &Message, seq: u32, t_us: u64) -> Vec<u8> {
    let (msg_type, payload): (u8, Vec<u8>) = match msg {
        Message::State(s) => {
            let mut p = Vec::with_capacity(STATE_PAYLOAD_LEN);
            p.extend_from_slice(&s.h_est_dmm.to_le_bytes());
            p.push(s.lock_state as u8);
            p.push(s.health.code());
            p.push(s.alarm as u8);
            p.extend_from_slice(&[0; 3]);
            (TYPE_STATE, p)
        }
        Message::Cmd(c) => (TYPE_CMD, vec![c.cmd.code(), 0, 0, 0]),
    };
    let mut out = Vec::with_capacity(HEADER_LEN + payload.len() + CRC_LEN);
    out.extend_from_slice(&MAGIC);
    out.push(VERSION);
    out.push(msg_type);
    out.extend_from_slice(&seq.to_le_bytes());
    out.extend_from_slice(&t_us.to_le_bytes());
    out.extend_from_slice(&(payload.len() as u16).to_le_bytes());
    out.extend_from_slice(&payload);
    let crc = crc32fast::hash(&out);
    out.extend_from_slice(&crc.to_le_bytes());
    out
}

pub fn decode_frame(bytes: &[u8]) -> Result<Frame, DecodeError> {
    if bytes.len() < HEADER_LEN {
        return Err(DecodeError::Truncated);
    }
    if bytes[0..4] != MAGIC {
        return Err(DecodeError::BadMagic);
    }
    if bytes[4] != VERSION {
        return Err(DecodeError::BadVersion(bytes[4]));
    }
    let msg_type = bytes[5];
    let seq = u32::from_le_bytes(bytes[6..10].try_into().unwrap());
    let t_us = u64::from_le_bytes(bytes[10..18].try_into().unwrap());
    let payload_len = u16::from_le_bytes(bytes[18..20].try_into().unwrap()) as usize;
    let total = HEADER_LEN + payload_len + CRC_LEN;
    if bytes.len() < total {
        return Err(DecodeError::Truncated);
    }
    if bytes.len() > total {
        return Err(DecodeError::BadLength);
    }
    let body_end = HEADER_LEN + payload_len;
    let crc = u32::from_le_bytes(bytes[body_end..total].try_into().unwrap());
    if crc32fast::hash(&bytes[..body_end]) != crc {
        return Err(DecodeError::BadCrc);
    }
    let payload = &bytes[HEADER_LEN..body_end];
    let msg = match msg_type {
        TYPE_STATE => {
            if payload_len != STATE_PAYLOAD_LEN {
                return Err(DecodeError::BadLength);
            }
            let lock_state =
                WireLockState::from_code(payload[2]).ok_or(DecodeError::BadEnum("lock_state"))?;
            let health = SensorHealth::from_code(payload[3]).ok_or(DecodeError::BadEnum("health"))?;
            let alarm = match payload[4] {
                0 => false,
                1 => true,
                _ => return Err(DecodeError::BadEnum("alarm")),
            };
            if payload[5..8] != [0, 0, 0] {
                return Err(DecodeError::BadEnum("reserved"));
            }
            Message::State(SpineStateMsg {
                h_est_dmm: u16::from_le_bytes([payload[0], payload[1]]),
                lock_state,
                health,
                alarm,
            })
        }
        TYPE_CMD => {
            if payload_len != CMD_PAYLOAD_LEN {
                return Err(DecodeError::BadLength);
            }
            let cmd = LockCommand::from_code(payload[0]).ok_or(DecodeError::BadEnum("cmd"))?;
            if payload[1..4] != [0, 0, 0] {
                return Err(DecodeError::BadEnum("reserved"));
            }
            Message::Cmd(SpineCmdMsg { cmd })
        }
        other => return Err(DecodeError::UnknownType(other)),
    };
    Ok(Frame { seq, t_us, msg })
}
