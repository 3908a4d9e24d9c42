//! Recorded sensor/command logs and their deterministic replay.
//!
//! Input log columns: `tick,sensor_a_mm,sensor_b_mm,cmd` where empty sensor
//! cells mark an invalid reading and `cmd` is an integer command code or empty.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use super::{LockCommand, LockError, LockState, PinAction, SensorReading, SpineController, TickOutput};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LogRow {
    pub tick: u64,
    pub sensor_a_mm: Option<f64>,
    pub sensor_b_mm: Option<f64>,
    pub cmd: Option<u8>,
}

impl LogRow {
    pub fn new(tick: u64, a_m: Option<f64>, b_m: Option<f64>, cmd: Option<LockCommand>) -> Self {
        Self {
            tick,
            sensor_a_mm: a_m.map(|v| v * 1e3),
            sensor_b_mm: b_m.map(|v| v * 1e3),
            cmd: cmd.map(LockCommand::code),
        }
    }
}

/// One line of the replay trace.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TraceRow {
    pub tick: u64,
    pub h_est_m: f64,
    pub health: u8,
    pub alarm: u8,
    pub lock_state: &'static str,
    pub h_lock_m: Option<f64>,
    pub cmd: Option<u8>,
    pub action: &'static str,
    pub hole_m: Option<f64>,
}

impl TraceRow {
    pub fn from_output(out: &TickOutput, cmd: Option<LockCommand>) -> Self {
        let h_lock_m = match out.snapshot.lock_state {
            LockState::Locked { h_lock } | LockState::UnlockPending { h_lock } => Some(h_lock),
            _ => None,
        };
        let (action, hole_m) = match out.action {
            PinAction::None => ("none", None),
            PinAction::EngagePin { hole } => ("engage", Some(hole)),
            PinAction::RetractPin => ("retract", None),
        };
        Self {
            tick: out.tick,
            h_est_m: out.snapshot.h_est,
            health: out.snapshot.health.code(),
            alarm: out.snapshot.alarm as u8,
            lock_state: out.snapshot.lock_state.label(),
            h_lock_m,
            cmd: cmd.map(LockCommand::code),
            action,
            hole_m,
        }
    }
}

pub fn read_log<R: Read>(reader: R) -> Result<Vec<LogRow>, LockError> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    rdr.deserialize()
        .map(|r| r.map_err(|e| LockError::Replay(e.to_string())))
        .collect()
}

pub fn write_log<W: Write>(writer: W, rows: &[LogRow]) -> Result<(), LockError> {
    let mut w = csv::Writer::from_writer(writer);
    for r in rows {
        w.serialize(r).map_err(|e| LockError::Replay(e.to_string()))?;
    }
    w.flush().map_err(|e| LockError::Replay(e.to_string()))
}

/// Feeds every log row through the controller, one tick per row.
pub fn replay(controller: &mut SpineController, log: &[LogRow]) -> Result<Vec<TickOutput>, LockError> {
    let period = controller.params().tick_period_us();
    log.iter()
        .map(|row| {
            let t = row.tick * period;
            let reading = |mm: Option<f64>| match mm {
                Some(v) => SensorReading::valid(v * 1e-3, t),
                None => SensorReading::invalid(t),
            };
            let cmd = match row.cmd {
                Some(c) => Some(
                    LockCommand::from_code(c)
                        .ok_or_else(|| LockError::Replay(format!("unknown command code {c} at tick {}", row.tick)))?,
                ),
                None => None,
            };
            controller.tick(reading(row.sensor_a_mm), reading(row.sensor_b_mm), cmd, t)
        })
        .collect()
}

pub fn write_trace<W: Write>(writer: W, rows: &[TraceRow]) -> Result<(), LockError> {
    let mut w = csv::Writer::from_writer(writer);
    for r in rows {
        w.serialize(r).map_err(|e| LockError::Replay(e.to_string()))?;
    }
    w.flush().map_err(|e| LockError::Replay(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lock::ControllerParams;

    const LOG: &str = "tick,sensor_a_mm,sensor_b_mm,cmd
0,80.0,80.0,3
1,80.0,,
2,78.0,78.0,
3,,76.0,
4,74.0,74.0,
5,74.0,74.0,
";

    fn run() -> Vec<u8> {
        let log = read_log(LOG.as_bytes()).unwrap();
        let mut c =
            SpineController::new(ControllerParams::default(), LockState::Locked { h_lock: 0.08 }, 0.08).unwrap();
        let outs = replay(&mut c, &log).unwrap();
        let rows: Vec<_> = outs
            .iter()
            .zip(&log)
            .map(|(o, r)| TraceRow::from_output(o, r.cmd.and_then(LockCommand::from_code)))
            .collect();
        let mut buf = Vec::new();
        write_trace(&mut buf, &rows).unwrap();
        buf
    }

    #[test]
    fn parses_empty_cells() {
        let log = read_log(LOG.as_bytes()).unwrap();
        assert_eq!(log.len(), 6);
        assert_eq!(log[0].cmd, Some(3));
        assert_eq!(log[1].sensor_b_mm, None);
        assert_eq!(log[3].sensor_a_mm, None);
    }

    #[test]
    fn replay_is_byte_identical() {
        let a = run();
        let b = run();
        assert_eq!(a, b);
        let text = String::from_utf8(a).unwrap();
        assert_eq!(text.matches("retract").count(), 1);
    }

    #[test]
    fn bad_command_code() {
        let log = read_log("tick,sensor_a_mm,sensor_b_mm,cmd\n0,80,80,9\n".as_bytes()).unwrap();
        let mut c = SpineController::new(ControllerParams::default(), LockState::Unlocked, 0.08).unwrap();
        assert!(matches!(replay(&mut c, &log), Err(LockError::Replay(_))));
    }

    #[test]
    fn log_round_trip() {
        let rows = vec![
            LogRow::new(0, Some(0.1), None, Some(LockCommand::Lock)),
            LogRow::new(1, None, Some(0.0995), None),
        ];
        let mut buf = Vec::new();
        write_log(&mut buf, &rows).unwrap();
        assert_eq!(read_log(buf.as_slice()).unwrap(), rows);
    }
}
