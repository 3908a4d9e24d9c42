//! The two bus participants: the spine node (sensors + lock logic) and the
//! main controller node (issues lock commands, consumes spine state).

use std::io;
use std::sync::atomic::{AtomicBool, Ordering};
use std::time::{Duration, Instant};

use super::frame::{Message, SpineCmdMsg, SpineStateMsg};
use super::transport::{BusConfig, Publisher, Received, Subscriber};
use crate::lock::{LockCommand, SensorReading, SpineController, TickOutput};

/// Where the spine node gets its two distance readings each tick.
pub trait SensorSource {
    fn read(&mut self, tick: u64, now_us: u64) -> (SensorReading, SensorReading);
}

impl<F> SensorSource for F
where
    F: FnMut(u64, u64) -> (SensorReading, SensorReading),
{
    fn read(&mut self, tick: u64, now_us: u64) -> (SensorReading, SensorReading) {
        self(tick, now_us)
    }
}

/// Both sensors report the same fixed length.
#[derive(Debug, Clone, Copy)]
pub struct ConstantLength(pub f64);

impl SensorSource for ConstantLength {
    fn read(&mut self, _tick: u64, now_us: u64) -> (SensorReading, SensorReading) {
        (SensorReading::valid(self.0, now_us), SensorReading::valid(self.0, now_us))
    }
}

pub struct SpineNode<S> {
    controller: SpineController,
    sensors: S,
    state_pub: Publisher,
    cmd_sub: Subscriber,
    commands_seen: u64,
}

impl<S: SensorSource> SpineNode<S> {
    pub fn new(controller: SpineController, sensors: S, bus: &BusConfig) -> io::Result<Self> {
        Ok(Self {
            controller,
            sensors,
            state_pub: Publisher::new(bus.state_endpoint(), bus.multicast_ttl)?,
            cmd_sub: Subscriber::bind(bus.cmd_endpoint())?,
            commands_seen: 0,
        })
    }

    pub fn controller(&self) -> &SpineController {
        &self.controller
    }

    pub fn commands_seen(&self) -> u64 {
        self.commands_seen
    }

    /// Latest fresh command queued since the previous tick, if any.
    fn take_command(&mut self) -> io::Result<Option<LockCommand>> {
        let mut latest = None;
        for Received { frame, stale } in self.cmd_sub.drain()? {
            if stale {
                continue;
            }
            if let Message::Cmd(SpineCmdMsg { cmd }) = frame.msg {
                self.commands_seen += 1;
                latest = Some(cmd);
            }
        }
        Ok(latest)
    }

    /// One tick: ingest commands, run the lock logic, publish the state.
    pub fn step(&mut self, now_us: u64) -> io::Result<TickOutput> {
        let cmd = self.take_command()?;
        let tick = self.controller.tick_count();
        let (a, b) = self.sensors.read(tick, now_us);
        let out = self
            .controller
            .tick(a, b, cmd, now_us)
            .map_err(|e| io::Error::new(io::ErrorKind::InvalidInput, e))?;
        let msg = SpineStateMsg::from_snapshot(&out.snapshot);
        self.state_pub.publish(&Message::State(msg), now_us)?;
        Ok(out)
    }

    /// Ticks at the controller's rate until `ticks` have elapsed or `stop` is set.
    pub fn run(&mut self, ticks: Option<u64>, stop: &AtomicBool) -> io::Result<Vec<TickOutput>> {
        let period = Duration::from_micros(self.controller.params().tick_period_us());
        let start = Instant::now();
        let mut outputs = Vec::new();
        let mut n = 0u64;
        while ticks.is_none_or(|t| n < t) && !stop.load(Ordering::Relaxed) {
            let deadline = start + period * n as u32;
            if let Some(wait) = deadline.checked_duration_since(Instant::now()) {
                std::thread::sleep(wait);
            }
            let now_us = start.elapsed().as_micros() as u64;
            outputs.push(self.step(now_us)?);
            n += 1;
        }
        Ok(outputs)
    }
}

/// Main-controller side: sends commands, keeps the freshest spine state.
pub struct ControllerNode {
    cmd_pub: Publisher,
    state_sub: Subscriber,
    latest: Option<(u32, SpineStateMsg)>,
}

impl ControllerNode {
    pub fn new(bus: &BusConfig) -> io::Result<Self> {
        Ok(Self {
            cmd_pub: Publisher::new(bus.cmd_endpoint(), bus.multicast_ttl)?,
            state_sub: Subscriber::bind(bus.state_endpoint())?,
            latest: None,
        })
    }

    pub fn send(&mut self, cmd: LockCommand, t_us: u64) -> io::Result<u32> {
        self.cmd_pub.publish(&Message::Cmd(SpineCmdMsg { cmd }), t_us)
    }

    /// Waits up to `timeout` for the next fresh state message.
    pub fn next_state(&mut self, timeout: Duration) -> io::Result<Option<(u32, SpineStateMsg)>> {
        let deadline = Instant::now() + timeout;
        loop {
            let left = deadline.saturating_duration_since(Instant::now());
            match self.state_sub.recv_timeout(left)? {
                Some(Received { stale: true, .. }) => continue,
                Some(Received { frame, .. }) => {
                    if let Message::State(s) = frame.msg {
                        self.latest = Some((frame.seq, s));
                        return Ok(self.latest);
                    }
                }
                None => return Ok(None),
            }
        }
    }

    pub fn latest(&self) -> Option<(u32, SpineStateMsg)> {
        self.latest
    }

    pub fn subscriber_stats(&self) -> super::SubscriberStats {
        self.state_sub.stats()
    }
}
