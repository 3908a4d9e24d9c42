use std::io;
use std::net::{IpAddr, Ipv4Addr, SocketAddr, UdpSocket};
use std::time::Duration;

use serde::{Deserialize, Serialize};

use super::frame::{decode_frame, encode_frame, Frame, Message};

pub const DEFAULT_STATE_PORT: u16 = 7501;
pub const DEFAULT_CMD_PORT: u16 = 7502;
pub const STATE_PORT_ENV: &str = "SPQ_STATE_PORT";
pub const CMD_PORT_ENV: &str = "SPQ_CMD_PORT";

const MAX_DATAGRAM: usize = 1500;

/// Addresses of the two channels plus multicast settings.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct BusConfig {
    pub host: IpAddr,
    pub state_port: u16,
    pub cmd_port: u16,
    pub multicast_ttl: u32,
}

impl Default for BusConfig {
    fn default() -> Self {
        Self {
            host: IpAddr::V4(Ipv4Addr::LOCALHOST),
            state_port: DEFAULT_STATE_PORT,
            cmd_port: DEFAULT_CMD_PORT,
            multicast_ttl: 1,
        }
    }
}

impl BusConfig {
    /// Applies `SPQ_STATE_PORT` / `SPQ_CMD_PORT` when set to a valid port.
    pub fn with_env_overrides(mut self) -> Self {
        if let Some(p) = std::env::var(STATE_PORT_ENV).ok().and_then(|v| v.parse().ok()) {
            self.state_port = p;
        }
        if let Some(p) = std::env::var(CMD_PORT_ENV).ok().and_then(|v| v.parse().ok()) {
            self.cmd_port = p;
        }
        self
    }

    pub fn state_endpoint(&self) -> SocketAddr {
        SocketAddr::new(self.host, self.state_port)
    }

    pub fn cmd_endpoint(&self) -> SocketAddr {
        SocketAddr::new(self.host, self.cmd_port)
    }
}

/// Fire-and-forget sender for one channel; numbers frames from 1.
#[derive(Debug)]
pub struct Publisher {
    socket: UdpSocket,
    target: SocketAddr,
    next_seq: u32,
}

impl Publisher {
    pub fn new(target: SocketAddr, multicast_ttl: u32) -> io::Result<Self> {
        let bind: SocketAddr = match target {
            SocketAddr::V4(_) => (Ipv4Addr::UNSPECIFIED, 0).into(),
            SocketAddr::V6(_) => (std::net::Ipv6Addr::UNSPECIFIED, 0).into(),
        };
        let socket = UdpSocket::bind(bind)?;
        if target.ip().is_multicast() {
            socket.set_multicast_ttl_v4(multicast_ttl)?;
        }
        Ok(Self { socket, target, next_seq: 1 })
    }

    pub fn target(&self) -> SocketAddr {
        self.target
    }

    /// Encodes and sends `msg`, returning the sequence number used.
    pub fn publish(&mut self, msg: &Message, t_us: u64) -> io::Result<u32> {
        let seq = self.next_seq;
        self.publish_raw(&encode_frame(msg, seq, t_us))?;
        self.next_seq = self.next_seq.wrapping_add(1);
        Ok(seq)
    }

    pub fn publish_raw(&self, bytes: &[u8]) -> io::Result<()> {
        match self.socket.send_to(bytes, self.target) {
            Ok(_) => Ok(()),
            // nobody listening yet is a normal condition for datagrams
            Err(e) if e.kind() == io::ErrorKind::ConnectionRefused => Ok(()),
            Err(e) => Err(e),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Received {
    pub frame: Frame,
    /// Sequence number not greater than the last one seen on this channel.
    pub stale: bool,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct SubscriberStats {
    pub received: u64,
    pub stale: u64,
    pub dropped: u64,
}

/// Receives frames for one channel, dropping anything that fails to decode.
#[derive(Debug)]
pub struct Subscriber {
    socket: UdpSocket,
    last_seq: Option<u32>,
    stats: SubscriberStats,
    buf: Vec<u8>,
}

impl Subscriber {
    pub fn bind(endpoint: SocketAddr) -> io::Result<Self> {
        let socket = match endpoint.ip() {
            IpAddr::V4(group) if group.is_multicast() => {
                let s = UdpSocket::bind((Ipv4Addr::UNSPECIFIED, endpoint.port()))?;
                s.join_multicast_v4(&group, &Ipv4Addr::UNSPECIFIED)?;
                s
            }
            _ => UdpSocket::bind(endpoint)?,
        };
        Ok(Self {
            socket,
            last_seq: None,
            stats: SubscriberStats::default(),
            buf: vec![0; MAX_DATAGRAM],
        })
    }

    pub fn local_addr(&self) -> io::Result<SocketAddr> {
        self.socket.local_addr()
    }

    pub fn stats(&self) -> SubscriberStats {
        self.stats
    }

    /// Waits up to `timeout` for the next decodable frame.
    pub fn recv_timeout(&mut self, timeout: Duration) -> io::Result<Option<Received>> {
        let deadline = std::time::Instant::now() + timeout;
        loop {
            let remaining = deadline.saturating_duration_since(std::time::Instant::now());
            if remaining.is_zero() {
                return Ok(None);
            }
            self.socket.set_nonblocking(false)?;
            self.socket.set_read_timeout(Some(remaining))?;
            match self.recv_one() {
                Ok(Some(r)) => return Ok(Some(r)),
                Ok(None) => continue,
                Err(e) if is_timeout(&e) => return Ok(None),
                Err(e) => return Err(e),
            }
        }
    }

    /// Drains every datagram already queued on the socket without blocking.
    pub fn drain(&mut self) -> io::Result<Vec<Received>> {
        self.socket.set_nonblocking(true)?;
        let mut out = Vec::new();
        loop {
            match self.recv_one() {
                Ok(Some(r)) => out.push(r),
                Ok(None) => {}
                Err(e) if is_timeout(&e) => break,
                Err(e) => return Err(e),
            }
        }
        Ok(out)
    }

    /// `Ok(None)` means a datagram arrived but was dropped as undecodable.
    fn recv_one(&mut self) -> io::Result<Option<Received>> {
        let (n, _) = match self.socket.recv_from(&mut self.buf) {
            Ok(x) => x,
            Err(e) if e.kind() == io::ErrorKind::ConnectionRefused => return Ok(None),
            Err(e) => return Err(e),
        };
        match decode_frame(&self.buf[..n]) {
            Ok(frame) => {
                let stale = self.last_seq.is_some_and(|last| frame.seq <= last);
                if stale {
                    self.stats.stale += 1;
                } else {
                    self.last_seq = Some(frame.seq);
                }
                self.stats.received += 1;
                Ok(Some(Received { frame, stale }))
            }
            Err(e) => {
                log::debug!("dropping undecodable datagram: {e}");
                self.stats.dropped += 1;
                Ok(None)
            }
        }
    }
}

fn is_timeout(e: &io::Error) -> bool {
    matches!(e.kind(), io::ErrorKind::WouldBlock | io::ErrorKind::TimedOut)
}
