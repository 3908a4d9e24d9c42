//! Spine node <-> main controller messaging: a compact CRC-checked frame
//! format and fire-and-forget UDP publish/subscribe.

mod frame;
pub mod node;
mod transport;

pub use frame::{
    decode_frame, encode_frame, DecodeError, Frame, Message, SpineCmdMsg, SpineStateMsg, WireLockState,
    CMD_PAYLOAD_LEN, CRC_LEN, HEADER_LEN, MAGIC, STATE_PAYLOAD_LEN, VERSION,
};
pub use node::{ConstantLength, ControllerNode, SensorSource, SpineNode};
pub use transport::{
    BusConfig, Publisher, Received, Subscriber, SubscriberStats, CMD_PORT_ENV, DEFAULT_CMD_PORT,
    DEFAULT_STATE_PORT, STATE_PORT_ENV,
};
