//! Lockable compliant prismatic spine for a small quadruped.
//!
//! * [`spine`]: scissor-lift geometry and force law.
//! * [`lock`]: sensor fusion, press detection and the lock state machine.
//! * [`bus`]: framed wire messages and UDP pub/sub between spine and controller nodes.
//! * [`sim`]: planar two-half-body jumping simulator hosting the spine.
//! * [`harness`]: characterization, lock-scenario and jump experiment pipelines.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod spine;
pub mod lock;
pub mod bus;
pub mod sim;
pub mod harness;
