//! Scissor-lift spine model: geometry, force law and derived quantities.
//!
//! The spine converts a transverse actuation span `d` (what the springs pull
//! on) into an extension `H` along the body axis through `n` crossed scissor
//! segments. All quantities are SI: meters, newtons, joules.

mod geometry;
mod force;
pub mod numeric;

pub use force::{ForceSample, SampleDirection, SpineConfig, SpringSpec, effective_spring_constant};
pub use geometry::ScissorGeometry;

use thiserror::Error;

/// Evaluations within this distance of a domain boundary are snapped onto it.
pub const DOMAIN_GUARD: f64 = 1e-9;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("{what} = {value} outside valid domain [{lo}, {hi}]")]
    Domain {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },
    #[error("force is monotone on (0, {upper}); no interior peak")]
    NoInteriorPeak { upper: f64 },
}
