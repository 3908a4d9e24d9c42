//! Sagittal-plane jumping simulator: two half-bodies joined by the spine,
//! two lumped legs with penalty ground contact, and a phase-based jump
//! controller.

mod contact;
mod controller;
mod dynamics;
mod leg;
mod params;
mod trial;

pub use contact::{contact_forces, friction_force, normal_force, penetration_energy};
pub use controller::{jump_controller_step, JumpFsm, JumpGains, JumpPhase, Postures};
pub use dynamics::{
    dynamics_step, spine_joint_force, EnergyBreakdown, FootInfo, GenVec, JointTorques, Leg, Robot, RobotState,
    StepInfo, NDOF, PHI, S, TH_HF, TH_HR, TK_HF, TK_HR, X, Z,
};
pub use leg::{leg_inverse_kinematics, leg_kinematics};
pub use params::{ContactModel, RobotParams, SpineJoint, SpineModule, GRAVITY};
pub use trial::{
    run_jump_trial, JumpMetrics, Scenario, SpineMode, TrialConfig, TrialFailure, TrialLog, TrialLogRow,
    TrialOutcome,
};

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimFault {
    #[error("invalid simulation configuration: {0}")]
    Config(String),
    #[error("spine model domain violation at t={:.6}: {source}; state {state:?}", state.t)]
    SpineDomain {
        source: crate::spine::ModelError,
        state: Box<RobotState>,
    },
    #[error("non-finite state after step from t={:.6}; state {state:?}", state.t)]
    NonFinite { state: Box<RobotState> },
    #[error("lock logic: {0}")]
    Lock(#[from] crate::lock::LockError),
}

impl SimFault {
    pub(crate) fn domain(source: crate::spine::ModelError, state: &RobotState) -> Self {
        SimFault::SpineDomain { source, state: Box::new(*state) }
    }
}
