use serde::{Deserialize, Serialize};

use crate::spine::SpineConfig;

pub const GRAVITY: f64 = 9.81;

/// Physical parameters of the two-half-body robot.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RobotParams {
    pub m_half: f64,
    pub m_batt: f64,
    pub m_rspine: f64,
    pub m_cspine: f64,
    pub l_ulimb: f64,
    pub l_llimb: f64,
    pub m_ulimb: f64,
    pub m_llimb: f64,
    pub tau_shaft_peak: f64,
    pub torque_cap_fraction: f64,
    /// Pitch inertia of one half-body about its own center.
    pub j_half: f64,
    /// Rigid spine length.
    pub l_rspine: f64,
    /// Distance from a half-body's center (and hip) to its spine mount.
    /// Center separation is `half_body_length + spine length`.
    pub half_body_length: f64,
    /// Physical legs lumped into each sagittal leg.
    pub legs_per_side: u32,
    /// Actuator inertia reflected to each leg joint.
    pub joint_inertia: f64,
}

impl Default for RobotParams {
    fn default() -> Self {
        let m_half = 4.6;
        let m_batt = 0.7;
        // box of 0.2 x 0.1 m in the sagittal plane
        let j_half = (m_half + m_batt) * (0.2f64.powi(2) + 0.1f64.powi(2)) / 12.0;
        Self {
            m_half,
            m_batt,
            m_rspine: 0.6,
            m_cspine: 1.2,
            l_ulimb: 0.1,
            l_llimb: 0.2,
            m_ulimb: 0.045,
            m_llimb: 0.055,
            tau_shaft_peak: 9.2,
            torque_cap_fraction: 0.7,
            j_half,
            l_rspine: 0.23,
            half_body_length: 0.2,
            legs_per_side: 2,
            joint_inertia: 0.01,
        }
    }
}

impl RobotParams {
    pub fn validate(&self) -> Result<(), String> {
        let positive = [
            ("m_half", self.m_half),
            ("m_batt", self.m_batt),
            ("m_rspine", self.m_rspine),
            ("m_cspine", self.m_cspine),
            ("l_ulimb", self.l_ulimb),
            ("l_llimb", self.l_llimb),
            ("m_ulimb", self.m_ulimb),
            ("m_llimb", self.m_llimb),
            ("tau_shaft_peak", self.tau_shaft_peak),
            ("j_half", self.j_half),
            ("l_rspine", self.l_rspine),
            ("half_body_length", self.half_body_length),
            ("joint_inertia", self.joint_inertia),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(format!("{name} must be positive (got {v})"));
            }
        }
        if !(self.torque_cap_fraction > 0.0 && self.torque_cap_fraction <= 1.0) {
            return Err(format!("torque_cap_fraction must be in (0, 1] (got {})", self.torque_cap_fraction));
        }
        if self.legs_per_side < 1 {
            return Err("legs_per_side must be at least 1".into());
        }
        Ok(())
    }

    /// Per-shaft torque limit.
    pub fn torque_cap(&self) -> f64 {
        self.torque_cap_fraction * self.tau_shaft_peak
    }

    pub fn clamp_torque(&self, tau: f64) -> f64 {
        let cap = self.torque_cap();
        tau.clamp(-cap, cap)
    }

    /// Lumped point mass of one half-body carrying the given spine.
    pub fn half_mass(&self, spine_mass: f64) -> f64 {
        self.m_half
            + self.m_batt
            + self.legs_per_side as f64 * (self.m_ulimb + self.m_llimb)
            + 0.5 * spine_mass
    }
}

/// Penalty ground contact with regularized Coulomb friction, per physical foot.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ContactModel {
    pub k_n: f64,
    pub c_n: f64,
    pub mu: f64,
    pub v_slip_eps: f64,
}

impl Default for ContactModel {
    fn default() -> Self {
        Self { k_n: 2e4, c_n: 200.0, mu: 0.6, v_slip_eps: 1e-3 }
    }
}

impl ContactModel {
    pub fn validate(&self) -> Result<(), String> {
        if !(self.k_n > 0.0 && self.c_n > 0.0 && self.mu >= 0.0 && self.v_slip_eps > 0.0) {
            return Err(format!("invalid contact model {self:?}"));
        }
        Ok(())
    }
}

/// Which spine module joins the two half-bodies.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum SpineModule {
    Rigid,
    /// Spring-loaded module; `damping` is the viscous stand-in for slider friction.
    Compliant { config: SpineConfig, damping: f64 },
}

impl SpineModule {
    pub fn compliant(config: SpineConfig) -> Self {
        SpineModule::Compliant { config, damping: 5.0 }
    }

    pub fn mass(&self, p: &RobotParams) -> f64 {
        match self {
            SpineModule::Rigid => p.m_rspine,
            SpineModule::Compliant { .. } => p.m_cspine,
        }
    }

    pub fn delta_h(&self) -> f64 {
        match self {
            SpineModule::Rigid => crate::spine::ScissorGeometry::PROTOTYPE.delta_h,
            SpineModule::Compliant { config, .. } => config.geometry.delta_h,
        }
    }

    /// Spine extension coordinate that reproduces the rigid spine's length.
    pub fn rigid_extension(&self, p: &RobotParams) -> f64 {
        p.l_rspine - self.delta_h()
    }

    /// Distance between the two half-body centers at extension `s`.
    pub fn separation(&self, p: &RobotParams, s: f64) -> f64 {
        p.half_body_length + self.delta_h() + s
    }
}

/// How the spine coordinate behaves during a step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpineJoint {
    Rigid,
    Locked,
    Compliant,
}

impl SpineJoint {
    pub fn frozen(self) -> bool {
        !matches!(self, SpineJoint::Compliant)
    }
}
