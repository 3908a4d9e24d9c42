use nalgebra::{Matrix2, Vector2};
use serde::{Deserialize, Serialize};

use super::dynamics::{JointTorques, Leg, Robot, RobotState, PHI};
use super::leg::{leg_inverse_kinematics, leg_kinematics};
use super::SpineJoint;
use crate::lock::LockCommand;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JumpPhase {
    Crouch,
    Thrust,
    Flight,
    Land,
    Done,
}

impl JumpPhase {
    pub fn label(self) -> &'static str {
        match self {
            JumpPhase::Crouch => "crouch",
            JumpPhase::Thrust => "thrust",
            JumpPhase::Flight => "flight",
            JumpPhase::Land => "land",
            JumpPhase::Done => "done",
        }
    }
}

/// Foot targets relative to the hip, body frame.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct Postures {
    pub stand: [f64; 2],
    pub crouch: [f64; 2],
    /// Front foot at touchdown; the rear foot mirrors it.
    pub land_front: [f64; 2],
    /// Leg length at which thrust stops pushing.
    pub thrust_reach: f64,
}

impl Default for Postures {
    fn default() -> Self {
        Self {
            stand: [0.0, -0.24],
            crouch: [0.0, -0.16],
            land_front: [0.09, -0.24],
            thrust_reach: 0.285,
        }
    }
}

impl Postures {
    fn target(&self, phase: JumpPhase, leg: Leg) -> Vector2<f64> {
        let p = match phase {
            JumpPhase::Crouch | JumpPhase::Thrust => self.crouch,
            JumpPhase::Flight | JumpPhase::Land => self.land_front,
            JumpPhase::Done => self.stand,
        };
        match leg {
            Leg::Front => Vector2::new(p[0], p[1]),
            Leg::Rear => Vector2::new(-p[0], p[1]),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct JumpGains {
    pub kp: f64,
    pub kd: f64,
    pub kp_land: f64,
    pub kd_land: f64,
    pub crouch_time: f64,
    pub thrust_timeout: f64,
    pub flight_timeout: f64,
    /// Minimum time in Land before checking for rest.
    pub settle_time: f64,
    pub land_timeout: f64,
    pub settle_speed: f64,
    /// Consecutive contact-free steps that count as liftoff.
    pub liftoff_steps: u32,
    /// Fraction of the crouch spent ramping from stand to crouch.
    pub crouch_ramp: f64,
    /// Thrust balancing on pitch angle and pitch rate.
    pub pitch_gain: f64,
    pub pitch_rate_gain: f64,
}

impl Default for JumpGains {
    fn default() -> Self {
        Self {
            kp: 40.0,
            kd: 0.8,
            kp_land: 40.0,
            kd_land: 2.0,
            crouch_time: 0.4,
            thrust_timeout: 0.5,
            flight_timeout: 1.5,
            settle_time: 0.4,
            land_timeout: 1.5,
            settle_speed: 0.05,
            liftoff_steps: 3,
            crouch_ramp: 0.6,
            pitch_gain: 6.0,
            pitch_rate_gain: 0.3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpFsm {
    pub phase: JumpPhase,
    pub phase_entry_time: f64,
    /// Consecutive steps with both feet unloaded.
    pub unloaded_steps: u32,
    /// Set when a phase timed out; the trial counts as unsuccessful.
    pub timed_out: bool,
}

impl JumpFsm {
    pub fn new(t: f64) -> Self {
        Self { phase: JumpPhase::Crouch, phase_entry_time: t, unloaded_steps: 0, timed_out: false }
    }

    fn enter(self, phase: JumpPhase, t: f64) -> Self {
        Self { phase, phase_entry_time: t, unloaded_steps: 0, ..self }
    }
}

fn pd_leg(robot: &Robot, state: &RobotState, leg: Leg, target: Vector2<f64>, kp: f64, kd: f64) -> [f64; 2] {
    let (hi, ki) = leg.joints();
    let (th, tk) = leg_inverse_kinematics(target, &robot.params);
    [
        kp * (th - state.q[hi]) - kd * state.qd[hi],
        kp * (tk - state.q[ki]) - kd * state.qd[ki],
    ]
}

/// Joint torques pushing the foot straight down in the world frame, scaled
/// so the larger one sits at the torque cap.
fn thrust_leg(robot: &Robot, state: &RobotState, leg: Leg, reach: f64, gains: &JumpGains, share: f64) -> [f64; 2] {
    let (hi, ki) = leg.joints();
    let (foot, jac) = leg_kinematics(state.q[hi], state.q[ki], &robot.params);
    if foot.norm() >= reach {
        let hold = Vector2::new(0.0, -reach);
        return pd_leg(robot, state, leg, hold, gains.kp, gains.kd);
    }
    let phi = state.q[PHI];
    let (sp, cp) = phi.sin_cos();
    // world (0, -1) expressed in the body frame
    let push = Matrix2::new(cp, sp, -sp, cp) * Vector2::new(0.0, -1.0);
    let tau = jac.transpose() * push;
    let peak = tau.abs().max();
    if peak <= 1e-12 {
        return [0.0, 0.0];
    }
    let scale = share * robot.params.torque_cap() / peak;
    [tau.x * scale, tau.y * scale]
}

/// One control update: phase logic, shaft torques (already clamped) and the
/// lock command for the spine node.
pub fn jump_controller_step(
    fsm: &JumpFsm,
    state: &RobotState,
    robot: &Robot,
    joint: SpineJoint,
    postures: &Postures,
    gains: &JumpGains,
) -> (JointTorques, LockCommand, JumpFsm) {
    let t = state.t;
    let feet = robot.feet(state);
    let any_contact = feet.iter().any(|f| f.in_contact());
    let in_phase = t - fsm.phase_entry_time;
    let mut next = *fsm;

    match fsm.phase {
        JumpPhase::Crouch if in_phase >= gains.crouch_time => next = next.enter(JumpPhase::Thrust, t),
        JumpPhase::Thrust => {
            next.unloaded_steps = if any_contact { 0 } else { fsm.unloaded_steps + 1 };
            if next.unloaded_steps >= gains.liftoff_steps {
                next = next.enter(JumpPhase::Flight, t);
            } else if in_phase > gains.thrust_timeout {
                next = next.enter(JumpPhase::Done, t);
                next.timed_out = true;
            }
        }
        JumpPhase::Flight => {
            if any_contact {
                next = next.enter(JumpPhase::Land, t);
            } else if in_phase > gains.flight_timeout {
                next = next.enter(JumpPhase::Done, t);
                next.timed_out = true;
            }
        }
        JumpPhase::Land => {
            let (_, v) = robot.com(&state.q(), &state.qd());
            let settled = in_phase >= gains.settle_time && v.norm() < gains.settle_speed;
            if settled || in_phase > gains.land_timeout {
                next = next.enter(JumpPhase::Done, t);
            }
        }
        _ => {}
    }

    // nose-up pitch shifts push from the front leg to the rear one
    let pitch = gains.pitch_gain * (state.q[PHI] + gains.pitch_rate_gain * state.qd[PHI]);
    let shares = [(1.0 - pitch).clamp(0.0, 1.0), (1.0 + pitch).clamp(0.0, 1.0)];
    let mut tau = [0.0; 4];
    for leg in Leg::BOTH {
        let mut target = postures.target(next.phase, leg);
        if next.phase == JumpPhase::Crouch {
            let ramp = gains.crouch_time * gains.crouch_ramp;
            let u = if ramp > 0.0 { ((t - next.phase_entry_time) / ramp).clamp(0.0, 1.0) } else { 1.0 };
            let w = u * u * u * (10.0 - 15.0 * u + 6.0 * u * u);
            target = postures.target(JumpPhase::Done, leg) * (1.0 - w) + target * w;
        }
        let pair = match next.phase {
            JumpPhase::Crouch | JumpPhase::Flight => pd_leg(robot, state, leg, target, gains.kp, gains.kd),
            JumpPhase::Thrust => {
                thrust_leg(robot, state, leg, postures.thrust_reach, gains, shares[leg.index()])
            }
            JumpPhase::Land => pd_leg(robot, state, leg, target, gains.kp_land, gains.kd_land),
            JumpPhase::Done => [0.0, 0.0],
        };
        let base = 2 * leg.index();
        tau[base] = robot.params.clamp_torque(pair[0]);
        tau[base + 1] = robot.params.clamp_torque(pair[1]);
    }

    let cmd = match joint {
        SpineJoint::Compliant => LockCommand::StayUnlocked,
        SpineJoint::Locked | SpineJoint::Rigid => LockCommand::StayLocked,
    };
    (tau, cmd, next)
}
