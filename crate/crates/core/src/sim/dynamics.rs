//! Planar dynamics of two point-mass half-bodies joined by a prismatic spine.
//!
//! Generalized coordinates: rear-body position `(x, z)`, shared pitch `phi`,
//! spine extension `s`, then hip/knee angles of the front and rear legs. The
//! front body sits at `(x, z) + (L0 + s) * (cos phi, sin phi)`. Legs are
//! massless links; each joint carries only its reflected actuator inertia.

use nalgebra::{SMatrix, SVector, Vector2};
use serde::{Deserialize, Serialize};

use super::contact::{normal_force, penetration_energy};
use super::leg::leg_kinematics;
use super::{ContactModel, RobotParams, SimFault, SpineJoint, SpineModule, GRAVITY};

pub const X: usize = 0;
pub const Z: usize = 1;
pub const PHI: usize = 2;
pub const S: usize = 3;
pub const TH_HF: usize = 4;
pub const TK_HF: usize = 5;
pub const TH_HR: usize = 6;
pub const TK_HR: usize = 7;
pub const NDOF: usize = 8;

pub type GenVec = SVector<f64, NDOF>;
type GenMat = SMatrix<f64, NDOF, NDOF>;
type FootJac = SMatrix<f64, 2, NDOF>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RobotState {
    pub q: [f64; NDOF],
    pub qd: [f64; NDOF],
    pub t: f64,
}

impl RobotState {
    pub fn q(&self) -> GenVec {
        GenVec::from_column_slice(&self.q)
    }

    pub fn qd(&self) -> GenVec {
        GenVec::from_column_slice(&self.qd)
    }

    pub fn is_finite(&self) -> bool {
        self.q.iter().chain(self.qd.iter()).all(|v| v.is_finite()) && self.t.is_finite()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Leg {
    Front,
    Rear,
}

impl Leg {
    pub const BOTH: [Leg; 2] = [Leg::Front, Leg::Rear];

    /// Index of (hip, knee) in the generalized coordinates.
    pub fn joints(self) -> (usize, usize) {
        match self {
            Leg::Front => (TH_HF, TK_HF),
            Leg::Rear => (TH_HR, TK_HR),
        }
    }

    pub fn index(self) -> usize {
        match self {
            Leg::Front => 0,
            Leg::Rear => 1,
        }
    }
}

/// Shaft torques in the order front hip, front knee, rear hip, rear knee.
pub type JointTorques = [f64; 4];

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct FootInfo {
    pub pos: [f64; 2],
    pub vel: [f64; 2],
    /// Ground force on the lumped sagittal foot: `[tangential, normal]`.
    pub force: [f64; 2],
}

impl FootInfo {
    pub fn in_contact(&self) -> bool {
        self.force[1] > 0.0
    }
}

/// Forces acting during one step (evaluated at the start of the step).
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StepInfo {
    pub feet: [FootInfo; 2],
    /// Axial spring/damper force of a free compliant spine; 0 when frozen.
    pub spine_force: f64,
    /// Clamped shaft torques actually applied.
    pub torques: JointTorques,
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct EnergyBreakdown {
    pub kinetic: f64,
    pub gravity: f64,
    pub spine: f64,
    pub contact: f64,
    pub total: f64,
}

/// Axial spine force: spring law minus viscous damping for a free compliant
/// spine; frozen spines report the placeholder 0 (their reaction is implicit).
pub fn spine_joint_force(
    s: f64,
    sdot: f64,
    joint: SpineJoint,
    module: &SpineModule,
) -> Result<f64, crate::spine::ModelError> {
    match (joint, module) {
        (SpineJoint::Compliant, SpineModule::Compliant { config, damping }) => {
            Ok(config.spine_force(s)? - damping * sdot)
        }
        _ => Ok(0.0),
    }
}

/// Robot model bound to its parameters.
#[derive(Debug, Clone)]
pub struct Robot {
    pub params: RobotParams,
    pub module: SpineModule,
    pub contact: ContactModel,
    m_rear: f64,
    m_front: f64,
}

impl Robot {
    pub fn new(params: RobotParams, module: SpineModule, contact: ContactModel) -> Result<Self, SimFault> {
        params.validate().map_err(SimFault::Config)?;
        contact.validate().map_err(SimFault::Config)?;
        if let SpineModule::Compliant { config, damping } = &module {
            config.validate().map_err(|e| SimFault::Config(e.to_string()))?;
            if !(*damping >= 0.0) {
                return Err(SimFault::Config("spine damping must be non-negative".into()));
            }
        }
        let m = params.half_mass(module.mass(&params));
        Ok(Self { params, module, contact, m_rear: m, m_front: m })
    }

    pub fn total_mass(&self) -> f64 {
        self.m_rear + self.m_front
    }

    fn joint_inertia(&self) -> f64 {
        self.params.legs_per_side as f64 * self.params.joint_inertia
    }

    fn legs(&self) -> f64 {
        self.params.legs_per_side as f64
    }

    pub fn separation(&self, s: f64) -> f64 {
        self.module.separation(&self.params, s)
    }

    /// Allowed extension window of a compliant spine.
    pub fn spine_bounds(&self) -> Option<(f64, f64)> {
        match &self.module {
            SpineModule::Compliant { config, .. } => Some((config.geometry.h_min, config.geometry.h_max)),
            SpineModule::Rigid => None,
        }
    }

    pub fn rear_position(&self, q: &GenVec) -> Vector2<f64> {
        Vector2::new(q[X], q[Z])
    }

    pub fn front_position(&self, q: &GenVec) -> Vector2<f64> {
        let l = self.separation(q[S]);
        Vector2::new(q[X] + l * q[PHI].cos(), q[Z] + l * q[PHI].sin())
    }

    pub fn front_velocity(&self, q: &GenVec, qd: &GenVec) -> Vector2<f64> {
        let (sp, cp) = q[PHI].sin_cos();
        let l = self.separation(q[S]);
        Vector2::new(
            qd[X] + qd[S] * cp - l * sp * qd[PHI],
            qd[Z] + qd[S] * sp + l * cp * qd[PHI],
        )
    }

    /// Center of mass position and velocity.
    pub fn com(&self, q: &GenVec, qd: &GenVec) -> (Vector2<f64>, Vector2<f64>) {
        let m = self.total_mass();
        let p = (self.rear_position(q) * self.m_rear + self.front_position(q) * self.m_front) / m;
        let v = (Vector2::new(qd[X], qd[Z]) * self.m_rear + self.front_velocity(q, qd) * self.m_front) / m;
        (p, v)
    }

    /// World foot position and its Jacobian with respect to all coordinates.
    pub fn foot(&self, q: &GenVec, leg: Leg) -> (Vector2<f64>, FootJac) {
        let (hip_i, knee_i) = leg.joints();
        let (rel, jleg) = leg_kinematics(q[hip_i], q[knee_i], &self.params);
        let (sp, cp) = q[PHI].sin_cos();
        let rot = nalgebra::Matrix2::new(cp, -sp, sp, cp);
        let rel_w = rot * rel;
        let jleg_w = rot * jleg;

        let mut jac = FootJac::zeros();
        jac[(0, X)] = 1.0;
        jac[(1, Z)] = 1.0;
        jac[(0, PHI)] = -rel_w.y;
        jac[(1, PHI)] = rel_w.x;
        let hip = match leg {
            Leg::Rear => self.rear_position(q),
            Leg::Front => {
                let l = self.separation(q[S]);
                jac[(0, PHI)] += -l * sp;
                jac[(1, PHI)] += l * cp;
                jac[(0, S)] = cp;
                jac[(1, S)] = sp;
                self.front_position(q)
            }
        };
        for r in 0..2 {
            jac[(r, hip_i)] = jleg_w[(r, 0)];
            jac[(r, knee_i)] = jleg_w[(r, 1)];
        }
        (hip + rel_w, jac)
    }

    pub fn mass_matrix(&self, q: &GenVec) -> GenMat {
        let (sp, cp) = q[PHI].sin_cos();
        let l = self.separation(q[S]);
        let mf = self.m_front;
        let m = self.total_mass();
        let j = 2.0 * self.params.j_half;
        let mut mm = GenMat::zeros();
        mm[(X, X)] = m;
        mm[(Z, Z)] = m;
        mm[(X, PHI)] = -mf * l * sp;
        mm[(Z, PHI)] = mf * l * cp;
        mm[(X, S)] = mf * cp;
        mm[(Z, S)] = mf * sp;
        mm[(PHI, PHI)] = j + mf * l * l;
        mm[(S, S)] = mf;
        for (a, b) in [(X, PHI), (Z, PHI), (X, S), (Z, S)] {
            mm[(b, a)] = mm[(a, b)];
        }
        let ij = self.joint_inertia();
        for k in TH_HF..NDOF {
            mm[(k, k)] = ij;
        }
        mm
    }

    /// Velocity-product terms `h` in `M qdd + h = Q`.
    pub fn bias(&self, q: &GenVec, qd: &GenVec) -> GenVec {
        let (sp, cp) = q[PHI].sin_cos();
        let l = self.separation(q[S]);
        let (w, sd) = (qd[PHI], qd[S]);
        let e = Vector2::new(cp, sp);
        let n = Vector2::new(-sp, cp);
        let c = n * (2.0 * sd * w) - e * (l * w * w);
        let mut h = GenVec::zeros();
        h[X] = self.m_front * c.x;
        h[Z] = self.m_front * c.y;
        h[PHI] = self.m_front * l * 2.0 * sd * w;
        h[S] = -self.m_front * l * w * w;
        h
    }

    pub fn gravity_force(&self, q: &GenVec) -> GenVec {
        let (sp, cp) = q[PHI].sin_cos();
        let l = self.separation(q[S]);
        let mut g = GenVec::zeros();
        g[Z] = -self.total_mass() * GRAVITY;
        g[PHI] = -self.m_front * GRAVITY * l * cp;
        g[S] = -self.m_front * GRAVITY * sp;
        g
    }

    pub fn kinetic_energy(&self, state: &RobotState) -> f64 {
        let q = state.q();
        let qd = state.qd();
        0.5 * qd.dot(&(self.mass_matrix(&q) * qd))
    }

    fn spine_reference(&self) -> Option<(&crate::spine::SpineConfig, f64)> {
        match &self.module {
            SpineModule::Compliant { config, .. } => {
                Some((config, config.force_domain_upper().min(config.geometry.h_max)))
            }
            SpineModule::Rigid => None,
        }
    }

    /// Kinetic + gravitational + spine elastic + contact penalty energy.
    pub fn mechanical_energy(&self, state: &RobotState) -> Result<EnergyBreakdown, SimFault> {
        let q = state.q();
        let kinetic = self.kinetic_energy(state);
        let gravity = GRAVITY * (self.m_rear * q[Z] + self.m_front * self.front_position(&q).y);
        let spine = match self.spine_reference() {
            Some((cfg, s_ref)) => cfg
                .stored_elastic_energy(q[S], s_ref)
                .map_err(|e| SimFault::domain(e, state))?,
            None => 0.0,
        };
        let contact = Leg::BOTH
            .iter()
            .map(|&leg| self.legs() * penetration_energy(self.foot(&q, leg).0.y, &self.contact))
            .sum();
        Ok(EnergyBreakdown { kinetic, gravity, spine, contact, total: kinetic + gravity + spine + contact })
    }

    /// Foot positions, velocities and explicit normal forces (no friction).
    pub fn feet(&self, state: &RobotState) -> [FootInfo; 2] {
        let q = state.q();
        let qd = state.qd();
        let mut out = [FootInfo::default(); 2];
        for leg in Leg::BOTH {
            let (p, jac) = self.foot(&q, leg);
            let v = jac * qd;
            let f_n = self.legs() * normal_force(p.y, v.y, &self.contact);
            out[leg.index()] = FootInfo { pos: [p.x, p.y], vel: [v.x, v.y], force: [0.0, f_n] };
        }
        out
    }

    /// Advances the state by one semi-implicit Euler step.
    ///
    /// Friction is resolved implicitly in the end-of-step foot velocities;
    /// a free compliant spine is kept inside its travel by a velocity-level
    /// stop constraint.
    pub fn step(
        &self,
        state: &RobotState,
        torques: JointTorques,
        joint: SpineJoint,
        dt: f64,
    ) -> Result<(RobotState, StepInfo), SimFault> {
        if !(dt > 0.0 && dt <= 1e-3) {
            return Err(SimFault::Config(format!("time step {dt} outside (0, 1e-3]")));
        }
        let q = state.q();
        let qd = state.qd();
        let torques = torques.map(|t| self.params.clamp_torque(t));

        let mut feet = [FootInfo::default(); 2];
        let mut jacs = [FootJac::zeros(); 2];
        let mut q_force = self.gravity_force(&q) - self.bias(&q, &qd);
        for leg in Leg::BOTH {
            let (p, jac) = self.foot(&q, leg);
            let v = jac * qd;
            let f_n = self.legs() * normal_force(p.y, v.y, &self.contact);
            q_force += jac.row(1).transpose() * f_n;
            feet[leg.index()] = FootInfo { pos: [p.x, p.y], vel: [v.x, v.y], force: [0.0, f_n] };
            jacs[leg.index()] = jac;
        }
        for (k, tau) in torques.iter().enumerate() {
            q_force[TH_HF + k] += self.legs() * tau;
        }
        let spine_force = if joint.frozen() {
            0.0
        } else {
            spine_joint_force(q[S], qd[S], joint, &self.module).map_err(|e| SimFault::domain(e, state))?
        };
        q_force[S] += spine_force;

        let mm = self.mass_matrix(&q);
        let solve = |s_accel: Option<f64>| self.solve_velocity(&mm, &q_force, &qd, &jacs, &feet, s_accel, dt);

        let (mut qd_new, mut f_t) = if joint.frozen() {
            solve(Some(-qd[S] / dt))
        } else {
            solve(None)
        };
        if !joint.frozen() {
            if let Some((lo, hi)) = self.spine_bounds() {
                let s_next = q[S] + dt * qd_new[S];
                let bound = if s_next > hi {
                    Some(hi)
                } else if s_next < lo {
                    Some(lo)
                } else {
                    None
                };
                if let Some(b) = bound {
                    let target = (b - q[S]) / dt;
                    (qd_new, f_t) = solve(Some((target - qd[S]) / dt));
                }
            }
        }

        let mut next = RobotState { q: [0.0; NDOF], qd: [0.0; NDOF], t: state.t + dt };
        let q_new = q + qd_new * dt;
        next.q.copy_from_slice(q_new.as_slice());
        next.qd.copy_from_slice(qd_new.as_slice());
        if let (false, Some((lo, hi))) = (joint.frozen(), self.spine_bounds()) {
            next.q[S] = next.q[S].clamp(lo, hi);
        }
        if joint.frozen() {
            next.q[S] = state.q[S];
            next.qd[S] = 0.0;
        }
        for i in 0..2 {
            feet[i].force[0] = f_t[i];
        }
        if !next.is_finite() {
            return Err(SimFault::NonFinite { state: Box::new(*state) });
        }
        Ok((next, StepInfo { feet, spine_force, torques }))
    }

    /// New velocities under generalized force `q_force`, optionally with a
    /// prescribed spine acceleration, plus implicit regularized friction.
    #[allow(clippy::too_many_arguments)]
    fn solve_velocity(
        &self,
        mm: &GenMat,
        q_force: &GenVec,
        qd: &GenVec,
        jacs: &[FootJac; 2],
        feet: &[FootInfo; 2],
        s_accel: Option<f64>,
        dt: f64,
    ) -> (GenVec, [f64; 2]) {
        let mut m = *mm;
        let mut rhs = *q_force;
        if let Some(a_s) = s_accel {
            // move the known column to the right-hand side, replace the s row
            for r in 0..NDOF {
                if r != S {
                    rhs[r] -= m[(r, S)] * a_s;
                }
            }
            for k in 0..NDOF {
                m[(S, k)] = 0.0;
                m[(k, S)] = 0.0;
            }
            m[(S, S)] = 1.0;
            rhs[S] = a_s;
        }
        let lu = m.lu();
        let apply_inv = |r: &GenVec| -> GenVec {
            let mut r = *r;
            if s_accel.is_some() {
                r[S] = 0.0;
            }
            lu.solve(&r).expect("mass matrix is positive definite")
        };
        let accel = lu.solve(&rhs).expect("mass matrix is positive definite");
        let v_star = qd + accel * dt;

        // tangential responses: w_cols[i] = P J_t,i^T
        let mut active = [false; 2];
        let mut cap = [0.0; 2];
        let mut w_cols = [GenVec::zeros(); 2];
        let mut vt_star = [0.0; 2];
        for i in 0..2 {
            cap[i] = self.contact.mu * feet[i].force[1];
            active[i] = cap[i] > 0.0;
            if active[i] {
                let jt = jacs[i].row(0).transpose();
                w_cols[i] = apply_inv(&jt.into_owned());
                vt_star[i] = jacs[i].row(0).dot(&v_star.transpose());
            }
        }
        let mut w = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                if active[i] && active[j] {
                    w[i][j] = jacs[i].row(0).dot(&w_cols[j].transpose());
                }
            }
        }
        let eps = self.contact.v_slip_eps;
        let mut f = [0.0; 2];
        for _ in 0..100 {
            let mut delta: f64 = 0.0;
            for i in 0..2 {
                if !active[i] {
                    continue;
                }
                let j = 1 - i;
                let a = vt_star[i] + dt * w[i][j] * f[j];
                let unclamped = cap[i] * a.abs() / (eps + cap[i] * dt * w[i][i]);
                let fi = -a.signum() * unclamped.min(cap[i]);
                let fi = if a == 0.0 { 0.0 } else { fi };
                delta = delta.max((fi - f[i]).abs());
                f[i] = fi;
            }
            if delta <= 1e-12 * (1.0 + cap[0] + cap[1]) {
                break;
            }
        }
        let mut v_new = v_star;
        for i in 0..2 {
            if active[i] {
                v_new += w_cols[i] * (dt * f[i]);
            }
        }
        if let Some(a_s) = s_accel {
            v_new[S] = qd[S] + a_s * dt;
        }
        (v_new, f)
    }
}

/// Convenience wrapper: one step of [`Robot::step`].
pub fn dynamics_step(
    robot: &Robot,
    state: &RobotState,
    torques: JointTorques,
    joint: SpineJoint,
    dt: f64,
) -> Result<RobotState, SimFault> {
    robot.step(state, torques, joint, dt).map(|(s, _)| s)
}
