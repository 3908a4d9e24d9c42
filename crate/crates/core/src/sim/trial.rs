use std::io::Write;

use nalgebra::Vector2;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::controller::{jump_controller_step, JumpFsm, JumpGains, JumpPhase, Postures};
use super::dynamics::{Leg, Robot, RobotState, NDOF, PHI, S, X, Z};
use super::leg::leg_inverse_kinematics;
use super::{ContactModel, RobotParams, SimFault, SpineJoint, SpineModule, GRAVITY};
use crate::lock::{ControllerParams, LockCommand, LockState, SpineController};
use crate::spine::SpineConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpineMode {
    Rigid,
    Locked,
    Compliant,
}

impl SpineMode {
    pub fn label(self) -> &'static str {
        match self {
            SpineMode::Rigid => "rigid",
            SpineMode::Locked => "locked",
            SpineMode::Compliant => "compliant",
        }
    }
}

impl std::str::FromStr for SpineMode {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "rigid" => Ok(SpineMode::Rigid),
            "locked" => Ok(SpineMode::Locked),
            "compliant" => Ok(SpineMode::Compliant),
            other => Err(format!("unknown spine mode '{other}' (rigid|locked|compliant)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Scenario {
    Nominal,
    TiltedLanding,
}

impl Scenario {
    pub fn label(self) -> &'static str {
        match self {
            Scenario::Nominal => "nominal",
            Scenario::TiltedLanding => "tilted_landing",
        }
    }
}

impl std::str::FromStr for Scenario {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "nominal" => Ok(Scenario::Nominal),
            "tilted_landing" | "tilted" => Ok(Scenario::TiltedLanding),
            other => Err(format!("unknown scenario '{other}' (nominal|tilted_landing)")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct TrialConfig {
    pub params: RobotParams,
    pub contact: ContactModel,
    pub spine: SpineConfig,
    pub spine_damping: f64,
    pub mode: SpineMode,
    pub scenario: Scenario,
    pub seed: u64,
    pub dt: f64,
    /// Nose-down pitch perturbation injected at the apex of tilted landings.
    pub tilt: f64,
    /// Relative per-seed spread of the tilt and crouch timing.
    pub jitter: f64,
    pub gains: JumpGains,
    pub postures: Postures,
    /// Keep every n-th step in the time-series log.
    pub log_every: usize,
    /// Time added after the controller reaches Done.
    pub tail_time: f64,
}

impl Default for TrialConfig {
    fn default() -> Self {
        Self {
            params: RobotParams::default(),
            contact: ContactModel::default(),
            spine: SpineConfig::strong(),
            spine_damping: 5.0,
            mode: SpineMode::Compliant,
            scenario: Scenario::Nominal,
            seed: 0,
            dt: 1e-4,
            tilt: 0.1,
            jitter: 0.2,
            gains: JumpGains::default(),
            postures: Postures::default(),
            log_every: 1,
            tail_time: 0.0,
        }
    }
}

impl TrialConfig {
    pub fn module(&self) -> SpineModule {
        match self.mode {
            SpineMode::Rigid => SpineModule::Rigid,
            SpineMode::Locked | SpineMode::Compliant => {
                SpineModule::Compliant { config: self.spine.clone(), damping: self.spine_damping }
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct JumpMetrics {
    pub max_height: f64,
    pub max_vz: f64,
    pub peak_landing_decel: f64,
    pub min_spine_length: f64,
    pub touchdown_spine_length: f64,
    pub front_foot_slip: f64,
    pub success: bool,
    pub liftoff_time: Option<f64>,
    pub touchdown_time: Option<f64>,
    /// Largest `|f_t| / (mu f_n)` seen at any loaded foot.
    pub max_friction_ratio: f64,
    pub steps: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TrialLogRow {
    pub t: f64,
    pub q: [f64; NDOF],
    pub qd: [f64; NDOF],
    pub front_ft: f64,
    pub front_fn: f64,
    pub rear_ft: f64,
    pub rear_fn: f64,
    pub spine_force: f64,
    pub phase: JumpPhase,
    pub lock_state: u8,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct TrialLog {
    pub rows: Vec<TrialLogRow>,
}

impl TrialLog {
    pub const HEADER: [&'static str; 24] = [
        "t", "x", "z", "phi", "s", "th_hf", "tk_hf", "th_hr", "tk_hr", "xd", "zd", "phid", "sd", "th_hf_d",
        "tk_hf_d", "th_hr_d", "tk_hr_d", "front_ft", "front_fn", "rear_ft", "rear_fn", "spine_force", "phase",
        "lock_state",
    ];

    /// One CSV row per logged step.
    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut wr = csv::Writer::from_writer(w);
        wr.write_record(Self::HEADER)?;
        for r in &self.rows {
            let mut rec: Vec<String> = Vec::with_capacity(24);
            rec.push(r.t.to_string());
            rec.extend(r.q.iter().chain(r.qd.iter()).map(|v| v.to_string()));
            for v in [r.front_ft, r.front_fn, r.rear_ft, r.rear_fn, r.spine_force] {
                rec.push(v.to_string());
            }
            rec.push(r.phase.label().to_string());
            rec.push(r.lock_state.to_string());
            wr.write_record(&rec)?;
        }
        wr.flush()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialOutcome {
    pub metrics: JumpMetrics,
    pub log: TrialLog,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrialFailure {
    pub fault: SimFault,
    pub log: TrialLog,
}

impl std::fmt::Display for TrialFailure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{} (after {} logged steps)", self.fault, self.log.rows.len())
    }
}

impl std::error::Error for TrialFailure {}

/// Per-seed perturbations shared by paired rigid/compliant runs.
struct Perturbation {
    tilt: f64,
    crouch_time: f64,
    hip_offsets: [f64; 2],
}

impl Perturbation {
    fn draw(cfg: &TrialConfig) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let j = cfg.jitter;
        let tilt = cfg.tilt * (1.0 + j * rng.gen_range(-1.0..=1.0));
        let crouch_time = cfg.gains.crouch_time * (1.0 + 0.25 * j * rng.gen_range(-1.0..=1.0));
        let hip_offsets = [0.05 * j * rng.gen_range(-1.0..=1.0), 0.05 * j * rng.gen_range(-1.0..=1.0)];
        Self { tilt, crouch_time, hip_offsets }
    }
}

/// Standing state with both feet at the stand posture, just touching the ground.
pub(crate) fn standing_state(robot: &Robot, s: f64, postures: &Postures, hip_offsets: [f64; 2]) -> RobotState {
    let mut q = [0.0; NDOF];
    q[S] = s;
    for leg in Leg::BOTH {
        let p = postures.stand;
        let (hi, ki) = leg.joints();
        let (th, tk) = leg_inverse_kinematics(Vector2::new(p[0], p[1]), &robot.params);
        q[hi] = th + hip_offsets[leg.index()];
        q[ki] = tk;
    }
    let mut state = RobotState { q, qd: [0.0; NDOF], t: 0.0 };
    let lowest = Leg::BOTH
        .iter()
        .map(|&leg| robot.foot(&state.q(), leg).0.y)
        .fold(f64::INFINITY, f64::min);
    // static sink of each lumped foot under its share of the weight
    let sink = 0.5 * robot.total_mass() * GRAVITY / (robot.params.legs_per_side as f64 * robot.contact.k_n);
    state.q[Z] = -lowest - sink;
    state
}

/// Rotates the body about its center of mass by `dphi`.
fn tilt_about_com(robot: &Robot, state: &mut RobotState, dphi: f64) {
    let (com, _) = robot.com(&state.q(), &state.qd());
    let phi = state.q[PHI] + dphi;
    let l = robot.separation(state.q[S]);
    let frac = 0.5; // equal half-body masses
    state.q[PHI] = phi;
    state.q[X] = com.x - frac * l * phi.cos();
    state.q[Z] = com.y - frac * l * phi.sin();
}

/// Runs one crouch-thrust-flight-land episode.
pub fn run_jump_trial(cfg: &TrialConfig) -> Result<TrialOutcome, TrialFailure> {
    let mut log = TrialLog::default();
    let fail = |fault: SimFault, log: TrialLog| TrialFailure { fault, log };

    let robot = match Robot::new(cfg.params.clone(), cfg.module(), cfg.contact) {
        Ok(r) => r,
        Err(e) => return Err(fail(e, log)),
    };
    let pert = Perturbation::draw(cfg);
    let mut gains = cfg.gains;
    gains.crouch_time = pert.crouch_time;

    let s0 = match cfg.mode {
        SpineMode::Rigid => robot.module.rigid_extension(&robot.params),
        _ => cfg.spine.geometry.h_max,
    };
    let mut state = standing_state(&robot, s0, &cfg.postures, pert.hip_offsets);

    let mut lock = match cfg.mode {
        SpineMode::Rigid => None,
        mode => {
            let params = ControllerParams {
                holes: crate::lock::hole_layout(cfg.spine.geometry.h_min, cfg.spine.geometry.h_max, 0.02)
                    .map_err(|e| fail(e.into(), TrialLog::default()))?,
                ..ControllerParams::default()
            };
            let initial = if mode == SpineMode::Locked {
                LockState::Locked { h_lock: s0 }
            } else {
                LockState::Unlocked
            };
            Some(SpineController::new(params, initial, s0).map_err(|e| fail(e.into(), TrialLog::default()))?)
        }
    };
    let lock_every = ((0.01 / cfg.dt).round() as u64).max(1);
    let joint_of = |lock: &Option<SpineController>| match lock {
        None => SpineJoint::Rigid,
        Some(c) if c.state().pin_engaged() => SpineJoint::Locked,
        Some(_) => SpineJoint::Compliant,
    };

    let mut fsm = JumpFsm::new(0.0);
    let stance_height = robot.com(&state.q(), &state.qd()).0.y;
    let mut metrics = JumpMetrics {
        max_height: 0.0,
        max_vz: 0.0,
        peak_landing_decel: 0.0,
        min_spine_length: f64::INFINITY,
        touchdown_spine_length: f64::NAN,
        front_foot_slip: 0.0,
        success: false,
        liftoff_time: None,
        touchdown_time: None,
        max_friction_ratio: 0.0,
        steps: 0,
    };
    let mut apex_done = false;
    let mut prev_front_x: Option<f64> = None;
    let mut done_at: Option<f64> = None;
    let mut pending_cmd: Option<LockCommand> = None;
    let max_steps = (10.0 / cfg.dt) as u64;

    for step in 0..max_steps {
        let joint = joint_of(&lock);
        let (tau, cmd, next_fsm) = jump_controller_step(&fsm, &state, &robot, joint, &cfg.postures, &gains);
        if next_fsm.phase != fsm.phase {
            match next_fsm.phase {
                JumpPhase::Flight => metrics.liftoff_time = Some(state.t),
                JumpPhase::Land => {
                    metrics.touchdown_time = Some(state.t);
                    metrics.touchdown_spine_length = state.q[S];
                }
                JumpPhase::Done => done_at = Some(state.t),
                _ => {}
            }
        }
        fsm = next_fsm;
        pending_cmd = Some(cmd).or(pending_cmd);

        if let Some(ctrl) = lock.as_mut() {
            if step % lock_every == 0 {
                ctrl.tick_with_length(state.q[S], pending_cmd.take())
                    .map_err(|e| fail(e.into(), log.clone()))?;
            }
        }
        let joint = joint_of(&lock);

        let (next, info) = match robot.step(&state, tau, joint, cfg.dt) {
            Ok(x) => x,
            Err(e) => return Err(fail(e, log)),
        };

        // bookkeeping on the forces that acted during this step
        for foot in &info.feet {
            if foot.force[1] > 0.0 {
                let ratio = foot.force[0].abs() / (cfg.contact.mu * foot.force[1]);
                metrics.max_friction_ratio = metrics.max_friction_ratio.max(ratio);
            }
        }
        if fsm.phase == JumpPhase::Land {
            let fz: f64 = info.feet.iter().map(|f| f.force[1]).sum();
            let decel = fz / robot.total_mass() - GRAVITY;
            metrics.peak_landing_decel = metrics.peak_landing_decel.max(decel);
            metrics.min_spine_length = metrics.min_spine_length.min(state.q[S]);
            let front = info.feet[Leg::Front.index()];
            if front.in_contact() {
                if let Some(px) = prev_front_x {
                    metrics.front_foot_slip += (front.pos[0] - px).abs();
                }
                prev_front_x = Some(front.pos[0]);
            } else {
                prev_front_x = None;
            }
        }
        if (step as usize).is_multiple_of(cfg.log_every.max(1)) {
            let lock_code = lock.as_ref().map_or(LockState::Locked { h_lock: s0 }.code(), |c| c.state().code());
            log.rows.push(TrialLogRow {
                t: state.t,
                q: state.q,
                qd: state.qd,
                front_ft: info.feet[0].force[0],
                front_fn: info.feet[0].force[1],
                rear_ft: info.feet[1].force[0],
                rear_fn: info.feet[1].force[1],
                spine_force: info.spine_force,
                phase: fsm.phase,
                lock_state: lock_code,
            });
        }

        state = next;
        metrics.steps += 1;

        let (com, vcom) = robot.com(&state.q(), &state.qd());
        if matches!(fsm.phase, JumpPhase::Thrust | JumpPhase::Flight) {
            metrics.max_height = metrics.max_height.max(com.y - stance_height);
            metrics.max_vz = metrics.max_vz.max(vcom.y);
        }
        if fsm.phase == JumpPhase::Flight && !apex_done && vcom.y <= 0.0 {
            apex_done = true;
            if cfg.scenario == Scenario::TiltedLanding {
                tilt_about_com(&robot, &mut state, -pert.tilt);
            }
        }
        if let Some(t_done) = done_at {
            if state.t >= t_done + cfg.tail_time {
                break;
            }
        }
    }

    metrics.success = !fsm.timed_out && metrics.liftoff_time.is_some() && metrics.touchdown_time.is_some();
    if !metrics.min_spine_length.is_finite() {
        metrics.min_spine_length = state.q[S];
    }
    Ok(TrialOutcome { metrics, log })
}
