//! Fixed-step episode simulation: robot, controller, tactile sensor and
//! articulated object, producing step-by-step episode logs.

use crate::contact::{deviation_stats, ContactError, ContactState, SensorConfig, TactileSensor};
use crate::control::{
    BaseVelocity, Command, ControlConfig, ControlError, ControlMode, Controller, JointLimits, Kinematics,
};
use crate::estimation::EstimationError;
use crate::geom::{exp_twist, Pose, Rotation, Twist, Vec3};
use crate::objects::{project_to_path, success_check, ArticulationModel, Category, ContactEnergy, ObjectError, PathState};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::fmt;

/// Central-difference step for the numerical Jacobian, rad.
pub const JACOBIAN_STEP: f64 = 1e-6;
/// Allowed mismatch between the serial chain's start pose and the handle.
pub const GRASP_TOL: f64 = 1e-6;

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error(transparent)]
    Contact(#[from] ContactError),
    #[error(transparent)]
    Control(#[from] ControlError),
    #[error(transparent)]
    Object(#[from] ObjectError),
}

/// Revolute chain: each joint applies its fixed transform, then Rz(q).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SerialChain {
    pub base: Pose,
    pub joints: Vec<Pose>,
    pub tool: Pose,
    pub limits: JointLimits,
    pub q0: Vec<f64>,
}

impl SerialChain {
    /// Seven-joint arm with modified-DH geometry of a common collaborative
    /// arm, a 0.2 m tool, and a bent-elbow home configuration.
    pub fn seven_dof() -> Self {
        use std::f64::consts::FRAC_PI_2 as H;
        let dh: [(f64, f64, f64); 7] = [
            (0.0, 0.0, 0.333),
            (-H, 0.0, 0.0),
            (H, 0.0, 0.316),
            (H, 0.0825, 0.0),
            (-H, -0.0825, 0.384),
            (H, 0.0, 0.0),
            (H, 0.088, 0.0),
        ];
        let joints = dh
            .iter()
            .map(|&(alpha, a, d)| Pose::from_rotation(Rotation::rx(alpha)).compose(&Pose::translation_xyz(a, 0.0, d)))
            .collect();
        Self {
            base: Pose::identity(),
            joints,
            // Pad normal (gripper x) along the flange z axis.
            tool: Pose::new(Rotation::ry(-std::f64::consts::FRAC_PI_2), Vec3::new(0.0, 0.0, 0.307)),
            limits: JointLimits {
                max_abs_velocity: vec![2.175, 2.175, 2.175, 2.175, 2.61, 2.61, 2.61],
            },
            q0: vec![0.0, -0.3, 0.0, -2.2, 0.0, 2.0, 0.8],
        }
    }

    pub fn dof(&self) -> usize {
        self.joints.len()
    }

    pub fn forward(&self, q: &[f64]) -> Pose {
        let mut t = self.base;
        for (j, &qi) in self.joints.iter().zip(q) {
            t = t.compose(j).compose(&Pose::from_rotation(Rotation::rz(qi)));
        }
        t.compose(&self.tool)
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if self.dof() < 6 {
            return Err(SimError::Config(format!("serial chain needs ≥ 6 joints, has {}", self.dof())));
        }
        if self.q0.len() != self.dof() || self.limits.len() != self.dof() {
            return Err(SimError::Config("q0 and limits must match the joint count".into()));
        }
        self.limits.validate()?;
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum RobotModel {
    FreeFlying {
        #[serde(default = "free_flying_limits")]
        limits: JointLimits,
    },
    SerialChain(SerialChain),
}

fn free_flying_limits() -> JointLimits {
    JointLimits::free_flying(0.2, 2.0)
}

impl Default for RobotModel {
    fn default() -> Self {
        RobotModel::FreeFlying {
            limits: free_flying_limits(),
        }
    }
}

impl RobotModel {
    pub fn limits(&self) -> &JointLimits {
        match self {
            RobotModel::FreeFlying { limits } => limits,
            RobotModel::SerialChain(c) => &c.limits,
        }
    }

    pub fn dof(&self) -> usize {
        match self {
            RobotModel::FreeFlying { .. } => 6,
            RobotModel::SerialChain(c) => c.dof(),
        }
    }

    pub fn validate(&self) -> Result<(), SimError> {
        match self {
            RobotModel::FreeFlying { limits } if limits.len() != 6 => {
                Err(SimError::Config("free-flying limits need 6 entries".into()))
            }
            RobotModel::FreeFlying { limits } => Ok(limits.validate()?),
            RobotModel::SerialChain(c) => c.validate(),
        }
    }
}

/// World-frame Jacobian `[ṗ; ω]` of the tool point by central differences.
pub fn numerical_jacobian(robot: &RobotModel, q: &[f64]) -> DMatrix<f64> {
    let chain = match robot {
        RobotModel::FreeFlying { .. } => return DMatrix::identity(6, 6),
        RobotModel::SerialChain(c) => c,
    };
    let n = chain.dof();
    let mut j = DMatrix::zeros(6, n);
    let mut qp = q.to_vec();
    for k in 0..n {
        qp[k] = q[k] + JACOBIAN_STEP;
        let tp = chain.forward(&qp);
        qp[k] = q[k] - JACOBIAN_STEP;
        let tm = chain.forward(&qp);
        qp[k] = q[k];
        let v = (tp.translation - tm.translation) / (2.0 * JACOBIAN_STEP);
        let dr = tp.rotation * tm.rotation.inverse();
        let w = dr.log_vector() / (2.0 * JACOBIAN_STEP);
        for r in 0..3 {
            j[(r, k)] = v[r];
            j[(r + 3, k)] = w[r];
        }
    }
    j
}

/// Gripper body-frame Jacobian at `q` for a gripper at `pose`.
pub fn body_jacobian(robot: &RobotModel, q: &[f64], pose: &Pose) -> DMatrix<f64> {
    match robot {
        RobotModel::FreeFlying { .. } => DMatrix::identity(6, 6),
        RobotModel::SerialChain(_) => {
            let j = numerical_jacobian(robot, q);
            let rt = pose.rotation.matrix().transpose();
            let mut b = j.clone();
            for k in 0..j.ncols() {
                let v = rt * Vec3::new(j[(0, k)], j[(1, k)], j[(2, k)]);
                let w = rt * Vec3::new(j[(3, k)], j[(4, k)], j[(5, k)]);
                for r in 0..3 {
                    b[(r, k)] = v[r];
                    b[(r + 3, k)] = w[r];
                }
            }
            b
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    /// Hz.
    pub control_rate: f64,
    pub max_steps: u64,
    pub rng_seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            control_rate: 60.0,
            max_steps: 20_000,
            rng_seed: 0,
        }
    }
}

impl SimConfig {
    pub fn dt(&self) -> f64 {
        1.0 / self.control_rate
    }

    pub fn validate(&self) -> Result<(), SimError> {
        if !(self.control_rate > 0.0 && self.control_rate.is_finite()) || self.max_steps == 0 {
            return Err(SimError::Config("control_rate and max_steps must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureKind {
    Slip,
    Timeout,
    Degenerate,
    Singularity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    Success,
    Failure(FailureKind),
}

impl Outcome {
    pub fn is_success(&self) -> bool {
        matches!(self, Outcome::Success)
    }

    pub fn parse(s: &str) -> Option<Outcome> {
        Some(match s {
            "SUCCESS" => Outcome::Success,
            "FAILURE(slip)" => Outcome::Failure(FailureKind::Slip),
            "FAILURE(timeout)" => Outcome::Failure(FailureKind::Timeout),
            "FAILURE(degenerate)" => Outcome::Failure(FailureKind::Degenerate),
            "FAILURE(singularity)" => Outcome::Failure(FailureKind::Singularity),
            _ => return None,
        })
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Outcome::Success => f.write_str("SUCCESS"),
            Outcome::Failure(k) => {
                let k = match k {
                    FailureKind::Slip => "slip",
                    FailureKind::Timeout => "timeout",
                    FailureKind::Degenerate => "degenerate",
                    FailureKind::Singularity => "singularity",
                };
                write!(f, "FAILURE({k})")
            }
        }
    }
}

impl Serialize for Outcome {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Outcome {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Outcome::parse(&s).ok_or_else(|| serde::de::Error::custom(format!("unknown outcome {s:?}")))
    }
}

/// Everything one episode needs besides the object and robot.
#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeConfig {
    pub sensor: SensorConfig,
    pub control: ControlConfig,
    pub sim: SimConfig,
    /// Gripper-frame base velocity u₀.
    pub base: BaseVelocity,
    /// Skip the ‖u₀‖ ≤ γ·f validation (for probing the slip bound).
    pub allow_unsafe_speed: bool,
}

impl Default for EpisodeConfig {
    fn default() -> Self {
        Self {
            sensor: SensorConfig::default(),
            control: ControlConfig::default(),
            sim: SimConfig::default(),
            base: BaseVelocity::linear(Vec3::new(0.0, 0.05, 0.0)),
            allow_unsafe_speed: false,
        }
    }
}

impl EpisodeConfig {
    pub fn with_mode(mut self, mode: ControlMode) -> Self {
        self.control.mode = mode;
        self
    }

    pub fn validate(&self) -> Result<(), SimError> {
        self.sensor.validate()?;
        self.control.validate()?;
        self.sim.validate()?;
        if (self.control.dt - self.sim.dt()).abs() > 1e-12 {
            return Err(SimError::Config(format!(
                "control dt {} does not match control rate {} Hz",
                self.control.dt, self.sim.control_rate
            )));
        }
        let bound = self.sensor.gamma * self.sim.control_rate;
        let speed = self.base.twist.linear.norm();
        if !self.allow_unsafe_speed && speed > bound * (1.0 + 1e-12) {
            return Err(SimError::Config(format!(
                "base speed {speed} m/s exceeds the slip bound γ·f = {bound} m/s"
            )));
        }
        Ok(())
    }
}

/// State right after grasping.
#[derive(Debug, Clone)]
pub struct GraspState {
    pub gripper: Pose,
    pub path: PathState,
    pub reference: ContactState,
    pub q: Vec<f64>,
}

/// Aligns the gripper with the handle at s = 0 and records the reference contact.
pub fn grasp_init(object: &ArticulationModel, robot: &RobotModel, sensor: &TactileSensor) -> Result<GraspState, SimError> {
    robot.validate()?;
    object.validate()?;
    let handle = object.handle_pose_at(PathState::new(0.0))?;
    let (gripper, q) = match robot {
        RobotModel::FreeFlying { .. } => (handle, vec![0.0; 6]),
        RobotModel::SerialChain(c) => {
            let g = c.forward(&c.q0);
            let (dt, dr) = g.distance(&handle);
            if dt > GRASP_TOL || dr > GRASP_TOL {
                return Err(SimError::Config(format!(
                    "serial chain start pose misses the handle by {dt:e} m / {dr:e} rad"
                )));
            }
            let sv = numerical_jacobian(robot, &c.q0).svd(false, false).singular_values.min();
            if !(sv > crate::control::DEFAULT_RANK_EPS) {
                return Err(SimError::Config(format!("serial chain is singular at q0 (σ_min = {sv:e})")));
            }
            (g, c.q0.clone())
        }
    };
    let rel = gripper.inverse().compose(&handle);
    let reference = sensor.sense(&rel, 1, 0);
    Ok(GraspState {
        gripper,
        path: PathState::new(0.0),
        reference,
        q,
    })
}

/// Episode state between steps.
#[derive(Debug, Clone)]
pub struct SimState {
    pub step: u64,
    pub time: f64,
    pub gripper: Pose,
    pub path: PathState,
    pub contact: ContactState,
    pub q: Vec<f64>,
}

#[derive(Debug, Clone)]
pub struct StepOutcome {
    pub state: SimState,
    pub deviation: crate::contact::DeviationStats,
    pub terminal: Option<Outcome>,
}

/// Per-episode constants the stepper reuses.
pub struct World<'a> {
    pub object: &'a ArticulationModel,
    pub robot: &'a RobotModel,
    pub sensor: &'a TactileSensor,
    pub reference: &'a ContactState,
    pub energy: ContactEnergy,
    pub min_path_speed: f64,
    pub base_speed: f64,
    pub cfg: &'a SimConfig,
    pub seed: u64,
}

impl<'a> World<'a> {
    pub fn new(
        object: &'a ArticulationModel,
        robot: &'a RobotModel,
        sensor: &'a TactileSensor,
        reference: &'a ContactState,
        base: &BaseVelocity,
        cfg: &'a SimConfig,
        seed: u64,
    ) -> Self {
        Self {
            object,
            robot,
            sensor,
            reference,
            energy: ContactEnergy::new(sensor.markers().iter().map(|m| &m.rest)),
            min_path_speed: object.min_path_speed(),
            base_speed: base.twist.linear.norm(),
            cfg,
            seed,
        }
    }
}

/// Applies one command: moves the gripper, lets the handle settle, re-senses
/// and evaluates the terminal conditions.
pub fn step(state: &SimState, cmd: &Command, joint_velocities: &DVector<f64>, world: &World) -> StepOutcome {
    let (gripper, q) = match world.robot {
        RobotModel::FreeFlying { .. } => {
            let mut q = state.q.clone();
            let v = cmd.twist.to_vector();
            for k in 0..6 {
                q[k] += v[k] * cmd.duration;
            }
            (state.gripper.compose(&exp_twist(&cmd.twist, cmd.duration)), q)
        }
        RobotModel::SerialChain(c) => {
            let q: Vec<f64> = state.q.iter().zip(joint_velocities.iter()).map(|(q, qd)| q + qd * cmd.duration).collect();
            (c.forward(&q), q)
        }
    };
    let travel = (state.gripper.inverse().compose(&gripper)).translation.norm();
    let dt = world.cfg.dt();
    let window = 2.0 * (world.base_speed * dt).max(travel) / world.min_path_speed;
    let path = if window > 0.0 {
        project_to_path(world.object, &world.energy, &gripper, state.path, window)
    } else {
        state.path
    };
    let handle = world.object.handle_pose_at(path).expect("projection stays in domain");
    let rel = gripper.inverse().compose(&handle);
    let i = state.step + 1;
    let contact = world.sensor.sense(&rel, i, crate::objects::mix_seed(world.seed, i));
    let deviation = deviation_stats(world.reference, &contact).unwrap_or(crate::contact::DeviationStats {
        mean_norm: f64::INFINITY,
        max_norm: f64::INFINITY,
    });
    let terminal = if deviation.max_norm > world.sensor.config().gamma {
        Some(Outcome::Failure(FailureKind::Slip))
    } else if success_check(world.object, path) {
        Some(Outcome::Success)
    } else if state.step + 1 >= world.cfg.max_steps {
        Some(Outcome::Failure(FailureKind::Timeout))
    } else {
        None
    };
    StepOutcome {
        state: SimState {
            step: i,
            time: state.time + cmd.duration,
            gripper,
            path,
            contact,
            q,
        },
        deviation,
        terminal,
    }
}

/// Episode metadata and outcome; the first line of a serialized log.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeHeader {
    pub schema_version: u32,
    pub object_id: String,
    pub category: Category,
    pub method: String,
    pub seed: u64,
    pub control_rate: f64,
    pub gamma: f64,
    /// Progress threshold S used for action efficiency.
    pub success_threshold: f64,
    pub base: Twist,
    pub outcome: Outcome,
    pub steps: u64,
    pub final_time: f64,
    pub recoveries: u32,
}

/// One step. Record 0 is the grasp state; record i ≥ 1 holds the command
/// issued at step i and the state it produced. `handle_estimate` is the
/// controller's estimate of the pre-step handle, `predicted_handle` its
/// prediction of this record's `handle`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub i: u64,
    pub t: f64,
    pub s: f64,
    pub gripper: Pose,
    pub handle: Pose,
    pub handle_estimate: Option<Pose>,
    pub predicted_handle: Option<Pose>,
    pub twist: Twist,
    pub duration: f64,
    pub alpha: f64,
    pub q: Vec<f64>,
    pub qd: Vec<f64>,
    pub dev_mean: f64,
    pub dev_max: f64,
    pub mode: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EpisodeLog {
    pub header: EpisodeHeader,
    pub records: Vec<StepRecord>,
}

pub const LOG_SCHEMA_VERSION: u32 = 1;

impl EpisodeLog {
    pub fn outcome(&self) -> Outcome {
        self.header.outcome
    }

    pub fn steps(&self) -> u64 {
        self.header.steps
    }

    pub fn final_time(&self) -> f64 {
        self.header.final_time
    }

    pub fn max_deviation(&self) -> f64 {
        self.records.iter().map(|r| r.dev_max).fold(0.0, f64::max)
    }

    /// Line-delimited JSON: header, then one record per line.
    pub fn write_jsonl<W: std::io::Write>(&self, mut w: W) -> std::io::Result<()> {
        serde_json::to_writer(&mut w, &self.header)?;
        w.write_all(b"\n")?;
        for r in &self.records {
            serde_json::to_writer(&mut w, r)?;
            w.write_all(b"\n")?;
        }
        Ok(())
    }

    pub fn read_jsonl<R: std::io::BufRead>(r: R) -> std::io::Result<Self> {
        let mut lines = r.lines();
        let invalid = |e: serde_json::Error| std::io::Error::new(std::io::ErrorKind::InvalidData, e);
        let header: EpisodeHeader = match lines.next() {
            Some(l) => serde_json::from_str(&l?).map_err(invalid)?,
            None => return Err(std::io::Error::new(std::io::ErrorKind::UnexpectedEof, "empty log")),
        };
        let mut records = Vec::new();
        for l in lines {
            let l = l?;
            if !l.trim().is_empty() {
                records.push(serde_json::from_str(&l).map_err(invalid)?);
            }
        }
        Ok(Self { header, records })
    }
}

fn failure_of(e: &ControlError) -> FailureKind {
    match e {
        ControlError::SingularConfiguration(_) | ControlError::JacobianShape(..) => FailureKind::Singularity,
        ControlError::Estimation(EstimationError::DegenerateContact(_)) | ControlError::AmbiguousRotationAxis(_) => {
            FailureKind::Degenerate
        }
        _ => FailureKind::Degenerate,
    }
}

/// Runs one episode to a terminal outcome.
pub fn run_episode(
    object: &ArticulationModel,
    robot: &RobotModel,
    cfg: &EpisodeConfig,
    seed: u64,
) -> Result<EpisodeLog, SimError> {
    cfg.validate()?;
    let sensor = TactileSensor::new(cfg.sensor.clone())?;
    let grasp = grasp_init(object, robot, &sensor)?;
    let mut controller = Controller::new(cfg.control, cfg.base, grasp.reference.clone(), &grasp.gripper, cfg.sensor.gamma)?;
    let world = World::new(object, robot, &sensor, &grasp.reference, &cfg.base, &cfg.sim, seed);

    let handle0 = object.handle_pose_at(grasp.path)?;
    let mut records = vec![StepRecord {
        i: 0,
        t: 0.0,
        s: grasp.path.s,
        gripper: grasp.gripper,
        handle: handle0,
        handle_estimate: None,
        predicted_handle: None,
        twist: Twist::zero(),
        duration: 0.0,
        alpha: 1.0,
        q: grasp.q.clone(),
        qd: vec![0.0; grasp.q.len()],
        dev_mean: 0.0,
        dev_max: 0.0,
        mode: "grasp".into(),
    }];
    let mut state = SimState {
        step: 0,
        time: 0.0,
        gripper: grasp.gripper,
        path: grasp.path,
        contact: grasp.reference.clone(),
        q: grasp.q,
    };
    let outcome = loop {
        let jac = body_jacobian(robot, &state.q, &state.gripper);
        let kin = Kinematics {
            jacobian: &jac,
            limits: robot.limits(),
        };
        let report = match controller.step(&state.gripper, &state.contact, &kin) {
            Ok(r) => r,
            Err(e) => break Outcome::Failure(failure_of(&e)),
        };
        let out = step(&state, &report.command, &report.joint_velocities, &world);
        state = out.state;
        records.push(StepRecord {
            i: state.step,
            t: state.time,
            s: state.path.s,
            gripper: state.gripper,
            handle: object.handle_pose_at(state.path)?,
            handle_estimate: Some(report.handle_estimate),
            predicted_handle: report.predicted_handle,
            twist: report.command.twist,
            duration: report.command.duration,
            alpha: report.alpha,
            q: state.q.clone(),
            qd: report.joint_velocities.iter().copied().collect(),
            dev_mean: out.deviation.mean_norm,
            dev_max: out.deviation.max_norm,
            mode: report.phase.label().into(),
        });
        if let Some(o) = out.terminal {
            break o;
        }
    };
    let recoveries = match &controller {
        Controller::Reactive(c) => c.recoveries(),
        Controller::Proactive(_) => 0,
    };
    Ok(EpisodeLog {
        header: EpisodeHeader {
            schema_version: LOG_SCHEMA_VERSION,
            object_id: object.id.clone(),
            category: object.category,
            method: cfg.control.mode.label().into(),
            seed,
            control_rate: cfg.sim.control_rate,
            gamma: cfg.sensor.gamma,
            success_threshold: object.success_threshold(),
            base: cfg.base.twist,
            outcome,
            steps: state.step,
            final_time: state.time,
            recoveries,
        },
        records,
    })
}
