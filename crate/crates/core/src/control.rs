//! Proactive tactile control (offset velocity, α-scaling, stretched duration)
//! and the reactive execution/recovery baseline. Both emit gripper-frame
//! twists with a duration; the simulator integrates them.

use crate::contact::{correspondences, deviation_stats, ContactState, DeviationStats};
use crate::estimation::{
    compute_motion_delta, estimate_handle_pose, kabsch, predict_next, EstimationError, HandleHistory,
};
use crate::geom::{exp_twist, inverse, log_pose, Pose, Twist, Vec3};
use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

/// Smallest singular value below which a Jacobian is treated as rank deficient.
pub const DEFAULT_RANK_EPS: f64 = 1e-8;

/// Required rotations this close to π have no well-defined axis.
pub const PI_MARGIN: f64 = 1e-6;

/// Below this net cycle translation the reactive baseline keeps its direction.
pub const MIN_DIRECTION_UPDATE: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ControlError {
    #[error("ambiguous rotation axis (required rotation {0} rad is within {PI_MARGIN} of π)")]
    AmbiguousRotationAxis(f64),
    #[error("singular configuration (smallest singular value {0:e})")]
    SingularConfiguration(f64),
    #[error("jacobian must be 6×n with n ≥ 6, got {0}×{1}")]
    JacobianShape(usize, usize),
    #[error(transparent)]
    Estimation(#[from] EstimationError),
    #[error("invalid control config: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct BaseVelocity {
    pub twist: Twist,
}

impl BaseVelocity {
    pub fn linear(v: Vec3) -> Self {
        Self {
            twist: Twist::from_linear(v),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Command {
    pub twist: Twist,
    /// Execution time Δt′, seconds.
    pub duration: f64,
}

impl Command {
    /// Gripper-frame displacement this command produces.
    pub fn displacement(&self) -> Pose {
        exp_twist(&self.twist, self.duration)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ControlMode {
    Proactive,
    ReactiveBaseline,
}

impl ControlMode {
    pub fn label(&self) -> &'static str {
        match self {
            ControlMode::Proactive => "proactive",
            ControlMode::ReactiveBaseline => "reactive",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BaselineConfig {
    /// Mean deviation, as a fraction of γ, that starts a recovery.
    pub trigger_frac: f64,
    /// Mean deviation, as a fraction of γ, that ends it.
    pub release_frac: f64,
    /// Proportional gain on the estimated handle offset, 1/s.
    pub recovery_gain: f64,
}

impl Default for BaselineConfig {
    fn default() -> Self {
        Self {
            trigger_frac: 0.4,
            release_frac: 0.1,
            recovery_gain: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ControlConfig {
    /// Nominal control period Δt, seconds.
    pub dt: f64,
    pub beta: f64,
    pub div_eps: f64,
    pub rank_eps: f64,
    pub mode: ControlMode,
    pub baseline: BaselineConfig,
}

impl Default for ControlConfig {
    fn default() -> Self {
        Self {
            dt: 1.0 / 60.0,
            beta: 0.9,
            div_eps: 1e-9,
            rank_eps: DEFAULT_RANK_EPS,
            mode: ControlMode::Proactive,
            baseline: BaselineConfig::default(),
        }
    }
}

impl ControlConfig {
    pub fn validate(&self) -> Result<(), ControlError> {
        let bad = |m: &str| Err(ControlError::InvalidConfig(m.to_string()));
        if !(self.dt > 0.0 && self.dt.is_finite()) {
            return bad("dt must be positive");
        }
        if !(self.beta > 0.0 && self.beta <= 1.0) {
            return bad("beta must lie in (0, 1]");
        }
        if !(self.div_eps > 0.0) || !(self.rank_eps > 0.0) {
            return bad("div_eps and rank_eps must be positive");
        }
        let b = &self.baseline;
        if !(0.0 < b.release_frac && b.release_frac < b.trigger_frac && b.trigger_frac < 1.0) {
            return bad("baseline needs 0 < release_frac < trigger_frac < 1");
        }
        if !(b.recovery_gain > 0.0 && b.recovery_gain.is_finite()) {
            return bad("recovery_gain must be positive");
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct JointLimits {
    pub max_abs_velocity: Vec<f64>,
}

impl JointLimits {
    pub fn new(max_abs_velocity: Vec<f64>) -> Result<Self, ControlError> {
        let l = Self { max_abs_velocity };
        l.validate()?;
        Ok(l)
    }

    /// Free-flying twist limits: per-axis linear and angular bounds.
    pub fn free_flying(linear: f64, angular: f64) -> Self {
        Self {
            max_abs_velocity: vec![linear, linear, linear, angular, angular, angular],
        }
    }

    pub fn len(&self) -> usize {
        self.max_abs_velocity.len()
    }

    pub fn is_empty(&self) -> bool {
        self.max_abs_velocity.is_empty()
    }

    pub fn validate(&self) -> Result<(), ControlError> {
        if self.max_abs_velocity.iter().all(|&m| m > 0.0 && m.is_finite()) && !self.is_empty() {
            Ok(())
        } else {
            Err(ControlError::InvalidConfig("joint limits must be positive".into()))
        }
    }
}

/// Gripper motion that lands on the predicted handle pose: `gripper⁻¹ · predicted`.
pub fn required_transform(gripper: &Pose, predicted: &Pose) -> Pose {
    inverse(gripper).compose(predicted)
}

/// Twist to add to `base` so that holding the sum for `dt` realizes `required`.
pub fn offset_velocity(required: &Pose, base: &BaseVelocity, dt: f64) -> Result<Twist, ControlError> {
    let angle = required.rotation.angle();
    if angle > PI - PI_MARGIN {
        return Err(ControlError::AmbiguousRotationAxis(angle));
    }
    Ok(log_pose(required).scaled(1.0 / dt) - base.twist)
}

/// Minimum-norm joint velocities `Jᵀ(JJᵀ)⁻¹ u`, computed through the SVD.
pub fn solve_joint_velocities(
    jacobian: &DMatrix<f64>,
    total_twist: &Twist,
    rank_eps: f64,
) -> Result<DVector<f64>, ControlError> {
    let (rows, cols) = jacobian.shape();
    if rows != 6 || cols < 6 {
        return Err(ControlError::JacobianShape(rows, cols));
    }
    let svd = jacobian.clone().svd(true, true);
    let sigma_min = svd.singular_values.min();
    if !(sigma_min > rank_eps) {
        return Err(ControlError::SingularConfiguration(sigma_min));
    }
    let u = DVector::from_column_slice(total_twist.to_vector().as_slice());
    let (um, vt) = (svd.u.unwrap(), svd.v_t.unwrap());
    let mut y = um.transpose() * u;
    for (yi, s) in y.iter_mut().zip(svd.singular_values.iter()) {
        *yi /= s;
    }
    Ok(vt.transpose() * y)
}

/// α = min(1, min_j β·q̇M_j / max(|q̇_j|, ε)).
pub fn scale_alpha(joint_vel: &DVector<f64>, limits: &JointLimits, beta: f64, div_eps: f64) -> f64 {
    assert_eq!(joint_vel.len(), limits.len(), "joint count mismatch");
    let mut alpha: f64 = 1.0;
    for (qd, m) in joint_vel.iter().zip(&limits.max_abs_velocity) {
        let cap = beta * m;
        let a = cap / qd.abs().max(div_eps);
        if a < alpha {
            // Division can round one ulp high; step down until the bound holds.
            let mut a = a;
            while a * qd.abs() > cap {
                a = f64::from_bits(a.to_bits() - 1);
            }
            alpha = a;
        }
    }
    alpha
}

pub fn assemble_command(offset: &Twist, base: &BaseVelocity, alpha: f64, dt: f64) -> Command {
    Command {
        twist: (*offset + base.twist).scaled(alpha),
        duration: dt / alpha,
    }
}

/// Robot-side quantities the controller needs at the current configuration.
#[derive(Debug, Clone, Copy)]
pub struct Kinematics<'a> {
    /// Gripper body-frame Jacobian, 6×n.
    pub jacobian: &'a DMatrix<f64>,
    pub limits: &'a JointLimits,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Phase {
    /// First step: base velocity only.
    Base,
    Proactive,
    Execution,
    Recovery,
}

impl Phase {
    pub fn label(&self) -> &'static str {
        match self {
            Phase::Base => "base",
            Phase::Proactive => "proactive",
            Phase::Execution => "execution",
            Phase::Recovery => "recovery",
        }
    }
}

/// Everything a controller decided in one step.
#[derive(Debug, Clone, PartialEq)]
pub struct StepReport {
    pub step: u64,
    pub command: Command,
    pub phase: Phase,
    pub alpha: f64,
    /// Joint velocities actually commanded (after α-scaling).
    pub joint_velocities: DVector<f64>,
    pub deviation: DeviationStats,
    /// Handle-in-gripper estimate from registration.
    pub relative_estimate: Pose,
    /// World handle estimate.
    pub handle_estimate: Pose,
    pub predicted_handle: Option<Pose>,
    pub offset: Option<Twist>,
    pub registration_rms: f64,
}

struct Observation {
    rel: Pose,
    handle: Pose,
    deviation: DeviationStats,
    rms: f64,
}

fn observe(reference: &ContactState, contact: &ContactState, gripper: &Pose) -> Result<Observation, ControlError> {
    let k = correspondences(reference, contact);
    let reg = kabsch(&k)?;
    let deviation =
        deviation_stats(reference, contact).map_err(|_| EstimationError::DegenerateContact("no correspondences"))?;
    Ok(Observation {
        rel: reg.pose,
        handle: estimate_handle_pose(gripper, &reg.pose),
        deviation,
        rms: reg.rms_residual,
    })
}

fn limited(
    cfg: &ControlConfig,
    kin: &Kinematics,
    offset: &Twist,
    base: &BaseVelocity,
) -> Result<(Command, f64, DVector<f64>), ControlError> {
    let qd = solve_joint_velocities(kin.jacobian, &(*offset + base.twist), cfg.rank_eps)?;
    let alpha = scale_alpha(&qd, kin.limits, cfg.beta, cfg.div_eps);
    Ok((assemble_command(offset, base, alpha, cfg.dt), alpha, qd * alpha))
}

/// Predicts the next handle pose from the last two estimates and commands the
/// gripper onto it within one control period.
#[derive(Debug, Clone)]
pub struct ProactiveController {
    cfg: ControlConfig,
    base: BaseVelocity,
    reference: ContactState,
    history: HandleHistory,
    step: u64,
}

impl ProactiveController {
    /// `gripper` is the grasp pose, where the handle frame coincides with the gripper.
    pub fn new(cfg: ControlConfig, base: BaseVelocity, reference: ContactState, gripper: &Pose) -> Result<Self, ControlError> {
        cfg.validate()?;
        let mut history = HandleHistory::new();
        history.push(1, *gripper)?;
        Ok(Self {
            cfg,
            base,
            reference,
            history,
            step: 1,
        })
    }

    pub fn step_index(&self) -> u64 {
        self.step
    }

    pub fn history(&self) -> &HandleHistory {
        &self.history
    }

    pub fn step(&mut self, gripper: &Pose, contact: &ContactState, kin: &Kinematics) -> Result<StepReport, ControlError> {
        let i = self.step;
        let obs = observe(&self.reference, contact, gripper)?;
        let report = if i == 1 {
            let (command, alpha, qd) = limited(&self.cfg, kin, &Twist::zero(), &self.base)?;
            StepReport {
                step: i,
                command,
                phase: Phase::Base,
                alpha,
                joint_velocities: qd,
                deviation: obs.deviation,
                relative_estimate: obs.rel,
                handle_estimate: obs.handle,
                predicted_handle: None,
                offset: None,
                registration_rms: obs.rms,
            }
        } else {
            self.history.push(i, obs.handle)?;
            let t_u = compute_motion_delta(&self.history)?;
            let predicted = predict_next(&obs.handle, &t_u);
            let required = required_transform(gripper, &predicted);
            let offset = offset_velocity(&required, &self.base, self.cfg.dt)?;
            let (command, alpha, qd) = limited(&self.cfg, kin, &offset, &self.base)?;
            StepReport {
                step: i,
                command,
                phase: Phase::Proactive,
                alpha,
                joint_velocities: qd,
                deviation: obs.deviation,
                relative_estimate: obs.rel,
                handle_estimate: obs.handle,
                predicted_handle: Some(predicted),
                offset: Some(offset),
                registration_rms: obs.rms,
            }
        };
        self.step += 1;
        Ok(report)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaselineMode {
    Execution,
    Recovery,
}

/// Hysteresis switch on mean contact deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ModeMachine {
    pub mode: BaselineMode,
    trigger: f64,
    release: f64,
}

impl ModeMachine {
    pub fn new(cfg: &BaselineConfig, gamma: f64) -> Self {
        Self {
            mode: BaselineMode::Execution,
            trigger: cfg.trigger_frac * gamma,
            release: cfg.release_frac * gamma,
        }
    }

    /// Feeds one deviation sample; returns true when the mode changed.
    pub fn update(&mut self, mean_deviation: f64) -> bool {
        let next = match self.mode {
            BaselineMode::Execution if mean_deviation >= self.trigger => BaselineMode::Recovery,
            BaselineMode::Recovery if mean_deviation <= self.release => BaselineMode::Execution,
            m => m,
        };
        let switched = next != self.mode;
        self.mode = next;
        switched
    }
}

/// Two-stage baseline: drive along a fixed direction until the contact
/// deviates, stop and servo back onto the handle, then resume along the
/// direction the last cycle actually travelled.
#[derive(Debug, Clone)]
pub struct ReactiveController {
    cfg: ControlConfig,
    base: BaseVelocity,
    speed: f64,
    reference: ContactState,
    machine: ModeMachine,
    cycle_start: Vec3,
    recoveries: u32,
    step: u64,
}

impl ReactiveController {
    pub fn new(
        cfg: ControlConfig,
        base: BaseVelocity,
        reference: ContactState,
        gripper: &Pose,
        gamma: f64,
    ) -> Result<Self, ControlError> {
        cfg.validate()?;
        Ok(Self {
            machine: ModeMachine::new(&cfg.baseline, gamma),
            speed: base.twist.linear.norm(),
            cfg,
            base,
            reference,
            cycle_start: gripper.translation,
            recoveries: 0,
            step: 1,
        })
    }

    pub fn mode(&self) -> BaselineMode {
        self.machine.mode
    }

    /// Current execution-phase base velocity.
    pub fn base(&self) -> &BaseVelocity {
        &self.base
    }

    pub fn recoveries(&self) -> u32 {
        self.recoveries
    }

    pub fn step(&mut self, gripper: &Pose, contact: &ContactState, kin: &Kinematics) -> Result<StepReport, ControlError> {
        let i = self.step;
        let obs = observe(&self.reference, contact, gripper)?;
        if self.machine.update(obs.deviation.mean_norm) {
            match self.machine.mode {
                BaselineMode::Recovery => self.recoveries += 1,
                BaselineMode::Execution => {
                    let net = gripper.rotation.inverse().apply(&(gripper.translation - self.cycle_start));
                    if net.norm() >= MIN_DIRECTION_UPDATE {
                        self.base.twist.linear = net * (self.speed / net.norm());
                    }
                    self.cycle_start = gripper.translation;
                }
            }
        }
        let (offset, base, phase) = match self.machine.mode {
            BaselineMode::Execution => (Twist::zero(), self.base, Phase::Execution),
            BaselineMode::Recovery => (
                log_pose(&obs.rel).scaled(self.cfg.baseline.recovery_gain),
                BaseVelocity::default(),
                Phase::Recovery,
            ),
        };
        let (command, alpha, qd) = limited(&self.cfg, kin, &offset, &base)?;
        self.step += 1;
        Ok(StepReport {
            step: i,
            command,
            phase,
            alpha,
            joint_velocities: qd,
            deviation: obs.deviation,
            relative_estimate: obs.rel,
            handle_estimate: obs.handle,
            predicted_handle: None,
            offset: None,
            registration_rms: obs.rms,
        })
    }
}

/// Either controller behind one interface.
#[derive(Debug, Clone)]
pub enum Controller {
    Proactive(ProactiveController),
    Reactive(ReactiveController),
}

impl Controller {
    pub fn new(
        cfg: ControlConfig,
        base: BaseVelocity,
        reference: ContactState,
        gripper: &Pose,
        gamma: f64,
    ) -> Result<Self, ControlError> {
        Ok(match cfg.mode {
            ControlMode::Proactive => Controller::Proactive(ProactiveController::new(cfg, base, reference, gripper)?),
            ControlMode::ReactiveBaseline => {
                Controller::Reactive(ReactiveController::new(cfg, base, reference, gripper, gamma)?)
            }
        })
    }

    pub fn step(&mut self, gripper: &Pose, contact: &ContactState, kin: &Kinematics) -> Result<StepReport, ControlError> {
        match self {
            Controller::Proactive(c) => c.step(gripper, contact, kin),
            Controller::Reactive(c) => c.step(gripper, contact, kin),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geom::Rotation;
    use approx::assert_abs_diff_eq;

    const DT: f64 = 1.0 / 60.0;

    #[test]
    fn required_transform_examples() {
        let g = Pose::new(Rotation::rx(0.3), Vec3::new(0.1, 0.2, 0.3));
        assert!(required_transform(&g, &g).distance(&Pose::identity()).0 < 1e-15);
        let r = required_transform(&Pose::identity(), &Pose::translation_xyz(1e-3, 0.0, 0.0));
        assert!((r.translation - Vec3::new(1e-3, 0.0, 0.0)).norm() < 1e-18);
        let r = required_transform(
            &Pose::from_rotation(Rotation::rz(10f64.to_radians())),
            &Pose::from_rotation(Rotation::rz(20f64.to_radians())),
        );
        let (dt, dr) = r.distance(&Pose::from_rotation(Rotation::rz(10f64.to_radians())));
        assert!(dt < 1e-15 && dr < 1e-12);
    }

    #[test]
    fn offset_velocity_examples() {
        let base = BaseVelocity {
            twist: Twist::new(Vec3::new(0.0, 0.05, 0.0), Vec3::new(0.0, 0.0, 0.1)),
        };
        let off = offset_velocity(&exp_twist(&base.twist, DT), &base, DT).unwrap();
        assert!(off.norm() < 1e-12);

        let base = BaseVelocity::linear(Vec3::new(0.02, 0.0, 0.0));
        let d = Vec3::new(1e-3, -5e-4, 2e-4);
        let off = offset_velocity(&Pose::from_translation(d), &base, DT).unwrap();
        assert!((off.linear - (d / DT - base.twist.linear)).norm() < 1e-12);
        assert!(off.angular.norm() < 1e-15);

        let off = offset_velocity(&Pose::from_rotation(Rotation::rz(0.05)), &BaseVelocity::default(), DT).unwrap();
        assert_abs_diff_eq!(off.angular.z, 3.0, epsilon = 1e-12);
        assert!(off.angular.xy().norm() < 1e-15 && off.linear.norm() < 1e-15);
    }

    #[test]
    fn offset_velocity_rejects_half_turn() {
        let r = Pose::from_rotation(Rotation::rx(PI - 1e-7));
        assert!(matches!(
            offset_velocity(&r, &BaseVelocity::default(), DT),
            Err(ControlError::AmbiguousRotationAxis(_))
        ));
        assert!(offset_velocity(&Pose::from_rotation(Rotation::rx(3.0)), &BaseVelocity::default(), DT).is_ok());
    }

    #[test]
    fn solve_examples() {
        let j = DMatrix::<f64>::identity(6, 6);
        let t = Twist::new(Vec3::new(1.0, 2.0, 3.0), Vec3::new(4.0, 5.0, 6.0));
        let q = solve_joint_velocities(&j, &t, DEFAULT_RANK_EPS).unwrap();
        for k in 0..6 {
            assert_abs_diff_eq!(q[k], t.to_vector()[k], epsilon = 1e-14);
        }
        let q = solve_joint_velocities(&j, &Twist::zero(), DEFAULT_RANK_EPS).unwrap();
        assert_eq!(q.norm(), 0.0);

        let mut sing = DMatrix::<f64>::identity(6, 7);
        sing[(5, 5)] = 0.0;
        assert!(matches!(
            solve_joint_velocities(&sing, &t, DEFAULT_RANK_EPS),
            Err(ControlError::SingularConfiguration(_))
        ));
        assert!(matches!(
            solve_joint_velocities(&DMatrix::identity(6, 5), &t, DEFAULT_RANK_EPS),
            Err(ControlError::JacobianShape(6, 5))
        ));
    }

    #[test]
    fn alpha_examples() {
        let lim = JointLimits::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(scale_alpha(&DVector::from_vec(vec![0.5, -1.0, 1.0]), &lim, 1.0, 1e-9), 1.0);
        assert_abs_diff_eq!(
            scale_alpha(&DVector::from_vec(vec![0.5, -4.0, 1.0]), &lim, 1.0, 1e-9),
            0.5,
            epsilon = 1e-15
        );
        assert_eq!(scale_alpha(&DVector::zeros(3), &lim, 0.8, 1e-9), 1.0);
    }

    #[test]
    fn assemble_examples() {
        let base = BaseVelocity::linear(Vec3::new(0.0, 0.05, 0.0));
        let off = Twist::new(Vec3::new(0.01, 0.0, 0.0), Vec3::new(0.0, 0.0, 0.2));
        let c = assemble_command(&off, &base, 1.0, DT);
        assert_eq!(c.twist, off + base.twist);
        assert_eq!(c.duration, DT);

        let c = assemble_command(&off, &base, 0.5, DT);
        assert_eq!(c.twist, (off + base.twist).scaled(0.5));
        assert_abs_diff_eq!(c.duration, 1.0 / 30.0, epsilon = 1e-15);

        let c = assemble_command(&off, &base, 0.25, DT);
        let (dt, dr) = c.displacement().distance(&exp_twist(&(off + base.twist), DT));
        assert!(dt < 1e-12 && dr < 1e-12);
    }

    #[test]
    fn mode_machine_switches_on_crossings() {
        // γ = 1: trigger at 0.6, release at 0.1.
        let trig06 = BaselineConfig { trigger_frac: 0.6, ..BaselineConfig::default() };
        let mut m = ModeMachine::new(&trig06, 1.0);
        let ramp = [0.0, 0.2, 0.59, 0.6, 0.9, 0.5, 0.11, 0.1, 0.3, 0.59, 0.61];
        let expected = [
            BaselineMode::Execution,
            BaselineMode::Execution,
            BaselineMode::Execution,
            BaselineMode::Recovery,
            BaselineMode::Recovery,
            BaselineMode::Recovery,
            BaselineMode::Recovery,
            BaselineMode::Execution,
            BaselineMode::Execution,
            BaselineMode::Execution,
            BaselineMode::Recovery,
        ];
        let switched: Vec<usize> = ramp
            .iter()
            .enumerate()
            .filter_map(|(k, &d)| m.update(d).then_some(k))
            .collect();
        assert_eq!(switched, vec![3, 7, 10]);

        let mut m = ModeMachine::new(&trig06, 1.0);
        for (&d, &e) in ramp.iter().zip(expected.iter()) {
            m.update(d);
            assert_eq!(m.mode, e);
        }
    }

    #[test]
    fn config_validation() {
        assert!(ControlConfig::default().validate().is_ok());
        let mut c = ControlConfig::default();
        c.beta = 1.2;
        assert!(c.validate().is_err());
        let mut c = ControlConfig::default();
        c.baseline.release_frac = 0.7;
        assert!(c.validate().is_err());
        assert!(JointLimits::new(vec![1.0, 0.0]).is_err());
    }
}
