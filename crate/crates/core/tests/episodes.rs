//! Simulator behaviour on hand-built objects.

mod common;

use common::close;
use nalgebra::DVector;
use proactive_tactile::contact::{deviation_stats, TactileSensor};
use proactive_tactile::control::{BaseVelocity, Command, ControlMode};
use proactive_tactile::geom::{Pose, Twist, Vec3};
use proactive_tactile::objects::{ArticulationModel, PathState};
use proactive_tactile::sim::{
    grasp_init, numerical_jacobian, run_episode, step, EpisodeConfig, FailureKind, Outcome, RobotModel, SerialChain,
    SimState, World,
};

const V: f64 = 0.05;

fn world_parts() -> (TactileSensor, EpisodeConfig) {
    let cfg = EpisodeConfig::default();
    (TactileSensor::new(cfg.sensor.clone()).unwrap(), cfg)
}

fn initial(m: &ArticulationModel, sensor: &TactileSensor) -> (SimState, proactive_tactile::sim::GraspState) {
    let g = grasp_init(m, &RobotModel::default(), sensor).unwrap();
    let s = SimState {
        step: 1,
        time: 0.0,
        gripper: g.gripper,
        path: g.path,
        contact: g.reference.clone(),
        q: g.q.clone(),
    };
    (s, g)
}

#[test]
fn grasp_matches_handle_and_reference_is_undeformed() {
    let m = ArticulationModel::revolute(0.3, 1.6).with_placement(Pose::translation_xyz(0.5, 0.1, 0.2));
    let (sensor, _) = world_parts();
    let (_, g) = initial(&m, &sensor);
    assert_eq!(g.gripper, m.handle_pose_at(PathState::new(0.0)).unwrap());
    let d = deviation_stats(&g.reference, &g.reference).unwrap();
    assert_eq!((d.mean_norm, d.max_norm), (0.0, 0.0));
    assert_eq!(g.reference.len(), 64);
}

#[test]
fn zero_twist_only_advances_time() {
    let m = ArticulationModel::prismatic(0.3);
    let (sensor, cfg) = world_parts();
    let (s0, g) = initial(&m, &sensor);
    let base = BaseVelocity::linear(Vec3::new(0.0, V, 0.0));
    let robot = RobotModel::default();
    let w = World::new(&m, &robot, &sensor, &g.reference, &base, &cfg.sim, 0);
    let cmd = Command { twist: Twist::zero(), duration: 1.0 / 60.0 };
    let out = step(&s0, &cmd, &DVector::zeros(6), &w);
    assert_eq!(out.state.gripper, s0.gripper);
    assert_eq!(out.state.path, s0.path);
    assert_eq!(out.state.time, 1.0 / 60.0);
    assert!(out.terminal.is_none());
}

#[test]
fn base_only_step_drags_aligned_prismatic() {
    let m = ArticulationModel::prismatic(0.3);
    let (sensor, cfg) = world_parts();
    let (s0, g) = initial(&m, &sensor);
    let base = BaseVelocity::linear(Vec3::new(0.0, V, 0.0));
    let robot = RobotModel::default();
    let w = World::new(&m, &robot, &sensor, &g.reference, &base, &cfg.sim, 0);
    let cmd = Command { twist: base.twist, duration: 1.0 / 60.0 };
    let out = step(&s0, &cmd, &DVector::zeros(6), &w);
    assert!((out.state.path.s - V / 60.0).abs() < 1e-12);
    assert!(out.deviation.max_norm < 1e-12);
}

#[test]
fn pushing_off_a_locked_handle_slips() {
    let m = ArticulationModel::prismatic(0.3).locked();
    let (sensor, cfg) = world_parts();
    let (s0, g) = initial(&m, &sensor);
    let base = BaseVelocity::linear(Vec3::new(0.0, V, 0.0));
    let robot = RobotModel::default();
    let w = World::new(&m, &robot, &sensor, &g.reference, &base, &cfg.sim, 0);
    // 1.5 mm sideways in one step.
    let cmd = Command { twist: Twist::from_linear(Vec3::new(0.0, 0.0, 0.09)), duration: 1.0 / 60.0 };
    let out = step(&s0, &cmd, &DVector::zeros(6), &w);
    assert_eq!(out.terminal, Some(Outcome::Failure(FailureKind::Slip)));
}

#[test]
fn locked_handle_times_out_without_slip() {
    let m = ArticulationModel::prismatic(0.3).locked();
    let mut cfg = EpisodeConfig::default();
    cfg.sim.max_steps = 200;
    let log = run_episode(&m, &RobotModel::default(), &cfg, 0).unwrap();
    // The prediction says the handle does not move, so the controller
    // cancels the base velocity and holds contact until the step limit.
    assert_eq!(log.outcome(), Outcome::Failure(FailureKind::Timeout));
    assert_eq!(log.steps(), 200);
    assert!(log.max_deviation() < 1e-3);
}

#[test]
fn proactive_prismatic_has_no_deviation() {
    let m = ArticulationModel::prismatic(0.3);
    let log = run_episode(&m, &RobotModel::default(), &EpisodeConfig::default(), 0).unwrap();
    assert_eq!(log.outcome(), Outcome::Success);
    assert!(log.max_deviation() < 1e-9);
}

#[test]
fn revolute_completion_time_matches_arc_length() {
    let r = 0.3;
    let m = ArticulationModel::revolute(r, 1.6);
    let log = run_episode(&m, &RobotModel::default(), &EpisodeConfig::default(), 0).unwrap();
    assert_eq!(log.outcome(), Outcome::Success);
    let oracle = std::f64::consts::FRAC_PI_3 * r / V;
    assert!((log.final_time() / oracle - 1.0).abs() < 0.15, "{} vs {oracle}", log.final_time());
}

#[test]
fn reactive_revolute_needs_many_more_steps() {
    let m = ArticulationModel::revolute(0.3, 1.6);
    let pro = run_episode(&m, &RobotModel::default(), &EpisodeConfig::default(), 0).unwrap();
    let cfg = EpisodeConfig::default().with_mode(ControlMode::ReactiveBaseline);
    let re = run_episode(&m, &RobotModel::default(), &cfg, 0).unwrap();
    assert_eq!(re.outcome(), Outcome::Success);
    assert!(re.steps() >= 5 * pro.steps(), "{} vs {}", re.steps(), pro.steps());
    assert!(re.header.recoveries >= 1);
}

#[test]
fn serial_chain_episode_respects_joint_limits() {
    let chain = SerialChain::seven_dof();
    let home = chain.forward(&chain.q0);
    let robot = RobotModel::SerialChain(chain);
    let m = ArticulationModel::revolute(0.3, 1.6).placed_at(&home);
    let cfg = EpisodeConfig::default();
    let log = run_episode(&m, &robot, &cfg, 0).unwrap();
    assert_eq!(log.outcome(), Outcome::Success);
    let lim = &robot.limits().max_abs_velocity;
    for r in &log.records[1..] {
        for (q, l) in r.qd.iter().zip(lim) {
            assert!(q.abs() <= cfg.control.beta * l + 1e-12);
        }
    }
    let RobotModel::SerialChain(c) = &robot else { unreachable!() };
    let last = log.records.last().unwrap();
    assert!(close(&last.gripper, &c.forward(&last.q), 1e-12));
}

#[test]
fn central_difference_jacobian_is_symmetric_in_q() {
    let robot = RobotModel::SerialChain(SerialChain::seven_dof());
    let q0 = SerialChain::seven_dof().q0;
    let j = numerical_jacobian(&robot, &q0);
    let h = 1e-6;
    // Re-evaluating around a slightly shifted point keeps the columns within
    // the central-difference truncation error.
    let q1: Vec<f64> = q0.iter().map(|q| q + h).collect();
    let q2: Vec<f64> = q0.iter().map(|q| q - h).collect();
    let (j1, j2) = (numerical_jacobian(&robot, &q1), numerical_jacobian(&robot, &q2));
    assert!(((&j1 + &j2) * 0.5 - &j).amax() < 1e-8);
}
