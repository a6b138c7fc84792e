//! Module invariants checked over random inputs.

mod common;

use common::{close, pose, twist, vec3};
use nalgebra::{DMatrix, DVector};
use proactive_tactile::contact::{correspondences, deviation_stats, SensorConfig, TactileSensor};
use proactive_tactile::control::{
    assemble_command, offset_velocity, required_transform, scale_alpha, solve_joint_velocities, BaseVelocity,
    BaselineConfig, BaselineMode, JointLimits, ModeMachine, DEFAULT_RANK_EPS,
};
use proactive_tactile::estimation::{kabsch_points, predict_next, DEFAULT_AREA_EPS};
use proactive_tactile::geom::{exp_twist, Pose, Twist, Vec3};
use proactive_tactile::objects::{
    generate_suite, project_to_path, ArticulationModel, ContactEnergy, PathState, SuiteSpec,
};
use proactive_tactile::sim::{run_episode, EpisodeConfig, RobotModel};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const DT: f64 = 1.0 / 60.0;

fn sensor() -> TactileSensor {
    TactileSensor::new(SensorConfig::default()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn no_slip_fidelity(rel in pose(4e-4, 0.02)) {
        let s = sensor();
        let reference = s.sense(&Pose::identity(), 0, 0);
        let cur = s.sense(&rel, 1, 0);
        let k = correspondences(&reference, &cur);
        prop_assume!(deviation_stats(&reference, &cur).unwrap().max_norm <= s.config().gamma);
        for (a, b) in &k.pairs {
            let expected = rel.transform_point(&a.rest_position) - a.rest_position;
            prop_assert!(((b.position - a.position) - expected).norm() < 1e-15);
        }
    }

    #[test]
    fn activation_filter(rel in pose(2e-3, 0.1)) {
        let s = sensor();
        let eps = s.config().epsilon;
        let c = s.sense(&rel, 0, 0);
        let ids: Vec<u32> = c.points.iter().map(|p| p.marker_id).collect();
        for p in &c.points {
            prop_assert!(p.position.x.abs() >= eps);
        }
        for m in s.markers() {
            if !ids.contains(&m.id) {
                prop_assert!(rel.transform_point(&m.rest).x.abs() < eps);
            }
        }
    }

    #[test]
    fn sensing_is_deterministic(rel in pose(1e-3, 0.05), seed in any::<u64>()) {
        let cfg = SensorConfig { noise_sigma: 1e-5, ..SensorConfig::default() };
        let s = TactileSensor::new(cfg).unwrap();
        prop_assert_eq!(s.sense(&rel, 3, seed), s.sense(&rel, 3, seed));
    }

    #[test]
    fn predictor_is_exact_on_screws(t in twist(0.2, 2.0), start in pose(1.0, 3.0)) {
        let step = exp_twist(&t, DT);
        let mut prev = start;
        let mut cur = start.compose(&step);
        for _ in 0..200 {
            let t_u = prev.inverse().compose(&cur);
            let truth = cur.compose(&step);
            prop_assert!(close(&predict_next(&cur, &t_u), &truth, 1e-9));
            prev = cur;
            cur = truth;
        }
    }

    #[test]
    fn alpha_never_violates_limits(
        cols in 1usize..8,
        seed in any::<u64>(),
        w in twist(1.0, 5.0),
        beta in 0.1..=1.0f64,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let j = DMatrix::from_fn(6, cols.max(6), |_, _| rng.random_range(-1.0..1.0));
        let limits = JointLimits::new((0..j.ncols()).map(|_| rng.random_range(0.05..3.0)).collect()).unwrap();
        let Ok(qd) = solve_joint_velocities(&j, &w, DEFAULT_RANK_EPS) else { return Ok(()) };
        let a = scale_alpha(&qd, &limits, beta, 1e-9);
        prop_assert!(a > 0.0 && a <= 1.0);
        for (q, m) in qd.iter().zip(&limits.max_abs_velocity) {
            prop_assert!((a * q).abs() <= beta * m + 1e-12);
        }
    }

    #[test]
    fn displacement_is_preserved(w in twist(0.5, 5.0), alpha in 1e-3..=1.0f64) {
        let a = exp_twist(&w.scaled(alpha), DT / alpha);
        prop_assert!(close(&a, &exp_twist(&w, DT), 1e-12));
    }

    #[test]
    fn offset_round_trip(g in pose(1.0, 3.0), req in pose(0.05, 3.0), base in vec3(0.06)) {
        let predicted = g.compose(&req);
        let required = required_transform(&g, &predicted);
        let base = BaseVelocity::linear(base);
        let off = offset_velocity(&required, &base, DT).unwrap();
        let cmd = assemble_command(&off, &base, 1.0, DT);
        prop_assert!(close(&cmd.displacement(), &required, 1e-9));
    }

    #[test]
    fn exact_prediction_needs_no_offset(g in pose(1.0, 3.0), base in twist(0.06, 0.5)) {
        let base = BaseVelocity { twist: base };
        let predicted = g.compose(&exp_twist(&base.twist, DT));
        let off = offset_velocity(&required_transform(&g, &predicted), &base, DT).unwrap();
        prop_assert!(off.norm() < 1e-9);
    }

    #[test]
    fn mode_machine_does_not_chatter(mut xs in proptest::collection::vec(0.0..2.0f64, 2..60), up in any::<bool>()) {
        xs.sort_by(|a, b| a.total_cmp(b));
        if !up {
            xs.reverse();
        }
        let cfg = BaselineConfig::default();
        let mut m = ModeMachine::new(&cfg, 1.0);
        if !up {
            // Start in recovery so the falling edge can release.
            m.update(cfg.trigger_frac);
        }
        let mut switches = 0;
        for &x in &xs {
            let before = m.mode;
            if m.update(x) {
                switches += 1;
                match before {
                    BaselineMode::Execution => prop_assert!(x >= cfg.trigger_frac),
                    BaselineMode::Recovery => prop_assert!(x <= cfg.release_frac),
                }
            }
        }
        prop_assert!(switches <= 1);
    }

    #[test]
    fn projection_never_raises_energy(
        kind in 0usize..2,
        s0 in 0.0..0.2f64,
        push in vec3(0.003),
        twist_angle in -0.05..0.05f64,
    ) {
        let m = if kind == 0 { ArticulationModel::prismatic(0.3) } else { ArticulationModel::revolute(0.3, 1.6) };
        let s = sensor();
        let energy = ContactEnergy::new(s.markers().iter().map(|k| &k.rest));
        let h = m.handle_pose_at(PathState::new(s0)).unwrap();
        let g = h.compose(&Pose::new(proactive_tactile::geom::Rotation::rz(twist_angle), push));
        let e = |st: f64| energy.eval(&g.inverse().compose(&m.handle_pose_at(PathState::new(st)).unwrap()));
        let out = project_to_path(&m, &energy, &g, PathState::new(s0), 0.02);
        prop_assert!(e(out.s) <= e(s0) + 1e-12);
    }
}

#[test]
fn noise_statistics() {
    let sigma = 2e-5;
    let s = TactileSensor::new(SensorConfig { noise_sigma: sigma, ..SensorConfig::default() }).unwrap();
    let clean = TactileSensor::new(SensorConfig::default()).unwrap().sense(&Pose::identity(), 0, 0);
    let mut v = Vec::new();
    let mut seed = 0;
    while v.len() < 100_000 {
        let c = s.sense(&Pose::identity(), seed, 7);
        for (a, b) in correspondences(&clean, &c).pairs {
            v.extend((b.position - a.position).iter().copied());
        }
        seed += 1;
    }
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let sd = (v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt();
    assert!(mean.abs() < 3.0 * sigma / n.sqrt(), "mean {mean}");
    assert!((sd / sigma - 1.0).abs() < 0.05, "sd {sd}");
}

#[test]
fn kabsch_error_shrinks_with_more_points() {
    // Doubling the side of a square marker grid (9 → 36 points) halves the
    // translation error under read noise.
    let sigma = 1e-5;
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let noise = rand_distr::Normal::new(0.0, sigma).unwrap();
    let grid = |n: usize| -> Vec<Vec3> {
        let pitch = 0.012 / (n - 1) as f64;
        (0..n * n)
            .map(|k| Vec3::new(1e-3, (k % n) as f64 * pitch - 0.006, (k / n) as f64 * pitch - 0.006))
            .collect()
    };
    let mut median = |n: usize| -> f64 {
        let src = grid(n);
        let mut errs: Vec<f64> = (0..1000)
            .map(|_| {
                let t = Pose::new(
                    proactive_tactile::geom::Rotation::rz(rng.random_range(-0.1..0.1)),
                    Vec3::new(rng.random_range(-1e-3..1e-3), rng.random_range(-1e-3..1e-3), 0.0),
                );
                let dst: Vec<Vec3> = src
                    .iter()
                    .map(|p| {
                        t.transform_point(p)
                            + Vec3::new(rng.sample(noise), rng.sample(noise), rng.sample(noise))
                    })
                    .collect();
                let r = kabsch_points(&src, &dst, DEFAULT_AREA_EPS).unwrap();
                (r.pose.translation - t.translation).norm()
            })
            .collect();
        errs.sort_by(|a, b| a.total_cmp(b));
        errs[errs.len() / 2]
    };
    let ratio = median(3) / median(6);
    assert!((1.8..=2.2).contains(&ratio), "ratio {ratio}");
}

#[test]
fn prediction_corrects_one_step_after_a_switch() {
    let a = exp_twist(&Twist::new(Vec3::new(0.05, 0.0, 0.0), Vec3::new(0.0, 0.0, 0.3)), DT);
    let b = exp_twist(&Twist::new(Vec3::new(0.0, 0.04, 0.01), Vec3::new(0.2, 0.0, 0.0)), DT);
    let mut traj = vec![Pose::identity()];
    for k in 0..40 {
        let step = if k < 20 { a } else { b };
        traj.push(traj.last().unwrap().compose(&step));
    }
    let mut wrong = Vec::new();
    for k in 1..traj.len() - 1 {
        let t_u = traj[k - 1].inverse().compose(&traj[k]);
        if !close(&predict_next(&traj[k], &t_u), &traj[k + 1], 1e-9) {
            wrong.push(k + 1);
        }
    }
    assert_eq!(wrong, vec![21]);
}

#[test]
fn monotone_drag_on_prismatic() {
    let m = ArticulationModel::prismatic(0.3);
    let s = sensor();
    let energy = ContactEnergy::new(s.markers().iter().map(|k| &k.rest));
    let mut last = -1.0;
    for k in 1..=20 {
        let d = k as f64 * 2e-4;
        let g = m.handle_pose_at(PathState::new(0.1)).unwrap().compose(&Pose::from_translation(Vec3::new(0.0, d, 0.0)));
        let out = project_to_path(&m, &energy, &g, PathState::new(0.1), 0.01);
        assert!(out.s > last, "advance {d}: {} ≤ {last}", out.s);
        last = out.s;
    }
}

#[test]
fn generated_curves_never_self_intersect() {
    let spec = SuiteSpec { prismatic: 0, revolute: 0, bezier: [6; 4], ..SuiteSpec::desk(5) };
    for m in generate_suite(&spec).unwrap() {
        let proactive_tactile::objects::ArticulationKind::Bezier { curve } = &m.kind else { unreachable!() };
        assert!(!proactive_tactile::geom::bezier_self_intersects(curve, 1024), "{}", m.id);
    }
}

#[test]
fn handle_pose_is_continuous() {
    for m in generate_suite(&SuiteSpec { helical: 2, ..SuiteSpec::desk(2) }).unwrap().iter().step_by(5) {
        let (lo, hi) = m.domain();
        for k in 0..200 {
            let s = lo + (hi - lo) * k as f64 / 200.0;
            let a = m.handle_pose_at(PathState::new(s)).unwrap();
            let b = m.handle_pose_at(PathState::new((s + 1e-9).min(hi))).unwrap();
            let (dt, dr) = a.distance(&b);
            assert!(dt < 1e-6 && dr < 1e-6, "{} at {s}", m.id);
        }
    }
}

/// Episode-level invariants on a handful of desk objects with both methods.
#[test]
fn episode_invariants() {
    let suite = generate_suite(&SuiteSpec::desk(4)).unwrap();
    let cfg_base = proactive_tactile::bench::ExperimentConfig::default();
    for m in suite.iter().step_by(9) {
        for method in proactive_tactile::bench::Method::BOTH {
            let cfg: EpisodeConfig = cfg_base.episode(m, method);
            let log = run_episode(m, &RobotModel::default(), &cfg, 3).unwrap();
            let again = run_episode(m, &RobotModel::default(), &cfg, 3).unwrap();
            assert_eq!(log, again, "determinism {}", m.id);

            let mut t = 0.0;
            for r in &log.records[1..] {
                t += r.duration;
            }
            assert_eq!(t, log.final_time(), "time bookkeeping {}", m.id);

            let limits = RobotModel::default().limits().max_abs_velocity.clone();
            for (i, r) in log.records.iter().enumerate().skip(1) {
                for (q, lim) in r.qd.iter().zip(&limits) {
                    assert!(q.abs() <= cfg.control.beta * lim + 1e-12, "limit {} step {i}", m.id);
                }
                let prev = &log.records[i - 1];
                if let Some(est) = &r.handle_estimate {
                    assert!(close(est, &prev.handle, 1e-9), "registration {} step {i}", m.id);
                }
                if method == proactive_tactile::bench::Method::Proactive && prev.s < m.success_threshold() {
                    assert!(r.twist.linear.norm() > 0.0, "halt {} step {i}", m.id);
                }
            }
        }
    }
}

#[test]
fn scale_alpha_on_serial_chain_example() {
    let qd = DVector::from_vec(vec![2.0, -0.5, 0.1]);
    let limits = JointLimits::new(vec![1.0, 1.0, 1.0]).unwrap();
    assert!((scale_alpha(&qd, &limits, 0.9, 1e-9) - 0.45).abs() < 1e-15);
}
