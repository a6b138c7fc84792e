//! One proactive episode on a generated Bézier track, printed step by step.

use proactive_tactile::bench::ExperimentConfig;
use proactive_tactile::bench::Method;
use proactive_tactile::objects::{generate_suite, SuiteSpec};
use proactive_tactile::sim::{run_episode, RobotModel};

fn main() {
    let spec = SuiteSpec { prismatic: 0, revolute: 0, bezier: [0, 1, 0, 0], ..SuiteSpec::desk(42) };
    let object = generate_suite(&spec).unwrap().remove(0);
    let cfg = ExperimentConfig::default();
    let episode = cfg.episode(&object, Method::Proactive);
    println!(
        "{}: base velocity {:.1}° off the start tangent",
        object.id,
        cfg.base.angle_for(&object)
    );

    let log = run_episode(&object, &RobotModel::default(), &episode, 0).unwrap();
    for r in log.records.iter().step_by(60) {
        println!(
            "t={:6.3}s s={:.4} |twist|={:.4} α={:.2} deviation mean {:.3} mm max {:.3} mm [{}]",
            r.t,
            r.s,
            r.twist.norm(),
            r.alpha,
            r.dev_mean * 1e3,
            r.dev_max * 1e3,
            r.mode
        );
    }
    println!("{} after {} steps, {:.2} s", log.outcome(), log.steps(), log.final_time());
}
