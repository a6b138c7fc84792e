//! Proactive control against the reactive execution/recovery baseline.

use proactive_tactile::bench::metrics::{metric_action_efficiency, metric_jerk, JerkAggregation};
use proactive_tactile::control::{BaseVelocity, ControlMode};
use proactive_tactile::geom::Vec3;
use proactive_tactile::objects::ArticulationModel;
use proactive_tactile::sim::{run_episode, EpisodeConfig, RobotModel};

fn main() {
    let objects = [
        ArticulationModel::prismatic(0.3),
        ArticulationModel::revolute(0.3, 1.6),
    ];
    // A rough 8° error in the initial direction.
    let theta = 8f64.to_radians();
    let base = BaseVelocity::linear(Vec3::new(0.0, theta.cos(), theta.sin()) * 0.05);

    println!("{:10} {:9} {:>8} {:>7} {:>9} {:>7} {:>9} {:>10}", "object", "method", "outcome", "steps", "time_s", "eff_%", "rsd", "jerk");
    for (name, m) in ["prismatic", "revolute"].iter().zip(&objects) {
        for mode in [ControlMode::Proactive, ControlMode::ReactiveBaseline] {
            let cfg = EpisodeConfig { base, ..EpisodeConfig::default().with_mode(mode) };
            let log = run_episode(m, &RobotModel::default(), &cfg, 0).unwrap();
            let (eff, rsd) = metric_action_efficiency(&log).unwrap();
            let jerk = metric_jerk(&log, JerkAggregation::Mean).unwrap();
            println!(
                "{name:10} {:9} {:>8} {:>7} {:>9.2} {eff:>7.3} {rsd:>9.3} {jerk:>10.3}  recoveries {}",
                mode.label(),
                log.outcome().to_string(),
                log.steps(),
                log.final_time(),
                log.header.recoveries
            );
        }
    }
}
