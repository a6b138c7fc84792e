//! A 7-joint arm opening a door: joint limits force α < 1 on fast corrections.

use proactive_tactile::control::JointLimits;
use proactive_tactile::objects::ArticulationModel;
use proactive_tactile::sim::{run_episode, EpisodeConfig, RobotModel, SerialChain};

fn main() {
    let mut chain = SerialChain::seven_dof();
    // Tight limits on the wrist joints.
    chain.limits = JointLimits::new(vec![1.0, 1.0, 1.0, 1.0, 0.15, 0.15, 0.15]).unwrap();
    let home = chain.forward(&chain.q0);
    let robot = RobotModel::SerialChain(chain);
    let door = ArticulationModel::revolute(0.25, 1.6).placed_at(&home);

    let log = run_episode(&door, &robot, &EpisodeConfig::default(), 0).unwrap();
    let scaled: Vec<_> = log.records[1..].iter().filter(|r| r.alpha < 1.0).collect();
    let min_alpha = scaled.iter().map(|r| r.alpha).fold(1.0, f64::min);
    println!("{} in {} steps, {:.2} s of model time", log.outcome(), log.steps(), log.final_time());
    println!("{} steps were slowed down, smallest α = {min_alpha:.3}", scaled.len());

    let lim = &robot.limits().max_abs_velocity;
    let peak: Vec<f64> = (0..lim.len())
        .map(|j| log.records.iter().map(|r| r.qd[j].abs() / lim[j]).fold(0.0, f64::max))
        .collect();
    println!("peak |q̇|/q̇_max per joint: {peak:.3?}");
}
