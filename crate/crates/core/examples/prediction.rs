//! Constant-velocity handle prediction along a door swing.

use proactive_tactile::estimation::{compute_motion_delta, predict_next, HandleHistory};
use proactive_tactile::objects::{ArticulationModel, PathState};

fn main() {
    let door = ArticulationModel::revolute(0.35, 1.6);
    let ds = 0.05 / 60.0 / 0.35;

    let mut history = HandleHistory::new();
    let mut worst: f64 = 0.0;
    for step in 1..=120u64 {
        let s = ds * step as f64;
        let pose = door.handle_pose_at(PathState::new(s)).unwrap();
        history.push(step, pose).unwrap();
        if history.len() < 2 {
            continue;
        }
        let delta = compute_motion_delta(&history).unwrap();
        let predicted = predict_next(&pose, &delta);
        let truth = door.handle_pose_at(PathState::new(s + ds)).unwrap();
        let (dt, dr) = predicted.distance(&truth);
        worst = worst.max(dt).max(dr);
        if step % 30 == 0 {
            println!("step {step:3}: predicted handle at {:?}, error {dt:.1e} m", predicted.translation.as_slice());
        }
    }
    println!("worst one-step prediction error on the arc: {worst:.1e}");
}
