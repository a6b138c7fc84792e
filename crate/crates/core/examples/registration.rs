//! Recover a handle-in-gripper pose from tactile marker positions.

use proactive_tactile::contact::{correspondences, deviation_stats, TactileSensor, SensorConfig};
use proactive_tactile::estimation::{kabsch, validate_contact, DEFAULT_AREA_EPS};
use proactive_tactile::geom::{Pose, Rotation, Vec3};

fn main() {
    let sensor = TactileSensor::new(SensorConfig::default()).unwrap();
    let reference = sensor.sense(&Pose::identity(), 0, 0);

    // The handle has rotated 1.5° and slid 0.3 mm inside the grip.
    let rel = Pose::new(Rotation::rx(1.5f64.to_radians()), Vec3::new(0.0, 3e-4, -1e-4));
    let current = sensor.sense(&rel, 1, 0);

    let report = validate_contact(&current, DEFAULT_AREA_EPS);
    println!(
        "{} active markers, min triangle area {:.2e} m², registrable: {}",
        current.len(),
        report.min_triangle_area,
        report.is_valid()
    );

    let dev = deviation_stats(&reference, &current).unwrap();
    println!("deviation mean {:.3} mm, max {:.3} mm", dev.mean_norm * 1e3, dev.max_norm * 1e3);

    let reg = kabsch(&correspondences(&reference, &current)).unwrap();
    let (dt, dr) = reg.pose.distance(&rel);
    println!("estimated translation {:?}", reg.pose.translation.as_slice());
    println!("estimated angle {:.4}°", reg.pose.rotation.angle().to_degrees());
    println!("error {dt:.1e} m / {dr:.1e} rad, rms residual {:.1e} m", reg.rms_residual);
}
