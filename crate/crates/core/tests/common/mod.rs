#![allow(dead_code)]

use proactive_tactile::geom::{Pose, Rotation, Twist, Vec3};
use proptest::prelude::*;

pub fn vec3(r: f64) -> impl Strategy<Value = Vec3> {
    (-r..r, -r..r, -r..r).prop_map(|(x, y, z)| Vec3::new(x, y, z))
}

pub fn twist(lin: f64, ang: f64) -> impl Strategy<Value = Twist> {
    (vec3(lin), vec3(ang)).prop_map(|(v, w)| Twist::new(v, w))
}

/// Rotation with angle below `max_angle`.
pub fn rotation(max_angle: f64) -> impl Strategy<Value = Rotation> {
    (vec3(1.0), 0.0..max_angle).prop_map(|(axis, a)| {
        let axis = if axis.norm() < 1e-3 { Vec3::x() } else { axis.normalize() };
        Rotation::from_axis_angle(&axis, a)
    })
}

pub fn pose(trans: f64, max_angle: f64) -> impl Strategy<Value = Pose> {
    (rotation(max_angle), vec3(trans)).prop_map(|(r, t)| Pose::new(r, t))
}

pub fn close(a: &Pose, b: &Pose, tol: f64) -> bool {
    let (dt, dr) = a.distance(b);
    dt <= tol && dr <= tol
}
