//! Rigid-body primitives: rotations, poses, twists, the SE(3) exponential and
//! logarithm, and Bézier curves in the board plane.
//!
//! Poses are stored as an explicit rotation matrix plus translation so that
//! drift can be measured and projected away; composition re-orthonormalizes
//! whenever the rotation leaves SO(3) by more than [`ORTHONORMAL_TOL`].

use nalgebra::{Matrix3, Vector2, Vector3, Vector6};
use serde::{Deserialize, Serialize};
use std::ops::{Add, Mul, Neg, Sub};

pub type Vec3 = Vector3<f64>;
pub type Vec2 = Vector2<f64>;

/// Maximum tolerated deviation of `RᵀR` from identity before projection.
pub const ORTHONORMAL_TOL: f64 = 1e-9;

/// Below this angle the rotation axis is undefined and reported as `+x`.
pub const ANGLE_EPS: f64 = 1e-7;

/// Default polyline resolution for self-intersection checks.
pub const DEFAULT_INTERSECTION_RESOLUTION: usize = 512;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum GeomError {
    #[error("curve parameter {0} outside [0, 1]")]
    Domain(f64),
    #[error("a Bézier curve needs at least two control points, got {0}")]
    TooFewControlPoints(usize),
    #[error("matrix is not a proper rotation (orthonormality error {0:e})")]
    NotARotation(f64),
}

pub fn skew(v: &Vec3) -> Matrix3<f64> {
    Matrix3::new(0.0, -v.z, v.y, v.z, 0.0, -v.x, -v.y, v.x, 0.0)
}

fn vee(m: &Matrix3<f64>) -> Vec3 {
    Vec3::new(m[(2, 1)], m[(0, 2)], m[(1, 0)])
}

/// Element of SO(3).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotation(Matrix3<f64>);

impl Default for Rotation {
    fn default() -> Self {
        Self::identity()
    }
}

impl Rotation {
    pub fn identity() -> Self {
        Self(Matrix3::identity())
    }

    /// Wraps `m` after checking orthonormality and determinant.
    pub fn from_matrix(m: Matrix3<f64>) -> Result<Self, GeomError> {
        let r = Self(m);
        let err = r.orthonormality_error().max((m.determinant() - 1.0).abs());
        if err > ORTHONORMAL_TOL {
            return Err(GeomError::NotARotation(err));
        }
        Ok(r)
    }

    /// Wraps `m` without validation. Callers guarantee `m ∈ SO(3)`.
    pub fn from_matrix_unchecked(m: Matrix3<f64>) -> Self {
        Self(m)
    }

    /// Builds the rotation whose columns are the given frame axes.
    pub fn from_basis(x: Vec3, y: Vec3, z: Vec3) -> Self {
        Self(Matrix3::from_columns(&[x, y, z]))
    }

    /// Rodrigues' formula for a rotation vector `axis·angle`.
    pub fn from_rotation_vector(w: &Vec3) -> Self {
        let theta = w.norm();
        let k = skew(w);
        let (a, b) = if theta < 1e-5 {
            let t2 = theta * theta;
            (1.0 - t2 / 6.0 + t2 * t2 / 120.0, 0.5 - t2 / 24.0 + t2 * t2 / 720.0)
        } else {
            (theta.sin() / theta, (1.0 - theta.cos()) / (theta * theta))
        };
        Self(Matrix3::identity() + k * a + k * k * b)
    }

    pub fn from_axis_angle(axis: &Vec3, angle: f64) -> Self {
        Self::from_rotation_vector(&(axis.normalize() * angle))
    }

    pub fn rx(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self(Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c))
    }

    pub fn ry(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self(Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c))
    }

    pub fn rz(angle: f64) -> Self {
        let (s, c) = angle.sin_cos();
        Self(Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0))
    }

    pub fn matrix(&self) -> &Matrix3<f64> {
        &self.0
    }

    pub fn inverse(&self) -> Self {
        Self(self.0.transpose())
    }

    pub fn apply(&self, v: &Vec3) -> Vec3 {
        self.0 * v
    }

    /// Largest entry of `|RᵀR − I|`.
    pub fn orthonormality_error(&self) -> f64 {
        (self.0.transpose() * self.0 - Matrix3::identity()).abs().max()
    }

    /// Projects onto SO(3) through the polar factor `U Vᵀ` of the SVD.
    pub fn orthonormalized(&self) -> Self {
        let svd = self.0.svd(true, true);
        let (u, v_t) = (svd.u.unwrap(), svd.v_t.unwrap());
        let mut d = Matrix3::identity();
        if (u * v_t).determinant() < 0.0 {
            d[(2, 2)] = -1.0;
        }
        Self(u * d * v_t)
    }

    fn orthonormalized_if_drifted(self) -> Self {
        if self.orthonormality_error() > ORTHONORMAL_TOL {
            self.orthonormalized()
        } else {
            self
        }
    }

    /// Rotation angle in `[0, π]`, numerically stable near both ends.
    pub fn angle(&self) -> f64 {
        let sin_part = vee(&(self.0 - self.0.transpose())).norm() * 0.5;
        let cos_part = 0.5 * (self.0.trace() - 1.0);
        sin_part.atan2(cos_part)
    }

    /// Rotation vector `θ·ω̂` with `θ ∈ [0, π]`.
    pub fn log_vector(&self) -> Vec3 {
        let w = vee(&(self.0 - self.0.transpose())) * 0.5; // sin θ · axis
        let theta = self.angle();
        if theta < 1e-5 {
            let t2 = theta * theta;
            return w * (1.0 + t2 / 6.0 + 7.0 * t2 * t2 / 360.0);
        }
        if theta < 2.5 {
            return w * (theta / theta.sin());
        }
        // Near π: the symmetric part carries the axis, the skew part only its sign.
        let c = theta.cos();
        let sym = (self.0 + self.0.transpose() - Matrix3::identity() * (2.0 * c)) / (2.0 * (1.0 - c));
        let j = (0..3)
            .max_by(|&a, &b| sym[(a, a)].total_cmp(&sym[(b, b)]))
            .unwrap_or(0);
        let mut axis = sym.column(j).into_owned().normalize();
        if axis.dot(&w) < 0.0 {
            axis = -axis;
        }
        axis * theta
    }
}

impl Mul for Rotation {
    type Output = Rotation;
    fn mul(self, rhs: Rotation) -> Rotation {
        Rotation(self.0 * rhs.0).orthonormalized_if_drifted()
    }
}

/// Unit rotation axis and angle in `[0, π]`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AxisAngle {
    pub axis: Vec3,
    pub angle: f64,
}

impl AxisAngle {
    pub fn to_rotation(&self) -> Rotation {
        Rotation::from_axis_angle(&self.axis, self.angle)
    }
}

/// Rigid transform in SE(3).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Pose {
    pub rotation: Rotation,
    pub translation: Vec3,
}

impl Pose {
    pub fn new(rotation: Rotation, translation: Vec3) -> Self {
        Self {
            rotation,
            translation,
        }
    }

    pub fn identity() -> Self {
        Self::default()
    }

    pub fn from_translation(t: Vec3) -> Self {
        Self::new(Rotation::identity(), t)
    }

    pub fn from_rotation(r: Rotation) -> Self {
        Self::new(r, Vec3::zeros())
    }

    pub fn translation_xyz(x: f64, y: f64, z: f64) -> Self {
        Self::from_translation(Vec3::new(x, y, z))
    }

    pub fn compose(&self, other: &Pose) -> Pose {
        compose(self, other)
    }

    pub fn inverse(&self) -> Pose {
        inverse(self)
    }

    pub fn transform_point(&self, p: &Vec3) -> Vec3 {
        self.rotation.apply(p) + self.translation
    }

    /// Translation distance and rotation angle between two poses.
    pub fn distance(&self, other: &Pose) -> (f64, f64) {
        let d = self.inverse().compose(other);
        ((self.translation - other.translation).norm(), d.rotation.angle())
    }

    /// Row-major 3×3 rotation entries.
    pub fn rotation_row_major(&self) -> [f64; 9] {
        let m = self.rotation.matrix();
        [
            m[(0, 0)],
            m[(0, 1)],
            m[(0, 2)],
            m[(1, 0)],
            m[(1, 1)],
            m[(1, 2)],
            m[(2, 0)],
            m[(2, 1)],
            m[(2, 2)],
        ]
    }
}

impl Mul for Pose {
    type Output = Pose;
    fn mul(self, rhs: Pose) -> Pose {
        compose(&self, &rhs)
    }
}

/// Serialized as `{"p": [x, y, z], "r": [row-major 3×3]}`.
#[derive(Serialize, Deserialize)]
struct PoseRepr {
    p: [f64; 3],
    r: [f64; 9],
}

impl Serialize for Pose {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        PoseRepr {
            p: [self.translation.x, self.translation.y, self.translation.z],
            r: self.rotation_row_major(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Pose {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = PoseRepr::deserialize(d)?;
        let m = Matrix3::from_row_slice(&repr.r);
        Ok(Pose::new(
            Rotation::from_matrix_unchecked(m),
            Vec3::from(repr.p),
        ))
    }
}

/// Spatial velocity `[v; ω]`, expressed in whichever frame the caller states.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Twist {
    #[serde(with = "vec3_array")]
    pub linear: Vec3,
    #[serde(with = "vec3_array")]
    pub angular: Vec3,
}

impl Twist {
    pub fn new(linear: Vec3, angular: Vec3) -> Self {
        Self { linear, angular }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_linear(linear: Vec3) -> Self {
        Self::new(linear, Vec3::zeros())
    }

    pub fn scaled(&self, k: f64) -> Self {
        Self::new(self.linear * k, self.angular * k)
    }

    pub fn to_vector(&self) -> Vector6<f64> {
        Vector6::new(
            self.linear.x,
            self.linear.y,
            self.linear.z,
            self.angular.x,
            self.angular.y,
            self.angular.z,
        )
    }

    pub fn from_vector(v: &Vector6<f64>) -> Self {
        Self::new(Vec3::new(v[0], v[1], v[2]), Vec3::new(v[3], v[4], v[5]))
    }

    pub fn norm(&self) -> f64 {
        self.to_vector().norm()
    }

    pub fn is_finite(&self) -> bool {
        self.to_vector().iter().all(|x| x.is_finite())
    }
}

impl Add for Twist {
    type Output = Twist;
    fn add(self, rhs: Twist) -> Twist {
        Twist::new(self.linear + rhs.linear, self.angular + rhs.angular)
    }
}

impl Sub for Twist {
    type Output = Twist;
    fn sub(self, rhs: Twist) -> Twist {
        Twist::new(self.linear - rhs.linear, self.angular - rhs.angular)
    }
}

impl Neg for Twist {
    type Output = Twist;
    fn neg(self) -> Twist {
        self.scaled(-1.0)
    }
}

pub(crate) mod vec3_array {
    use super::Vec3;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &Vec3, s: S) -> Result<S::Ok, S::Error> {
        [v.x, v.y, v.z].serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec3, D::Error> {
        let a = <[f64; 3]>::deserialize(d)?;
        Ok(Vec3::from(a))
    }
}

pub fn compose(a: &Pose, b: &Pose) -> Pose {
    Pose::new(
        a.rotation * b.rotation,
        a.rotation.apply(&b.translation) + a.translation,
    )
}

pub fn inverse(p: &Pose) -> Pose {
    let r_inv = p.rotation.inverse();
    Pose::new(r_inv, -r_inv.apply(&p.translation))
}

/// Exact SE(3) exponential of `t·dt`: Rodrigues for the rotation and the
/// left Jacobian `V(θ)` for the screw translation.
pub fn exp_twist(t: &Twist, dt: f64) -> Pose {
    let rho = t.linear * dt;
    let phi = t.angular * dt;
    let theta = phi.norm();
    let k = skew(&phi);
    let (a, b, c) = if theta < 1e-5 {
        let t2 = theta * theta;
        (
            1.0 - t2 / 6.0 + t2 * t2 / 120.0,
            0.5 - t2 / 24.0 + t2 * t2 / 720.0,
            1.0 / 6.0 - t2 / 120.0 + t2 * t2 / 5040.0,
        )
    } else {
        let (s, co) = theta.sin_cos();
        let t2 = theta * theta;
        (s / theta, (1.0 - co) / t2, (theta - s) / (t2 * theta))
    };
    let k2 = k * k;
    let r = Matrix3::identity() + k * a + k2 * b;
    let v = Matrix3::identity() + k * b + k2 * c;
    Pose::new(Rotation::from_matrix_unchecked(r), v * rho)
}

/// SE(3) logarithm: the unit-time twist whose exponential is `p`.
pub fn log_pose(p: &Pose) -> Twist {
    let phi = p.rotation.log_vector();
    let theta = phi.norm();
    let k = skew(&phi);
    let d = if theta < 1e-4 {
        let t2 = theta * theta;
        1.0 / 12.0 + t2 / 720.0 + t2 * t2 / 30240.0
    } else {
        let (s, c) = theta.sin_cos();
        (1.0 - theta * s / (2.0 * (1.0 - c))) / (theta * theta)
    };
    let v_inv = Matrix3::identity() - k * 0.5 + k * k * d;
    Twist::new(v_inv * p.translation, phi)
}

/// Axis–angle decomposition; the axis defaults to `+x` below [`ANGLE_EPS`].
pub fn log_rotation(r: &Rotation) -> AxisAngle {
    let w = r.log_vector();
    let angle = w.norm();
    if angle < ANGLE_EPS {
        AxisAngle {
            axis: Vec3::x(),
            angle,
        }
    } else {
        AxisAngle {
            axis: w / angle,
            angle,
        }
    }
}

/// Bézier curve in the board plane.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BezierCurve {
    #[serde(with = "vec2_list")]
    control_points: Vec<Vec2>,
}

mod vec2_list {
    use super::Vec2;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};

    pub fn serialize<S: Serializer>(v: &[Vec2], s: S) -> Result<S::Ok, S::Error> {
        v.iter().map(|p| [p.x, p.y]).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<Vec2>, D::Error> {
        let raw = Vec::<[f64; 2]>::deserialize(d)?;
        Ok(raw.into_iter().map(Vec2::from).collect())
    }
}

fn binomial(n: usize, k: usize) -> f64 {
    (0..k).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

fn bernstein_sum(points: &[Vec2], s: f64) -> Vec2 {
    let n = points.len() - 1;
    points.iter().enumerate().fold(Vec2::zeros(), |acc, (i, b)| {
        acc + b * (binomial(n, i) * s.powi(i as i32) * (1.0 - s).powi((n - i) as i32))
    })
}

impl BezierCurve {
    pub fn new(control_points: Vec<Vec2>) -> Result<Self, GeomError> {
        if control_points.len() < 2 {
            return Err(GeomError::TooFewControlPoints(control_points.len()));
        }
        Ok(Self { control_points })
    }

    pub fn order(&self) -> usize {
        self.control_points.len() - 1
    }

    pub fn control_points(&self) -> &[Vec2] {
        &self.control_points
    }

    pub fn reversed(&self) -> Self {
        let mut pts = self.control_points.clone();
        pts.reverse();
        Self {
            control_points: pts,
        }
    }

    pub fn eval(&self, s: f64) -> Result<Vec2, GeomError> {
        bezier_eval(self, s)
    }

    fn hodograph(points: &[Vec2]) -> Vec<Vec2> {
        let n = (points.len() - 1) as f64;
        points.windows(2).map(|w| (w[1] - w[0]) * n).collect()
    }

    /// `dB/ds` by order reduction. Zero for a degenerate single-point curve.
    pub fn derivative(&self, s: f64) -> Vec2 {
        let h = Self::hodograph(&self.control_points);
        bernstein_sum(&h, s.clamp(0.0, 1.0))
    }

    pub fn second_derivative(&self, s: f64) -> Vec2 {
        let h = Self::hodograph(&self.control_points);
        if h.len() < 2 {
            return Vec2::zeros();
        }
        bernstein_sum(&Self::hodograph(&h), s.clamp(0.0, 1.0))
    }

    /// Signed curvature `κ = (x′y″ − y′x″)/|B′|³`.
    pub fn curvature(&self, s: f64) -> f64 {
        let d1 = self.derivative(s);
        let d2 = self.second_derivative(s);
        let speed = d1.norm();
        (d1.x * d2.y - d1.y * d2.x) / (speed * speed * speed)
    }

    /// Arc length by composite Simpson over `2·n` panels.
    pub fn arc_length(&self, panels: usize) -> f64 {
        let n = panels.max(1) * 2;
        let h = 1.0 / n as f64;
        let mut acc = self.derivative(0.0).norm() + self.derivative(1.0).norm();
        for k in 1..n {
            let w = if k % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * self.derivative(k as f64 * h).norm();
        }
        acc * h / 3.0
    }

    pub fn sample(&self, resolution: usize) -> Vec<Vec2> {
        let last = (resolution.max(2) - 1) as f64;
        (0..resolution.max(2))
            .map(|k| bernstein_sum(&self.control_points, k as f64 / last))
            .collect()
    }
}

pub fn bezier_eval(c: &BezierCurve, s: f64) -> Result<Vec2, GeomError> {
    if !(0.0..=1.0).contains(&s) {
        return Err(GeomError::Domain(s));
    }
    Ok(bernstein_sum(&c.control_points, s))
}

fn orient(a: &Vec2, b: &Vec2, c: &Vec2) -> f64 {
    (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x)
}

fn on_segment(a: &Vec2, b: &Vec2, p: &Vec2) -> bool {
    p.x >= a.x.min(b.x) && p.x <= a.x.max(b.x) && p.y >= a.y.min(b.y) && p.y <= a.y.max(b.y)
}

/// Closed-segment intersection test, including touching and collinear overlap.
pub fn segments_intersect(p1: &Vec2, p2: &Vec2, q1: &Vec2, q2: &Vec2) -> bool {
    let d1 = orient(q1, q2, p1);
    let d2 = orient(q1, q2, p2);
    let d3 = orient(p1, p2, q1);
    let d4 = orient(p1, p2, q2);
    if ((d1 > 0.0 && d2 < 0.0) || (d1 < 0.0 && d2 > 0.0))
        && ((d3 > 0.0 && d4 < 0.0) || (d3 < 0.0 && d4 > 0.0))
    {
        return true;
    }
    (d1 == 0.0 && on_segment(q1, q2, p1))
        || (d2 == 0.0 && on_segment(q1, q2, p2))
        || (d3 == 0.0 && on_segment(p1, p2, q1))
        || (d4 == 0.0 && on_segment(p1, p2, q2))
}

/// True iff the curve sampled at `resolution` points has two non-adjacent
/// polyline segments that touch.
pub fn bezier_self_intersects(c: &BezierCurve, resolution: usize) -> bool {
    let pts = c.sample(resolution.max(16));
    let segs = pts.len() - 1;
    let boxes: Vec<(Vec2, Vec2)> = pts
        .windows(2)
        .map(|w| (w[0].inf(&w[1]), w[0].sup(&w[1])))
        .collect();
    for i in 0..segs {
        for j in (i + 2)..segs {
            let (lo_a, hi_a) = &boxes[i];
            let (lo_b, hi_b) = &boxes[j];
            if lo_a.x > hi_b.x || lo_b.x > hi_a.x || lo_a.y > hi_b.y || lo_b.y > hi_a.y {
                continue;
            }
            if segments_intersect(&pts[i], &pts[i + 1], &pts[j], &pts[j + 1]) {
                return true;
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn pose_close(a: &Pose, b: &Pose, tol: f64) -> bool {
        (a.translation - b.translation).abs().max() < tol
            && (a.rotation.matrix() - b.rotation.matrix()).abs().max() < tol
    }

    #[test]
    fn compose_identity_and_inverse() {
        let p = Pose::new(Rotation::from_axis_angle(&Vec3::new(1.0, 2.0, 3.0), 0.7), Vec3::new(0.1, -0.2, 0.3));
        assert!(pose_close(&compose(&Pose::identity(), &p), &p, 0.0 + 1e-15));
        assert!(pose_close(&compose(&p, &inverse(&p)), &Pose::identity(), 1e-12));
        let t = compose(&Pose::translation_xyz(1.0, 0.0, 0.0), &Pose::translation_xyz(0.0, 2.0, 0.0));
        assert!(pose_close(&t, &Pose::translation_xyz(1.0, 2.0, 0.0), 1e-15));
    }

    #[test]
    fn inverse_examples() {
        assert!(pose_close(&inverse(&Pose::identity()), &Pose::identity(), 0.0 + 1e-300));
        assert!(pose_close(
            &inverse(&Pose::translation_xyz(1.0, 2.0, 3.0)),
            &Pose::translation_xyz(-1.0, -2.0, -3.0),
            1e-15
        ));
        let r = Pose::from_rotation(Rotation::rz(PI / 6.0));
        let inv = inverse(&r);
        assert!(inv.rotation.orthonormality_error() < 1e-15);
        assert!(pose_close(&inv, &Pose::from_rotation(Rotation::rz(-PI / 6.0)), 1e-15));
        assert!(pose_close(&compose(&inv, &r), &Pose::identity(), 1e-15));
    }

    #[test]
    fn exp_twist_examples() {
        let any = Twist::new(Vec3::new(1.0, 2.0, 3.0), Vec3::new(0.3, -0.2, 0.9));
        assert!(pose_close(&exp_twist(&any, 0.0), &Pose::identity(), 0.0 + 1e-300));
        let pure = exp_twist(&Twist::from_linear(Vec3::x()), 0.5);
        assert!(pose_close(&pure, &Pose::translation_xyz(0.5, 0.0, 0.0), 1e-15));

        // Direct Rodrigues: R = I + sin θ K + (1 − cos θ) K², K = [ẑ]×, θ = π/2.
        let k = skew(&Vec3::z());
        let direct = Matrix3::identity() + k * (PI / 2.0).sin() + k * k * (1.0 - (PI / 2.0).cos());
        let rot = exp_twist(&Twist::new(Vec3::zeros(), Vec3::new(0.0, 0.0, PI)), 0.5);
        assert!((rot.rotation.matrix() - direct).abs().max() < 1e-15);
        assert!(rot.translation.norm() < 1e-15);
    }

    #[test]
    fn exp_twist_screw_translation_matches_integral() {
        // Integrate ṗ = R(t) v with R(t) = exp(t[ω]) by fine midpoint quadrature.
        let w = Twist::new(Vec3::new(0.2, -0.1, 0.4), Vec3::new(0.5, 1.1, -0.7));
        let dt = 0.8;
        let n = 20_000;
        let h = dt / n as f64;
        let mut p = Vec3::zeros();
        for k in 0..n {
            let t = (k as f64 + 0.5) * h;
            p += Rotation::from_rotation_vector(&(w.angular * t)).apply(&w.linear) * h;
        }
        let e = exp_twist(&w, dt);
        assert!((e.translation - p).norm() < 1e-8);
    }

    #[test]
    fn log_rotation_examples() {
        let id = log_rotation(&Rotation::identity());
        assert_eq!(id.axis, Vec3::x());
        assert_eq!(id.angle, 0.0);

        let q = log_rotation(&Rotation::rz(PI / 2.0));
        assert_abs_diff_eq!(q.angle, PI / 2.0, epsilon = 1e-15);
        assert_abs_diff_eq!((q.axis - Vec3::z()).norm(), 0.0, epsilon = 1e-15);

        let flip = Rotation::from_matrix(Matrix3::from_diagonal(&Vec3::new(1.0, -1.0, -1.0))).unwrap();
        let h = log_rotation(&flip);
        assert_abs_diff_eq!(h.angle, PI, epsilon = 1e-15);
        assert_abs_diff_eq!(h.axis.x.abs(), 1.0, epsilon = 1e-15);
        let back = Rotation::from_axis_angle(&Vec3::x(), PI);
        assert!((back.matrix() - flip.matrix()).abs().max() < 1e-15);
        assert!((h.to_rotation().matrix() - flip.matrix()).abs().max() < 1e-15);
    }

    #[test]
    fn log_rotation_near_pi_is_stable() {
        for &axis in &[Vec3::new(0.3, -0.5, 0.8), Vec3::new(-1.0, 0.1, 0.0), Vec3::new(0.0, 0.0, 1.0)] {
            for &angle in &[PI, PI - 1e-9, PI - 1e-6, PI - 0.3, 3.0] {
                let r = Rotation::from_axis_angle(&axis, angle);
                let back = log_rotation(&r).to_rotation();
                assert!((back.matrix() - r.matrix()).abs().max() < 1e-9, "angle {angle}");
            }
        }
    }

    #[test]
    fn log_pose_inverts_exp() {
        let w = Twist::new(Vec3::new(0.01, 0.3, -0.2), Vec3::new(0.0, 0.0, 2.9));
        let p = exp_twist(&w, 1.0);
        let l = log_pose(&p);
        assert!((l - w).norm() < 1e-12);
    }

    #[test]
    fn orthonormalize_removes_drift() {
        let mut m = *Rotation::rz(0.4).matrix();
        m[(0, 1)] += 1e-6;
        let r = Rotation::from_matrix_unchecked(m);
        assert!(r.orthonormality_error() > 1e-9);
        let fixed = r * Rotation::identity();
        assert!(fixed.orthonormality_error() < 1e-14);
        assert!((fixed.matrix().determinant() - 1.0).abs() < 1e-14);
    }

    #[test]
    fn bezier_eval_examples() {
        let c = BezierCurve::new(vec![Vec2::new(0.0, 0.0), Vec2::new(1.0, 0.0), Vec2::new(1.0, 1.0)]).unwrap();
        assert_eq!(bezier_eval(&c, 0.0).unwrap(), Vec2::new(0.0, 0.0));
        assert_eq!(bezier_eval(&c, 1.0).unwrap(), Vec2::new(1.0, 1.0));
        // (1−s)²·b0 + 2s(1−s)·b1 + s²·b2 at s = ½.
        let mid = bezier_eval(&c, 0.5).unwrap();
        assert_abs_diff_eq!(mid.x, 0.75, epsilon = 1e-15);
        assert_abs_diff_eq!(mid.y, 0.25, epsilon = 1e-15);
        assert!(matches!(bezier_eval(&c, 1.5), Err(GeomError::Domain(_))));
        assert!(matches!(bezier_eval(&c, -1e-9), Err(GeomError::Domain(_))));
    }

    #[test]
    fn bezier_needs_two_points() {
        assert!(BezierCurve::new(vec![Vec2::zeros()]).is_err());
    }

    /// Independent crossing check: brute-force segment pairs with explicit
    /// parametric solving instead of orientation predicates.
    fn oracle_polyline_crosses(pts: &[Vec2]) -> bool {
        let n = pts.len() - 1;
        for i in 0..n {
            for j in (i + 2)..n {
                let (p, r) = (pts[i], pts[i + 1] - pts[i]);
                let (q, s) = (pts[j], pts[j + 1] - pts[j]);
                let denom = r.x * s.y - r.y * s.x;
                if denom.abs() < 1e-300 {
                    continue;
                }
                let qp = q - p;
                let t = (qp.x * s.y - qp.y * s.x) / denom;
                let u = (qp.x * r.y - qp.y * r.x) / denom;
                if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u) {
                    return true;
                }
            }
        }
        false
    }

    #[test]
    fn self_intersection_examples() {
        let line = BezierCurve::new((0..5).map(|i| Vec2::new(i as f64, 2.0 * i as f64)).collect()).unwrap();
        assert!(!bezier_self_intersects(&line, 512));

        // Control polygon crossing itself produces a loop.
        let eight = BezierCurve::new(vec![
            Vec2::new(0.0, 0.0),
            Vec2::new(2.0, 1.0),
            Vec2::new(-1.0, 1.0),
            Vec2::new(1.0, 0.0),
        ])
        .unwrap();
        assert!(oracle_polyline_crosses(&eight.sample(512)));
        assert!(bezier_self_intersects(&eight, 512));

        let quad = BezierCurve::new(vec![Vec2::new(0.0, 0.0), Vec2::new(3.0, 5.0), Vec2::new(-1.0, 0.2)]).unwrap();
        assert!(!oracle_polyline_crosses(&quad.sample(1024)));
        assert!(!bezier_self_intersects(&quad, 1024));
    }

    fn arb_twist() -> impl Strategy<Value = Twist> {
        (prop::array::uniform3(-1.0..1.0f64), prop::array::uniform3(-10.0..10.0f64))
            .prop_map(|(v, w)| Twist::new(Vec3::from(v), Vec3::from(w)))
    }

    fn arb_pose() -> impl Strategy<Value = Pose> {
        (prop::array::uniform3(-1.0..1.0f64), prop::array::uniform3(-3.0..3.0f64))
            .prop_map(|(t, w)| Pose::new(Rotation::from_rotation_vector(&Vec3::from(w)), Vec3::from(t)))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(10_000))]
        #[test]
        fn exp_angle_recovered_by_log(t in arb_twist(), dt in 1e-6..0.1f64) {
            let expected = t.angular.norm() * dt;
            prop_assume!(expected < PI);
            let got = log_rotation(&exp_twist(&t, dt).rotation).angle;
            prop_assert!((got - expected).abs() < 1e-8);
        }
    }

    proptest! {
        #[test]
        fn group_laws(a in arb_pose(), b in arb_pose(), c in arb_pose()) {
            let left = compose(&compose(&a, &b), &c);
            let right = compose(&a, &compose(&b, &c));
            prop_assert!(pose_close(&left, &right, 1e-10));
            prop_assert!(pose_close(&compose(&a, &inverse(&a)), &Pose::identity(), 1e-10));
            prop_assert!(pose_close(&compose(&inverse(&a), &a), &Pose::identity(), 1e-10));
        }

        #[test]
        fn bernstein_reversal_symmetry(
            pts in prop::collection::vec(prop::array::uniform2(-1.0..1.0f64), 2..7),
            s in 0.0..=1.0f64,
        ) {
            let c = BezierCurve::new(pts.into_iter().map(Vec2::from).collect()).unwrap();
            let a = c.eval(s).unwrap();
            let b = c.reversed().eval(1.0 - s).unwrap();
            prop_assert!((a - b).norm() < 1e-12);
        }

        #[test]
        fn derivative_matches_central_difference(
            pts in prop::collection::vec(prop::array::uniform2(-1.0..1.0f64), 2..7),
            s in 0.01..0.99f64,
        ) {
            let c = BezierCurve::new(pts.into_iter().map(Vec2::from).collect()).unwrap();
            let h = 1e-6;
            let fd = (c.eval(s + h).unwrap() - c.eval(s - h).unwrap()) / (2.0 * h);
            prop_assert!((fd - c.derivative(s)).norm() < 1e-6);
        }

        #[test]
        fn log_pose_round_trip(
            v in prop::array::uniform3(-1.0..1.0f64),
            w in prop::array::uniform3(-1.7..1.7f64),
        ) {
            let t = Twist::new(Vec3::from(v), Vec3::from(w));
            let p = exp_twist(&t, 1.0);
            let back = exp_twist(&log_pose(&p), 1.0);
            prop_assert!(pose_close(&p, &back, 1e-9));
        }
    }
}
