//! In-hand pose estimation from contact correspondences and constant-velocity
//! prediction of the next handle pose.

use crate::contact::{ContactState, CorrespondenceSet};
use crate::geom::{compose, inverse, Pose, Rotation, Vec3};
use nalgebra::Matrix3;
use std::collections::VecDeque;

/// Collinearity threshold on triangle area, m².
pub const DEFAULT_AREA_EPS: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum EstimationError {
    #[error("degenerate contact: {0}")]
    DegenerateContact(&'static str),
    #[error("insufficient history: need two estimates, have {0}")]
    InsufficientHistory(usize),
    #[error("history steps must be consecutive (got {prev} then {cur})")]
    NonConsecutive { prev: u64, cur: u64 },
    #[error("history steps must strictly increase (got {prev} then {cur})")]
    NonIncreasing { prev: u64, cur: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ValidityReport {
    pub count_ok: bool,
    pub collinearity_ok: bool,
    /// Smallest triangle area above the collinearity threshold (0 if none).
    pub min_triangle_area: f64,
}

impl ValidityReport {
    pub fn is_valid(&self) -> bool {
        self.count_ok && self.collinearity_ok
    }
}

fn triangle_area(a: &Vec3, b: &Vec3, c: &Vec3) -> f64 {
    0.5 * (b - a).cross(&(c - a)).norm()
}

/// Exhaustive check over all point triples.
pub fn validate_contact(c: &ContactState, area_eps: f64) -> ValidityReport {
    validate_points(&c.positions().collect::<Vec<_>>(), area_eps)
}

pub fn validate_points(pts: &[Vec3], area_eps: f64) -> ValidityReport {
    let mut max_area: f64 = 0.0;
    let mut min_area = f64::INFINITY;
    for i in 0..pts.len() {
        for j in (i + 1)..pts.len() {
            for k in (j + 1)..pts.len() {
                let a = triangle_area(&pts[i], &pts[j], &pts[k]);
                max_area = max_area.max(a);
                if a > area_eps {
                    min_area = min_area.min(a);
                }
            }
        }
    }
    ValidityReport {
        count_ok: pts.len() >= 3,
        collinearity_ok: max_area > area_eps,
        min_triangle_area: if min_area.is_finite() { min_area } else { 0.0 },
    }
}

/// Same verdict as `validate_points(..).is_valid()`, usually in linear time:
/// a spread-out witness triple is tried first and the exhaustive scan only
/// runs when it fails.
pub fn is_registrable(pts: &[Vec3], area_eps: f64) -> bool {
    if pts.len() < 3 {
        return false;
    }
    let p1 = pts[0];
    let far = |from: &Vec3| {
        pts.iter()
            .copied()
            .max_by(|a, b| (a - from).norm_squared().total_cmp(&(b - from).norm_squared()))
            .unwrap()
    };
    let p2 = far(&p1);
    let p3 = pts
        .iter()
        .copied()
        .max_by(|a, b| triangle_area(&p1, &p2, a).total_cmp(&triangle_area(&p1, &p2, b)))
        .unwrap();
    if triangle_area(&p1, &p2, &p3) > area_eps {
        return true;
    }
    validate_points(pts, area_eps).collinearity_ok
}

/// Neumaier-compensated mean of 3-vectors.
fn compensated_mean<'a>(pts: impl Iterator<Item = &'a Vec3>) -> Vec3 {
    let mut sum = Vec3::zeros();
    let mut comp = Vec3::zeros();
    let mut n = 0usize;
    for p in pts {
        for d in 0..3 {
            let t = sum[d] + p[d];
            if sum[d].abs() >= p[d].abs() {
                comp[d] += (sum[d] - t) + p[d];
            } else {
                comp[d] += (p[d] - t) + sum[d];
            }
            sum[d] = t;
        }
        n += 1;
    }
    (sum + comp) / n as f64
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Registration {
    /// Transform taking reference points onto current points.
    pub pose: Pose,
    /// Root-mean-square residual of the fit, m.
    pub rms_residual: f64,
}

/// Least-squares rigid registration of reference points onto current points.
pub fn kabsch(k: &CorrespondenceSet) -> Result<Registration, EstimationError> {
    let (src, dst): (Vec<Vec3>, Vec<Vec3>) = k.pairs.iter().map(|(a, b)| (a.position, b.position)).unzip();
    kabsch_points(&src, &dst, DEFAULT_AREA_EPS)
}

pub fn kabsch_points(src: &[Vec3], dst: &[Vec3], area_eps: f64) -> Result<Registration, EstimationError> {
    if src.len() != dst.len() || src.len() < 3 {
        return Err(EstimationError::DegenerateContact("fewer than three correspondences"));
    }
    if !is_registrable(src, area_eps) || !is_registrable(dst, area_eps) {
        return Err(EstimationError::DegenerateContact("contact points are collinear"));
    }
    let mu_s = compensated_mean(src.iter());
    let mu_d = compensated_mean(dst.iter());
    let mut h = Matrix3::zeros();
    for (a, b) in src.iter().zip(dst) {
        h += (a - mu_s) * (b - mu_d).transpose();
    }
    let svd = h.svd(true, true);
    let (u, v_t) = (svd.u.unwrap(), svd.v_t.unwrap());
    let v = v_t.transpose();
    let mut d = Matrix3::identity();
    if (v * u.transpose()).determinant() < 0.0 {
        d[(2, 2)] = -1.0;
    }
    let r = Rotation::from_matrix_unchecked(v * d * u.transpose());
    let t = mu_d - r.apply(&mu_s);
    let pose = Pose::new(r, t);
    let sq: f64 = src
        .iter()
        .zip(dst)
        .map(|(a, b)| (pose.transform_point(a) - b).norm_squared())
        .sum();
    Ok(Registration {
        pose,
        rms_residual: (sq / src.len() as f64).sqrt(),
    })
}

/// World handle pose from the gripper pose and the handle-in-gripper estimate.
pub fn estimate_handle_pose(gripper: &Pose, rel: &Pose) -> Pose {
    compose(gripper, rel)
}

/// The two most recent handle estimates.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct HandleHistory {
    estimates: VecDeque<(u64, Pose)>,
}

impl HandleHistory {
    const CAPACITY: usize = 2;

    pub fn new() -> Self {
        Self::default()
    }

    pub fn push(&mut self, step: u64, pose: Pose) -> Result<(), EstimationError> {
        if let Some(&(prev, _)) = self.estimates.back() {
            if step <= prev {
                return Err(EstimationError::NonIncreasing { prev, cur: step });
            }
        }
        if self.estimates.len() == Self::CAPACITY {
            self.estimates.pop_front();
        }
        self.estimates.push_back((step, pose));
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.estimates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.estimates.is_empty()
    }

    pub fn latest(&self) -> Option<&(u64, Pose)> {
        self.estimates.back()
    }

    pub fn iter(&self) -> impl Iterator<Item = &(u64, Pose)> {
        self.estimates.iter()
    }
}

/// Body-frame motion between the two latest estimates: `prev⁻¹ · cur`.
pub fn compute_motion_delta(h: &HandleHistory) -> Result<Pose, EstimationError> {
    if h.len() < 2 {
        return Err(EstimationError::InsufficientHistory(h.len()));
    }
    let (prev_i, prev) = h.estimates[h.len() - 2];
    let (cur_i, cur) = h.estimates[h.len() - 1];
    if cur_i != prev_i + 1 {
        return Err(EstimationError::NonConsecutive {
            prev: prev_i,
            cur: cur_i,
        });
    }
    Ok(compose(&inverse(&prev), &cur))
}

/// Constant-velocity prediction: `cur · t_u`.
pub fn predict_next(cur: &Pose, t_u: &Pose) -> Pose {
    compose(cur, t_u)
}
