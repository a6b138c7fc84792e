//! One-DOF articulated objects: path models, handle poses, the quasi-static
//! handle response, suite generation and success predicates.
//!
//! Every model is described in a local frame and placed in the world by a
//! rigid `placement`. Locally the handle starts at the origin, the plane
//! normal is +x and the initial path tangent is +y, so the grasping gripper
//! always begins with its pad normal on x and the task direction on y.

use crate::geom::{BezierCurve, GeomError, Pose, Rotation, Vec2, Vec3};
use nalgebra::{Matrix3, UnitQuaternion, Vector4};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

pub const REVOLUTE_SUCCESS_RAD: f64 = 60.0 * PI / 180.0;
pub const PRISMATIC_SUCCESS_M: f64 = 0.250;
pub const BEZIER_SUCCESS_S: f64 = 1.0 - 1e-3;

/// Golden-section termination width on s.
pub const PROJECTION_TOL: f64 = 1e-9;
const PROJECTION_GRID: usize = 16;
const SPEED_SAMPLES: usize = 1024;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ObjectError {
    #[error("path parameter {s} outside [{lo}, {hi}]")]
    Domain { s: f64, lo: f64, hi: f64 },
    #[error("infeasible spec: {0}")]
    InfeasibleSpec(String),
    #[error("invalid model: {0}")]
    InvalidModel(String),
    #[error(transparent)]
    Geom(#[from] GeomError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Prismatic,
    Revolute,
    Helical,
    Bezier2,
    Bezier3,
    Bezier4,
    Bezier5,
}

impl Category {
    pub const ALL: [Category; 7] = [
        Category::Prismatic,
        Category::Revolute,
        Category::Helical,
        Category::Bezier2,
        Category::Bezier3,
        Category::Bezier4,
        Category::Bezier5,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Category::Prismatic => "prismatic",
            Category::Revolute => "revolute",
            Category::Helical => "helical",
            Category::Bezier2 => "bezier2",
            Category::Bezier3 => "bezier3",
            Category::Bezier4 => "bezier4",
            Category::Bezier5 => "bezier5",
        }
    }

    pub fn parse(s: &str) -> Option<Category> {
        Self::ALL.iter().copied().find(|c| c.name() == s)
    }

    pub fn bezier(order: usize) -> Option<Category> {
        match order {
            2 => Some(Category::Bezier2),
            3 => Some(Category::Bezier3),
            4 => Some(Category::Bezier4),
            5 => Some(Category::Bezier5),
            _ => None,
        }
    }

    pub fn is_bezier(&self) -> bool {
        matches!(self, Category::Bezier2 | Category::Bezier3 | Category::Bezier4 | Category::Bezier5)
    }

    /// Progress that counts as completion, in units of s.
    pub fn success_threshold(&self) -> f64 {
        match self {
            Category::Prismatic => PRISMATIC_SUCCESS_M,
            Category::Revolute | Category::Helical => REVOLUTE_SUCCESS_RAD,
            _ => 1.0,
        }
    }
}

impl std::fmt::Display for Category {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum OrientationMode {
    Fixed,
    PathTangent,
}

/// Path geometry in the model's local frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum ArticulationKind {
    /// Straight slide along local +y.
    Prismatic,
    /// Circle of `radius` in the local y-z plane about an axis parallel to x
    /// through (0, 0, −radius).
    Revolute { radius: f64 },
    /// Revolute circle advancing `pitch` meters per turn along +x.
    Helical { radius: f64, pitch: f64 },
    /// Planar curve in board coordinates, lifted as (u, v) ↦ (0, u, v) and
    /// shifted so that B(0) sits at the local origin.
    Bezier { curve: BezierCurve },
}

/// Path state: s in meters (prismatic), radians (revolute, helical) or the
/// dimensionless curve parameter (Bézier).
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct PathState {
    pub s: f64,
}

impl PathState {
    pub fn new(s: f64) -> Self {
        Self { s }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ArticulationModel {
    pub id: String,
    pub category: Category,
    /// Seed this model was drawn from.
    pub seed: u64,
    pub kind: ArticulationKind,
    pub orientation_mode: OrientationMode,
    /// World pose of the local frame.
    pub placement: Pose,
    /// Upper end of the travel range; the lower end is 0. Zero locks the joint.
    pub s_max: f64,
}

/// Frame with x along `normal` (made orthogonal to the tangent), y along `tangent`.
pub fn tangent_frame(normal: &Vec3, tangent: &Vec3) -> Rotation {
    let y = tangent.normalize();
    let x = (normal - y * normal.dot(&y)).normalize();
    Rotation::from_basis(x, y, x.cross(&y))
}

impl ArticulationModel {
    pub fn new(
        id: impl Into<String>,
        category: Category,
        kind: ArticulationKind,
        orientation_mode: OrientationMode,
        placement: Pose,
        s_max: f64,
    ) -> Result<Self, ObjectError> {
        let m = Self {
            id: id.into(),
            category,
            seed: 0,
            kind,
            orientation_mode,
            placement,
            s_max,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn prismatic(travel: f64) -> Self {
        Self::new("prismatic", Category::Prismatic, ArticulationKind::Prismatic, OrientationMode::Fixed, Pose::identity(), travel)
            .expect("valid prismatic")
    }

    pub fn revolute(radius: f64, range: f64) -> Self {
        Self::new(
            "revolute",
            Category::Revolute,
            ArticulationKind::Revolute { radius },
            OrientationMode::PathTangent,
            Pose::identity(),
            range,
        )
        .expect("valid revolute")
    }

    pub fn bezier(curve: BezierCurve) -> Self {
        let cat = Category::bezier(curve.order()).unwrap_or(Category::Bezier3);
        Self::new(
            "bezier",
            cat,
            ArticulationKind::Bezier { curve },
            OrientationMode::PathTangent,
            Pose::identity(),
            1.0,
        )
        .expect("valid bezier")
    }

    /// Same model with the joint locked at its start.
    pub fn locked(mut self) -> Self {
        self.s_max = 0.0;
        self
    }

    pub fn with_placement(mut self, placement: Pose) -> Self {
        self.placement = placement;
        self
    }

    /// Re-places the model so that its handle starts at `start`.
    pub fn placed_at(mut self, start: &Pose) -> Self {
        let local0 = self.local_pose(0.0);
        self.placement = start.compose(&local0.inverse());
        self
    }

    pub fn validate(&self) -> Result<(), ObjectError> {
        let bad = |m: String| Err(ObjectError::InvalidModel(m));
        if !(self.s_max >= 0.0 && self.s_max.is_finite()) {
            return bad(format!("travel {} must be finite and non-negative", self.s_max));
        }
        match &self.kind {
            ArticulationKind::Prismatic => {}
            ArticulationKind::Revolute { radius } | ArticulationKind::Helical { radius, .. } if !(*radius > 0.0) => {
                return bad(format!("radius {radius} must be positive"));
            }
            ArticulationKind::Helical { pitch, .. } if !pitch.is_finite() => return bad("pitch must be finite".into()),
            ArticulationKind::Bezier { curve } => {
                if self.s_max > 1.0 {
                    return bad("bezier travel exceeds 1".into());
                }
                if curve.derivative(0.0).norm() == 0.0 {
                    return bad("bezier start tangent vanishes".into());
                }
            }
            _ => {}
        }
        if self.placement.rotation.orthonormality_error() > 1e-9 {
            return bad("placement rotation is not orthonormal".into());
        }
        Ok(())
    }

    pub fn domain(&self) -> (f64, f64) {
        (0.0, self.s_max)
    }

    fn check_domain(&self, s: f64) -> Result<(), ObjectError> {
        if s >= 0.0 && s <= self.s_max {
            Ok(())
        } else {
            Err(ObjectError::Domain {
                s,
                lo: 0.0,
                hi: self.s_max,
            })
        }
    }

    /// Local position and ds-derivative.
    fn local_point(&self, s: f64) -> (Vec3, Vec3) {
        match &self.kind {
            ArticulationKind::Prismatic => (Vec3::new(0.0, s, 0.0), Vec3::new(0.0, 1.0, 0.0)),
            ArticulationKind::Revolute { radius: r } => {
                let (sn, cs) = s.sin_cos();
                (Vec3::new(0.0, r * sn, r * (cs - 1.0)), Vec3::new(0.0, r * cs, -r * sn))
            }
            ArticulationKind::Helical { radius: r, pitch } => {
                let (sn, cs) = s.sin_cos();
                let lead = pitch / (2.0 * PI);
                (Vec3::new(lead * s, r * sn, r * (cs - 1.0)), Vec3::new(lead, r * cs, -r * sn))
            }
            ArticulationKind::Bezier { curve } => {
                let b0 = curve.control_points()[0];
                let b = bezier_point(curve, s) - b0;
                let d = curve.derivative(s);
                (Vec3::new(0.0, b.x, b.y), Vec3::new(0.0, d.x, d.y))
            }
        }
    }

    fn local_pose(&self, s: f64) -> Pose {
        let (p, _) = self.local_point(s);
        let tangent_at = match self.orientation_mode {
            OrientationMode::Fixed => 0.0,
            OrientationMode::PathTangent => s,
        };
        let (_, t) = self.local_point(tangent_at);
        Pose::new(tangent_frame(&Vec3::x(), &t), p)
    }

    /// World handle pose at path state `st`.
    pub fn handle_pose_at(&self, st: PathState) -> Result<Pose, ObjectError> {
        self.check_domain(st.s)?;
        Ok(self.handle_pose_unchecked(st.s))
    }

    fn handle_pose_unchecked(&self, s: f64) -> Pose {
        self.placement.compose(&self.local_pose(s))
    }

    /// World position and its derivative with respect to s.
    pub fn path_point(&self, s: f64) -> (Vec3, Vec3) {
        let (p, t) = self.local_point(s);
        (self.placement.transform_point(&p), self.placement.rotation.apply(&t))
    }

    /// World unit tangent at s.
    pub fn tangent(&self, s: f64) -> Vec3 {
        self.path_point(s).1.normalize()
    }

    /// World-frame plane normal (revolute axis, board normal, slide normal).
    pub fn normal(&self) -> Vec3 {
        self.placement.rotation.apply(&Vec3::x())
    }

    /// World start point J_s.
    pub fn start(&self) -> Vec3 {
        self.placement.translation
    }

    /// World axis: the slide direction for prismatic, the rotation axis otherwise.
    pub fn axis(&self) -> Vec3 {
        match self.kind {
            ArticulationKind::Prismatic => self.placement.rotation.apply(&Vec3::y()),
            _ => self.normal(),
        }
    }

    /// World center of rotation for revolute and helical models.
    pub fn center(&self) -> Option<Vec3> {
        match self.kind {
            ArticulationKind::Revolute { radius } | ArticulationKind::Helical { radius, .. } => {
                Some(self.placement.transform_point(&Vec3::new(0.0, 0.0, -radius)))
            }
            _ => None,
        }
    }

    /// Smallest |dP/ds| over the travel range.
    pub fn min_path_speed(&self) -> f64 {
        match &self.kind {
            ArticulationKind::Prismatic => 1.0,
            ArticulationKind::Revolute { radius } => *radius,
            ArticulationKind::Helical { radius, pitch } => radius.hypot(pitch / (2.0 * PI)),
            ArticulationKind::Bezier { curve } => (0..=SPEED_SAMPLES)
                .map(|k| curve.derivative(k as f64 / SPEED_SAMPLES as f64).norm())
                .fold(f64::INFINITY, f64::min),
        }
    }

    /// Path length over the travel range.
    pub fn path_length(&self) -> f64 {
        match &self.kind {
            ArticulationKind::Prismatic => self.s_max,
            ArticulationKind::Revolute { radius } => radius * self.s_max,
            ArticulationKind::Helical { radius, pitch } => radius.hypot(pitch / (2.0 * PI)) * self.s_max,
            ArticulationKind::Bezier { .. } => {
                let n = 2048;
                let h = self.s_max / n as f64;
                let sp = |s: f64| self.local_point(s).1.norm();
                let mut acc = sp(0.0) + sp(self.s_max);
                for k in 1..n {
                    acc += sp(k as f64 * h) * if k % 2 == 1 { 4.0 } else { 2.0 };
                }
                acc * h / 3.0
            }
        }
    }

    pub fn success_threshold(&self) -> f64 {
        match self.kind {
            ArticulationKind::Prismatic => PRISMATIC_SUCCESS_M,
            ArticulationKind::Revolute { .. } | ArticulationKind::Helical { .. } => REVOLUTE_SUCCESS_RAD,
            ArticulationKind::Bezier { .. } => 1.0,
        }
    }
}

fn bezier_point(c: &BezierCurve, s: f64) -> Vec2 {
    c.eval(s.clamp(0.0, 1.0)).expect("clamped parameter")
}

pub fn handle_pose_at(m: &ArticulationModel, st: PathState) -> Result<Pose, ObjectError> {
    m.handle_pose_at(st)
}

pub fn success_check(m: &ArticulationModel, st: PathState) -> bool {
    match m.kind {
        ArticulationKind::Prismatic => st.s >= PRISMATIC_SUCCESS_M,
        ArticulationKind::Revolute { .. } | ArticulationKind::Helical { .. } => st.s >= REVOLUTE_SUCCESS_RAD,
        ArticulationKind::Bezier { .. } => st.s >= BEZIER_SUCCESS_S,
    }
}

/// Elastic energy Σ‖M·a − a‖² of the attached markers under the
/// handle-in-gripper pose M, from the first and second moments of the
/// attachment points. For M = (R, t):
/// E = 2·tr((I − R)·S) + 2·tᵀ(R − I)·m₁ + N·‖t‖².
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ContactEnergy {
    n: f64,
    first: Vec3,
    second: Matrix3<f64>,
}

impl ContactEnergy {
    pub fn new<'a>(points: impl IntoIterator<Item = &'a Vec3>) -> Self {
        let mut n = 0.0;
        let mut first = Vec3::zeros();
        let mut second = Matrix3::zeros();
        for a in points {
            n += 1.0;
            first += a;
            second += a * a.transpose();
        }
        Self { n, first, second }
    }

    pub fn eval(&self, rel: &Pose) -> f64 {
        let r = rel.rotation.matrix();
        let t = &rel.translation;
        let i_minus_r = Matrix3::identity() - r;
        2.0 * (i_minus_r * self.second).trace() - 2.0 * t.dot(&(i_minus_r * self.first)) + self.n * t.norm_squared()
    }
}

/// Quasi-static handle response: the state within `window` of `current` that
/// minimizes the contact energy against `gripper`.
pub fn project_to_path(
    m: &ArticulationModel,
    energy: &ContactEnergy,
    gripper: &Pose,
    current: PathState,
    window: f64,
) -> PathState {
    let g_inv = gripper.inverse();
    let f = |s: f64| energy.eval(&g_inv.compose(&m.handle_pose_unchecked(s)));
    let s0 = current.s.clamp(0.0, m.s_max);
    let lo = (s0 - window).max(0.0);
    let hi = (s0 + window).min(m.s_max);
    let e0 = f(s0);
    if !(hi > lo) {
        return PathState::new(s0);
    }

    let h = (hi - lo) / PROJECTION_GRID as f64;
    let grid: Vec<(f64, f64)> = (0..=PROJECTION_GRID)
        .map(|k| {
            let s = if k == PROJECTION_GRID { hi } else { lo + k as f64 * h };
            (s, f(s))
        })
        .collect();
    let kbest = (0..grid.len()).fold(0, |b, k| if grid[k].1 < grid[b].1 { k } else { b });
    let a = grid[kbest.saturating_sub(1)].0;
    let b = grid[(kbest + 1).min(PROJECTION_GRID)].0;
    let (sg, eg) = golden_section(&f, a, b, PROJECTION_TOL);

    let mut best = (s0, e0);
    for cand in [grid[kbest], (sg, eg)] {
        if cand.1 < best.1 {
            best = cand;
        }
    }
    // Parabolic polish: exact for energies quadratic in s.
    let d = PROJECTION_TOL.max(best.0.abs() * 1e-12) * 16.0;
    if best.0 - d >= lo && best.0 + d <= hi {
        let (fm, fc, fp) = (f(best.0 - d), best.1, f(best.0 + d));
        let curv = fp - 2.0 * fc + fm;
        if curv > 0.0 {
            let sp = (best.0 - 0.5 * d * (fp - fm) / curv).clamp(lo, hi);
            let ep = f(sp);
            if ep < best.1 {
                best = (sp, ep);
            }
        }
    }
    PathState::new(best.0)
}

/// Golden-section minimization on [a, b]; returns (argmin, min).
pub fn golden_section(f: &impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    const INV_PHI: f64 = 0.618_033_988_749_894_9;
    let mut c = b - INV_PHI * (b - a);
    let mut d = a + INV_PHI * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while (b - a) > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_PHI * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_PHI * (b - a);
            fd = f(d);
        }
    }
    if fc <= fd {
        (c, fc)
    } else {
        (d, fd)
    }
}

/// Geometric ranges for suite generation (meters unless noted).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteRanges {
    pub prismatic_travel: [f64; 2],
    pub revolute_radius: [f64; 2],
    /// Revolute and helical travel, radians.
    pub revolute_range: [f64; 2],
    pub helical_radius: [f64; 2],
    /// Meters per revolution.
    pub helical_pitch: [f64; 2],
    /// Side lengths of the board Bézier control points are drawn on.
    pub board_size: [f64; 2],
    /// Smallest admissible osculating radius along a curve.
    pub bezier_min_radius: f64,
    /// Smallest admissible |B′(s)|.
    pub bezier_min_speed: f64,
    /// Workspace box for object start points.
    pub workspace_min: [f64; 3],
    pub workspace_max: [f64; 3],
}

/// Radius below which a perfectly tracking gripper would see a per-step
/// rotational deviation above γ/(2·safety) at the outermost marker.
pub fn curvature_feasible_radius(speed: f64, dt: f64, outer_marker_radius: f64, gamma: f64, safety: f64) -> f64 {
    safety * speed * dt * outer_marker_radius / (gamma / 2.0)
}

impl Default for SuiteRanges {
    fn default() -> Self {
        // Defaults: 0.05 m/s at 60 Hz, 8×8 pads at 1.5 mm pitch, γ = 1 mm.
        let rho = 3.5 * 1.5e-3 * std::f64::consts::SQRT_2;
        Self {
            prismatic_travel: [0.30, 0.40],
            revolute_radius: [0.20, 0.45],
            revolute_range: [80f64.to_radians(), 110f64.to_radians()],
            helical_radius: [0.03, 0.08],
            helical_pitch: [0.004, 0.02],
            board_size: [0.6, 0.6],
            bezier_min_radius: curvature_feasible_radius(0.05, 1.0 / 60.0, rho, 1e-3, 5.0),
            bezier_min_speed: 0.05,
            workspace_min: [0.3, -0.3, 0.0],
            workspace_max: [0.7, 0.3, 0.4],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuiteSpec {
    pub seed: u64,
    pub prismatic: usize,
    pub revolute: usize,
    pub helical: usize,
    /// Curves per order 2, 3, 4, 5.
    pub bezier: [usize; 4],
    pub ranges: SuiteRanges,
}

impl Default for SuiteSpec {
    fn default() -> Self {
        Self {
            seed: 0,
            prismatic: 50,
            revolute: 50,
            helical: 0,
            bezier: [25; 4],
            ranges: SuiteRanges::default(),
        }
    }
}

impl SuiteSpec {
    /// The 80-object desk suite: 20 prismatic, 20 revolute, 10 curves per order.
    pub fn desk(seed: u64) -> Self {
        Self {
            seed,
            prismatic: 20,
            revolute: 20,
            helical: 0,
            bezier: [10; 4],
            ranges: SuiteRanges::default(),
        }
    }

    pub fn total(&self) -> usize {
        self.prismatic + self.revolute + self.helical + self.bezier.iter().sum::<usize>()
    }

    pub fn validate(&self) -> Result<(), ObjectError> {
        let r = &self.ranges;
        let ranges = [
            r.prismatic_travel,
            r.revolute_radius,
            r.revolute_range,
            r.helical_radius,
            r.helical_pitch,
            r.board_size,
        ];
        let ok = ranges.iter().all(|[lo, hi]| *lo > 0.0 && lo <= hi && hi.is_finite())
            && r.bezier_min_radius > 0.0
            && r.bezier_min_speed > 0.0
            && (0..3).all(|k| r.workspace_min[k] <= r.workspace_max[k]);
        if !ok {
            return Err(ObjectError::InfeasibleSpec("ranges must be positive with lo ≤ hi".into()));
        }
        if r.prismatic_travel[0] < PRISMATIC_SUCCESS_M || r.revolute_range[0] < REVOLUTE_SUCCESS_RAD {
            return Err(ObjectError::InfeasibleSpec("travel range shorter than the success threshold".into()));
        }
        Ok(())
    }
}

/// SplitMix64 finalizer, used to derive independent per-object seeds.
pub fn mix_seed(a: u64, b: u64) -> u64 {
    let mut z = a ^ b.wrapping_mul(0x9E37_79B9_7F4A_7C15).wrapping_add(0x632B_E59B_D9B4_E019);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn object_seed(suite_seed: u64, cat: Category, index: usize) -> u64 {
    mix_seed(mix_seed(suite_seed, cat as u64 + 1), index as u64)
}

fn uniform(rng: &mut ChaCha8Rng, [lo, hi]: [f64; 2]) -> f64 {
    if hi > lo {
        rng.random_range(lo..hi)
    } else {
        lo
    }
}

fn random_placement(rng: &mut ChaCha8Rng, r: &SuiteRanges) -> Pose {
    let q = Vector4::from_fn(|_, _| rng.sample::<f64, _>(StandardNormal));
    let rot = UnitQuaternion::from_quaternion(nalgebra::Quaternion::from_vector(q));
    let p = Vec3::from_fn(|k, _| uniform(rng, [r.workspace_min[k], r.workspace_max[k]]));
    Pose::new(Rotation::from_matrix_unchecked(*rot.to_rotation_matrix().matrix()), p)
}

/// Largest curvature over `samples` uniform parameter values.
pub fn max_curvature(c: &BezierCurve, samples: usize) -> f64 {
    (0..=samples)
        .map(|k| c.curvature(k as f64 / samples as f64).abs())
        .fold(0.0, f64::max)
}

/// Whether a candidate curve satisfies the generator's feasibility bounds.
pub fn bezier_feasible(c: &BezierCurve, r: &SuiteRanges) -> bool {
    let speed_ok = (0..=SPEED_SAMPLES).all(|k| c.derivative(k as f64 / SPEED_SAMPLES as f64).norm() >= r.bezier_min_speed);
    speed_ok
        && max_curvature(c, SPEED_SAMPLES) <= 1.0 / r.bezier_min_radius
        && !crate::geom::bezier_self_intersects(c, 1024)
}

const MAX_ATTEMPTS: usize = 10_000;

fn random_curve(rng: &mut ChaCha8Rng, order: usize, r: &SuiteRanges) -> Result<BezierCurve, ObjectError> {
    let pts: Vec<Vec2> = (0..=order)
        .map(|_| Vec2::new(uniform(rng, [0.0, r.board_size[0]]), uniform(rng, [0.0, r.board_size[1]])))
        .collect();
    Ok(BezierCurve::new(pts)?)
}

fn sample_bezier(rng: &mut ChaCha8Rng, order: usize, r: &SuiteRanges) -> Result<BezierCurve, ObjectError> {
    for _ in 0..MAX_ATTEMPTS {
        let c = random_curve(rng, order, r)?;
        if bezier_feasible(&c, r) {
            return Ok(c);
        }
    }
    Err(ObjectError::InfeasibleSpec(format!(
        "no order-{order} curve satisfied the bounds in {MAX_ATTEMPTS} attempts"
    )))
}

/// Fails when more than 99% of order-`order` candidates are rejected. Uses
/// its own stream so the verdict does not perturb generation.
fn check_acceptance(seed: u64, order: usize, r: &SuiteRanges) -> Result<(), ObjectError> {
    let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(seed, 0xACCE_0000 + order as u64));
    let mut accepted = 0usize;
    for _ in 0..MAX_ATTEMPTS {
        if bezier_feasible(&random_curve(&mut rng, order, r)?, r) {
            accepted += 1;
            if accepted * 100 > MAX_ATTEMPTS {
                return Ok(());
            }
        }
    }
    Err(ObjectError::InfeasibleSpec(format!(
        "order-{order} rejection rate {:.2}% exceeds 99% over {MAX_ATTEMPTS} attempts",
        100.0 * (1.0 - accepted as f64 / MAX_ATTEMPTS as f64)
    )))
}

/// Deterministic suite for `spec`; ids look like `bezier3-007`.
pub fn generate_suite(spec: &SuiteSpec) -> Result<Vec<ArticulationModel>, ObjectError> {
    spec.validate()?;
    let r = &spec.ranges;
    for (k, &count) in spec.bezier.iter().enumerate() {
        if count > 0 {
            check_acceptance(spec.seed, k + 2, r)?;
        }
    }
    let mut out = Vec::with_capacity(spec.total());
    let mut push = |cat: Category, count: usize, make: &dyn Fn(&mut ChaCha8Rng) -> Result<(ArticulationKind, OrientationMode, f64), ObjectError>| -> Result<(), ObjectError> {
        for i in 0..count {
            let seed = object_seed(spec.seed, cat, i);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let (kind, mode, s_max) = make(&mut rng)?;
            let placement = random_placement(&mut rng, r);
            let mut m = ArticulationModel::new(format!("{}-{:03}", cat.name(), i), cat, kind, mode, placement, s_max)?;
            m.seed = seed;
            out.push(m);
        }
        Ok(())
    };
    push(Category::Prismatic, spec.prismatic, &|rng| {
        Ok((ArticulationKind::Prismatic, OrientationMode::Fixed, uniform(rng, r.prismatic_travel)))
    })?;
    push(Category::Revolute, spec.revolute, &|rng| {
        let radius = uniform(rng, r.revolute_radius);
        Ok((ArticulationKind::Revolute { radius }, OrientationMode::PathTangent, uniform(rng, r.revolute_range)))
    })?;
    push(Category::Helical, spec.helical, &|rng| {
        let radius = uniform(rng, r.helical_radius);
        let pitch = uniform(rng, r.helical_pitch);
        Ok((ArticulationKind::Helical { radius, pitch }, OrientationMode::PathTangent, uniform(rng, r.revolute_range)))
    })?;
    for (k, &count) in spec.bezier.iter().enumerate() {
        let order = k + 2;
        let cat = Category::bezier(order).expect("order 2..=5");
        push(cat, count, &|rng| {
            let curve = sample_bezier(rng, order, r)?;
            Ok((ArticulationKind::Bezier { curve }, OrientationMode::PathTangent, 1.0))
        })?;
    }
    Ok(out)
}
