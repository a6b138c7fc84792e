//! Simulated marker-grid tactile sensor.
//!
//! Markers touching the handle at grasp time are rigidly bonded to it: a
//! marker's measured position is the handle-in-gripper transform applied to
//! its attachment point, plus optional Gaussian read noise. Markers that were
//! not touching at grasp never report.

use crate::geom::{Pose, Vec3};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ContactError {
    #[error("no correspondences between reference and current contact")]
    NoCorrespondences,
    #[error("invalid sensor config: {0}")]
    InvalidConfig(String),
    #[error("cannot activate exactly {target} markers; achievable counts: {achievable:?}")]
    UnreachableCount {
        target: usize,
        achievable: Vec<usize>,
    },
}

/// Normal indentation of each marker at grasp time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum IndentationProfile {
    /// Every marker pressed by the baseline indentation.
    Uniform,
    /// Paraboloid pressed `indentation` deep at `center` (pad coordinates, m),
    /// falling to zero at `radius`.
    Dome { center: [f64; 2], radius: f64 },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SensorConfig {
    pub grid_rows: usize,
    pub grid_cols: usize,
    /// Marker spacing, m.
    pub pitch: f64,
    /// Baseline (peak) indentation along the sensor normal, m.
    pub indentation: f64,
    /// Activation threshold on `|p_x|`, m.
    pub epsilon: f64,
    /// Slip threshold on marker displacement, m.
    pub gamma: f64,
    /// Per-axis read noise, m.
    pub noise_sigma: f64,
    pub pads: u8,
    pub profile: IndentationProfile,
}

impl Default for SensorConfig {
    fn default() -> Self {
        Self {
            grid_rows: 8,
            grid_cols: 8,
            pitch: 1.5e-3,
            indentation: 1.0e-3,
            epsilon: 0.5e-3,
            gamma: 1.0e-3,
            noise_sigma: 0.0,
            pads: 1,
            profile: IndentationProfile::Uniform,
        }
    }
}

impl SensorConfig {
    pub fn validate(&self) -> Result<(), ContactError> {
        let bad = |m: &str| Err(ContactError::InvalidConfig(m.to_string()));
        if !(self.epsilon > 0.0) {
            return bad("epsilon must be positive");
        }
        if self.indentation < self.epsilon {
            return bad("indentation must be at least epsilon");
        }
        if !(self.gamma > 0.0) {
            return bad("gamma must be positive");
        }
        if !(self.pitch > 0.0) {
            return bad("pitch must be positive");
        }
        if self.grid_rows * self.grid_cols < 3 {
            return bad("grid needs at least three markers");
        }
        if !(self.noise_sigma >= 0.0) {
            return bad("noise_sigma must be non-negative");
        }
        if self.pads != 1 && self.pads != 2 {
            return bad("pads must be 1 or 2");
        }
        if let IndentationProfile::Dome { radius, .. } = self.profile {
            if !(radius > 0.0) {
                return bad("dome radius must be positive");
            }
        }
        Ok(())
    }

    /// Dome-indented pad with epsilon calibrated to leave `target` markers
    /// active, mimicking a real gel pressed by a rounded handle.
    pub fn hardware_fidelity(target: usize) -> Result<Self, ContactError> {
        let mut cfg = Self {
            profile: IndentationProfile::Dome {
                center: [0.31e-3, 0.17e-3],
                radius: 9.0e-3,
            },
            ..Self::default()
        };
        let field = cfg.raw_deformation_field();
        cfg.epsilon = calibrate_epsilon(&field, target)?;
        cfg.validate()?;
        Ok(cfg)
    }

    fn grid_offset(&self, row: usize, col: usize) -> (f64, f64) {
        let y = (col as f64 - (self.grid_cols as f64 - 1.0) / 2.0) * self.pitch;
        let z = (row as f64 - (self.grid_rows as f64 - 1.0) / 2.0) * self.pitch;
        (y, z)
    }

    fn indentation_at(&self, y: f64, z: f64) -> f64 {
        match self.profile {
            IndentationProfile::Uniform => self.indentation,
            IndentationProfile::Dome { center, radius } => {
                let r2 = (y - center[0]).powi(2) + (z - center[1]).powi(2);
                (self.indentation * (1.0 - r2 / (radius * radius))).max(0.0)
            }
        }
    }

    /// Normal deformation of every marker at grasp, ordered by marker id.
    pub fn raw_deformation_field(&self) -> Vec<f64> {
        self.all_markers().iter().map(|m| m.rest.x.abs()).collect()
    }

    fn all_markers(&self) -> Vec<Marker> {
        let per_pad = self.grid_rows * self.grid_cols;
        let mut out = Vec::with_capacity(per_pad * self.pads as usize);
        for pad in 0..self.pads as usize {
            let sign = if pad == 0 { 1.0 } else { -1.0 };
            for row in 0..self.grid_rows {
                for col in 0..self.grid_cols {
                    let (y, z) = self.grid_offset(row, col);
                    let d = self.indentation_at(y, z);
                    out.push(Marker {
                        id: (pad * per_pad + row * self.grid_cols + col) as u32,
                        rest: Vec3::new(sign * d, y, z),
                    });
                }
            }
        }
        out
    }

    /// Markers in contact at grasp time (`|x| ≥ ε`).
    pub fn attached_markers(&self) -> Vec<Marker> {
        self.all_markers()
            .into_iter()
            .filter(|m| m.rest.x.abs() >= self.epsilon)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Marker {
    pub id: u32,
    pub rest: Vec3,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ContactPoint {
    pub marker_id: u32,
    #[serde(with = "crate::geom::vec3_array")]
    pub position: Vec3,
    #[serde(with = "crate::geom::vec3_array")]
    pub rest_position: Vec3,
}

/// Activated contact points at one sensing instant, sorted by marker id.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct ContactState {
    pub points: Vec<ContactPoint>,
    pub step: u64,
}

impl ContactState {
    pub fn new(mut points: Vec<ContactPoint>, step: u64) -> Self {
        points.sort_by_key(|p| p.marker_id);
        points.dedup_by_key(|p| p.marker_id);
        Self { points, step }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn positions(&self) -> impl Iterator<Item = Vec3> + '_ {
        self.points.iter().map(|p| p.position)
    }
}

/// Reference/current pairs matched by marker id.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct CorrespondenceSet {
    pub pairs: Vec<(ContactPoint, ContactPoint)>,
}

impl CorrespondenceSet {
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct DeviationStats {
    pub mean_norm: f64,
    pub max_norm: f64,
}

/// The sensor with its attachment points resolved once.
#[derive(Debug, Clone)]
pub struct TactileSensor {
    cfg: SensorConfig,
    markers: Vec<Marker>,
}

impl TactileSensor {
    pub fn new(cfg: SensorConfig) -> Result<Self, ContactError> {
        cfg.validate()?;
        let markers = cfg.attached_markers();
        Ok(Self { cfg, markers })
    }

    pub fn config(&self) -> &SensorConfig {
        &self.cfg
    }

    pub fn markers(&self) -> &[Marker] {
        &self.markers
    }

    /// Contact state for the handle-in-gripper pose `rel`. Read noise is drawn
    /// from a stream keyed by (`seed`, `step`).
    pub fn sense(&self, rel: &Pose, step: u64, seed: u64) -> ContactState {
        let sigma = self.cfg.noise_sigma;
        let mut noise = (sigma > 0.0).then(|| {
            (
                ChaCha8Rng::seed_from_u64(crate::objects::mix_seed(seed, step)),
                Normal::new(0.0, sigma).expect("sigma validated"),
            )
        });
        let mut points = Vec::with_capacity(self.markers.len());
        for m in &self.markers {
            let mut p = rel.transform_point(&m.rest);
            if let Some((rng, dist)) = noise.as_mut() {
                p += Vec3::new(dist.sample(rng), dist.sample(rng), dist.sample(rng));
            }
            if p.x.abs() >= self.cfg.epsilon {
                points.push(ContactPoint {
                    marker_id: m.id,
                    position: p,
                    rest_position: m.rest,
                });
            }
        }
        ContactState { points, step }
    }
}

pub fn sense(rel: &Pose, cfg: &SensorConfig, rng_seed: u64) -> Result<ContactState, ContactError> {
    Ok(TactileSensor::new(cfg.clone())?.sense(rel, 0, rng_seed))
}

pub fn correspondences(reference: &ContactState, current: &ContactState) -> CorrespondenceSet {
    // Both sides are sorted by id; merge.
    let mut pairs = Vec::with_capacity(reference.len().min(current.len()));
    let (mut i, mut j) = (0, 0);
    while i < reference.points.len() && j < current.points.len() {
        let (a, b) = (&reference.points[i], &current.points[j]);
        match a.marker_id.cmp(&b.marker_id) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                pairs.push((*a, *b));
                i += 1;
                j += 1;
            }
        }
    }
    CorrespondenceSet { pairs }
}

pub fn deviation_stats(
    reference: &ContactState,
    current: &ContactState,
) -> Result<DeviationStats, ContactError> {
    let k = correspondences(reference, current);
    if k.is_empty() {
        return Err(ContactError::NoCorrespondences);
    }
    let mut sum = 0.0;
    let mut max: f64 = 0.0;
    for (a, b) in &k.pairs {
        let d = (b.position - a.position).norm();
        sum += d;
        max = max.max(d);
    }
    Ok(DeviationStats {
        mean_norm: sum / k.len() as f64,
        max_norm: max,
    })
}

pub fn check_slip(
    reference: &ContactState,
    current: &ContactState,
    cfg: &SensorConfig,
) -> Result<bool, ContactError> {
    Ok(deviation_stats(reference, current)?.max_norm > cfg.gamma)
}

/// Threshold leaving exactly `target_count` markers with `|deformation| ≥ ε`:
/// the `target_count`-th largest deformation.
pub fn calibrate_epsilon(deformations: &[f64], target_count: usize) -> Result<f64, ContactError> {
    let mut v: Vec<f64> = deformations.iter().map(|d| d.abs()).collect();
    v.sort_by(|a, b| b.total_cmp(a));
    let n = v.len();
    let achievable: Vec<usize> = (1..=n)
        .filter(|&k| v[k - 1] > 0.0 && (k == n || v[k - 1] > v[k]))
        .collect();
    if target_count < 3 || !achievable.contains(&target_count) {
        return Err(ContactError::UnreachableCount {
            target: target_count,
            achievable,
        });
    }
    Ok(v[target_count - 1])
}
