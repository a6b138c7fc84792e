//! Experiment configuration (TOML, versioned by `schema_version`).

use crate::contact::SensorConfig;
use crate::control::{BaseVelocity, ControlConfig, ControlMode};
use crate::geom::{Twist, Vec3};
use crate::objects::{mix_seed, ArticulationModel, SuiteSpec};
use crate::sim::{EpisodeConfig, RobotModel, SimConfig};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

pub const CONFIG_SCHEMA_VERSION: u32 = 1;

/// Stream tag for the per-object rough-direction draw.
const JITTER_STREAM: u64 = 0xD1;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("cannot parse {path}: {msg}")]
    Parse { path: PathBuf, msg: String },
    #[error("unsupported schema_version {found} (expected {expected})")]
    Schema { found: u32, expected: u32 },
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BaseDirection {
    PathTangentAtStart,
    /// Degrees, rotated about the sensor normal away from the start tangent.
    AngleOffset(f64),
}

/// How the rough base velocity u₀ is chosen for each object.
///
/// The direction is the start tangent rotated by the configured offset plus
/// a per-object error drawn uniformly from ±`jitter_deg` (±`bezier_jitter_deg`
/// for free-form curves), standing in for an operator's rough guess.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BasePolicy {
    /// m/s.
    pub magnitude: f64,
    pub direction: BaseDirection,
    /// Gripper-frame angular component, rad/s.
    pub angular: [f64; 3],
    pub jitter_deg: f64,
    pub bezier_jitter_deg: f64,
}

impl Default for BasePolicy {
    fn default() -> Self {
        Self {
            magnitude: 0.05,
            direction: BaseDirection::PathTangentAtStart,
            angular: [0.0; 3],
            jitter_deg: 10.0,
            bezier_jitter_deg: 60.0,
        }
    }
}

impl BasePolicy {
    /// Total angle between u₀ and the start tangent for `object`, degrees.
    pub fn angle_for(&self, object: &ArticulationModel) -> f64 {
        let offset = match self.direction {
            BaseDirection::PathTangentAtStart => 0.0,
            BaseDirection::AngleOffset(t) => t,
        };
        let j = if object.category.is_bezier() { self.bezier_jitter_deg } else { self.jitter_deg };
        if j <= 0.0 {
            return offset;
        }
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(object.seed, JITTER_STREAM));
        offset + rng.random_range(-j..j)
    }

    pub fn velocity_for(&self, object: &ArticulationModel) -> BaseVelocity {
        let t = self.angle_for(object).to_radians();
        BaseVelocity {
            twist: Twist::new(
                Vec3::new(0.0, t.cos(), t.sin()) * self.magnitude,
                Vec3::from(self.angular),
            ),
        }
    }

    pub fn without_jitter(mut self) -> Self {
        self.jitter_deg = 0.0;
        self.bezier_jitter_deg = 0.0;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Proactive,
    #[serde(alias = "reactive_baseline")]
    Reactive,
}

impl Method {
    pub const BOTH: [Method; 2] = [Method::Proactive, Method::Reactive];

    pub fn mode(self) -> ControlMode {
        match self {
            Method::Proactive => ControlMode::Proactive,
            Method::Reactive => ControlMode::ReactiveBaseline,
        }
    }

    pub fn label(self) -> &'static str {
        self.mode().label()
    }

    fn index(self) -> u64 {
        self as u64
    }
}

/// Where the object suite comes from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SuiteSource {
    Spec(SuiteSpec),
    /// Directory holding a `suite.toml`.
    Path(PathBuf),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema_version: u32,
    pub suite: Option<SuiteSource>,
    pub methods: Vec<Method>,
    pub base: BasePolicy,
    /// Permit ‖u₀‖ > γ·f, for probing the slip bound.
    pub allow_unsafe_speed: bool,
    pub sensor: SensorConfig,
    /// `dt` is overwritten by 1/`sim.control_rate`.
    pub control: ControlConfig,
    pub sim: SimConfig,
    pub robot: RobotModel,
    pub jerk: super::metrics::JerkAggregation,
    pub out_dir: Option<PathBuf>,
    /// Worker threads; 0 picks the machine default.
    pub jobs: usize,
    pub write_logs: bool,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            schema_version: CONFIG_SCHEMA_VERSION,
            suite: None,
            methods: Method::BOTH.to_vec(),
            base: BasePolicy::default(),
            allow_unsafe_speed: false,
            sensor: SensorConfig::default(),
            control: ControlConfig::default(),
            sim: SimConfig::default(),
            robot: RobotModel::default(),
            jerk: Default::default(),
            out_dir: None,
            jobs: 0,
            write_logs: true,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(s: &str) -> Result<Self, ConfigError> {
        let cfg: Self = toml::from_str(s).map_err(|e| ConfigError::Parse {
            path: PathBuf::from("<string>"),
            msg: e.to_string(),
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_toml_str(&text).map_err(|e| match e {
            ConfigError::Parse { msg, .. } => ConfigError::Parse {
                path: path.to_path_buf(),
                msg,
            },
            e => e,
        })
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string_pretty(self).expect("config is always serializable")
    }

    /// Episode settings for `method` on `object`.
    pub fn episode(&self, object: &ArticulationModel, method: Method) -> EpisodeConfig {
        let mut control = self.control;
        control.dt = self.sim.dt();
        control.mode = method.mode();
        EpisodeConfig {
            sensor: self.sensor.clone(),
            control,
            sim: self.sim,
            base: self.base.velocity_for(object),
            allow_unsafe_speed: self.allow_unsafe_speed,
        }
    }

    /// Seed for one (object, method) episode; independent of scheduling.
    pub fn episode_seed(&self, object: &ArticulationModel, method: Method) -> u64 {
        mix_seed(mix_seed(self.sim.rng_seed, object.seed), method.index())
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let bad = |m: String| Err(ConfigError::Invalid(m));
        if self.schema_version != CONFIG_SCHEMA_VERSION {
            return Err(ConfigError::Schema {
                found: self.schema_version,
                expected: CONFIG_SCHEMA_VERSION,
            });
        }
        if self.methods.is_empty() {
            return bad("no methods selected".into());
        }
        let b = &self.base;
        if !(b.magnitude > 0.0 && b.magnitude.is_finite()) {
            return bad("base.magnitude must be positive".into());
        }
        if !(b.jitter_deg >= 0.0 && b.bezier_jitter_deg >= 0.0) {
            return bad("jitter must be non-negative".into());
        }
        if let Some(SuiteSource::Spec(s)) = &self.suite {
            s.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        }
        let mut control = self.control;
        control.dt = self.sim.dt();
        let probe = EpisodeConfig {
            sensor: self.sensor.clone(),
            control,
            sim: self.sim,
            base: BaseVelocity::linear(Vec3::new(0.0, self.base.magnitude, 0.0)),
            allow_unsafe_speed: self.allow_unsafe_speed,
        };
        probe.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        self.robot.validate().map_err(|e| ConfigError::Invalid(e.to_string()))?;
        Ok(())
    }
}
