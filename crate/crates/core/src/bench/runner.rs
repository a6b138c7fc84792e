//! Batched episode execution and the base-direction sweep.

use super::config::{BaseDirection, ExperimentConfig, Method};
use super::io::{save_log, IoError};
use super::metrics::{metrics_row, MetricsRow};
use crate::objects::{ArticulationModel, Category};
use crate::sim::{run_episode, RobotModel, SimError};
use rayon::prelude::*;
use std::path::Path;

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("config error: {0}")]
    Config(String),
    #[error("{0}")]
    Io(#[from] IoError),
    #[error("episode {id} ({method}) failed to run: {source}")]
    Episode { id: String, method: &'static str, source: SimError },
    #[error("{0}")]
    Runtime(String),
}

impl BenchError {
    pub fn exit_code(&self) -> i32 {
        match self {
            BenchError::Config(_) => 2,
            _ => 3,
        }
    }
}

impl From<super::config::ConfigError> for BenchError {
    fn from(e: super::config::ConfigError) -> Self {
        BenchError::Config(e.to_string())
    }
}

/// Places each object where the robot's home configuration holds the gripper.
fn prepare_objects(cfg: &ExperimentConfig, objects: &[ArticulationModel]) -> Result<Vec<ArticulationModel>, BenchError> {
    match &cfg.robot {
        RobotModel::FreeFlying { .. } => Ok(objects.to_vec()),
        RobotModel::SerialChain(chain) => {
            let home = chain.forward(&chain.q0);
            Ok(objects.iter().map(|m| m.clone().placed_at(&home)).collect())
        }
    }
}

pub fn log_file_name(object_id: &str, method: Method) -> String {
    format!("{object_id}__{}.jsonl.gz", method.label())
}

/// Runs every (object, method) pair and returns rows sorted by
/// (object id, method). Logs go to `log_dir` when given.
pub fn run_suite(
    cfg: &ExperimentConfig,
    objects: &[ArticulationModel],
    log_dir: Option<&Path>,
) -> Result<Vec<MetricsRow>, BenchError> {
    cfg.validate()?;
    let objects = prepare_objects(cfg, objects)?;
    let mut methods = cfg.methods.clone();
    methods.sort();
    methods.dedup();
    let mut seen = std::collections::BTreeSet::new();
    for m in &objects {
        if !seen.insert(m.id.as_str()) {
            return Err(BenchError::Config(format!("duplicate object id {}", m.id)));
        }
        cfg.episode(m, methods[0]).validate().map_err(|e| BenchError::Config(format!("{}: {e}", m.id)))?;
    }
    if let Some(dir) = log_dir {
        std::fs::create_dir_all(dir).map_err(|source| IoError::Io {
            path: dir.display().to_string(),
            source,
        })?;
    }
    let jobs: Vec<(&ArticulationModel, Method)> =
        objects.iter().flat_map(|m| methods.iter().map(move |&k| (m, k))).collect();
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(cfg.jobs)
        .build()
        .map_err(|e| BenchError::Runtime(e.to_string()))?;
    let mut rows = pool.install(|| {
        jobs.par_iter()
            .map(|&(m, method)| -> Result<MetricsRow, BenchError> {
                let ep = cfg.episode(m, method);
                let log = run_episode(m, &cfg.robot, &ep, cfg.episode_seed(m, method)).map_err(|source| {
                    BenchError::Episode {
                        id: m.id.clone(),
                        method: method.label(),
                        source,
                    }
                })?;
                if let Some(dir) = log_dir {
                    save_log(&dir.join(log_file_name(&m.id, method)), &log)?;
                }
                Ok(metrics_row(&log, cfg.jerk))
            })
            .collect::<Result<Vec<_>, _>>()
    })?;
    rows.sort_by(|a, b| (&a.object_id, &a.method).cmp(&(&b.object_id, &b.method)));
    Ok(rows)
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub theta_deg: f64,
    pub row: MetricsRow,
}

pub const SWEEP_HEADER: &str = "theta_deg";

/// Runs each prismatic object once per θ with the base direction rotated by
/// θ from the start tangent (no per-object jitter).
pub fn angle_sweep(
    cfg: &ExperimentConfig,
    objects: &[ArticulationModel],
    thetas: &[f64],
) -> Result<Vec<SweepRow>, BenchError> {
    let prismatic: Vec<ArticulationModel> =
        objects.iter().filter(|m| m.category == Category::Prismatic).cloned().collect();
    if prismatic.is_empty() {
        return Err(BenchError::Config("angle sweep needs prismatic objects".into()));
    }
    if thetas.is_empty() {
        return Err(BenchError::Config("no sweep angles given".into()));
    }
    let mut out = Vec::new();
    for &theta in thetas {
        if theta.abs() >= 90.0 {
            eprintln!("warning: |θ| = {theta}° ≥ 90°, the base velocity opposes the path and episodes are expected to fail");
        }
        let mut c = cfg.clone();
        c.base = c.base.without_jitter();
        c.base.direction = BaseDirection::AngleOffset(theta);
        for row in run_suite(&c, &prismatic, None)? {
            out.push(SweepRow { theta_deg: theta, row });
        }
    }
    Ok(out)
}

pub fn write_sweep_csv<W: std::io::Write>(w: W, rows: &[SweepRow]) -> csv::Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    let mut header = vec![SWEEP_HEADER];
    header.extend(super::io::METRICS_HEADER);
    wr.write_record(&header)?;
    let opt = |x: Option<f64>| x.map(|v| v.to_string()).unwrap_or_default();
    for s in rows {
        let r = &s.row;
        wr.write_record([
            s.theta_deg.to_string(),
            r.object_id.clone(),
            r.category.name().to_string(),
            r.method.clone(),
            r.outcome.to_string(),
            r.steps.to_string(),
            opt(r.completion_time_s),
            opt(r.mean_action_eff_pct),
            opt(r.action_eff_rsd),
            opt(r.time_weighted_jerk_s3),
        ])?;
    }
    wr.flush()?;
    Ok(())
}
