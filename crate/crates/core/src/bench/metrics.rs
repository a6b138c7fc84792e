//! Per-episode metrics: completion time, action efficiency and its RSD,
//! time-weighted jerk.

use crate::objects::Category;
use crate::sim::{EpisodeLog, Outcome};
use serde::{Deserialize, Serialize};

/// Resampling rate for jerk, Hz.
pub const JERK_RATE: f64 = 60.0;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricError {
    #[error("metric undefined for outcome {0}")]
    NotSuccessful(Outcome),
    #[error("insufficient samples: need {need}, have {have}")]
    InsufficientSamples { need: usize, have: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum JerkAggregation {
    #[default]
    Mean,
    Max,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MetricsRow {
    pub object_id: String,
    pub category: Category,
    pub method: String,
    pub outcome: Outcome,
    pub steps: u64,
    pub completion_time_s: Option<f64>,
    pub mean_action_eff_pct: Option<f64>,
    pub action_eff_rsd: Option<f64>,
    pub time_weighted_jerk_s3: Option<f64>,
}

/// Final model time of a successful episode.
pub fn metric_time(log: &EpisodeLog) -> Result<f64, MetricError> {
    if !log.outcome().is_success() {
        return Err(MetricError::NotSuccessful(log.outcome()));
    }
    Ok(log.final_time())
}

/// Mean per-step efficiency (percent of the success threshold) and its
/// relative standard deviation, from the path state sequence s₀, s₁, ….
pub fn action_efficiency(s: &[f64], threshold: f64) -> Result<(f64, f64), MetricError> {
    if s.len() < 3 {
        return Err(MetricError::InsufficientSamples {
            need: 3,
            have: s.len(),
        });
    }
    let e: Vec<f64> = s.windows(2).map(|w| (w[1] - w[0]) / threshold * 100.0).collect();
    let n = e.len() as f64;
    let mean = e.iter().sum::<f64>() / n;
    let var = e.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / n;
    let rsd = if mean == 0.0 { f64::INFINITY } else { var.sqrt() / mean.abs() };
    Ok((mean, rsd))
}

pub fn metric_action_efficiency(log: &EpisodeLog) -> Result<(f64, f64), MetricError> {
    let s: Vec<f64> = log.records.iter().map(|r| r.s).collect();
    action_efficiency(&s, log.header.success_threshold)
}

/// Completion time × aggregated |third derivative| of the joint trajectories,
/// after linear resampling at `rate` Hz.
pub fn time_weighted_jerk(
    t: &[f64],
    q: &[Vec<f64>],
    rate: f64,
    agg: JerkAggregation,
) -> Result<f64, MetricError> {
    let steps = t.len().saturating_sub(1);
    if steps < 4 {
        return Err(MetricError::InsufficientSamples { need: 4, have: steps });
    }
    let total = t[t.len() - 1];
    let h = 1.0 / rate;
    let n = (total * rate + 1e-9).floor() as usize + 1;
    if n < 5 {
        return Err(MetricError::InsufficientSamples { need: 5, have: n });
    }
    let dof = q[0].len();
    let mut grid = vec![vec![0.0; n]; dof];
    let mut seg = 0;
    for k in 0..n {
        let tk = (k as f64 * h).min(total);
        while seg + 2 < t.len() && t[seg + 1] < tk {
            seg += 1;
        }
        let (t0, t1) = (t[seg], t[seg + 1]);
        let w = if t1 > t0 { ((tk - t0) / (t1 - t0)).clamp(0.0, 1.0) } else { 1.0 };
        for j in 0..dof {
            grid[j][k] = q[seg][j] + w * (q[seg + 1][j] - q[seg][j]);
        }
    }
    let h3 = 2.0 * h * h * h;
    let mut acc = 0.0;
    let mut max: f64 = 0.0;
    let mut count = 0usize;
    for g in &grid {
        for k in 2..n - 2 {
            let j = ((g[k + 2] - 2.0 * g[k + 1] + 2.0 * g[k - 1] - g[k - 2]) / h3).abs();
            acc += j;
            max = max.max(j);
            count += 1;
        }
    }
    let agg = match agg {
        JerkAggregation::Mean => acc / count as f64,
        JerkAggregation::Max => max,
    };
    Ok(total * agg)
}

pub fn metric_jerk(log: &EpisodeLog, agg: JerkAggregation) -> Result<f64, MetricError> {
    let t: Vec<f64> = log.records.iter().map(|r| r.t).collect();
    let q: Vec<Vec<f64>> = log.records.iter().map(|r| r.q.clone()).collect();
    time_weighted_jerk(&t, &q, JERK_RATE, agg)
}

/// Metrics row; the metric columns are filled only for successful episodes.
pub fn metrics_row(log: &EpisodeLog, agg: JerkAggregation) -> MetricsRow {
    let ok = log.outcome().is_success();
    let eff = ok.then(|| metric_action_efficiency(log).ok()).flatten();
    MetricsRow {
        object_id: log.header.object_id.clone(),
        category: log.header.category,
        method: log.header.method.clone(),
        outcome: log.outcome(),
        steps: log.steps(),
        completion_time_s: metric_time(log).ok(),
        mean_action_eff_pct: eff.map(|e| e.0),
        action_eff_rsd: eff.map(|e| e.1),
        time_weighted_jerk_s3: ok.then(|| metric_jerk(log, agg).ok()).flatten(),
    }
}

/// Fraction of rows with a SUCCESS outcome.
pub fn success_rate(rows: &[MetricsRow]) -> f64 {
    if rows.is_empty() {
        return 0.0;
    }
    rows.iter().filter(|r| r.outcome.is_success()).count() as f64 / rows.len() as f64
}
