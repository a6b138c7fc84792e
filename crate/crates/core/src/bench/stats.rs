//! Welch's unequal-variance t-test and the method comparison report.

use super::metrics::{success_rate, MetricsRow};
use serde::{Deserialize, Serialize};
use statrs::function::beta::beta_reg;
use std::collections::BTreeMap;

pub const REPORT_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum StatsError {
    #[error("need at least 2 samples per side, have {a} and {b}")]
    InsufficientRows { a: usize, b: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Welch {
    pub t: f64,
    pub dof: f64,
    pub p: f64,
}

pub fn mean_sd(x: &[f64]) -> (f64, f64) {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    if x.len() < 2 {
        return (mean, 0.0);
    }
    let ss = x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
    (mean, (ss / (n - 1.0)).sqrt())
}

/// Two-sided Welch test with Welch–Satterthwaite degrees of freedom.
pub fn welch_t_test(a: &[f64], b: &[f64]) -> Result<Welch, StatsError> {
    if a.len() < 2 || b.len() < 2 {
        return Err(StatsError::InsufficientRows { a: a.len(), b: b.len() });
    }
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (ma, sa) = mean_sd(a);
    let (mb, sb) = mean_sd(b);
    let (qa, qb) = (sa * sa / na, sb * sb / nb);
    let se2 = qa + qb;
    if se2 == 0.0 {
        // Both samples constant: the statistic degenerates.
        let dof = na + nb - 2.0;
        return Ok(if ma == mb {
            Welch { t: 0.0, dof, p: 1.0 }
        } else {
            Welch {
                t: if ma > mb { f64::INFINITY } else { f64::NEG_INFINITY },
                dof,
                p: f64::MIN_POSITIVE,
            }
        });
    }
    let t = (ma - mb) / se2.sqrt();
    let dof = se2 * se2 / (qa * qa / (na - 1.0) + qb * qb / (nb - 1.0));
    let p = beta_reg(dof / 2.0, 0.5, dof / (dof + t * t)).clamp(f64::MIN_POSITIVE, 1.0);
    Ok(Welch { t, dof, p })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricSummary {
    pub n_a: usize,
    pub n_b: usize,
    pub mean_a: f64,
    pub sd_a: f64,
    pub mean_b: f64,
    pub sd_b: f64,
    /// mean_b / mean_a.
    pub ratio_b_over_a: Option<f64>,
    pub welch: Option<Welch>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricComparison {
    pub pooled: MetricSummary,
    pub by_category: BTreeMap<String, MetricSummary>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComparisonReport {
    pub schema_version: u32,
    pub label_a: String,
    pub label_b: String,
    pub rows_a: usize,
    pub rows_b: usize,
    pub success_rate_a: f64,
    pub success_rate_b: f64,
    pub success_rate_by_category: BTreeMap<String, [f64; 2]>,
    pub metrics: BTreeMap<String, MetricComparison>,
}

impl ComparisonReport {
    pub fn metric(&self, name: &str) -> &MetricComparison {
        &self.metrics[name]
    }
}

pub const METRIC_NAMES: [&str; 4] = [
    "completion_time_s",
    "mean_action_eff_pct",
    "action_eff_rsd",
    "time_weighted_jerk_s3",
];

fn metric_value(r: &MetricsRow, name: &str) -> Option<f64> {
    match name {
        "completion_time_s" => r.completion_time_s,
        "mean_action_eff_pct" => r.mean_action_eff_pct,
        "action_eff_rsd" => r.action_eff_rsd,
        "time_weighted_jerk_s3" => r.time_weighted_jerk_s3,
        _ => None,
    }
    .filter(|v| v.is_finite())
}

fn summarize(a: &[f64], b: &[f64]) -> MetricSummary {
    let (mean_a, sd_a) = if a.is_empty() { (f64::NAN, f64::NAN) } else { mean_sd(a) };
    let (mean_b, sd_b) = if b.is_empty() { (f64::NAN, f64::NAN) } else { mean_sd(b) };
    let ratio = mean_b / mean_a;
    MetricSummary {
        n_a: a.len(),
        n_b: b.len(),
        mean_a,
        sd_a,
        mean_b,
        sd_b,
        ratio_b_over_a: (ratio.is_finite() && ratio > 0.0).then_some(ratio),
        welch: welch_t_test(a, b).ok(),
    }
}

fn label(rows: &[MetricsRow]) -> String {
    let mut methods: Vec<&str> = rows.iter().map(|r| r.method.as_str()).collect();
    methods.sort_unstable();
    methods.dedup();
    methods.join("+")
}

/// Compares two row sets metric by metric. Only successful rows with a
/// finite value enter the statistics.
pub fn compare(rows_a: &[MetricsRow], rows_b: &[MetricsRow]) -> Result<ComparisonReport, StatsError> {
    let ok_a = rows_a.iter().filter(|r| r.outcome.is_success()).count();
    let ok_b = rows_b.iter().filter(|r| r.outcome.is_success()).count();
    if ok_a < 2 || ok_b < 2 {
        return Err(StatsError::InsufficientRows { a: ok_a, b: ok_b });
    }
    let mut cats: Vec<_> = rows_a.iter().chain(rows_b).map(|r| r.category).collect();
    cats.sort();
    cats.dedup();

    let values = |rows: &[MetricsRow], name: &str, cat: Option<crate::objects::Category>| -> Vec<f64> {
        rows.iter()
            .filter(|r| r.outcome.is_success() && cat.is_none_or(|c| r.category == c))
            .filter_map(|r| metric_value(r, name))
            .collect()
    };

    let mut metrics = BTreeMap::new();
    for name in METRIC_NAMES {
        let pooled = summarize(&values(rows_a, name, None), &values(rows_b, name, None));
        let by_category = cats
            .iter()
            .map(|&c| {
                let s = summarize(&values(rows_a, name, Some(c)), &values(rows_b, name, Some(c)));
                (c.name().to_string(), s)
            })
            .collect();
        metrics.insert(name.to_string(), MetricComparison { pooled, by_category });
    }
    let success_rate_by_category = cats
        .iter()
        .map(|&c| {
            let pick = |rows: &[MetricsRow]| {
                let v: Vec<MetricsRow> = rows.iter().filter(|r| r.category == c).cloned().collect();
                success_rate(&v)
            };
            (c.name().to_string(), [pick(rows_a), pick(rows_b)])
        })
        .collect();

    Ok(ComparisonReport {
        schema_version: REPORT_SCHEMA_VERSION,
        label_a: label(rows_a),
        label_b: label(rows_b),
        rows_a: rows_a.len(),
        rows_b: rows_b.len(),
        success_rate_a: success_rate(rows_a),
        success_rate_b: success_rate(rows_b),
        success_rate_by_category,
        metrics,
    })
}

/// Splits one row set by method and compares `a` against `b`.
pub fn compare_methods(rows: &[MetricsRow], a: &str, b: &str) -> Result<ComparisonReport, StatsError> {
    let pick = |m: &str| -> Vec<MetricsRow> { rows.iter().filter(|r| r.method == m).cloned().collect() };
    compare(&pick(a), &pick(b))
}
