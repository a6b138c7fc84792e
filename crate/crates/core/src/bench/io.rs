//! On-disk formats: suite documents, metrics CSV, episode logs, JSON reports.

use super::metrics::MetricsRow;
use crate::objects::{ArticulationModel, Category, SuiteSpec};
use crate::sim::{EpisodeLog, Outcome};
use flate2::read::GzDecoder;
use flate2::write::GzEncoder;
use flate2::Compression;
use serde::{Deserialize, Serialize};
use std::fs::File;
use std::io::{BufReader, BufWriter, Read, Write};
use std::path::Path;

pub const SUITE_SCHEMA_VERSION: u32 = 1;
pub const SUITE_FILE: &str = "suite.toml";
pub const METRICS_HEADER: [&str; 9] = [
    "object_id",
    "category",
    "method",
    "outcome",
    "steps",
    "completion_time_s",
    "mean_action_eff_pct",
    "action_eff_rsd",
    "time_weighted_jerk_s3",
];

#[derive(Debug, thiserror::Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io { path: String, source: std::io::Error },
    #[error("{path}: {msg}")]
    Format { path: String, msg: String },
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> IoError + '_ {
    move |source| IoError::Io {
        path: path.display().to_string(),
        source,
    }
}

fn fmt_err(path: &Path, msg: impl ToString) -> IoError {
    IoError::Format {
        path: path.display().to_string(),
        msg: msg.to_string(),
    }
}

/// A generated suite with the spec it came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SuiteDocument {
    pub schema_version: u32,
    pub spec: Option<SuiteSpec>,
    pub objects: Vec<ArticulationModel>,
}

impl SuiteDocument {
    pub fn new(spec: Option<SuiteSpec>, objects: Vec<ArticulationModel>) -> Self {
        Self {
            schema_version: SUITE_SCHEMA_VERSION,
            spec,
            objects,
        }
    }

    pub fn to_toml_string(&self) -> String {
        toml::to_string(self).expect("suite is always serializable")
    }

    pub fn from_toml_str(s: &str) -> Result<Self, String> {
        let doc: Self = toml::from_str(s).map_err(|e| e.to_string())?;
        if doc.schema_version != SUITE_SCHEMA_VERSION {
            return Err(format!("unsupported suite schema_version {}", doc.schema_version));
        }
        for m in &doc.objects {
            m.validate().map_err(|e| format!("{}: {e}", m.id))?;
        }
        Ok(doc)
    }

    /// Writes `dir/suite.toml`.
    pub fn save(&self, dir: &Path) -> Result<(), IoError> {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
        let path = dir.join(SUITE_FILE);
        std::fs::write(&path, self.to_toml_string()).map_err(io_err(&path))
    }

    /// Reads a suite from a directory containing `suite.toml`, or the file itself.
    pub fn load(path: &Path) -> Result<Self, IoError> {
        let file = if path.is_dir() { path.join(SUITE_FILE) } else { path.to_path_buf() };
        let text = std::fs::read_to_string(&file).map_err(io_err(&file))?;
        Self::from_toml_str(&text).map_err(|m| fmt_err(&file, m))
    }
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

pub fn write_metrics_csv<W: Write>(w: W, rows: &[MetricsRow]) -> csv::Result<()> {
    let mut wr = csv::Writer::from_writer(w);
    wr.write_record(METRICS_HEADER)?;
    for r in rows {
        wr.write_record([
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

pub fn read_metrics_csv<R: Read>(r: R) -> Result<Vec<MetricsRow>, String> {
    let mut rd = csv::Reader::from_reader(r);
    let header = rd.headers().map_err(|e| e.to_string())?;
    if header.iter().ne(METRICS_HEADER) {
        return Err(format!("unexpected header: {}", header.iter().collect::<Vec<_>>().join(",")));
    }
    let num = |s: &str, what: &str| -> Result<Option<f64>, String> {
        if s.is_empty() {
            Ok(None)
        } else {
            s.parse().map(Some).map_err(|_| format!("bad {what}: {s:?}"))
        }
    };
    let mut rows = Vec::new();
    for rec in rd.records() {
        let rec = rec.map_err(|e| e.to_string())?;
        let f = |i: usize| rec.get(i).unwrap_or("");
        rows.push(MetricsRow {
            object_id: f(0).to_string(),
            category: Category::parse(f(1)).ok_or_else(|| format!("bad category {:?}", f(1)))?,
            method: f(2).to_string(),
            outcome: Outcome::parse(f(3)).ok_or_else(|| format!("bad outcome {:?}", f(3)))?,
            steps: f(4).parse().map_err(|_| format!("bad steps {:?}", f(4)))?,
            completion_time_s: num(f(5), "completion_time_s")?,
            mean_action_eff_pct: num(f(6), "mean_action_eff_pct")?,
            action_eff_rsd: num(f(7), "action_eff_rsd")?,
            time_weighted_jerk_s3: num(f(8), "time_weighted_jerk_s3")?,
        });
    }
    Ok(rows)
}

pub fn save_metrics(path: &Path, rows: &[MetricsRow]) -> Result<(), IoError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir).map_err(io_err(dir))?;
    }
    let f = File::create(path).map_err(io_err(path))?;
    write_metrics_csv(BufWriter::new(f), rows).map_err(|e| fmt_err(path, e))
}

pub fn load_metrics(path: &Path) -> Result<Vec<MetricsRow>, IoError> {
    let f = File::open(path).map_err(io_err(path))?;
    read_metrics_csv(BufReader::new(f)).map_err(|m| fmt_err(path, m))
}

fn is_gz(path: &Path) -> bool {
    path.extension().is_some_and(|e| e == "gz")
}

/// Writes an episode log as JSON lines, gzip-compressed when the path ends in `.gz`.
pub fn save_log(path: &Path, log: &EpisodeLog) -> Result<(), IoError> {
    let f = BufWriter::new(File::create(path).map_err(io_err(path))?);
    if is_gz(path) {
        let mut gz = GzEncoder::new(f, Compression::default());
        log.write_jsonl(&mut gz).map_err(io_err(path))?;
        gz.finish().map_err(io_err(path))?.flush().map_err(io_err(path))
    } else {
        let mut f = f;
        log.write_jsonl(&mut f).map_err(io_err(path))?;
        f.flush().map_err(io_err(path))
    }
}

pub fn load_log(path: &Path) -> Result<EpisodeLog, IoError> {
    let f = File::open(path).map_err(io_err(path))?;
    if is_gz(path) {
        EpisodeLog::read_jsonl(BufReader::new(GzDecoder::new(f))).map_err(io_err(path))
    } else {
        EpisodeLog::read_jsonl(BufReader::new(f)).map_err(io_err(path))
    }
}

/// Log files (`*.jsonl`, `*.jsonl.gz`) in `dir`, sorted by name.
pub fn list_logs(dir: &Path) -> Result<Vec<std::path::PathBuf>, IoError> {
    let mut out = Vec::new();
    for e in std::fs::read_dir(dir).map_err(io_err(dir))? {
        let p = e.map_err(io_err(dir))?.path();
        let name = p.file_name().and_then(|n| n.to_str()).unwrap_or("");
        if name.ends_with(".jsonl") || name.ends_with(".jsonl.gz") {
            out.push(p);
        }
    }
    out.sort();
    Ok(out)
}

pub fn save_json<T: Serialize>(path: &Path, value: &T) -> Result<(), IoError> {
    let mut text = serde_json::to_string_pretty(value).map_err(|e| fmt_err(path, e))?;
    text.push('\n');
    std::fs::write(path, text).map_err(io_err(path))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sim::FailureKind;

    fn rows() -> Vec<MetricsRow> {
        vec![
            MetricsRow {
                object_id: "prismatic-000".into(),
                category: Category::Prismatic,
                method: "proactive".into(),
                outcome: Outcome::Success,
                steps: 301,
                completion_time_s: Some(5.016666666666667),
                mean_action_eff_pct: Some(0.33222591362126247),
                action_eff_rsd: Some(1e-17),
                time_weighted_jerk_s3: Some(0.1 + 0.2),
            },
            MetricsRow {
                object_id: "bezier5-003".into(),
                category: Category::Bezier5,
                method: "reactive".into(),
                outcome: Outcome::Failure(FailureKind::Slip),
                steps: 12,
                completion_time_s: None,
                mean_action_eff_pct: None,
                action_eff_rsd: Some(f64::INFINITY),
                time_weighted_jerk_s3: None,
            },
        ]
    }

    #[test]
    fn csv_round_trip_and_header() {
        let mut buf = Vec::new();
        write_metrics_csv(&mut buf, &rows()).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert_eq!(
            text.lines().next().unwrap(),
            "object_id,category,method,outcome,steps,completion_time_s,mean_action_eff_pct,action_eff_rsd,time_weighted_jerk_s3"
        );
        assert!(text.contains("FAILURE(slip)"));
        assert_eq!(read_metrics_csv(&buf[..]).unwrap(), rows());
    }

    #[test]
    fn csv_rejects_wrong_header() {
        assert!(read_metrics_csv("a,b\n1,2\n".as_bytes()).is_err());
    }

    #[test]
    fn suite_round_trip() {
        let spec = SuiteSpec {
            prismatic: 2,
            revolute: 2,
            helical: 1,
            bezier: [1, 1, 1, 1],
            ..SuiteSpec::default()
        };
        let objects = crate::objects::generate_suite(&spec).unwrap();
        let doc = SuiteDocument::new(Some(spec), objects);
        let text = doc.to_toml_string();
        let back = SuiteDocument::from_toml_str(&text).unwrap();
        assert_eq!(back, doc);
        assert_eq!(back.to_toml_string(), text);
    }
}
