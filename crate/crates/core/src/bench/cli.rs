//! `tacbench` command line.

use super::config::{ExperimentConfig, Method};
use super::io::{list_logs, load_log, load_metrics, save_json, save_metrics, SuiteDocument};
use super::metrics::{metrics_row, success_rate};
use super::runner::{angle_sweep, run_suite, write_sweep_csv, BenchError};
use super::stats::{compare, compare_methods};
use crate::objects::{generate_suite, SuiteSpec};
use clap::{Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

#[derive(Debug, Parser)]
#[command(name = "tacbench", version, about = "Articulated-object manipulation benchmark")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    Proactive,
    Reactive,
    Both,
}

impl MethodArg {
    fn methods(self) -> Vec<Method> {
        match self {
            MethodArg::Proactive => vec![Method::Proactive],
            MethodArg::Reactive => vec![Method::Reactive],
            MethodArg::Both => Method::BOTH.to_vec(),
        }
    }
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate an object suite into <out>/suite.toml.
    Generate {
        /// Suite spec file, or one of the presets `desk` / `full`.
        #[arg(long)]
        spec: String,
        #[arg(long)]
        seed: u64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Run episodes and write metrics.csv, summary.json and logs/.
    Run {
        #[arg(long)]
        suite: PathBuf,
        #[arg(long, value_enum, default_value = "both")]
        method: MethodArg,
        /// Experiment config; defaults apply when omitted.
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        jobs: Option<usize>,
    },
    /// Recompute metrics.csv from a directory of episode logs.
    Metrics {
        #[arg(long)]
        logs: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Welch comparison of two metrics files (b relative to a).
    Compare {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sweep the base direction over the suite's prismatic objects.
    Sweep {
        #[arg(long)]
        suite: PathBuf,
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
        thetas: Vec<f64>,
        #[arg(long)]
        out: PathBuf,
        #[arg(long)]
        config: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "proactive")]
        method: MethodArg,
        #[arg(long)]
        jobs: Option<usize>,
    },
}

/// Suite spec file: `schema_version` plus a `[suite]` table.
#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SpecFile {
    pub schema_version: u32,
    #[serde(default)]
    pub suite: SuiteSpec,
}

fn config_err(e: impl ToString) -> BenchError {
    BenchError::Config(e.to_string())
}

fn load_spec(arg: &str) -> Result<SuiteSpec, BenchError> {
    match arg {
        "desk" if !Path::new(arg).exists() => return Ok(SuiteSpec::desk(0)),
        "full" if !Path::new(arg).exists() => return Ok(SuiteSpec::default()),
        _ => {}
    }
    let text = std::fs::read_to_string(arg).map_err(|e| config_err(format!("{arg}: {e}")))?;
    let f: SpecFile = toml::from_str(&text).map_err(|e| config_err(format!("{arg}: {e}")))?;
    if f.schema_version != super::io::SUITE_SCHEMA_VERSION {
        return Err(config_err(format!("{arg}: unsupported schema_version {}", f.schema_version)));
    }
    Ok(f.suite)
}

fn load_config(path: Option<&Path>) -> Result<ExperimentConfig, BenchError> {
    Ok(match path {
        Some(p) => ExperimentConfig::load(p)?,
        None => ExperimentConfig::default(),
    })
}

fn load_suite(path: &Path) -> Result<SuiteDocument, BenchError> {
    // A missing or malformed suite is a configuration problem.
    SuiteDocument::load(path).map_err(config_err)
}

#[derive(Debug, Serialize)]
struct Summary {
    schema_version: u32,
    objects: usize,
    rows: usize,
    success_rate: BTreeMap<String, f64>,
    comparison: Option<super::stats::ComparisonReport>,
}

fn summarize(rows: &[super::metrics::MetricsRow], methods: &[Method]) -> Summary {
    let mut rate = BTreeMap::new();
    for &m in methods {
        let r: Vec<_> = rows.iter().filter(|r| r.method == m.label()).cloned().collect();
        rate.insert(m.label().to_string(), success_rate(&r));
    }
    let objects = rows.iter().map(|r| r.object_id.as_str()).collect::<std::collections::BTreeSet<_>>().len();
    Summary {
        schema_version: super::stats::REPORT_SCHEMA_VERSION,
        objects,
        rows: rows.len(),
        success_rate: rate,
        comparison: (methods.len() == 2)
            .then(|| compare_methods(rows, Method::Proactive.label(), Method::Reactive.label()).ok())
            .flatten(),
    }
}

pub fn execute(cli: Cli) -> Result<(), BenchError> {
    match cli.command {
        Command::Generate { spec, seed, out } => {
            let mut s = load_spec(&spec)?;
            s.seed = seed;
            s.validate().map_err(config_err)?;
            let objects = generate_suite(&s).map_err(|e| BenchError::Runtime(e.to_string()))?;
            SuiteDocument::new(Some(s), objects).save(&out)?;
        }
        Command::Run { suite, method, config, out, jobs } => {
            let mut cfg = load_config(config.as_deref())?;
            cfg.methods = method.methods();
            if let Some(j) = jobs {
                cfg.jobs = j;
            }
            let doc = load_suite(&suite)?;
            cfg.validate()?;
            let log_dir = out.join("logs");
            let rows = run_suite(&cfg, &doc.objects, cfg.write_logs.then_some(log_dir.as_path()))?;
            save_metrics(&out.join("metrics.csv"), &rows)?;
            save_json(&out.join("summary.json"), &summarize(&rows, &cfg.methods))?;
            std::fs::write(out.join("config.toml"), cfg.to_toml_string())
                .map_err(|e| BenchError::Runtime(e.to_string()))?;
        }
        Command::Metrics { logs, out } => {
            let cfg = ExperimentConfig::default();
            let files = list_logs(&logs)?;
            if files.is_empty() {
                return Err(BenchError::Config(format!("no episode logs in {}", logs.display())));
            }
            let mut rows = files
                .iter()
                .map(|p| load_log(p).map(|l| metrics_row(&l, cfg.jerk)))
                .collect::<Result<Vec<_>, _>>()?;
            rows.sort_by(|a, b| (&a.object_id, &a.method).cmp(&(&b.object_id, &b.method)));
            save_metrics(&out, &rows)?;
        }
        Command::Compare { a, b, out } => {
            let ra = load_metrics(&a).map_err(config_err)?;
            let rb = load_metrics(&b).map_err(config_err)?;
            let report = compare(&ra, &rb).map_err(|e| BenchError::Runtime(e.to_string()))?;
            save_json(&out, &report)?;
        }
        Command::Sweep { suite, thetas, out, config, method, jobs } => {
            let mut cfg = load_config(config.as_deref())?;
            cfg.methods = method.methods();
            if let Some(j) = jobs {
                cfg.jobs = j;
            }
            let doc = load_suite(&suite)?;
            let rows = angle_sweep(&cfg, &doc.objects, &thetas)?;
            std::fs::create_dir_all(&out).map_err(|e| BenchError::Runtime(e.to_string()))?;
            let f = std::fs::File::create(out.join("sweep.csv")).map_err(|e| BenchError::Runtime(e.to_string()))?;
            write_sweep_csv(std::io::BufWriter::new(f), &rows).map_err(|e| BenchError::Runtime(e.to_string()))?;
        }
    }
    Ok(())
}

/// Parses `std::env::args`, runs, and returns the process exit code.
pub fn main() -> i32 {
    let cli = Cli::parse();
    match execute(cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("tacbench: {e}");
            e.exit_code()
        }
    }
}
