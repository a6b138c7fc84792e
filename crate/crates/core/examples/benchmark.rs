//! A small two-method benchmark with the Welch comparison report.

use proactive_tactile::bench::{compare_methods, run_suite, ExperimentConfig};
use proactive_tactile::objects::{generate_suite, SuiteSpec};

fn main() {
    let spec = SuiteSpec { prismatic: 4, revolute: 4, bezier: [2; 4], ..SuiteSpec::desk(3) };
    let objects = generate_suite(&spec).unwrap();
    let rows = run_suite(&ExperimentConfig::default(), &objects, None).unwrap();

    let mut csv = Vec::new();
    proactive_tactile::bench::io::write_metrics_csv(&mut csv, &rows).unwrap();
    print!("{}", String::from_utf8(csv).unwrap());

    let report = compare_methods(&rows, "proactive", "reactive").unwrap();
    for (name, m) in &report.metrics {
        let w = m.pooled.welch.unwrap();
        println!(
            "{name:24} proactive {:9.4} reactive {:9.4} ratio {:7.2} t({:.1}) = {:7.2}, p = {:.1e}",
            m.pooled.mean_a,
            m.pooled.mean_b,
            m.pooled.ratio_b_over_a.unwrap_or(f64::NAN),
            w.dof,
            w.t,
            w.p
        );
    }
}
