//! Efficiency and completion time as the base direction drifts off the path.

use proactive_tactile::bench::{angle_sweep, ExperimentConfig, Method};
use proactive_tactile::objects::{generate_suite, SuiteSpec};

fn main() {
    let spec = SuiteSpec { prismatic: 10, revolute: 0, bezier: [0; 4], ..SuiteSpec::desk(1) };
    let objects = generate_suite(&spec).unwrap();
    let cfg = ExperimentConfig { methods: vec![Method::Proactive], ..Default::default() };
    let thetas = [-45.0, -15.0, 0.0, 15.0, 30.0, 45.0, 60.0, 75.0];
    let rows = angle_sweep(&cfg, &objects, &thetas).unwrap();

    println!("{:>6} {:>8} {:>10} {:>9}", "θ°", "success", "eff_%", "time_s");
    for theta in thetas {
        let at: Vec<_> = rows.iter().filter(|r| r.theta_deg == theta).map(|r| &r.row).collect();
        let ok: Vec<_> = at.iter().filter(|r| r.outcome.is_success()).collect();
        let mean = |f: fn(&&&proactive_tactile::bench::MetricsRow) -> f64| {
            ok.iter().map(f).sum::<f64>() / ok.len().max(1) as f64
        };
        println!(
            "{theta:>6} {:>5}/{:<2} {:>10.4} {:>9.2}",
            ok.len(),
            at.len(),
            mean(|r| r.mean_action_eff_pct.unwrap()),
            mean(|r| r.completion_time_s.unwrap())
        );
    }
}
