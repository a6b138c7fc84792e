//! Generate the 80-object desk suite and write it out as TOML.

use proactive_tactile::bench::io::SuiteDocument;
use proactive_tactile::objects::{generate_suite, max_curvature, ArticulationKind, SuiteSpec};
use std::collections::BTreeMap;

fn main() {
    let spec = SuiteSpec::desk(0);
    let objects = generate_suite(&spec).unwrap();

    let mut per_category: BTreeMap<&str, usize> = BTreeMap::new();
    for m in &objects {
        *per_category.entry(m.category.name()).or_default() += 1;
    }
    println!("{} objects: {per_category:?}", objects.len());

    for m in objects.iter().filter(|m| m.category.is_bezier()).take(4) {
        if let ArticulationKind::Bezier { curve } = &m.kind {
            println!(
                "{}: {} control points, length {:.3} m, min radius {:.3} m",
                m.id,
                curve.control_points().len(),
                curve.arc_length(512),
                1.0 / max_curvature(curve, 1024)
            );
        }
    }

    let out = std::env::temp_dir().join("desk-suite");
    SuiteDocument::new(Some(spec), objects).save(&out).unwrap();
    println!("wrote {}", out.join("suite.toml").display());
}
