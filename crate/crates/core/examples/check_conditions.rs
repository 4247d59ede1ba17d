//! Measure and width conditions on a half-plane and on a segment.

use std::path::Path;

use hardy_ext::conditions::{check_condition, ConditionKind, ConditionParams};
use hardy_ext::counterexamples::segment_domain;
use hardy_ext::geometry::{whitney_centers, DomainModel};

fn main() -> hardy_ext::Result<()> {
    let half_plane = DomainModel::read_json(&Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data/half_plane.json"))?;
    let segment = segment_domain(1.0, 1.0 / 64.0)?;
    let params = ConditionParams::new(2.0, 0.05)?;

    for (name, domain) in [("half-plane", &half_plane), ("segment", &segment)] {
        // stay away from the bounding box so balls see the whole complement nearby
        let samples: Vec<_> = whitney_centers(domain, 5)?
            .into_iter()
            .filter(|x| x[0].abs() < 0.5 && x[1].abs() < 0.5)
            .collect();
        for kind in [ConditionKind::Measure, ConditionKind::Width] {
            let report = check_condition(domain, kind, params, &samples)?;
            println!(
                "{name:10} {kind:?}: inf ratio {:.4} over {} samples, holds = {}",
                report.inf_ratio,
                report.samples.len(),
                report.verdict
            );
            for caveat in &report.caveats {
                println!("    caveat: {caveat}");
            }
        }
    }
    Ok(())
}
