//! Extends atoms across the complement for the three kinds of exponent.

use std::path::Path;

use hardy_ext::counterexamples::{cantor_dust_domain, segment_domain, unit_cell};
use hardy_ext::extension::{extend_atom, make_whitney_atom, moments, patterns, RationalP};
use hardy_ext::geometry::{whitney_decompose, DomainModel};

fn show(label: &str, domain: &DomainModel, p: RationalP, keep: impl Fn(&[f64]) -> bool) -> hardy_ext::Result<()> {
    let dec = whitney_decompose(domain, domain.bounding_box(), 6)?;
    let w = dec
        .cubes
        .iter()
        .filter(|w| keep(&w.cube.center()))
        .min_by(|a, b| a.cube.side.total_cmp(&b.cube.side))
        .expect("a Whitney cube in range");
    let values = patterns::constant(2, 2, p.size_bound(w.cube.volume()));
    let atom = make_whitney_atom(domain, w, 2, values, p)?;
    let dist = extend_atom(&atom, domain, 2.0)?;
    let report = moments(&dist, dist.n_p);
    println!(
        "{label}: p = {p}, {:?}, {} correction cells, {} Dirac terms, moments to order {} vanish: {} ({:.1e})",
        dist.case,
        dist.function_part.len() - atom.values.len(),
        dist.dirac_terms.len(),
        dist.n_p,
        report.pass,
        report.max_abs
    );
    for d in dist.dirac_terms.iter().take(3) {
        println!("    {:+.3e} d^{:?} delta at {:?}", d.c, d.beta.0, d.x);
    }
    Ok(())
}

fn main() -> hardy_ext::Result<()> {
    let half_plane = DomainModel::read_json(&Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data/half_plane.json"))?;
    show("half-plane", &half_plane, RationalP::one(), |c| c[0].abs() < 1.0 && c[1] < 1.0)?;

    let dust = cantor_dust_domain(2, 4, &[unit_cell(2)])?;
    show("cantor dust", &dust, RationalP::new(2, 3)?, |_| true)?;

    let segment = segment_domain(1.0, 1.0 / 64.0)?;
    show("segment", &segment, RationalP::new(3, 5)?, |c| c[0].abs() < 0.5)?;

    // 2/3 needs the width condition, which a segment fails
    let refused = show("segment", &segment, RationalP::new(2, 3)?, |c| c[0].abs() < 0.5);
    println!("segment at p = 2/3: {}", refused.unwrap_err());
    Ok(())
}
