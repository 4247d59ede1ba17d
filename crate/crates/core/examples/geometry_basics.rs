//! Distances, Whitney cubes and the width of a point set.

use std::path::Path;

use hardy_ext::geometry::{whitney_decompose, width, DomainModel, Point};

fn main() -> hardy_ext::Result<()> {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("examples/data/cross.json");
    let domain = DomainModel::read_json(&path)?;

    for x in [[0.5, 0.5], [-1.0, -1.0], [0.1, 0.9]] {
        println!("d({x:?}) = {:.4}", domain.distance_to_complement(&x)?);
    }

    let dec = whitney_decompose(&domain, domain.bounding_box(), 5)?;
    let smallest = dec.cubes.iter().map(|w| w.cube.side).fold(f64::INFINITY, f64::min);
    println!("{} Whitney cubes, smallest side {smallest}", dec.cubes.len());
    // every cube sits between one and four diameters from the complement
    let worst = dec
        .cubes
        .iter()
        .map(|w| w.dist_to_complement / w.cube.diam())
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), r| (lo.min(r), hi.max(r)));
    println!("distance / diameter in [{:.3}, {:.3}]", worst.0, worst.1);

    let rectangle = [[0.0, 0.0], [2.0, 0.0], [2.0, 1.0], [0.0, 1.0]].map(Point::from);
    let w = width(&rectangle)?;
    println!("width of a 2 x 1 rectangle: {} along {:?}", w.value, w.direction);
    Ok(())
}
