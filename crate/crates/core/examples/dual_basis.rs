//! Interpolation nodes on a thin plate and the dual polynomial basis.
//!
//! The thinner the plate, the worse the basis is conditioned.

use hardy_ext::geometry::Point;
use hardy_ext::polyinterp::{dual_basis, select_nodes, SelectionStrategy};

fn main() -> hardy_ext::Result<()> {
    for thickness in [0.5, 0.25, 0.125, 0.0625] {
        let plates: Vec<Point> = (0..=20)
            .flat_map(|i| {
                let x = -0.8 + 0.08 * i as f64;
                [Point::from([x, -0.5 * thickness]), Point::from([x, 0.5 * thickness])]
            })
            .collect();
        let nodes = select_nodes(&plates, 1, SelectionStrategy::Greedy)?;
        let basis = dual_basis(&nodes)?;
        println!(
            "thickness {thickness:<6} sigma_min {:.3e}  max sup norm {:8.3}  duality defect {:.1e}",
            nodes.conditioning,
            basis.max_sup_norm,
            basis.verify_duality()
        );
    }
    Ok(())
}
