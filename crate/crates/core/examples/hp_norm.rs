//! `H^p` quasi-norm of an extension on a coarse grid, with the far-field decay.

use hardy_ext::counterexamples::{cantor_dust_domain, unit_cell};
use hardy_ext::extension::{extend_atom, make_whitney_atom, patterns, RationalP};
use hardy_ext::geometry::whitney_decompose;
use hardy_ext::maximal::{far_field_decay, hp_quasinorm, HpGrid, Mollifier};

fn main() -> hardy_ext::Result<()> {
    let domain = cantor_dust_domain(2, 3, &[unit_cell(2)])?;
    let dec = whitney_decompose(&domain, domain.bounding_box(), 5)?;
    let w = dec.cubes.iter().max_by(|a, b| a.cube.side.total_cmp(&b.cube.side)).unwrap();
    let p = RationalP::new(2, 3)?;
    let atom = make_whitney_atom(&domain, w, 2, patterns::checkerboard(2, 2, p.size_bound(w.cube.volume())), p)?;
    let dist = extend_atom(&atom, &domain, 2.0)?;

    let phi = Mollifier::for_critical_order(2, dist.n_p)?;
    let grid = HpGrid::for_dim(2).with_pitch(1.0 / 8.0).with_radius(16.0);
    let est = hp_quasinorm(&dist, &phi, &grid)?;
    println!(
        "H^p estimate {:.4} from {} grid points (tail share {:.2}%)",
        est.estimate,
        est.grid_points,
        100.0 * est.tail_bound / (est.grid_sum + est.tail_bound)
    );

    let radii: Vec<f64> = (0..6).map(|i| 10.0 * 2f64.powi(i)).collect();
    let fit = far_field_decay(&dist, &phi, &[1.0, 0.37], &radii)?;
    println!("far-field slope {:.3}, expected {}", fit.slope, -((dist.n_p + 1 + 2) as f64));
    Ok(())
}
