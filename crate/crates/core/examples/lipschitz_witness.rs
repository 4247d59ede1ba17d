//! The slab witness: a Lipschitz function vanishing near a thin set.

use hardy_ext::counterexamples::{build_fk, lip_witness_nd};
use hardy_ext::geometry::Point;

fn main() -> hardy_ext::Result<()> {
    let f = build_fk(2, 1e-2, 8.0, 0.0, 1e-2 / 16.0)?;
    for x in [0.0, 5e-3, 0.02, 0.5, 4.0, 12.0] {
        println!("f_2({x:>6}) = {:+.5}", f.eval(x));
    }

    // a tilted segment is a slab of width zero
    let segment: Vec<Point> = (0..=40)
        .map(|i| {
            let t = -1.0 + 0.05 * i as f64;
            Point::from([t, 0.3 * t])
        })
        .collect();
    let witness = lip_witness_nd(&segment, 8.0, 1e-2, 1)?;
    println!("slab normal {:?}, width {:.2e}", witness.nu, witness.slab_width);
    println!("on the segment: {:.3e}", witness.eval(&[0.5, 0.15]));
    println!("off the segment: {:.3e}", witness.eval(&[0.5, 0.6]));
    println!("L1 on the unit ball: {:.4}", witness.unit_ball_l1(64));
    Ok(())
}
