//! Lower bounds that grow along a ladder of scales when the width condition fails.

use hardy_ext::counterexamples::{necessity_demo, segment_domain, NecessityParams};
use hardy_ext::extension::RationalP;

fn main() -> hardy_ext::Result<()> {
    let segment = segment_domain(1.0, 1.0 / 64.0)?;
    let params = NecessityParams { j_max: 3, lip_samples: 2000, ..Default::default() };
    let table = necessity_demo(&segment, RationalP::new(2, 3)?, &params)?;
    print!("{}", table.to_csv());
    println!("lower bounds increasing: {}", table.lower_bounds_increasing());
    Ok(())
}
