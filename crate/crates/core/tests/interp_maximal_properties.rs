use hardy_ext::counterexamples::{cantor_dust_domain, unit_cell};
use hardy_ext::extension::{extend_atom, make_whitney_atom, patterns, ExtendedDistribution, RationalP};
use hardy_ext::geometry::{whitney_decompose, Point};
use hardy_ext::maximal::{maximal_at, Mollifier, TGrid};
use hardy_ext::polyinterp::{dual_basis, monomials, poly_space_dim, select_nodes, SelectionStrategy};
use num_integer::binomial;
use proptest::prelude::*;

fn samples(coords: &[f64], n: usize) -> Vec<Point> {
    coords.chunks(n).map(|c| Point::new(c.to_vec()).unwrap()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn dual_basis_is_dual_to_its_nodes(
        n in 1usize..=2,
        k in 1u32..=3,
        coords in prop::collection::vec(-0.9..0.9f64, 60),
    ) {
        let pts = samples(&coords[..(coords.len() / n) * n], n);
        if let Ok(ns) = select_nodes(&pts, k, SelectionStrategy::Greedy) {
            prop_assume!(ns.conditioning > 1e-6);
            let db = dual_basis(&ns).unwrap();
            prop_assert!(db.verify_duality() < 1e-8, "defect {}", db.verify_duality());
        }
    }

    #[test]
    fn exhaustive_search_is_never_worse_than_greedy(
        (n, k, count) in prop_oneof![Just((2usize, 1u32, 18usize)), Just((2, 2, 6)), Just((1, 2, 9)), Just((1, 3, 6))],
        coords in prop::collection::vec(-1.0..1.0f64, 36),
    ) {
        let pts = samples(&coords[..count * n], n);
        let greedy = select_nodes(&pts, k, SelectionStrategy::Greedy);
        let exhaustive = select_nodes(&pts, k, SelectionStrategy::Exhaustive);
        if let (Ok(g), Ok(e)) = (greedy, exhaustive) {
            prop_assert!(e.conditioning >= g.conditioning * (1.0 - 1e-12), "{} < {}", e.conditioning, g.conditioning);
        }
    }
}

#[test]
fn polynomial_space_dimension_is_binomial() {
    for n in 1..=4usize {
        for k in 0..=6u32 {
            let d = binomial(n + k as usize, n);
            assert_eq!(poly_space_dim(n, k), d, "n = {n}, k = {k}");
            assert_eq!(monomials(n, k).len(), d, "n = {n}, k = {k}");
        }
    }
}

fn cantor_extension() -> ExtendedDistribution {
    let domain = cantor_dust_domain(2, 3, &[unit_cell(2)]).unwrap();
    let dec = whitney_decompose(&domain, domain.bounding_box(), 5).unwrap();
    let w = dec.cubes.iter().max_by(|a, b| a.cube.side.total_cmp(&b.cube.side)).unwrap();
    let p = RationalP::new(2, 3).unwrap();
    let values = patterns::constant(2, 2, p.size_bound(w.cube.volume()));
    extend_atom(&make_whitney_atom(&domain, w, 2, values, p).unwrap(), &domain, 2.0).unwrap()
}

fn probe_points(dist: &ExtendedDistribution) -> Vec<Vec<f64>> {
    let c = &dist.enclosing_ball.center;
    let r = dist.enclosing_ball.radius;
    [(0.3, 0.1), (-0.7, 0.4), (1.5, -0.2), (3.0, 2.0), (-6.0, 5.0)]
        .iter()
        .map(|(u, v)| vec![c[0] + u * r, c[1] + v * r])
        .collect()
}

/// `M(f_lambda)(x) = lambda^(n/p) M f(lambda x)`, up to the scale ladder.
#[test]
fn maximal_function_is_dilation_covariant() {
    let dist = cantor_extension();
    let phi = Mollifier::for_critical_order(2, dist.n_p).unwrap();
    let grid = TGrid::standard(1e-4, 1e3).unwrap();
    for lambda in [0.5, 1.5, 3.0] {
        let moved = dist.dilated(lambda);
        let amp = lambda.powf(2.0 * dist.p.inverse());
        for x in probe_points(&moved) {
            let lhs = maximal_at(&moved, &phi, &x, &grid).unwrap().value;
            let y: Vec<f64> = x.iter().map(|v| v * lambda).collect();
            let rhs = amp * maximal_at(&dist, &phi, &y, &grid).unwrap().value;
            assert!((lhs / rhs - 1.0).abs() < 0.05, "lambda {lambda} at {x:?}: {lhs} vs {rhs}");
        }
    }
}

/// Raising the mollifier order changes the maximal function by a bounded factor.
#[test]
fn mollifier_order_changes_values_boundedly() {
    let dist = cantor_extension();
    let grid = TGrid::geometric(1e-3, 1e2, 2f64.powf(0.25)).unwrap();
    let base = dist.n_p + 3;
    let low = Mollifier::new(2, base).unwrap();
    let high = Mollifier::new(2, base + 2).unwrap();
    for x in probe_points(&dist) {
        let a = maximal_at(&dist, &low, &x, &grid).unwrap().value;
        let b = maximal_at(&dist, &high, &x, &grid).unwrap().value;
        let ratio = a.max(b) / a.min(b);
        assert!(ratio < 3.0, "at {x:?}: {a} vs {b}");
    }
}
