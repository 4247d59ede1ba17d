use hardy_ext::counterexamples::{cantor_dust_domain, pairing, segment_domain, unit_cell};
use hardy_ext::extension::{
    make_whitney_atom, moments, patterns, ExtendedDistribution, ExtensionCase, ExtensionOperator, ExtensionParams,
    PAtom, RationalP,
};
use hardy_ext::geometry::{whitney_decompose, ComplementRep, Cube, DomainModel, Point, WhitneyCube};
use hardy_ext::polyinterp::{poly_space_dim, Polynomial};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ATOMS: usize = 100;

struct Case {
    label: &'static str,
    domain: DomainModel,
    cubes: Vec<WhitneyCube>,
    p: RationalP,
}

fn half_space() -> DomainModel {
    let cells: Vec<Cube> = (0..8)
        .flat_map(|i| (0..4).map(move |j| Cube::new(Point::from([-4.0 + i as f64, -4.0 + j as f64]), 1.0).unwrap()))
        .collect();
    DomainModel::new(
        Cube::new(Point::from([-4.0, -4.0]), 8.0).unwrap(),
        ComplementRep::cells(cells, 1.0 / 64.0).unwrap(),
    )
    .unwrap()
}

fn cases() -> Vec<Case> {
    let build = |label, domain: DomainModel, depth, keep: &dyn Fn(&[f64]) -> bool, p| {
        let cubes = whitney_decompose(&domain, domain.bounding_box(), depth)
            .unwrap()
            .cubes
            .into_iter()
            .filter(|w| keep(&w.cube.center()))
            .collect();
        Case { label, domain, cubes, p }
    };
    vec![
        build("p1 half-space", half_space(), 5, &|c| c[0].abs() < 2.0 && c[1] < 2.0, RationalP::one()),
        build(
            "special cantor",
            cantor_dust_domain(2, 4, &[unit_cell(2)]).unwrap(),
            6,
            &|_| true,
            RationalP::new(2, 3).unwrap(),
        ),
        build(
            "generic segment",
            segment_domain(1.0, 1.0 / 64.0).unwrap(),
            6,
            &|c| c[0].abs() < 0.5,
            RationalP::new(3, 5).unwrap(),
        ),
    ]
}

fn random_atoms(case: &Case, seed: u64) -> Vec<PAtom> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..ATOMS)
        .map(|_| {
            let w = &case.cubes[rng.gen_range(0..case.cubes.len())];
            let m = rng.gen_range(1..=4);
            let values = patterns::random(&mut rng, 2, m, case.p.size_bound(w.cube.volume()));
            make_whitney_atom(&case.domain, w, m, values, case.p).unwrap()
        })
        .collect()
}

fn extend(case: &Case, atom: &PAtom) -> ExtendedDistribution {
    ExtensionOperator::new(&case.domain, &atom.support, atom.subdivisions, atom.p, ExtensionParams::default())
        .unwrap()
        .apply_atom(atom)
        .unwrap()
}

fn random_polynomial(rng: &mut ChaCha8Rng, degree: u32) -> Polynomial {
    let coeffs = (0..poly_space_dim(2, degree)).map(|_| rng.gen_range(-1.0..1.0)).collect();
    Polynomial::new(2, degree, coeffs).unwrap()
}

#[test]
fn random_atoms_extend_with_vanishing_moments() {
    for case in cases() {
        assert!(!case.cubes.is_empty(), "{}", case.label);
        for (i, atom) in random_atoms(&case, 7).iter().enumerate() {
            let dist = extend(&case, atom);
            let rep = moments(&dist, dist.n_p);
            assert!(rep.pass, "{} atom {i}: residual {:.3e} > {:.3e}", case.label, rep.max_abs, rep.tolerance);
        }
    }
}

#[test]
fn dirac_orders_stay_within_the_critical_order() {
    for case in cases() {
        for atom in random_atoms(&case, 11).iter().take(30) {
            let dist = extend(&case, atom);
            let top = dist.max_dirac_order();
            match dist.case {
                ExtensionCase::P1 => assert_eq!(top, None, "{}", case.label),
                ExtensionCase::Special { .. } => {
                    assert!(top.is_none_or(|t| t < dist.n_p), "{}: order {top:?}", case.label)
                }
                ExtensionCase::Generic => assert!(top.is_none_or(|t| t <= dist.n_p), "{}: order {top:?}", case.label),
                ExtensionCase::FunctionOnly => panic!("{}: no extension case recorded", case.label),
            }
        }
    }
}

#[test]
fn dual_and_direct_routes_agree() {
    for case in cases() {
        for atom in random_atoms(&case, 13).iter().take(30) {
            let dist = extend(&case, atom);
            if let Some(gap) = dist.meta.route_discrepancy {
                assert!(gap < 1e-8, "{}: route discrepancy {gap:.3e}", case.label);
            }
        }
    }
}

#[test]
fn polynomials_up_to_critical_order_pair_to_zero() {
    let mut rng = ChaCha8Rng::seed_from_u64(17);
    for case in cases() {
        for atom in random_atoms(&case, 19).iter().take(20) {
            let dist = extend(&case, atom);
            let poly = random_polynomial(&mut rng, dist.n_p);
            let mass = atom.sup_norm() * atom.support.volume();
            let value = pairing(&dist, &poly);
            assert!(value.abs() <= 1e-9 * mass.max(1.0), "{}: pairing {value:.3e}", case.label);
        }
    }
}

/// Extending `g(. / lambda)` on the dilated domain gives the pushforward of
/// the original extension: cells scale, `c` becomes `lambda^(n + |beta|) c` at `lambda x`.
#[test]
fn extension_commutes_with_dilation() {
    for case in cases() {
        for atom in random_atoms(&case, 23).iter().take(10) {
            let dist = extend(&case, atom);
            for lambda in [0.5, 2.0] {
                let domain = case.domain.dilate(&[0.0, 0.0], lambda).unwrap();
                let support = Cube::new(atom.support.min_corner.scale_about(&[0.0, 0.0], lambda), atom.support.side * lambda)
                    .unwrap();
                let moved = ExtensionOperator::new(&domain, &support, atom.subdivisions, atom.p, ExtensionParams::default())
                    .unwrap()
                    .apply(&atom.values)
                    .unwrap();
                let expected = dist.dilated(1.0 / lambda).scaled(lambda.powf(2.0 * atom.p.inverse()));
                assert_same(&moved, &expected, case.label, lambda);
            }
        }
    }
}

fn assert_same(got: &ExtendedDistribution, want: &ExtendedDistribution, label: &str, lambda: f64) {
    let close = |a: f64, b: f64, scale: f64| (a - b).abs() <= 1e-9 * scale.max(1e-300);
    assert_eq!(got.function_part.len(), want.function_part.len(), "{label} at {lambda}");
    let cell_scale = want.function_sup();
    for (g, w) in got.function_part.iter().zip(&want.function_part) {
        assert!(close(g.side, w.side, w.side), "{label} at {lambda}: side {} vs {}", g.side, w.side);
        assert!(close(g.value, w.value, cell_scale), "{label} at {lambda}: value {} vs {}", g.value, w.value);
        for i in 0..2 {
            assert!(close(g.min_corner[i], w.min_corner[i], w.side), "{label} at {lambda}: corner");
        }
    }
    assert_eq!(got.dirac_terms.len(), want.dirac_terms.len(), "{label} at {lambda}");
    let c_scale = want.dirac_terms.iter().map(|d| d.c.abs()).fold(0.0, f64::max);
    for (g, w) in got.dirac_terms.iter().zip(&want.dirac_terms) {
        assert_eq!(g.beta, w.beta, "{label} at {lambda}");
        assert!(close(g.c, w.c, c_scale), "{label} at {lambda}: c {} vs {}", g.c, w.c);
        for i in 0..2 {
            assert!((g.x[i] - w.x[i]).abs() <= 1e-9 * lambda, "{label} at {lambda}: node {:?} vs {:?}", g.x, w.x);
        }
    }
}
