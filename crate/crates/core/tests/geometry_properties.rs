use hardy_ext::conditions::{measure_ratio, width_ratio};
use hardy_ext::geometry::{
    unit_ball_volume, whitney_decompose, width, ComplementRep, Cube, DomainModel, Point,
};
use proptest::prelude::*;

fn cloud_domain(points: &[(f64, f64)]) -> DomainModel {
    let pts: Vec<Point> = points.iter().map(|&(x, y)| Point::from([x, y])).collect();
    DomainModel::new(
        Cube::new(Point::from([-1.0, -1.0]), 3.0).unwrap(),
        ComplementRep::cloud(pts, 1e-3).unwrap(),
    )
    .unwrap()
}

fn distinct(points: Vec<(f64, f64)>) -> Vec<(f64, f64)> {
    let mut out: Vec<(f64, f64)> = Vec::new();
    for p in points {
        if out.iter().all(|q| (p.0 - q.0).hypot(p.1 - q.1) > 1e-3) {
            out.push(p);
        }
    }
    out
}

fn rotate(p: &[f64], angle: f64) -> [f64; 2] {
    let (s, c) = angle.sin_cos();
    [c * p[0] - s * p[1], s * p[0] + c * p[1]]
}

fn point_set() -> impl Strategy<Value = Vec<(f64, f64)>> {
    prop::collection::vec((0.0..1.0f64, 0.0..1.0f64), 2..24)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn whitney_cubes_satisfy_the_invariant(points in point_set()) {
        let pts = distinct(points);
        let domain = cloud_domain(&pts);
        let dec = whitney_decompose(&domain, domain.bounding_box(), 5).unwrap();
        prop_assert!(!dec.cubes.is_empty());
        for w in &dec.cubes {
            // distance from the cube to the nearest point, by brute force
            let dist = pts
                .iter()
                .map(|&(x, y)| w.cube.distance_to(&[x, y]))
                .fold(f64::INFINITY, f64::min);
            let diam = w.cube.diam();
            prop_assert!((dist - w.dist_to_complement).abs() <= 1e-12);
            prop_assert!(dist >= diam * (1.0 - 1e-12) && dist <= 4.0 * diam * (1.0 + 1e-12));
        }
    }

    #[test]
    fn width_is_monotone_under_inclusion(points in point_set(), extra in point_set()) {
        let small: Vec<Point> = points.iter().map(|&(x, y)| Point::from([x, y])).collect();
        let mut big = small.clone();
        big.extend(extra.iter().map(|&(x, y)| Point::from([x, y])));
        prop_assert!(width(&small).unwrap().value <= width(&big).unwrap().value + 1e-12);
    }

    #[test]
    fn width_is_invariant_under_isometries(
        points in point_set(),
        angle in 0.0..std::f64::consts::TAU,
        shift in (-5.0..5.0f64, -5.0..5.0f64),
    ) {
        let pts: Vec<Point> = points.iter().map(|&(x, y)| Point::from([x, y])).collect();
        let moved: Vec<Point> = pts
            .iter()
            .map(|p| {
                let r = rotate(p, angle);
                Point::from([r[0] + shift.0, r[1] + shift.1])
            })
            .collect();
        let (w0, w1) = (width(&pts).unwrap().value, width(&moved).unwrap().value);
        prop_assert!((w0 - w1).abs() <= 1e-9 * w0.max(1.0), "{w0} vs {w1}");
    }

    #[test]
    fn width_is_translation_invariant_in_three_dims(
        points in prop::collection::vec((0.0..1.0f64, 0.0..1.0f64, 0.0..1.0f64), 4..20),
        shift in (-3.0..3.0f64, -3.0..3.0f64, -3.0..3.0f64),
    ) {
        let pts: Vec<Point> = points.iter().map(|&(x, y, z)| Point::from([x, y, z])).collect();
        let moved: Vec<Point> = pts.iter().map(|p| p.translate(&[shift.0, shift.1, shift.2])).collect();
        let (w0, w1) = (width(&pts).unwrap().value, width(&moved).unwrap().value);
        prop_assert!((w0 - w1).abs() <= 1e-9 * w0.max(1.0), "{w0} vs {w1}");
    }

    #[test]
    fn ratios_are_scale_invariant(lambda in 0.25..4.0f64, x in 0.1..0.9f64, y in 0.3..0.9f64) {
        // lower half of the box is complement
        let cells: Vec<Cube> = (0..4)
            .flat_map(|i| (0..2).map(move |j| Cube::new(Point::from([-2.0 + i as f64, -2.0 + j as f64]), 1.0).unwrap()))
            .collect();
        let domain = DomainModel::new(
            Cube::new(Point::from([-2.0, -2.0]), 4.0).unwrap(),
            ComplementRep::cells(cells, 1.0 / 64.0).unwrap(),
        )
        .unwrap();
        let scaled = domain.dilate(&[0.0, 0.0], lambda).unwrap();
        let p = [x, y];
        let q = [lambda * x, lambda * y];
        let m0 = measure_ratio(&domain, &p, 2.0).unwrap().value;
        let m1 = measure_ratio(&scaled, &q, 2.0).unwrap().value;
        prop_assert!((m0 - m1).abs() <= 1e-9, "{m0} vs {m1}");
        let w0 = width_ratio(&domain, &p, 2.0).unwrap().value;
        let w1 = width_ratio(&scaled, &q, 2.0).unwrap().value;
        prop_assert!((w0 - w1).abs() <= 1e-9 * w0.max(1.0), "{w0} vs {w1}");
    }
}

/// `|F ∩ B| <= w(F ∩ B) diam(B)^(n-1)` turns a measure lower bound into a width
/// lower bound `2^(1-n) c_n a delta` at the same sample.
#[test]
fn measure_bound_implies_width_bound() {
    let blobs = [
        vec![Cube::new(Point::from([0.0, 0.0]), 1.0).unwrap()],
        vec![
            Cube::new(Point::from([0.0, 0.0]), 0.25).unwrap(),
            Cube::new(Point::from([0.25, 0.0]), 0.25).unwrap(),
            Cube::new(Point::from([0.75, 0.5]), 0.25).unwrap(),
        ],
        (0..8).map(|i| Cube::new(Point::from([i as f64 * 0.125, 0.0]), 0.125).unwrap()).collect(),
    ];
    let n = 2;
    let mut checked = 0;
    for cells in blobs {
        let domain = DomainModel::new(
            Cube::new(Point::from([-3.0, -3.0]), 7.0).unwrap(),
            ComplementRep::cells(cells, 1.0 / 128.0).unwrap(),
        )
        .unwrap();
        for &(x, y) in &[(1.6, 0.3), (-0.4, -0.6), (0.5, 1.4), (2.0, 2.0)] {
            for a in [2.0, 4.0] {
                let m = measure_ratio(&domain, &[x, y], a).unwrap();
                let w = width_ratio(&domain, &[x, y], a).unwrap().value;
                let delta = m.value - 3.0 * m.std_error.unwrap_or(0.0);
                if delta > 0.0 {
                    let bound = 2f64.powi(1 - n) * unit_ball_volume(n as usize) * a * delta;
                    assert!(w > bound, "({x}, {y}) a = {a}: width {w} <= {bound}");
                    checked += 1;
                }
            }
        }
    }
    assert!(checked >= 10, "{checked}");
}
