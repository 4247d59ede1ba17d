use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::geometry::sampling::uniform_in_unit_ball;
use crate::geometry::{width, DomainModel};

/// Monte Carlo sample count for measure ratios.
pub const MEASURE_SAMPLES: usize = 100_000;

const MEASURE_SEED: u64 = 0x6d65_6173;

pub const CAVEAT_MEASURE_ZERO: &str = "measure-zero representation";
pub const CAVEAT_EMPTY_BALL: &str =
    "no complement representative in the ball (representation-resolution artifact)";

/// A sampled ratio with its Monte Carlo error, when it has one.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RatioEstimate {
    pub value: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_error: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub caveat: Option<String>,
}

/// The same uniform unit-ball sample is reused for every query, so measure
/// ratios are deterministic and exactly comparable across points.
fn unit_ball_samples(n: usize) -> &'static [[f64; 3]] {
    static CACHE: [OnceLock<Vec<[f64; 3]>>; 3] = [OnceLock::new(), OnceLock::new(), OnceLock::new()];
    CACHE[n - 1].get_or_init(|| {
        let mut rng = ChaCha8Rng::seed_from_u64(MEASURE_SEED + n as u64);
        (0..MEASURE_SAMPLES).map(|_| uniform_in_unit_ball(&mut rng, n)).collect()
    })
}

fn interior_distance(domain: &DomainModel, x: &[f64], a: f64) -> Result<f64> {
    if !(a > 1.0 && a.is_finite()) {
        return Err(Error::invalid(format!("dilation a must exceed 1, got {a}")));
    }
    let d = domain.distance_to_complement(x)?;
    if d <= 0.0 {
        return Err(Error::PointNotInterior { distance: d });
    }
    Ok(d)
}

/// `|Omega^c ∩ B(x, a d(x))| / |B(x, a d(x))|` by Monte Carlo.
pub fn measure_ratio(domain: &DomainModel, x: &[f64], a: f64) -> Result<RatioEstimate> {
    let d = interior_distance(domain, x, a)?;
    let comp = domain.complement();
    if !comp.has_positive_measure() {
        return Ok(RatioEstimate {
            value: 0.0,
            std_error: Some(0.0),
            caveat: Some(CAVEAT_MEASURE_ZERO.to_string()),
        });
    }
    let n = x.len();
    let r = a * d;
    let mut p = [0.0; 3];
    let mut hits = 0usize;
    for u in unit_ball_samples(n) {
        for k in 0..n {
            p[k] = x[k] + r * u[k];
        }
        if comp.contains(&p[..n]) {
            hits += 1;
        }
    }
    let m = MEASURE_SAMPLES as f64;
    let value = hits as f64 / m;
    Ok(RatioEstimate {
        value,
        std_error: Some((value * (1.0 - value) / m).sqrt()),
        caveat: None,
    })
}

/// `w(Omega^c ∩ B(x, a d(x))) / d(x)`.
pub fn width_ratio(domain: &DomainModel, x: &[f64], a: f64) -> Result<RatioEstimate> {
    let d = interior_distance(domain, x, a)?;
    let samples = domain.complement().hull_samples_in_ball(x, a * d);
    if samples.is_empty() {
        return Ok(RatioEstimate {
            value: 0.0,
            std_error: None,
            caveat: Some(CAVEAT_EMPTY_BALL.to_string()),
        });
    }
    let w = width(&samples)?;
    Ok(RatioEstimate {
        value: w.value / d,
        std_error: None,
        caveat: w.approximate.then(|| "width from direction sampling".to_string()),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{ComplementRep, Cube, Point};
    use std::f64::consts::PI;

    fn half_plane() -> DomainModel {
        let mut cells = Vec::new();
        for i in 0..16 {
            for j in 0..8 {
                cells.push(Cube::new(Point::from([-4.0 + 0.5 * i as f64, -4.0 + 0.5 * j as f64]), 0.5).unwrap());
            }
        }
        let comp = ComplementRep::cells(cells, 0.05).unwrap();
        DomainModel::new(Cube::new(Point::from([-4.0, -4.0]), 8.0).unwrap(), comp).unwrap()
    }

    #[test]
    fn half_plane_measure_matches_cap_fraction() {
        let dom = half_plane();
        let h = 0.5;
        let r = 2.0 * h;
        let est = measure_ratio(&dom, &[0.1, h], 2.0).unwrap();
        let cap = r * r * (h / r).acos() - h * (r * r - h * h).sqrt();
        let frac = cap / (PI * r * r);
        let se = est.std_error.unwrap();
        assert!((est.value - frac).abs() < 4.0 * se, "{} vs {frac} (se {se})", est.value);
    }

    #[test]
    fn single_point_has_measure_zero() {
        let comp = ComplementRep::cloud(vec![Point::from([0.0, 0.0])], 0.01).unwrap();
        let dom = DomainModel::new(Cube::new(Point::from([-1.0, -1.0]), 2.0).unwrap(), comp).unwrap();
        let est = measure_ratio(&dom, &[0.5, 0.0], 2.0).unwrap();
        assert_eq!(est.value, 0.0);
        assert_eq!(est.caveat.as_deref(), Some(CAVEAT_MEASURE_ZERO));
        assert!(matches!(
            measure_ratio(&dom, &[0.0, 0.0], 2.0),
            Err(Error::PointNotInterior { .. })
        ));
    }

    #[test]
    fn line_complement_has_zero_width() {
        let pts: Vec<Point> = (0..201).map(|i| Point::from([-1.0 + 0.01 * i as f64, 0.0])).collect();
        let comp = ComplementRep::cloud(pts, 0.01).unwrap();
        let dom = DomainModel::new(Cube::new(Point::from([-1.0, -1.0]), 2.0).unwrap(), comp).unwrap();
        let est = width_ratio(&dom, &[0.0, 0.3], 2.0).unwrap();
        assert!(est.value.abs() < 1e-12);
    }

    #[test]
    fn circle_complement_width_is_twice_radius() {
        let rho = 0.4;
        let pts: Vec<Point> = (0..720)
            .map(|i| {
                let t = 2.0 * PI * i as f64 / 720.0;
                Point::from([rho * t.cos(), rho * t.sin()])
            })
            .collect();
        let comp = ComplementRep::cloud(pts, 0.01).unwrap();
        let dom = DomainModel::new(Cube::new(Point::from([-1.0, -1.0]), 2.0).unwrap(), comp).unwrap();
        let est = width_ratio(&dom, &[0.0, 0.0], 2.0).unwrap();
        assert!((est.value - 2.0).abs() < 1e-4, "{}", est.value);
    }
}
