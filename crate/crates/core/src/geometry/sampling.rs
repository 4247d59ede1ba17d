//! Deterministic point sets on spheres and balls.

use rand::Rng;
use std::f64::consts::PI;

/// Roughly `count` unit vectors spread evenly over the sphere S^{n-1}.
/// n = 1 gives {-1, 1}; n = 2 equally spaced angles; n = 3 a Fibonacci lattice.
pub fn sphere_directions(n: usize, count: usize) -> Vec<Vec<f64>> {
    match n {
        1 => vec![vec![-1.0], vec![1.0]],
        2 => {
            let k = count.max(3);
            (0..k)
                .map(|i| {
                    let th = 2.0 * PI * i as f64 / k as f64;
                    vec![th.cos(), th.sin()]
                })
                .collect()
        }
        _ => fibonacci_sphere(count.max(4), false),
    }
}

/// Fibonacci lattice on S^2; with `upper_half` only directions with z >= 0.
pub fn fibonacci_sphere(count: usize, upper_half: bool) -> Vec<Vec<f64>> {
    let golden = PI * (3.0 - 5f64.sqrt());
    (0..count)
        .map(|i| {
            let z = if upper_half {
                1.0 - (i as f64 + 0.5) / count as f64
            } else {
                1.0 - 2.0 * (i as f64 + 0.5) / count as f64
            };
            let r = (1.0 - z * z).max(0.0).sqrt();
            let th = golden * i as f64;
            vec![r * th.cos(), r * th.sin(), z]
        })
        .collect()
}

/// Uniform sample from the unit ball of R^n by rejection.
pub fn uniform_in_unit_ball<R: Rng + ?Sized>(rng: &mut R, n: usize) -> [f64; 3] {
    loop {
        let mut p = [0.0; 3];
        let mut s = 0.0;
        for c in p.iter_mut().take(n) {
            *c = rng.gen_range(-1.0..1.0);
            s += *c * *c;
        }
        if s < 1.0 {
            return p;
        }
    }
}

/// Uniform random unit vector in R^n.
pub fn random_unit_vector<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vec<f64> {
    loop {
        let p = uniform_in_unit_ball(rng, n);
        let s: f64 = p[..n].iter().map(|c| c * c).sum::<f64>().sqrt();
        if s > 1e-3 {
            return p[..n].iter().map(|c| c / s).collect();
        }
    }
}

/// Regular grid points of pitch `h` lying in the closed unit ball.
pub fn unit_ball_grid(n: usize, h: f64) -> Vec<Vec<f64>> {
    let m = (1.0 / h).ceil() as i64;
    let step = 1.0 / m as f64;
    let mut out = Vec::new();
    let range = -m..=m;
    match n {
        1 => {
            for i in range {
                out.push(vec![i as f64 * step]);
            }
        }
        2 => {
            for i in range.clone() {
                for j in range.clone() {
                    let p = vec![i as f64 * step, j as f64 * step];
                    if p[0] * p[0] + p[1] * p[1] <= 1.0 + 1e-12 {
                        out.push(p);
                    }
                }
            }
        }
        _ => {
            for i in range.clone() {
                for j in range.clone() {
                    for k in range.clone() {
                        let p = vec![i as f64 * step, j as f64 * step, k as f64 * step];
                        if p.iter().map(|c| c * c).sum::<f64>() <= 1.0 + 1e-12 {
                            out.push(p);
                        }
                    }
                }
            }
        }
    }
    out
}
