use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{ConditionKind, ConditionParams, ConditionReport, SampleRatio};
use crate::error::{Error, Result};
use crate::geometry::{width, Ball, ComplementRep, Point};
use crate::optim::NelderMead;
use crate::polyinterp::{monomials, MultiIndex};

pub const CAVEAT_UNDERDETERMINED: &str = "underdetermined";

/// `(a, delta) = (2, epsilon)`: a global Markov set with constant `epsilon`
/// gives the width condition with these constants.
pub fn width_params_from_markov(epsilon: f64) -> Result<ConditionParams> {
    ConditionParams::new(2.0, epsilon)
}

/// `epsilon = min(1, delta) / (2 (1 + a))`: the width condition with `(a, delta)`
/// gives the global Markov width bound with this constant.
pub fn markov_epsilon_from_width(params: &ConditionParams) -> f64 {
    params.delta.min(1.0) / (2.0 * (1.0 + params.a))
}

/// `w(F ∩ B(y, r)) / r` for every `(y, r)`; passes when the infimum exceeds `epsilon`.
pub fn markov_width_check(
    complement: &ComplementRep,
    centers: &[Point],
    radii: &[f64],
    epsilon: f64,
) -> Result<ConditionReport> {
    if centers.is_empty() {
        return Err(Error::EmptyInput("markov_width_check needs at least one ball"));
    }
    if centers.len() != radii.len() {
        return Err(Error::invalid("centers and radii differ in length"));
    }
    if let Some(r) = radii.iter().find(|r| !(**r > 0.0)) {
        return Err(Error::invalid(format!("radius must be positive, got {r}")));
    }
    let results: Vec<Result<(SampleRatio, Vec<String>)>> = centers
        .par_iter()
        .zip(radii)
        .map(|(y, &r)| {
            let mut caveats = Vec::new();
            if complement.distance(y) > complement.resolution() {
                caveats.push(format!("center {:?} is not in the complement", y.coords()));
            }
            let samples = complement.hull_samples_in_ball(y, r);
            let ratio = if samples.is_empty() {
                caveats.push("empty intersection".to_string());
                0.0
            } else {
                let w = width(&samples)?;
                if w.approximate {
                    caveats.push("width from direction sampling".to_string());
                }
                w.value / r
            };
            Ok((
                SampleRatio {
                    point: y.clone(),
                    radius: Some(r),
                    ratio,
                    std_error: None,
                },
                caveats,
            ))
        })
        .collect();
    let mut samples = Vec::with_capacity(results.len());
    let mut caveats = Vec::new();
    for r in results {
        let (s, c) = r?;
        samples.push(s);
        caveats.extend(c);
    }
    Ok(ConditionReport::assemble(
        ConditionKind::Markov,
        ConditionParams { a: 1.0, delta: epsilon },
        samples,
        caveats,
    ))
}

/// Result of [`markov_constant_probe`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MarkovProbe {
    /// Largest observed `r ||grad P||_{F∩B} / ||P||_{F∩B}`: a lower bound on the best constant.
    pub value: f64,
    pub samples: usize,
    pub caveats: Vec<String>,
}

/// Ratios at or beyond this are reported as this value (the polynomial
/// vanishes on the sample to working precision).
const PROBE_CAP: f64 = 1e12;

/// Empirical lower bound for the Markov constant `c(F, k)` on one ball,
/// from random polynomials of degree `<= k` improved by local search.
pub fn markov_constant_probe(
    complement: &ComplementRep,
    ball: &Ball,
    k: u32,
    trials: usize,
    seed: u64,
) -> Result<MarkovProbe> {
    if k == 0 {
        return Err(Error::invalid("degree k must be at least 1"));
    }
    let n = complement.dim();
    if ball.dim() != n {
        return Err(Error::DimensionMismatch { expected: n, got: ball.dim() });
    }
    let pts = complement.samples_in_ball(&ball.center, ball.radius);
    if pts.is_empty() {
        return Err(Error::invalid("complement does not meet the ball"));
    }
    // work in u = (x - y) / r, so that r grad_x P = grad_u P
    let local: Vec<Vec<f64>> = pts
        .iter()
        .map(|p| p.iter().zip(ball.center.iter()).map(|(a, b)| (a - b) / ball.radius).collect())
        .collect();
    let basis: Vec<MultiIndex> = monomials(n, k).into_iter().skip(1).collect();
    let d = basis.len() + 1;
    let mut caveats = Vec::new();
    if pts.len() < d {
        caveats.push(CAVEAT_UNDERDETERMINED.to_string());
    }
    // The constant term does not change the gradient; it only enters the sup.
    let values = DMatrix::from_fn(local.len(), basis.len(), |i, j| basis[j].monomial(&local[i]));
    let grads: Vec<DMatrix<f64>> = (0..n)
        .map(|axis| {
            let e = MultiIndex::unit(n, axis);
            DMatrix::from_fn(local.len(), basis.len(), |i, j| basis[j].monomial_derivative(&e, &local[i]))
        })
        .collect();

    let ratio = |c: &[f64]| -> f64 {
        let (b, rest) = (c[0], &c[1..]);
        let v = DVector::from_column_slice(rest);
        let vals = &values * &v;
        let sup = vals.iter().map(|x| (x + b).abs()).fold(0.0, f64::max);
        let gvals: Vec<DVector<f64>> = grads.iter().map(|g| g * &v).collect();
        let gsup = (0..local.len())
            .map(|i| gvals.iter().map(|g| g[i] * g[i]).sum::<f64>().sqrt())
            .fold(0.0, f64::max);
        if gsup == 0.0 {
            return 0.0;
        }
        if sup <= gsup / PROBE_CAP {
            return PROBE_CAP;
        }
        gsup / sup
    };

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let nm = NelderMead {
        max_iter: 80 * d,
        f_tol: 1e-14,
        x_tol: 1e-12,
    };
    let mut best: f64 = 0.0;
    for _ in 0..trials.max(1) {
        let mut c: Vec<f64> = (0..d).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let l = c.iter().map(|x| x * x).sum::<f64>().sqrt().max(1e-300);
        c.iter_mut().for_each(|x| *x /= l);
        best = best.max(ratio(&c));
        let (_, v) = nm.minimize(|x| -ratio(x), &c, 0.1);
        best = best.max(-v);
    }
    Ok(MarkovProbe {
        value: best.min(PROBE_CAP),
        samples: pts.len(),
        caveats,
    })
}
