use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::convolve::{ScaleRange, Smoother, TGrid};
use super::hp::{normalize, Frame};
use super::mollifier::Mollifier;
use crate::error::{Error, Result};
use crate::extension::ExtendedDistribution;
use crate::geometry::Point;

/// Scale ratio used for pointwise probes.
const PROBE_RATIO: f64 = 1.021_897_148_654_116_7; // 2^(1/32)

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeSample {
    /// Sample in the normalized frame.
    pub point: Vec<f64>,
    pub maximal: f64,
    pub envelope: f64,
    pub ratio: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnvelopeReport {
    /// Smallest `C` with `M f <= C envelope` at every sample.
    pub c_env: f64,
    /// Factor dividing `f` so that `||g||_inf <= 1` and `|c| <= 1`.
    pub amplitude: f64,
    pub frame: Frame,
    pub samples: Vec<EnvelopeSample>,
}

/// `f` in the unit frame with amplitude one, plus the frame and amplitude.
fn unit_normalized(dist: &ExtendedDistribution) -> (ExtendedDistribution, Frame, f64) {
    let (local, frame) = normalize(dist);
    let amplitude = local
        .dirac_terms
        .iter()
        .map(|d| d.c.abs())
        .fold(local.function_sup(), f64::max);
    let amplitude = if amplitude > 0.0 { amplitude } else { 1.0 };
    (local.scaled(1.0 / amplitude), frame, amplitude)
}

/// `M f(u)` with a ladder fitted to the point: from a quarter of the distance
/// to the nearest Dirac point up to four times past the support.
fn probe(smoother: &Smoother, local: &ExtendedDistribution, u: &[f64]) -> f64 {
    let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
    let nearest = local
        .dirac_terms
        .iter()
        .map(|d| d.x.distance(u))
        .fold(1.0, f64::min);
    let t_min = (smoother.distance_lower_bound(u).max(0.25 * nearest)).max(1e-6);
    let t_max = 4.0 * (norm + smoother.support_radius().max(1.0));
    let grid = TGrid::geometric(t_min, t_max.max(t_min), PROBE_RATIO).expect("valid probe ladder");
    smoother.maximal(u, &grid, ScaleRange::All).value
}

/// `(1 + sum |u - x_j|^(-n-|beta_j|))` inside `3B`, `|u|^(-(N_p+1+n))` outside,
/// in the unit frame.
fn envelope(local: &ExtendedDistribution, u: &[f64]) -> f64 {
    let n = local.n as f64;
    let norm = u.iter().map(|v| v * v).sum::<f64>().sqrt();
    if norm < 3.0 {
        1.0 + local
            .dirac_terms
            .iter()
            .map(|d| d.x.distance(u).powf(-n - d.beta.order() as f64))
            .sum::<f64>()
    } else {
        norm.powf(-(local.n_p as f64 + 1.0 + n))
    }
}

/// Checks `M_phi f <= C envelope` at `samples` (original coordinates) and
/// reports the smallest such `C`.
pub fn envelope_check(dist: &ExtendedDistribution, phi: &Mollifier, samples: &[Point]) -> Result<EnvelopeReport> {
    if samples.is_empty() {
        return Err(Error::EmptyInput("samples"));
    }
    let (local, frame, amplitude) = unit_normalized(dist);
    let smoother = Smoother::new(&local, phi)?;
    let rows: Vec<EnvelopeSample> = samples
        .par_iter()
        .map(|x| {
            let u = frame.to_local(x);
            let maximal = probe(&smoother, &local, &u);
            let env = envelope(&local, &u);
            EnvelopeSample { ratio: maximal / env, point: u, maximal, envelope: env }
        })
        .collect();
    let c_env = rows.iter().map(|r| r.ratio).fold(0.0, f64::max);
    Ok(EnvelopeReport { c_env, amplitude, frame, samples: rows })
}

/// Least-squares line through `(ln x, ln y)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogLogFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: Vec<(f64, f64)>,
}

pub fn log_log_fit(xs: &[f64], ys: &[f64]) -> Result<LogLogFit> {
    if xs.len() != ys.len() || xs.len() < 2 {
        return Err(Error::invalid("log-log fit needs at least two paired values"));
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0)) {
        return Err(Error::invalid("log-log fit needs positive values"));
    }
    let lx: Vec<f64> = xs.iter().map(|v| v.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|v| v.ln()).collect();
    let k = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / k;
    let my = ly.iter().sum::<f64>() / k;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    let syy: f64 = ly.iter().map(|y| (y - my).powi(2)).sum();
    let slope = sxy / sxx;
    let r_squared = if syy > 0.0 { sxy * sxy / (sxx * syy) } else { 1.0 };
    Ok(LogLogFit {
        slope,
        intercept: my - slope * mx,
        r_squared,
        points: xs.iter().copied().zip(ys.iter().copied()).collect(),
    })
}

fn unit(direction: &[f64]) -> Result<Vec<f64>> {
    let norm = direction.iter().map(|v| v * v).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Err(Error::invalid("direction must be nonzero"));
    }
    Ok(direction.iter().map(|v| v / norm).collect())
}

/// Fit of `M f(r theta)` against `r` in the unit frame; the slope should
/// approach `-(N_p + 1 + n)`.
pub fn far_field_decay(
    dist: &ExtendedDistribution,
    phi: &Mollifier,
    direction: &[f64],
    radii: &[f64],
) -> Result<LogLogFit> {
    let theta = unit(direction)?;
    let (local, _, _) = unit_normalized(dist);
    let smoother = Smoother::new(&local, phi)?;
    let values: Vec<f64> = radii
        .par_iter()
        .map(|r| probe(&smoother, &local, &theta.iter().map(|v| r * v).collect::<Vec<_>>()))
        .collect();
    log_log_fit(radii, &values)
}

/// Fit of `M f(x_j + rho theta)` against `rho` near Dirac term `term`, in the
/// unit frame; the slope should approach `-(n + |beta|)`.
pub fn near_dirac_blowup(
    dist: &ExtendedDistribution,
    phi: &Mollifier,
    term: usize,
    direction: &[f64],
    distances: &[f64],
) -> Result<LogLogFit> {
    let theta = unit(direction)?;
    let (local, _, _) = unit_normalized(dist);
    let anchor = local
        .dirac_terms
        .get(term)
        .ok_or_else(|| Error::invalid(format!("no Dirac term {term}")))?
        .x
        .clone();
    let smoother = Smoother::new(&local, phi)?;
    let values: Vec<f64> = distances
        .par_iter()
        .map(|rho| {
            let u: Vec<f64> = anchor.iter().zip(&theta).map(|(a, v)| a + rho * v).collect();
            probe(&smoother, &local, &u)
        })
        .collect();
    log_log_fit(distances, &values)
}
