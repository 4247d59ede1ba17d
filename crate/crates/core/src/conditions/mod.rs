//! The measure condition, the width condition and the global Markov width
//! bound, checked on finite samples.
//!
//! Every report is evidence from a finite sample, not a proof: the conditions
//! quantify over all of `Omega`.

mod markov;
mod ratios;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{DomainModel, Point};

pub use markov::{
    markov_constant_probe, markov_epsilon_from_width, markov_width_check, width_params_from_markov,
    MarkovProbe, CAVEAT_UNDERDETERMINED,
};
pub use ratios::{
    measure_ratio, width_ratio, RatioEstimate, CAVEAT_EMPTY_BALL, CAVEAT_MEASURE_ZERO, MEASURE_SAMPLES,
};

/// Dilations swept by default when checking a candidate domain.
pub const DEFAULT_A_SWEEP: [f64; 3] = [2.0, 4.0, 8.0];

pub const SAMPLED_CHECK_NOTE: &str = "sampled necessary check over finitely many points, not a proof";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ConditionKind {
    Measure,
    Width,
    Markov,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionParams {
    pub a: f64,
    pub delta: f64,
}

impl ConditionParams {
    pub fn new(a: f64, delta: f64) -> Result<Self> {
        if !(a > 1.0 && a.is_finite()) {
            return Err(Error::invalid(format!("a must exceed 1, got {a}")));
        }
        if !(delta > 0.0 && delta.is_finite()) {
            return Err(Error::invalid(format!("delta must be positive, got {delta}")));
        }
        Ok(ConditionParams { a, delta })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleRatio {
    pub point: Point,
    /// Ball radius, for Markov checks.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
    pub ratio: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub std_error: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub kind: ConditionKind,
    pub params: ConditionParams,
    pub samples: Vec<SampleRatio>,
    pub inf_ratio: f64,
    /// `inf_ratio > params.delta`.
    pub verdict: bool,
    pub caveats: Vec<String>,
    pub note: String,
}

impl ConditionReport {
    pub(crate) fn assemble(
        kind: ConditionKind,
        params: ConditionParams,
        samples: Vec<SampleRatio>,
        mut caveats: Vec<String>,
    ) -> Self {
        let inf_ratio = samples.iter().map(|s| s.ratio).fold(f64::INFINITY, f64::min);
        caveats.sort();
        caveats.dedup();
        ConditionReport {
            kind,
            params,
            verdict: inf_ratio > params.delta,
            inf_ratio,
            samples,
            caveats,
            note: SAMPLED_CHECK_NOTE.to_string(),
        }
    }

    /// The sample attaining the infimum (first one on ties).
    pub fn worst(&self) -> Option<&SampleRatio> {
        self.samples
            .iter()
            .fold(None, |best: Option<&SampleRatio>, s| match best {
                Some(b) if b.ratio <= s.ratio => Some(b),
                _ => Some(s),
            })
    }
}

/// Evaluates the measure or width ratio at every sample point.
pub fn check_condition(
    domain: &DomainModel,
    kind: ConditionKind,
    params: ConditionParams,
    sample_points: &[Point],
) -> Result<ConditionReport> {
    if sample_points.is_empty() {
        return Err(Error::EmptyInput("check_condition needs sample points"));
    }
    let eval = match kind {
        ConditionKind::Measure => measure_ratio,
        ConditionKind::Width => width_ratio,
        ConditionKind::Markov => {
            return Err(Error::invalid("use markov_width_check for the Markov condition"))
        }
    };
    let results: Vec<Result<RatioEstimate>> = sample_points
        .par_iter()
        .map(|x| eval(domain, x, params.a))
        .collect();
    let mut samples = Vec::with_capacity(results.len());
    let mut caveats = Vec::new();
    for (x, r) in sample_points.iter().zip(results) {
        let est = r?;
        if let Some(c) = est.caveat {
            caveats.push(c);
        }
        samples.push(SampleRatio {
            point: x.clone(),
            radius: None,
            ratio: est.value,
            std_error: est.std_error,
        });
    }
    Ok(ConditionReport::assemble(kind, params, samples, caveats))
}
