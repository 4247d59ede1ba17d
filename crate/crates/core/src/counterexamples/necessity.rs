use serde::{Deserialize, Serialize};
use std::fmt::Write as _;

use super::lipschitz::{lip_witness_nd, unit_ball_integral};
use super::seminorms::{lip_seminorm, LipSampling};
use crate::conditions::{measure_ratio, width_ratio, ConditionKind};
use crate::error::{Error, Result};
use crate::extension::RationalP;
use crate::geometry::{unit_ball_volume, whitney_centers, Cube, DomainModel, Point};

/// `a_j = 2^(j+2)`.
pub fn ladder_a(j: u32) -> f64 {
    2f64.powi(j as i32 + 2)
}

/// `eps_j = delta_j = 2^-(j+2)`.
pub fn ladder_epsilon(j: u32) -> f64 {
    2f64.powi(-(j as i32) - 2)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NecessityParams {
    pub j_min: u32,
    pub j_max: u32,
    /// Points to scan; Whitney centers of the domain when absent.
    pub candidates: Option<Vec<Point>>,
    pub whitney_depth: u32,
    pub lip_samples: usize,
    pub seed: u64,
}

impl Default for NecessityParams {
    fn default() -> Self {
        NecessityParams { j_min: 1, j_max: 4, candidates: None, whitney_depth: 5, lip_samples: 4000, seed: 0 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NecessityRow {
    pub j: u32,
    pub a_j: f64,
    pub eps_j: f64,
    /// The scanned point where the condition fails at `(a_j, eps_j)`.
    pub x_j: Point,
    pub ratio: f64,
    /// Sampled `Λ^gamma` seminorm of the witness.
    pub lip_seminorm: Option<f64>,
    /// `∫_B g_j f_j` with `g_j = sgn(f_j) |B|^(-1/p)` in the unit frame.
    pub pairing: Option<f64>,
    /// `|pairing| / lip_seminorm`, a lower bound for the norm of every extension of `g_j`.
    pub lower_bound: Option<f64>,
    /// `min(log a_j, log 1/eps_j)`.
    pub log_factor: f64,
    /// `∫_B |f_j|`.
    pub l1_unit_ball: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NecessityTable {
    pub p: RationalP,
    pub condition: ConditionKind,
    pub gamma: f64,
    pub rows: Vec<NecessityRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl NecessityTable {
    /// Columns `j,a_j,eps_j,lip_seminorm,pairing,lower_bound`; missing values are empty.
    pub fn to_csv(&self) -> String {
        let opt = |v: Option<f64>| v.map(|x| format!("{x:.10e}")).unwrap_or_default();
        let mut out = String::from("j,a_j,eps_j,lip_seminorm,pairing,lower_bound\n");
        for r in &self.rows {
            let _ = writeln!(
                out,
                "{},{},{},{},{},{}",
                r.j,
                r.a_j,
                r.eps_j,
                opt(r.lip_seminorm),
                opt(r.pairing),
                opt(r.lower_bound)
            );
        }
        out
    }

    pub fn lower_bounds_increasing(&self) -> bool {
        let v: Vec<f64> = self.rows.iter().filter_map(|r| r.lower_bound).collect();
        v.len() == self.rows.len() && v.windows(2).all(|w| w[1] > w[0])
    }
}

pub const NOTE_P1: &str =
    "p = 1: the BMO witness is non-constructive; only the failing measure-ratio scan is reported";

/// Necessity table over `j`: at each scale finds a point where the relevant
/// condition fails, builds the slab witness `f_j` in the unit frame of
/// `B(x_j, d(x_j)/2)` and the extremal atom `sgn(f_j) |B|^(-1/p)`, and reports
/// `|⟨g_j, f_j⟩| / ||f_j||`. Since `f_j` vanishes near the rescaled complement,
/// the pairing is the same for every extension of `g_j`.
pub fn necessity_demo(domain: &DomainModel, p: RationalP, params: &NecessityParams) -> Result<NecessityTable> {
    if params.j_min > params.j_max {
        return Err(Error::invalid("j range is empty"));
    }
    let n = domain.dim();
    let condition = if p.is_one() { ConditionKind::Measure } else { ConditionKind::Width };
    let gamma = n as f64 * (p.inverse() - 1.0);
    let candidates = match &params.candidates {
        Some(c) => c.clone(),
        None => whitney_centers(domain, params.whitney_depth)?,
    };
    let mut rows = Vec::new();
    for j in params.j_min..=params.j_max {
        let a = ladder_a(j);
        let eps = ladder_epsilon(j);
        let mut found: Option<(Point, f64)> = None;
        for x in &candidates {
            let r = match condition {
                ConditionKind::Measure => measure_ratio(domain, x, a),
                _ => width_ratio(domain, x, a),
            };
            if let Ok(r) = r {
                if r.value < eps && found.as_ref().is_none_or(|(_, best)| r.value < *best) {
                    found = Some((x.clone(), r.value));
                }
            }
        }
        let Some((x_j, ratio)) = found else { continue };
        let log_factor = a.ln().min(eps.recip().ln());
        let mut row = NecessityRow {
            j,
            a_j: a,
            eps_j: eps,
            x_j: x_j.clone(),
            ratio,
            lip_seminorm: None,
            pairing: None,
            lower_bound: None,
            log_factor,
            l1_unit_ball: None,
        };
        if condition == ConditionKind::Width {
            let r_j = 0.5 * domain.distance_to_complement(&x_j)?;
            let e_j: Vec<Point> = domain
                .complement()
                .hull_samples_in_ball(&x_j, a * r_j)
                .iter()
                .map(|y| Point::new(y.iter().zip(x_j.iter()).map(|(u, v)| (u - v) / r_j).collect()))
                .collect::<Result<_>>()?;
            let k = (gamma.ceil() as u32).max(1);
            let witness = lip_witness_nd(&e_j, a, eps, k)?;
            let region = Cube::new(Point::new(vec![-a - 1.0; n])?, 2.0 * (a + 1.0))?;
            let plan = LipSampling::new(region, a, params.lip_samples, params.seed.wrapping_add(j as u64))
                .resolved(witness.profile.pitch)
                .with_focus(Point::origin(n), 4.0);
            let lip = lip_seminorm(&|x: &[f64]| witness.eval(x), gamma, &plan)?.value;
            let per_axis = if n >= 3 { 48 } else { 256 };
            let l1 = unit_ball_integral(n, per_axis, |x| witness.eval(x).abs());
            let pairing = unit_ball_volume(n).powf(-p.inverse()) * l1;
            row.lip_seminorm = Some(lip);
            row.pairing = Some(pairing);
            row.lower_bound = Some(pairing / lip);
            row.l1_unit_ball = Some(l1);
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::NoFailingScale(format!(
            "the {} condition holds at every scanned point for j in {}..={}",
            match condition {
                ConditionKind::Measure => "measure",
                _ => "width",
            },
            params.j_min,
            params.j_max
        )));
    }
    Ok(NecessityTable {
        p,
        condition,
        gamma,
        rows,
        note: p.is_one().then(|| NOTE_P1.to_string()),
    })
}
