use serde::{Deserialize, Serialize};
use std::path::Path;

use super::rational::RationalP;
use crate::error::{Error, Result};
use crate::geometry::{Ball, Cube, Point};
use crate::polyinterp::{monomials, MultiIndex};

/// A cube carrying a constant value.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedCell {
    pub min_corner: Point,
    pub side: f64,
    pub value: f64,
}

impl WeightedCell {
    pub fn cube(&self) -> Cube {
        Cube {
            min_corner: self.min_corner.clone(),
            side: self.side,
        }
    }
}

/// `c ∂^beta δ_x`, acting on a test function `φ` by `c (-1)^|beta| ∂^beta φ(x)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DiracTerm {
    pub x: Point,
    pub beta: MultiIndex,
    pub c: f64,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "case")]
pub enum ExtensionCase {
    /// `p = 1`: a constant correction on the complement.
    P1,
    /// `p = n/(n+k)`: Dirac derivatives at interpolation nodes.
    Special { k: u32 },
    /// Other `p`: a Taylor jet of Dirac derivatives at one complement point.
    Generic,
    /// Not an extension: a bare function such as a classical atom.
    FunctionOnly,
}

/// Construction details recorded alongside an extension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize, Default)]
pub struct ExtensionMeta {
    /// Dilation actually used (the generic case may enlarge it).
    pub a: f64,
    /// Supporting radius `r = d(x0)`.
    pub r: f64,
    /// `r` over the circumradius of the Whitney cube.
    pub r_over_circumradius: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub measure_ratio: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub correction_constant: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub node_conditioning: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dual_max_sup_norm: Option<f64>,
    /// Largest coefficient difference between the dual-basis formula and the
    /// direct moment solve, relative to the largest coefficient.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub route_discrepancy: Option<f64>,
    /// Largest unit-frame coefficient over `||g||_inf`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub coefficient_ratio: Option<f64>,
    /// Sup norm of the function part over that of the atom.
    pub sup_ratio: f64,
}

/// `f = g + sum c ∂^beta δ_x`: a piecewise constant function plus finitely
/// many Dirac derivatives.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtendedDistribution {
    pub p: RationalP,
    pub n: usize,
    pub n_p: u32,
    pub case: ExtensionCase,
    pub function_part: Vec<WeightedCell>,
    pub dirac_terms: Vec<DiracTerm>,
    pub enclosing_ball: Ball,
    pub meta: ExtensionMeta,
}

impl ExtendedDistribution {
    /// A distribution with no Dirac part, e.g. a classical atom; the
    /// enclosing ball is the smallest one centered at the cells' bounding-box center.
    pub fn function_only(p: RationalP, cells: Vec<WeightedCell>) -> Result<Self> {
        let first = cells.first().ok_or(Error::EmptyInput("cells"))?;
        let n = first.min_corner.dim();
        let mut lo = vec![f64::INFINITY; n];
        let mut hi = vec![f64::NEG_INFINITY; n];
        for c in &cells {
            if c.min_corner.dim() != n {
                return Err(Error::DimensionMismatch { expected: n, got: c.min_corner.dim() });
            }
            for i in 0..n {
                lo[i] = lo[i].min(c.min_corner[i]);
                hi[i] = hi[i].max(c.min_corner[i] + c.side);
            }
        }
        let center: Vec<f64> = lo.iter().zip(&hi).map(|(a, b)| 0.5 * (a + b)).collect();
        let radius = lo.iter().zip(&hi).map(|(a, b)| 0.25 * (b - a) * (b - a)).sum::<f64>().sqrt();
        Ok(ExtendedDistribution {
            p,
            n,
            n_p: super::rational::critical_order(p, n).n_p,
            case: ExtensionCase::FunctionOnly,
            function_part: cells,
            dirac_terms: Vec::new(),
            enclosing_ball: Ball { center: Point::new(center)?, radius },
            meta: ExtensionMeta::default(),
        })
    }

    /// The single term `c ∂^beta δ_x`.
    pub fn dirac(p: RationalP, x: Point, beta: MultiIndex, c: f64) -> Self {
        let n = x.dim();
        ExtendedDistribution {
            p,
            n,
            n_p: super::rational::critical_order(p, n).n_p,
            case: ExtensionCase::FunctionOnly,
            function_part: Vec::new(),
            dirac_terms: vec![DiracTerm { x: x.clone(), beta, c }],
            enclosing_ball: Ball { center: x, radius: 0.0 },
            meta: ExtensionMeta::default(),
        }
    }

    /// `alpha f`.
    pub fn scaled(&self, alpha: f64) -> Self {
        let mut out = self.clone();
        out.function_part.iter_mut().for_each(|c| c.value *= alpha);
        out.dirac_terms.iter_mut().for_each(|d| d.c *= alpha);
        out
    }

    /// `f(. - v)`.
    pub fn translated(&self, v: &[f64]) -> Self {
        let mut out = self.clone();
        out.function_part
            .iter_mut()
            .for_each(|c| c.min_corner = c.min_corner.translate(v));
        out.dirac_terms.iter_mut().for_each(|d| d.x = d.x.translate(v));
        out.enclosing_ball.center = out.enclosing_ball.center.translate(v);
        out
    }

    /// `f_lambda(x) = lambda^(n/p) f(lambda x)`: supports shrink by `lambda`,
    /// a Dirac term `c ∂^beta δ_x` becomes `lambda^(n/p - n - |beta|) c ∂^beta δ_(x/lambda)`.
    pub fn dilated(&self, lambda: f64) -> Self {
        let n = self.n as f64;
        let amp = lambda.powf(n * self.p.inverse());
        let mut out = self.clone();
        let origin = vec![0.0; self.n];
        for c in &mut out.function_part {
            c.min_corner = c.min_corner.scale_about(&origin, 1.0 / lambda);
            c.side /= lambda;
            c.value *= amp;
        }
        for d in &mut out.dirac_terms {
            d.x = d.x.scale_about(&origin, 1.0 / lambda);
            d.c *= amp * lambda.powf(-n - d.beta.order() as f64);
        }
        out.enclosing_ball = Ball {
            center: out.enclosing_ball.center.scale_about(&origin, 1.0 / lambda),
            radius: out.enclosing_ball.radius / lambda,
        };
        out
    }

    pub fn max_dirac_order(&self) -> Option<u32> {
        self.dirac_terms.iter().map(|d| d.beta.order()).max()
    }

    pub fn function_sup(&self) -> f64 {
        self.function_part.iter().map(|c| c.value.abs()).fold(0.0, f64::max)
    }

    pub fn write_json(&self, path: &Path) -> Result<()> {
        std::fs::write(path, serde_json::to_string_pretty(self)?)?;
        Ok(())
    }

    pub fn read_json(path: &Path) -> Result<Self> {
        let text = Error::read_file(path)?;
        serde_json::from_str(&text).map_err(|e| Error::Schema {
            field: format!("{} (line {}, column {})", path.display(), e.line(), e.column()),
            message: e.to_string(),
        })
    }
}

/// `b^m - a^m` without cancellation, as `(b - a) sum a^i b^(m-1-i)`.
fn power_difference(a: f64, b: f64, m: u32) -> f64 {
    let mut s = 0.0;
    let mut ai = 1.0;
    for i in 0..m {
        s += ai * b.powi((m - 1 - i) as i32);
        ai *= a;
    }
    (b - a) * s
}

/// `∫_box prod_i ((y_i - shift_i) / scale)^alpha_i dy`, exactly.
pub(crate) fn box_monomial_integral(lo: &[f64], side: f64, alpha: &MultiIndex, shift: &[f64], scale: f64) -> f64 {
    let mut v = 1.0;
    for i in 0..lo.len() {
        let e = alpha.0[i] + 1;
        let a = (lo[i] - shift[i]) / scale;
        let b = (lo[i] + side - shift[i]) / scale;
        let diff = if side == 0.0 { 0.0 } else { power_difference(a, b, e) };
        v *= scale * diff / e as f64;
    }
    v
}

/// One moment `⟨f, y^alpha⟩` with the magnitude of the sum that produced it.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentEntry {
    pub alpha: MultiIndex,
    pub value: f64,
    /// Sum of absolute values of the individual contributions.
    pub scale: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MomentReport {
    pub order: u32,
    pub entries: Vec<MomentEntry>,
    pub max_abs: f64,
    pub rel_tol: f64,
    /// `rel_tol` times the largest entry scale.
    pub tolerance: f64,
    pub pass: bool,
}

/// Default relative tolerance for moment checks.
pub const MOMENT_REL_TOL: f64 = 1e-9;

/// All moments `⟨f, y^alpha⟩`, `|alpha| <= order`, in closed form.
pub fn moments(dist: &ExtendedDistribution, order: u32) -> MomentReport {
    moments_with_tolerance(dist, order, MOMENT_REL_TOL)
}

pub fn moments_with_tolerance(dist: &ExtendedDistribution, order: u32, rel_tol: f64) -> MomentReport {
    let n = dist.n;
    let zero = vec![0.0; n];
    let entries: Vec<MomentEntry> = monomials(n, order)
        .into_iter()
        .map(|alpha| {
            let mut value = 0.0;
            let mut scale = 0.0;
            for c in &dist.function_part {
                let t = c.value * box_monomial_integral(&c.min_corner, c.side, &alpha, &zero, 1.0);
                value += t;
                scale += t.abs();
            }
            for d in &dist.dirac_terms {
                let t = d.c * d.beta.sign() * alpha.monomial_derivative(&d.beta, &d.x);
                value += t;
                scale += t.abs();
            }
            MomentEntry { alpha, value, scale }
        })
        .collect();
    let max_abs = entries.iter().map(|e| e.value.abs()).fold(0.0, f64::max);
    let tolerance = rel_tol * entries.iter().map(|e| e.scale).fold(0.0, f64::max);
    MomentReport {
        order,
        pass: max_abs <= tolerance,
        entries,
        max_abs,
        rel_tol,
        tolerance,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dist_1d(cells: Vec<WeightedCell>, dirac: Vec<DiracTerm>) -> ExtendedDistribution {
        ExtendedDistribution {
            p: RationalP::one(),
            n: 1,
            n_p: 0,
            case: ExtensionCase::Generic,
            function_part: cells,
            dirac_terms: dirac,
            enclosing_ball: Ball { center: Point::from([0.0]), radius: 2.0 },
            meta: ExtensionMeta::default(),
        }
    }

    #[test]
    fn dirac_derivative_moment() {
        let d = dist_1d(
            vec![],
            vec![DiracTerm { x: Point::from([0.5]), beta: MultiIndex(vec![1]), c: 1.0 }],
        );
        let rep = moments(&d, 2);
        assert_eq!(rep.entries[2].value, -1.0);
        assert_eq!(rep.entries[0].value, 0.0);
    }

    #[test]
    fn box_integrals_match_antiderivatives() {
        let lo = [0.25, -1.0];
        let v = box_monomial_integral(&lo, 0.5, &MultiIndex(vec![2, 1]), &[0.0, 0.0], 1.0);
        let x = (0.75f64.powi(3) - 0.25f64.powi(3)) / 3.0;
        let y = ((-0.5f64).powi(2) - 1.0) / 2.0;
        assert!((v - x * y).abs() < 1e-15);
        // shifted and scaled frame
        let w = box_monomial_integral(&[1.0], 1.0, &MultiIndex(vec![1]), &[1.0], 2.0);
        // ∫_1^2 (y - 1)/2 dy = 1/4
        assert!((w - 0.25).abs() < 1e-15);
    }

    #[test]
    fn cancelling_mass_passes() {
        let d = dist_1d(
            vec![WeightedCell { min_corner: Point::from([0.0]), side: 0.5, value: 2.0 }],
            vec![DiracTerm { x: Point::from([-1.0]), beta: MultiIndex(vec![0]), c: -1.0 }],
        );
        let rep = moments(&d, 0);
        assert!(rep.pass);
        assert!(!moments(&d, 1).pass);
    }
}
