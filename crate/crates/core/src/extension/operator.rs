use nalgebra::DMatrix;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::atom::PAtom;
use super::distribution::{
    box_monomial_integral, DiracTerm, ExtendedDistribution, ExtensionCase, ExtensionMeta, WeightedCell,
};
use super::rational::{critical_order, RationalP};
use crate::error::{Error, Result};
use crate::geometry::{unit_ball_volume, Ball, Cube, DomainModel, Point};
use crate::polyinterp::{dual_basis, monomials, select_nodes, MultiIndex, SelectionStrategy};

pub const MSG_MEASURE_VIOLATED: &str = "measure condition violated at atom";
pub const MSG_WIDTH_VIOLATED: &str = "width condition violated at atom";

/// Largest dilation tried in the generic case before giving up.
pub const GENERIC_MAX_A: f64 = 32.0;
/// Unit-frame coefficients beyond this multiple of `||g||_inf` are refused.
pub const MAX_COEFFICIENT_RATIO: f64 = 1e9;
/// Complement samples fed to node selection are thinned to at most this many.
pub const MAX_NODE_SAMPLES: usize = 2000;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtensionParams {
    pub a: f64,
}

impl Default for ExtensionParams {
    fn default() -> Self {
        ExtensionParams { a: 2.0 }
    }
}

/// The linear map `g -> extension of g` for atoms on one Whitney cube.
///
/// All geometric work (supporting ball, correction cells, node selection,
/// moment matrices) is done once; applying the operator is a matrix-vector
/// product in the cell values, so it is linear by construction.
#[derive(Clone, Debug)]
pub struct ExtensionOperator {
    p: RationalP,
    n: usize,
    n_p: u32,
    case: ExtensionCase,
    support: Cube,
    subdivisions: usize,
    cells: Vec<Cube>,
    x0: Point,
    /// Frame scale `a r` in the special case.
    frame_scale: f64,
    ball: Ball,
    nodes: Vec<(Point, MultiIndex)>,
    /// Dirac coefficients = `coeff_map * values`.
    coeff_map: DMatrix<f64>,
    correction_cells: Vec<Cube>,
    /// Correction value = `-(correction_weights . values)`.
    correction_weights: Vec<f64>,
    meta: ExtensionMeta,
}

impl ExtensionOperator {
    pub fn new(
        domain: &DomainModel,
        support: &Cube,
        subdivisions: usize,
        p: RationalP,
        params: ExtensionParams,
    ) -> Result<Self> {
        let a = params.a;
        if !(a > 1.0 && a.is_finite()) {
            return Err(Error::invalid(format!("a must exceed 1, got {a}")));
        }
        let n = domain.dim();
        if support.dim() != n {
            return Err(Error::DimensionMismatch { expected: n, got: support.dim() });
        }
        let order = critical_order(p, n);
        let x0 = support.center();
        let r = domain.complement().distance(&x0);
        if r <= 0.0 {
            return Err(Error::PointNotInterior { distance: r });
        }
        let cells = support.subgrid(subdivisions);
        let mut op = ExtensionOperator {
            p,
            n,
            n_p: order.n_p,
            case: ExtensionCase::Generic,
            support: support.clone(),
            subdivisions,
            x0: x0.clone(),
            frame_scale: a * r,
            ball: Ball { center: x0, radius: a * r },
            coeff_map: DMatrix::zeros(0, cells.len()),
            cells,
            nodes: Vec::new(),
            correction_cells: Vec::new(),
            correction_weights: Vec::new(),
            meta: ExtensionMeta {
                a,
                r,
                r_over_circumradius: r / (0.5 * support.diam()),
                sup_ratio: 1.0,
                ..Default::default()
            },
        };
        match order.special_k {
            Some(0) => op.build_p1(domain)?,
            Some(k) => op.build_special(domain, k)?,
            None => op.build_generic(domain)?,
        }
        Ok(op)
    }

    pub fn case(&self) -> ExtensionCase {
        self.case
    }

    pub fn support(&self) -> &Cube {
        &self.support
    }

    pub fn meta(&self) -> &ExtensionMeta {
        &self.meta
    }

    pub fn enclosing_ball(&self) -> &Ball {
        &self.ball
    }

    fn build_p1(&mut self, domain: &DomainModel) -> Result<()> {
        self.case = ExtensionCase::P1;
        let comp = domain.complement();
        if !comp.has_positive_measure() {
            return Err(Error::MeasureConditionViolated(MSG_MEASURE_VIOLATED.to_string()));
        }
        let radius = self.meta.a * self.meta.r;
        let pitch = radius / if self.n >= 3 { 32.0 } else { 128.0 };
        let vox = comp.voxelize_in_ball(&self.x0, radius, pitch);
        let volume: f64 = vox.iter().map(Cube::volume).sum();
        if vox.is_empty() || volume <= 0.0 {
            return Err(Error::MeasureConditionViolated(MSG_MEASURE_VIOLATED.to_string()));
        }
        let cell_volume = self.cells[0].volume();
        self.correction_weights = vec![cell_volume / volume; self.cells.len()];
        self.correction_cells = vox;
        self.meta.measure_ratio = Some(volume / (unit_ball_volume(self.n) * radius.powi(self.n as i32)));
        self.ball.radius = radius + pitch * (self.n as f64).sqrt();
        Ok(())
    }

    fn build_special(&mut self, domain: &DomainModel, k: u32) -> Result<()> {
        self.case = ExtensionCase::Special { k };
        let s = self.frame_scale;
        let mut samples = domain.complement().hull_samples_in_ball(&self.x0, s);
        if samples.len() > MAX_NODE_SAMPLES {
            let stride = samples.len().div_ceil(MAX_NODE_SAMPLES);
            samples = samples.into_iter().step_by(stride).collect();
        }
        if samples.is_empty() {
            return Err(Error::WidthConditionViolated(MSG_WIDTH_VIOLATED.to_string()));
        }
        let frame: Vec<Point> = samples
            .iter()
            .map(|y| Point::from_slice(&y.iter().zip(self.x0.iter()).map(|(a, b)| (a - b) / s).collect::<Vec<_>>()))
            .collect();
        let ns = select_nodes(&frame, k, SelectionStrategy::Greedy).map_err(|e| match e {
            Error::InterpolationImpossible { .. } => Error::WidthConditionViolated(MSG_WIDTH_VIOLATED.to_string()),
            other => other,
        })?;
        let dual = dual_basis(&ns).map_err(|e| match e {
            Error::IllConditioned { condition } => Error::NearDegenerateNodeSet { ratio: condition },
            other => other,
        })?;

        let basis = monomials(self.n, k);
        let mom = DMatrix::from_fn(basis.len(), self.cells.len(), |i, j| {
            let c = &self.cells[j];
            box_monomial_integral(&c.min_corner, c.side, &basis[i], &self.x0, s)
        });
        let signs: Vec<f64> = ns.nodes.iter().map(|nd| nd.beta.sign()).collect();
        let powers: Vec<f64> = ns.nodes.iter().map(|nd| s.powi(nd.beta.order() as i32)).collect();

        // direct moment system: sum_j sign_j H[j][alpha] c'_j = -∫ g u^alpha
        let h = ns.hermite_matrix();
        let mut system = h.transpose();
        for (j, sg) in signs.iter().enumerate() {
            system.column_mut(j).scale_mut(*sg);
        }
        let lu = system.lu();
        let mut direct = lu
            .solve(&(-&mom))
            .ok_or(Error::NearDegenerateNodeSet { ratio: f64::INFINITY })?;
        for (j, pw) in powers.iter().enumerate() {
            direct.row_mut(j).scale_mut(*pw);
        }

        // dual-basis formula: c_j = s^|beta_j| (-1)^(|beta_j|+1) ∫ g u-frame P_j
        let coeffs = DMatrix::from_fn(basis.len(), dual.polys.len(), |i, j| dual.polys[j].coeffs[i]);
        let mut via_dual = coeffs.transpose() * &mom;
        for j in 0..via_dual.nrows() {
            via_dual.row_mut(j).scale_mut(-signs[j] * powers[j]);
        }
        let scale = direct.amax().max(f64::MIN_POSITIVE);
        self.meta.route_discrepancy = Some((&direct - &via_dual).amax() / scale);
        self.meta.node_conditioning = Some(ns.conditioning);
        self.meta.dual_max_sup_norm = Some(dual.max_sup_norm);

        self.nodes = ns
            .nodes
            .iter()
            .map(|nd| {
                let x: Vec<f64> = nd.x.iter().zip(self.x0.iter()).map(|(u, c)| c + s * u).collect();
                (Point::from_slice(&x), nd.beta.clone())
            })
            .collect();
        self.coeff_map = direct;
        Ok(())
    }

    fn build_generic(&mut self, domain: &DomainModel) -> Result<()> {
        self.case = ExtensionCase::Generic;
        let comp = domain.complement();
        let r = self.meta.r;
        let mut a = self.meta.a;
        while comp.items_in_ball(&self.x0, a * r).is_empty() {
            if a >= GENERIC_MAX_A {
                return Err(Error::invalid(format!(
                    "complement does not meet B(x0, {a} r); representation-resolution artifact"
                )));
            }
            a = (2.0 * a).min(GENERIC_MAX_A);
        }
        self.meta.a = a;
        self.ball.radius = a * r;
        let (y, _) = comp
            .nearest_point(&self.x0)
            .ok_or(Error::ImproperDomain)?;
        let betas = monomials(self.n, self.n_p);
        self.coeff_map = DMatrix::from_fn(betas.len(), self.cells.len(), |i, j| {
            let c = &self.cells[j];
            let b = &betas[i];
            -b.sign() * box_monomial_integral(&c.min_corner, c.side, b, &y, 1.0) / b.factorial()
        });
        self.nodes = betas.into_iter().map(|b| (y.clone(), b)).collect();
        Ok(())
    }

    /// Extension of the function with the given cell values.
    pub fn apply(&self, values: &[f64]) -> Result<ExtendedDistribution> {
        if values.len() != self.cells.len() {
            return Err(Error::invalid(format!(
                "operator expects {} cell values, got {}",
                self.cells.len(),
                values.len()
            )));
        }
        let g_sup = values.iter().map(|v| v.abs()).fold(0.0, f64::max);
        let v = nalgebra::DVector::from_column_slice(values);
        let coeffs = &self.coeff_map * &v;
        let mut meta = self.meta.clone();

        let mut function_part: Vec<WeightedCell> = self
            .cells
            .iter()
            .zip(values)
            .map(|(c, &value)| WeightedCell {
                min_corner: c.min_corner.clone(),
                side: c.side,
                value,
            })
            .collect();
        if !self.correction_cells.is_empty() {
            let c: f64 = self.correction_weights.iter().zip(values).map(|(w, v)| w * v).sum();
            meta.correction_constant = Some(c);
            function_part.extend(self.correction_cells.iter().map(|q| WeightedCell {
                min_corner: q.min_corner.clone(),
                side: q.side,
                value: -c,
            }));
            meta.sup_ratio = if g_sup > 0.0 { g_sup.max(c.abs()) / g_sup } else { 1.0 };
        }
        if let ExtensionCase::Special { .. } = self.case {
            let s = self.frame_scale;
            let unit_max = self
                .nodes
                .iter()
                .zip(coeffs.iter())
                .map(|((_, b), c)| (c / s.powi(self.n as i32 + b.order() as i32)).abs())
                .fold(0.0, f64::max);
            let ratio = if g_sup > 0.0 { unit_max / g_sup } else { 0.0 };
            if ratio > MAX_COEFFICIENT_RATIO {
                return Err(Error::NearDegenerateNodeSet { ratio });
            }
            meta.coefficient_ratio = Some(ratio);
        }
        let dirac_terms = self
            .nodes
            .iter()
            .zip(coeffs.iter())
            .map(|((x, beta), &c)| DiracTerm { x: x.clone(), beta: beta.clone(), c })
            .collect();
        Ok(ExtendedDistribution {
            p: self.p,
            n: self.n,
            n_p: self.n_p,
            case: self.case,
            function_part,
            dirac_terms,
            enclosing_ball: self.ball.clone(),
            meta,
        })
    }

    pub fn apply_atom(&self, atom: &PAtom) -> Result<ExtendedDistribution> {
        if atom.support != self.support || atom.subdivisions != self.subdivisions {
            return Err(Error::invalid("atom support does not match the operator"));
        }
        if atom.p != self.p {
            return Err(Error::invalid(format!("atom has p = {}, operator p = {}", atom.p, self.p)));
        }
        self.apply(&atom.values)
    }
}

fn operator_for(domain: &DomainModel, atom: &PAtom, a: f64) -> Result<ExtensionOperator> {
    ExtensionOperator::new(domain, &atom.support, atom.subdivisions, atom.p, ExtensionParams { a })
}

/// Extension by a constant on `Omega^c ∩ B(x0, a r)` (`p = 1`).
pub fn extend_p1(atom: &PAtom, domain: &DomainModel, a: f64) -> Result<ExtendedDistribution> {
    if !atom.p.is_one() {
        return Err(Error::invalid(format!("extend_p1 needs p = 1, got {}", atom.p)));
    }
    operator_for(domain, atom, a)?.apply_atom(atom)
}

/// Extension by Dirac derivatives at interpolation nodes (`p = n/(n+k)`).
pub fn extend_special(atom: &PAtom, domain: &DomainModel, a: f64, k: u32) -> Result<ExtendedDistribution> {
    let order = critical_order(atom.p, domain.dim());
    if k == 0 || order.special_k != Some(k) {
        return Err(Error::invalid(format!(
            "p = {} in dimension {} is not n/(n+{k})",
            atom.p,
            domain.dim()
        )));
    }
    operator_for(domain, atom, a)?.apply_atom(atom)
}

/// Extension by a Taylor jet of Dirac derivatives at the nearest complement point.
pub fn extend_generic(atom: &PAtom, domain: &DomainModel, a: f64) -> Result<ExtendedDistribution> {
    if critical_order(atom.p, domain.dim()).special_k.is_some() {
        return Err(Error::invalid(format!(
            "p = {} is a special exponent in dimension {}",
            atom.p,
            domain.dim()
        )));
    }
    operator_for(domain, atom, a)?.apply_atom(atom)
}

/// Dispatches on the exponent.
pub fn extend_atom(atom: &PAtom, domain: &DomainModel, a: f64) -> Result<ExtendedDistribution> {
    operator_for(domain, atom, a)?.apply_atom(atom)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CombinationReport {
    pub extensions: Vec<ExtendedDistribution>,
    /// `(sum |lambda_i|^p b_i^p)^(1/p)`, `b_i = ||g_i||_inf |Q_i|^(1/p)`.
    pub aggregate: f64,
}

/// Extends `sum lambda_i g_i` atom by atom.
pub fn extend_combination(
    atoms: &[(f64, PAtom)],
    domain: &DomainModel,
    params: ExtensionParams,
) -> Result<CombinationReport> {
    let extensions: Result<Vec<ExtendedDistribution>> = atoms
        .par_iter()
        .map(|(lambda, atom)| operator_for(domain, atom, params.a)?.apply(&atom.scaled(*lambda).values))
        .collect();
    let aggregate = atoms
        .iter()
        .map(|(lambda, atom)| (lambda.abs() * atom.size_ratio()).powf(atom.p.value()))
        .sum::<f64>();
    let p = atoms.first().map(|(_, a)| a.p.value()).unwrap_or(1.0);
    Ok(CombinationReport {
        extensions: extensions?,
        aggregate: aggregate.powf(1.0 / p),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::extension::{make_whitney_atom, moments, patterns};
    use crate::geometry::{whitney_decompose, ComplementRep, WhitneyCube};

    fn two_point_line() -> DomainModel {
        let comp = ComplementRep::cloud(vec![Point::from([-1.0]), Point::from([1.0])], 1e-3).unwrap();
        DomainModel::new(Cube::new(Point::from([-2.0]), 4.0).unwrap(), comp).unwrap()
    }

    fn center_atom(dom: &DomainModel, p: RationalP, values: Vec<f64>) -> PAtom {
        let cube = Cube::new(Point::from([-0.25]), 0.5).unwrap();
        let w = WhitneyCube { cube, dist_to_complement: 0.75 };
        let m = values.len();
        make_whitney_atom(dom, &w, m, values, p).unwrap()
    }

    fn solve2(m: [[f64; 2]; 2], rhs: [f64; 2]) -> [f64; 2] {
        let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
        [
            (rhs[0] * m[1][1] - m[0][1] * rhs[1]) / det,
            (m[0][0] * rhs[1] - rhs[0] * m[1][0]) / det,
        ]
    }

    #[test]
    fn special_case_matches_two_by_two_solve() {
        let dom = two_point_line();
        let p = RationalP::new(1, 2).unwrap();
        // cells [-0.25, 0], [0, 0.25] with values 0.5 and 0.25 (bound 0.5^-2 = 4)
        let atom = center_atom(&dom, p, vec![0.5, 0.25]);
        let ext = extend_special(&atom, &dom, 2.0, 1).unwrap();
        let int0 = 0.5 * 0.25 + 0.25 * 0.25;
        let int1 = 0.5 * (0.0 - 0.0625) / 2.0 + 0.25 * (0.0625 - 0.0) / 2.0;
        // c_- + c_+ = -∫g ;  -c_- + c_+ = -∫ g y
        let c = solve2([[1.0, 1.0], [-1.0, 1.0]], [-int0, -int1]);
        let mut got: Vec<(f64, f64)> = ext.dirac_terms.iter().map(|d| (d.x[0], d.c)).collect();
        got.sort_by(|a, b| a.0.total_cmp(&b.0));
        assert_eq!(got.len(), 2);
        assert!((got[0].1 - c[0]).abs() < 1e-13 && (got[1].1 - c[1]).abs() < 1e-13, "{got:?} vs {c:?}");
        assert!(ext.meta.route_discrepancy.unwrap() < 1e-8);
        assert!(moments(&ext, 1).pass);
    }

    #[test]
    fn generic_case_matches_taylor_solve() {
        let dom = two_point_line();
        let p = RationalP::new(2, 5).unwrap();
        let atom = center_atom(&dom, p, vec![1.0, -0.5, 0.25, 2.0]);
        let ext = extend_generic(&atom, &dom, 2.0).unwrap();
        let cells = atom.cells();
        let int0: f64 = cells.iter().zip(&atom.values).map(|(c, v)| v * c.side).sum();
        let y = -1.0; // nearest complement point, ties broken lexicographically
        let int1: f64 = cells
            .iter()
            .zip(&atom.values)
            .map(|(c, v)| v * ((c.min_corner[0] + c.side - y).powi(2) - (c.min_corner[0] - y).powi(2)) / 2.0)
            .sum();
        // c0 = -∫g ; c0 y - c1 = -∫ g t
        let c0 = -int0;
        let c1 = int1;
        assert_eq!(ext.dirac_terms.len(), 2);
        assert_eq!(ext.dirac_terms[0].x[0], y);
        assert!((ext.dirac_terms[0].c - c0).abs() < 1e-13);
        assert!((ext.dirac_terms[1].c - c1).abs() < 1e-13);
        assert!(moments(&ext, 1).pass);
    }

    #[test]
    fn zeroth_order_generic_is_a_single_mass() {
        let dom = two_point_line();
        let atom = center_atom(&dom, RationalP::new(3, 5).unwrap(), vec![1.0, 1.0]);
        let ext = extend_generic(&atom, &dom, 2.0).unwrap();
        assert_eq!(ext.dirac_terms.len(), 1);
        assert!((ext.dirac_terms[0].c + atom.integral()).abs() < 1e-15);
    }

    #[test]
    fn moment_free_atom_needs_no_correction() {
        let dom = two_point_line();
        // symmetric values around the center kill the odd moment, opposite signs the even one:
        // +,-,-,+ has zero mean and zero first moment
        let atom = center_atom(&dom, RationalP::new(1, 2).unwrap(), vec![1.0, -1.0, -1.0, 1.0]);
        let ext = extend_special(&atom, &dom, 2.0, 1).unwrap();
        assert!(ext.dirac_terms.iter().all(|d| d.c.abs() < 1e-15));
    }

    fn half_plane() -> DomainModel {
        let mut cells = Vec::new();
        for i in 0..8 {
            for j in 0..4 {
                cells.push(Cube::new(Point::from([-4.0 + i as f64, -4.0 + j as f64]), 1.0).unwrap());
            }
        }
        let comp = ComplementRep::cells(cells, 0.05).unwrap();
        DomainModel::new(Cube::new(Point::from([-4.0, -4.0]), 8.0).unwrap(), comp).unwrap()
    }

    #[test]
    fn p1_constant_correction_on_half_plane() {
        let dom = half_plane();
        let dec = whitney_decompose(&dom, &Cube::new(Point::from([0.0, 0.0]), 2.0).unwrap(), 5).unwrap();
        let w = dec.cubes.iter().find(|w| w.cube.side == 0.25).unwrap().clone();
        let bound = w.cube.volume().recip();
        let atom = make_whitney_atom(&dom, &w, 2, patterns::constant(2, 2, bound), RationalP::one()).unwrap();
        let ext = extend_p1(&atom, &dom, 2.0).unwrap();
        let rep = moments(&ext, 0);
        assert!(rep.max_abs < 1e-10, "{}", rep.max_abs);
        let c = ext.meta.correction_constant.unwrap();
        let corr: f64 = ext.function_part[4..].iter().map(|q| q.side * q.side).sum();
        assert!((c * corr - 1.0).abs() < 1e-12);

        let zero = make_whitney_atom(&dom, &w, 2, patterns::checkerboard(2, 2, bound), RationalP::one()).unwrap();
        let ext0 = extend_p1(&zero, &dom, 2.0).unwrap();
        assert_eq!(ext0.meta.correction_constant, Some(0.0));
    }

    #[test]
    fn measure_zero_and_width_zero_failures() {
        let dom = two_point_line();
        let atom = center_atom(&dom, RationalP::one(), vec![1.0]);
        assert!(matches!(
            extend_p1(&atom, &dom, 2.0),
            Err(Error::MeasureConditionViolated(m)) if m == MSG_MEASURE_VIOLATED
        ));

        // R^2 minus a segment, p = 2/3 needs nodes off a line
        let seg: Vec<Point> = (0..=64).map(|i| Point::from([-1.0 + i as f64 / 32.0, 0.0])).collect();
        let dom2 = DomainModel::new(
            Cube::new(Point::from([-2.0, -2.0]), 4.0).unwrap(),
            ComplementRep::cloud(seg, 1.0 / 32.0).unwrap(),
        )
        .unwrap();
        let cube = Cube::new(Point::from([0.0, 0.25]), 0.125).unwrap();
        let w = WhitneyCube { cube, dist_to_complement: 0.25 };
        let atom = make_whitney_atom(&dom2, &w, 1, vec![1.0], RationalP::new(2, 3).unwrap()).unwrap();
        assert!(matches!(
            extend_atom(&atom, &dom2, 2.0),
            Err(Error::WidthConditionViolated(m)) if m == MSG_WIDTH_VIOLATED
        ));
        // a non-special exponent extends on the same domain
        let atom = make_whitney_atom(&dom2, &w, 1, vec![1.0], RationalP::new(3, 5).unwrap()).unwrap();
        assert!(moments(&extend_atom(&atom, &dom2, 2.0).unwrap(), 1).pass);
    }

    #[test]
    fn operator_is_linear() {
        let dom = two_point_line();
        let op = ExtensionOperator::new(
            &dom,
            &Cube::new(Point::from([-0.25]), 0.5).unwrap(),
            4,
            RationalP::new(1, 2).unwrap(),
            ExtensionParams::default(),
        )
        .unwrap();
        let g = [0.3, -1.0, 2.0, 0.1];
        let h = [1.0, 0.5, -0.7, 0.0];
        let combo: Vec<f64> = g.iter().zip(&h).map(|(x, y)| 2.0 * x - 3.0 * y).collect();
        let eg = op.apply(&g).unwrap();
        let eh = op.apply(&h).unwrap();
        let ec = op.apply(&combo).unwrap();
        for ((a, b), c) in eg.dirac_terms.iter().zip(&eh.dirac_terms).zip(&ec.dirac_terms) {
            assert!((2.0 * a.c - 3.0 * b.c - c.c).abs() <= 1e-12 * c.c.abs().max(1.0));
        }
    }
}
