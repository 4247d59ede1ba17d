use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use super::*;
use crate::conditions::{
    check_condition, markov_constant_probe, markov_epsilon_from_width, markov_width_check, ConditionParams,
    ConditionReport, MarkovProbe, DEFAULT_A_SWEEP,
};
use crate::counterexamples::{cantor_dust_domain, necessity_demo, segment_domain, unit_cell, NecessityParams, NecessityTable};
use crate::extension::{
    extend_atom, make_whitney_atom, moments, moments_with_tolerance, patterns, validate_atom, ExtendedDistribution,
    ExtensionCase, ExtensionMeta, MomentReport, PAtom,
};
use crate::geometry::{whitney_centers, whitney_decompose, width, Ball, Cube, DomainModel, Point, Width, WhitneyDecomposition};
use crate::maximal::{hp_quasinorm, HpEstimate, HpGrid, Mollifier, ScaleBin};

/// Segment half-length and resolution of the `counterexample --which segment` domain.
const SEGMENT_HALF_LENGTH: f64 = 1.0;
const SEGMENT_RESOLUTION: f64 = 1.0 / 64.0;
/// Cantor level of the `counterexample --which cantor` domain.
const COUNTEREXAMPLE_CANTOR_LEVEL: u32 = 4;
/// Atom cell values per axis in `demo-cantor`.
const DEMO_SUBDIVISIONS: usize = 4;
/// The width condition threshold checked by `demo-cantor`.
const DEMO_DELTA: f64 = 0.05;

pub(super) fn run(config: &RunConfig) -> Result<Outcome> {
    let verbose = config.verbose > 0;
    let (outcome, report_path) = match &config.command {
        Command::Distance(c) => (distance(config, c)?, c.out.as_deref()),
        Command::Whitney(c) => (whitney(config, c)?, c.out.as_deref()),
        Command::Width(c) => (width_cmd(config, c)?, c.out.as_deref()),
        Command::CheckDomain(c) => (check_domain(config, c, verbose)?, c.out.as_deref()),
        Command::ExtendAtom(c) => (extend(config, c)?, None),
        Command::VerifyMoments(c) => (verify_moments(config, c)?, c.out.as_deref()),
        Command::HpNorm(c) => (hp_norm(config, c)?, c.out.as_deref()),
        Command::MarkovProbe(c) => (markov_probe(config, c)?, c.out.as_deref()),
        Command::Counterexample(c) => (counterexample(config, c)?, None),
        Command::DemoCantor(c) => (demo_cantor(config, c, verbose)?, c.out.as_deref()),
    };
    if let Some(path) = report_path {
        std::fs::write(path, &outcome.report)?;
    }
    Ok(outcome)
}

fn point(coords: &[f64]) -> Result<Point> {
    Point::new(coords.to_vec())
}

fn read_points(path: &Path) -> Result<Vec<Point>> {
    let text = Error::read_file(path)?;
    let raw: Vec<Vec<f64>> = serde_json::from_str(&text).map_err(|e| Error::Schema {
        field: format!("{} (line {}, column {})", path.display(), e.line(), e.column()),
        message: e.to_string(),
    })?;
    raw.into_iter().map(Point::new).collect()
}

#[derive(Serialize)]
struct DistanceResult {
    point: Point,
    distance: f64,
    interior: bool,
}

fn distance(config: &RunConfig, c: &DistanceArgs) -> Result<Outcome> {
    let domain = DomainModel::read_json(&c.spec)?;
    let x = point(&c.point)?;
    let d = domain.distance_to_complement(&x)?;
    let interior = domain.is_interior(&x);
    render(config, true, DistanceResult { point: x, distance: d, interior })
}

fn whitney(config: &RunConfig, c: &WhitneyArgs) -> Result<Outcome> {
    let domain = DomainModel::read_json(&c.spec)?;
    let dec: WhitneyDecomposition = whitney_decompose(&domain, domain.bounding_box(), c.depth)?;
    render(config, true, dec)
}

fn width_cmd(config: &RunConfig, c: &WidthArgs) -> Result<Outcome> {
    let points = match (&c.points, &c.spec, &c.center, c.radius) {
        (Some(path), _, _, _) => read_points(path)?,
        (None, Some(spec), Some(center), Some(radius)) => {
            let domain = DomainModel::read_json(spec)?;
            if !(radius > 0.0) {
                return Err(Error::invalid(format!("--radius must be positive, got {radius}")));
            }
            domain.complement().hull_samples_in_ball(center, radius)
        }
        _ => return Err(Error::invalid("give --points, or --spec with --center and --radius")),
    };
    let w: Width = width(&points)?;
    render(config, true, w)
}

#[derive(Serialize)]
struct CheckDomainResult {
    samples: usize,
    reports: Vec<ConditionReport>,
}

fn sample_points(domain: &DomainModel, samples: &str, depth: u32) -> Result<Vec<Point>> {
    let points = if samples == "whitney" {
        whitney_centers(domain, depth)?
    } else {
        read_points(Path::new(samples))?
    };
    if let Some(bad) = points.iter().find(|p| p.dim() != domain.dim()) {
        return Err(Error::DimensionMismatch { expected: domain.dim(), got: bad.dim() });
    }
    Ok(points)
}

/// Balls centered at the complement point nearest to each sample, of radius `a d(x)`.
fn markov_report(domain: &DomainModel, points: &[Point], params: ConditionParams) -> Result<ConditionReport> {
    let mut centers = Vec::with_capacity(points.len());
    let mut radii = Vec::with_capacity(points.len());
    for x in points {
        if let Some((y, d)) = domain.complement().nearest_point(x) {
            if d > 0.0 {
                centers.push(y);
                radii.push(params.a * d);
            }
        }
    }
    markov_width_check(domain.complement(), &centers, &radii, markov_epsilon_from_width(&params))
}

fn check_domain(config: &RunConfig, c: &CheckDomainArgs, verbose: bool) -> Result<Outcome> {
    let domain = DomainModel::read_json(&c.spec)?;
    let points = sample_points(&domain, &c.samples, c.depth)?;
    let sweep: Vec<f64> = match c.a {
        Some(a) => vec![a],
        None => DEFAULT_A_SWEEP.to_vec(),
    };
    let mut reports = Vec::with_capacity(sweep.len());
    for a in sweep {
        let params = ConditionParams::new(a, c.delta)?;
        let report = match c.kind {
            KindArg::Markov => markov_report(&domain, &points, params)?,
            kind => check_condition(&domain, kind.into(), params, &points)?,
        };
        if verbose {
            eprintln!("a = {a}: inf ratio {:.6e}, verdict {}", report.inf_ratio, report.verdict);
        }
        reports.push(report);
    }
    let pass = reports.iter().any(|r| r.verdict);
    render(config, pass, CheckDomainResult { samples: points.len(), reports })
}

#[derive(Serialize)]
struct ExtendResult {
    case: ExtensionCase,
    n_p: u32,
    function_cells: usize,
    dirac_terms: usize,
    meta: ExtensionMeta,
    moments: MomentReport,
    #[serde(skip_serializing_if = "Option::is_none")]
    written_to: Option<PathBuf>,
}

fn extend(config: &RunConfig, c: &ExtendAtomArgs) -> Result<Outcome> {
    let domain = DomainModel::read_json(&c.spec)?;
    let mut atom = PAtom::read_json(&c.atom)?;
    if let Some(p) = c.p {
        atom.p = p;
    }
    validate_atom(&domain, &atom)?;
    let dist = extend_atom(&atom, &domain, c.a)?;
    if let Some(path) = &c.out {
        dist.write_json(path)?;
    }
    let report = moments(&dist, dist.n_p);
    render(
        config,
        report.pass,
        ExtendResult {
            case: dist.case,
            n_p: dist.n_p,
            function_cells: dist.function_part.len(),
            dirac_terms: dist.dirac_terms.len(),
            meta: dist.meta.clone(),
            moments: report,
            written_to: c.out.clone(),
        },
    )
}

fn verify_moments(config: &RunConfig, c: &VerifyMomentsArgs) -> Result<Outcome> {
    let dist = ExtendedDistribution::read_json(&c.dist)?;
    let order = c.order.unwrap_or(dist.n_p);
    let report = match c.rel_tol {
        Some(tol) if tol > 0.0 => moments_with_tolerance(&dist, order, tol),
        Some(tol) => return Err(Error::invalid(format!("--rel-tol must be positive, got {tol}"))),
        None => moments(&dist, order),
    };
    render(config, report.pass, report)
}

fn histogram_csv(bins: &[ScaleBin]) -> String {
    let mut out = String::from("log2_t,count\n");
    for b in bins {
        let _ = writeln!(out, "{},{}", b.log2_t, b.count);
    }
    out
}

#[derive(Serialize)]
struct HpNormResult {
    mollifier_order: u32,
    grid: HpGrid,
    estimate: HpEstimate,
    #[serde(skip_serializing_if = "Option::is_none")]
    histogram_csv: Option<PathBuf>,
}

fn hp_norm(config: &RunConfig, c: &HpNormArgs) -> Result<Outcome> {
    let dist = ExtendedDistribution::read_json(&c.dist)?;
    if let Some(p) = c.p {
        if p != dist.p {
            return Err(Error::invalid(format!("--p {p} disagrees with the distribution's p = {}", dist.p)));
        }
    }
    let mut grid = HpGrid::for_dim(dist.n);
    if let Some(h) = c.grid_pitch {
        grid = grid.with_pitch(h);
    }
    if let Some(r) = c.radius {
        grid = grid.with_radius(r);
    }
    let phi = match c.mollifier_order {
        Some(m) => Mollifier::new(dist.n, m)?,
        None => Mollifier::for_critical_order(dist.n, dist.n_p)?,
    };
    let estimate = hp_quasinorm(&dist, &phi, &grid)?;
    let histogram_path = c
        .histogram
        .clone()
        .or_else(|| c.out.as_ref().map(|o| o.with_extension("histogram.csv")));
    if let Some(path) = &histogram_path {
        std::fs::write(path, histogram_csv(&estimate.histogram))?;
    }
    let pass = estimate.estimate.is_finite();
    render(
        config,
        pass,
        HpNormResult { mollifier_order: phi.order(), grid, estimate, histogram_csv: histogram_path },
    )
}

fn markov_probe(config: &RunConfig, c: &MarkovProbeArgs) -> Result<Outcome> {
    let domain = DomainModel::read_json(&c.spec)?;
    let ball = Ball::new(point(&c.center)?, c.radius)?;
    let probe: MarkovProbe = markov_constant_probe(domain.complement(), &ball, c.k, c.trials, c.seed)?;
    render(config, true, probe)
}

fn counterexample(config: &RunConfig, c: &CounterexampleArgs) -> Result<Outcome> {
    let domain = match c.which {
        WitnessDomain::Cantor => cantor_dust_domain(2, COUNTEREXAMPLE_CANTOR_LEVEL, &[unit_cell(2)])?,
        WitnessDomain::Segment => segment_domain(SEGMENT_HALF_LENGTH, SEGMENT_RESOLUTION)?,
    };
    let params = NecessityParams {
        j_max: c.j_max,
        lip_samples: c.lip_samples,
        seed: c.seed,
        ..NecessityParams::default()
    };
    let table: NecessityTable = necessity_demo(&domain, c.p, &params)?;
    if let Some(path) = &c.out {
        std::fs::write(path, table.to_csv())?;
    }
    let pass = if c.p.is_one() { !table.rows.is_empty() } else { table.lower_bounds_increasing() };
    render(config, pass, table)
}

#[derive(Serialize)]
struct DemoAtom {
    support: Cube,
    case: ExtensionCase,
    moment_residual: f64,
    moments_pass: bool,
    hp_estimate: f64,
    tail_bound: f64,
}

#[derive(Serialize)]
struct DemoResult {
    complement_points: usize,
    whitney_cubes: usize,
    width_check: ConditionReport,
    atoms: Vec<DemoAtom>,
    hp_max_over_min: f64,
}

fn demo_cantor(config: &RunConfig, c: &DemoCantorArgs, verbose: bool) -> Result<Outcome> {
    let domain = cantor_dust_domain(c.n, c.level, &[unit_cell(c.n)])?;
    let depth = c.level + 2;
    let dec = whitney_decompose(&domain, domain.bounding_box(), depth)?;
    let centers: Vec<Point> = dec.cubes.iter().map(|q| q.cube.center()).collect();
    let width_check = check_condition(
        &domain,
        ConditionKind::Width,
        ConditionParams::new(c.a, DEMO_DELTA)?,
        &centers,
    )?;
    if verbose {
        eprintln!(
            "{} complement points, {} Whitney cubes, width inf ratio {:.4}",
            domain.complement().len(),
            dec.cubes.len(),
            width_check.inf_ratio
        );
    }
    let mut grid = HpGrid::for_dim(c.n);
    grid = grid.with_pitch(c.grid_pitch.unwrap_or(2.0 * grid.core_pitch));
    let mut rng = ChaCha8Rng::seed_from_u64(c.seed);
    let picks = sample(&mut rng, dec.cubes.len(), c.atoms.min(dec.cubes.len()));
    let mut atoms = Vec::with_capacity(picks.len());
    for i in picks.into_iter() {
        let cube = &dec.cubes[i];
        let bound = c.p.size_bound(cube.cube.volume());
        let values = patterns::random(&mut rng, c.n, DEMO_SUBDIVISIONS, bound);
        let atom = make_whitney_atom(&domain, cube, DEMO_SUBDIVISIONS, values, c.p)?;
        let dist = extend_atom(&atom, &domain, c.a)?;
        let report = moments(&dist, dist.n_p);
        let phi = Mollifier::for_critical_order(c.n, dist.n_p)?;
        let hp = hp_quasinorm(&dist, &phi, &grid)?;
        if verbose {
            eprintln!("atom on side {:.4e}: residual {:.2e}, H^p {:.4}", cube.cube.side, report.max_abs, hp.estimate);
        }
        atoms.push(DemoAtom {
            support: cube.cube.clone(),
            case: dist.case,
            moment_residual: report.max_abs,
            moments_pass: report.pass,
            hp_estimate: hp.estimate,
            tail_bound: hp.tail_bound,
        });
    }
    let (lo, hi) = atoms
        .iter()
        .fold((f64::INFINITY, 0.0f64), |(lo, hi), a| (lo.min(a.hp_estimate), hi.max(a.hp_estimate)));
    let pass = width_check.verdict
        && atoms.iter().all(|a| a.moments_pass && a.hp_estimate.is_finite());
    render(
        config,
        pass,
        DemoResult {
            complement_points: domain.complement().len(),
            whitney_cubes: dec.cubes.len(),
            width_check,
            atoms,
            hp_max_over_min: hi / lo,
        },
    )
}
