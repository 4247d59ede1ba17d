//! Command-line front end.
//!
//! Every subcommand runs one pipeline and emits a JSON report that embeds the
//! resolved configuration and the library version. Tables meant for plotting
//! are written as CSV next to the report. Exit status is 0 when the pipeline
//! passes, 2 when it witnesses a violated condition or a failed verification,
//! and 1 for usage, input and I/O errors.

mod commands;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use crate::conditions::ConditionKind;
use crate::error::{Error, Result};
use crate::extension::RationalP;
use crate::VERSION;

/// Environment variable read for the default worker-thread count.
pub const THREADS_ENV: &str = "HARDY_EXT_THREADS";

pub const EXIT_PASS: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;

#[derive(Clone, Debug, Parser, Serialize)]
#[command(name = "hardy-ext", version, about = "Extension domains for Hardy spaces")]
pub struct RunConfig {
    /// Worker threads; defaults to all cores.
    #[arg(long, global = true, env = THREADS_ENV)]
    pub threads: Option<usize>,

    /// Print a one-line summary per stage on stderr.
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    #[serde(skip)]
    pub verbose: u8,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Debug, Subcommand, Serialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum Command {
    /// Distance from a point to the complement.
    Distance(DistanceArgs),
    /// Dyadic Whitney decomposition of the bounding box.
    Whitney(WhitneyArgs),
    /// Minimum width of a point set, or of the complement inside a ball.
    Width(WidthArgs),
    /// Sampled measure, width or Markov condition check.
    CheckDomain(CheckDomainArgs),
    /// Extends a (p, Omega)-atom to a distribution on R^n.
    ExtendAtom(ExtendAtomArgs),
    /// Checks the vanishing moments of an extended distribution.
    VerifyMoments(VerifyMomentsArgs),
    /// Estimates the H^p quasi-norm of an extended distribution.
    HpNorm(HpNormArgs),
    /// Empirical lower bound for the Markov constant on one ball.
    MarkovProbe(MarkovProbeArgs),
    /// Necessity table built from Lipschitz witnesses.
    Counterexample(CounterexampleArgs),
    /// End-to-end run on a Cantor-dust domain.
    DemoCantor(DemoCantorArgs),
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct DistanceArgs {
    #[arg(long)]
    pub spec: PathBuf,
    /// Comma-separated coordinates.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub point: Vec<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct WhitneyArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long, default_value_t = 6)]
    pub depth: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct WidthArgs {
    /// JSON array of points.
    #[arg(long, conflicts_with = "spec")]
    pub points: Option<PathBuf>,
    /// Domain whose complement is intersected with `--center`/`--radius`.
    #[arg(long, requires_all = ["center", "radius"])]
    pub spec: Option<PathBuf>,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub center: Option<Vec<f64>>,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum KindArg {
    Width,
    Measure,
    Markov,
}

impl From<KindArg> for ConditionKind {
    fn from(k: KindArg) -> Self {
        match k {
            KindArg::Width => ConditionKind::Width,
            KindArg::Measure => ConditionKind::Measure,
            KindArg::Markov => ConditionKind::Markov,
        }
    }
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct CheckDomainArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long, value_enum, default_value_t = KindArg::Width)]
    pub kind: KindArg,
    /// Dilation; sweeps 2, 4 and 8 when absent.
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long, default_value_t = 0.05)]
    pub delta: f64,
    /// `whitney` for Whitney-cube centers, otherwise a JSON file of points.
    #[arg(long, default_value = "whitney")]
    pub samples: String,
    /// Whitney depth used when sampling centers.
    #[arg(long, default_value_t = 5)]
    pub depth: u32,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct ExtendAtomArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long)]
    pub atom: PathBuf,
    /// Overrides the exponent stored in the atom file.
    #[arg(long)]
    pub p: Option<RationalP>,
    #[arg(long, default_value_t = 2.0)]
    pub a: f64,
    /// Where the extended distribution is written.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct VerifyMomentsArgs {
    #[arg(long)]
    pub dist: PathBuf,
    /// Highest moment order; the distribution's critical order when absent.
    #[arg(long)]
    pub order: Option<u32>,
    #[arg(long)]
    pub rel_tol: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct HpNormArgs {
    #[arg(long)]
    pub dist: PathBuf,
    /// Must agree with the distribution's exponent when given.
    #[arg(long)]
    pub p: Option<RationalP>,
    /// Core grid pitch in the normalized frame.
    #[arg(long)]
    pub grid_pitch: Option<f64>,
    /// Truncation radius in the normalized frame.
    #[arg(long = "R")]
    pub radius: Option<f64>,
    /// Mollifier profile order; critical order + 3 when absent.
    #[arg(long)]
    pub mollifier_order: Option<u32>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Argmax-scale histogram; next to `--out` when absent.
    #[arg(long)]
    pub histogram: Option<PathBuf>,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct MarkovProbeArgs {
    #[arg(long)]
    pub spec: PathBuf,
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    pub center: Vec<f64>,
    #[arg(long)]
    pub radius: f64,
    #[arg(long, default_value_t = 1)]
    pub k: u32,
    #[arg(long, default_value_t = 64)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum WitnessDomain {
    Cantor,
    Segment,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct CounterexampleArgs {
    #[arg(long, value_enum)]
    pub which: WitnessDomain,
    #[arg(long, default_value = "2/3")]
    pub p: RationalP,
    #[arg(long, default_value_t = 4)]
    pub j_max: u32,
    #[arg(long, default_value_t = 4000)]
    pub lip_samples: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// CSV table; the JSON report goes to stdout.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Clone, Debug, Args, Serialize)]
pub struct DemoCantorArgs {
    #[arg(long, default_value_t = 2)]
    pub n: usize,
    #[arg(long, default_value_t = 4)]
    pub level: u32,
    #[arg(long, default_value = "2/3")]
    pub p: RationalP,
    #[arg(long, default_value_t = 2.0)]
    pub a: f64,
    #[arg(long, default_value_t = 10)]
    pub atoms: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Core pitch of the H^p grid; twice the `hp-norm` default when absent.
    #[arg(long)]
    pub grid_pitch: Option<f64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// What every JSON report looks like on disk.
#[derive(Serialize)]
pub struct Report<'a, T: Serialize> {
    pub version: &'static str,
    pub config: &'a RunConfig,
    pub pass: bool,
    pub result: T,
}

/// Outcome of one pipeline: whether it passed and the report text.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub pass: bool,
    pub report: String,
}

pub(crate) fn render<T: Serialize>(config: &RunConfig, pass: bool, result: T) -> Result<Outcome> {
    let report = serde_json::to_string_pretty(&Report { version: VERSION, config, pass, result })?;
    Ok(Outcome { pass, report: report + "\n" })
}

/// Runs the configured pipeline and writes its files.
pub fn dispatch(config: &RunConfig) -> Result<Outcome> {
    validate(config)?;
    if let Some(t) = config.threads {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(t).build_global();
    }
    commands::run(config)
}

fn validate(config: &RunConfig) -> Result<()> {
    let positive = |name: &str, v: f64| {
        if v > 0.0 && v.is_finite() {
            Ok(())
        } else {
            Err(Error::invalid(format!("--{name} must be positive, got {v}")))
        }
    };
    if config.threads == Some(0) {
        return Err(Error::invalid("--threads must be at least 1"));
    }
    match &config.command {
        Command::CheckDomain(c) => {
            if let Some(a) = c.a {
                if !(a > 1.0) {
                    return Err(Error::invalid(format!("--a must exceed 1, got {a}")));
                }
            }
            positive("delta", c.delta)?;
        }
        Command::ExtendAtom(c) => positive("a", c.a)?,
        Command::HpNorm(c) => {
            if let Some(h) = c.grid_pitch {
                positive("grid-pitch", h)?;
            }
            if let Some(r) = c.radius {
                positive("R", r)?;
            }
        }
        Command::MarkovProbe(c) => positive("radius", c.radius)?,
        Command::Counterexample(c) if c.j_max < 1 => return Err(Error::invalid("--j-max must be at least 1")),
        Command::DemoCantor(c) => {
            if !(1..=3).contains(&c.n) {
                return Err(Error::invalid(format!("--n must be 1, 2 or 3, got {}", c.n)));
            }
            if c.atoms == 0 {
                return Err(Error::invalid("--atoms must be at least 1"));
            }
            if let Some(h) = c.grid_pitch {
                positive("grid-pitch", h)?;
            }
        }
        _ => {}
    }
    Ok(())
}

/// Parses `args`, dispatches, prints the report and returns the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            if e.use_stderr() {
                let _ = write!(stderr, "{e}");
                return EXIT_USAGE;
            }
            let _ = write!(stdout, "{e}");
            return EXIT_PASS;
        }
    };
    match dispatch(&config) {
        Ok(outcome) => {
            let _ = stdout.write_all(outcome.report.as_bytes());
            if outcome.pass {
                EXIT_PASS
            } else {
                EXIT_VIOLATION
            }
        }
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            if e.is_condition_violation() {
                EXIT_VIOLATION
            } else {
                EXIT_USAGE
            }
        }
    }
}
