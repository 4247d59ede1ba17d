use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("improper domain: the complement representation is empty")]
    ImproperDomain,

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("point not interior: distance to the complement is {distance}")]
    PointNotInterior { distance: f64 },

    #[error("region is not Whitney-admissible: distance {distance} exceeds 4 diameters ({diameter})")]
    RegionNotAdmissible { distance: f64, diameter: f64 },

    #[error("interpolation impossible on sample: candidate Hermite matrix has rank {rank} < {dim}")]
    InterpolationImpossible { rank: usize, dim: usize },

    #[error("ill-conditioned node set: condition number {condition:.3e}")]
    IllConditioned { condition: f64 },

    #[error("atom size condition violated: sup|g| / |Q|^(-1/p) = {ratio}")]
    SizeViolation { ratio: f64 },

    #[error("{0}")]
    MeasureConditionViolated(String),

    #[error("{0}")]
    WidthConditionViolated(String),

    #[error("near-degenerate node set: coefficient ratio {ratio:.3e}")]
    NearDegenerateNodeSet { ratio: f64 },

    #[error("not an H^p candidate - maximal function non-integrable (moment residual {residual:.3e})")]
    NotHpCandidate { residual: f64 },

    #[error("profile too rough: derivative order {order} needs profile order > {order}, got {profile}")]
    ProfileTooRough { order: u32, profile: u32 },

    #[error("witness hypothesis violated: width {width} >= epsilon {epsilon}")]
    WitnessHypothesisViolated { width: f64, epsilon: f64 },

    #[error("no failing scale found: {0}")]
    NoFailingScale(String),

    #[error("point cloud too large: {points} points exceeds the cap; try level {suggested_level}")]
    CloudTooLarge { points: usize, suggested_level: u32 },

    #[error("grid pitch too coarse: {pitch} > {max}")]
    PitchTooCoarse { pitch: f64, max: f64 },

    #[error("schema error in {field}: {message}")]
    Schema { field: String, message: String },

    #[error("cannot read {path}: {source}")]
    Read { path: String, source: std::io::Error },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// True for failures that witness a violated geometric condition (CLI exit status 2).
    pub fn is_condition_violation(&self) -> bool {
        matches!(
            self,
            Error::MeasureConditionViolated(_)
                | Error::WidthConditionViolated(_)
                | Error::InterpolationImpossible { .. }
                | Error::NearDegenerateNodeSet { .. }
                | Error::NotHpCandidate { .. }
                | Error::NoFailingScale(_)
        )
    }

    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn read_file(path: &std::path::Path) -> Result<String> {
        std::fs::read_to_string(path).map_err(|source| Error::Read { path: path.display().to_string(), source })
    }
}
