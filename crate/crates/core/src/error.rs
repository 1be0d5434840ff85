use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("decay certificate rejected: {0}")]
    CertificateRejected(String),

    #[error("eigensolver failed to converge (residual {residual:e})")]
    SolverFailure { residual: f64 },

    #[error("energy {energy} lies within {guard:e} of an eigenvalue")]
    DegenerateEnergy { energy: f64, guard: f64 },

    #[error("domain coverage: {0}")]
    DomainCoverage(String),

    #[error("shift M = {shift} too small; need M > {required}")]
    ShiftTooSmall { shift: f64, required: f64 },

    #[error("evaluation point {point} too close to a pole (distance {distance:e})")]
    PoleProximity { point: String, distance: f64 },

    #[error("adaptive quadrature did not converge: error estimate {estimate:e} after {intervals} intervals")]
    QuadratureNonConvergence { estimate: f64, intervals: usize },

    #[error("boundary limit unstable: extrapolation spread {spread:e} exceeds {tolerance:e}")]
    BoundaryLimitUnstable { spread: f64, tolerance: f64 },

    #[error("log-determinant branch jump {jump} between path nodes; path needs refinement")]
    PathRefinement { jump: f64 },

    #[error("beta = {beta} outside window ({lo}, {hi})")]
    InvalidBeta { beta: f64, lo: f64, hi: f64 },

    #[error("cutoff radius {radius} exceeds box limit {limit}")]
    BoxContamination { radius: f64, limit: f64 },

    #[error("R extrapolation unreliable: {0}")]
    ExtrapolationUnreliable(String),

    #[error("resonant matching at r = {radius}: denominator {denominator:e}")]
    ResonantMatching { radius: f64, denominator: f64 },

    #[error("phase anchor violated: |δ({momentum})| = {phase} after unwrapping")]
    PhaseAnchor { momentum: f64, phase: f64 },

    #[error("need eigenvectors up to index {needed}, only {available} stored")]
    MissingEigenvectors { needed: usize, available: usize },

    #[error("phase unwrap ambiguous at k = {momentum}; refine the momentum grid")]
    RefineGrid { momentum: f64 },

    #[error("partial-wave tail bound {bound:e} exceeds tolerance {tolerance:e}; increase l_max")]
    TruncationTail { bound: f64, tolerance: f64 },

    #[error("config error at `{path}`: {message}")]
    Config { path: String, message: String },

    #[error("{path}: {source}")]
    At { path: String, source: Box<Error> },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            message: message.into(),
        }
    }

    /// Attaches the config path whose values led to this error.
    pub fn at(self, path: impl Into<String>) -> Self {
        Error::At {
            path: path.into(),
            source: Box::new(self),
        }
    }

    /// Process exit code used by the command-line runner.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::At { source, .. } => source.exit_code(),
            Error::Config { .. }
            | Error::InvalidGrid(_)
            | Error::InvalidPotential(_)
            | Error::CertificateRejected(_)
            | Error::ShiftTooSmall { .. }
            | Error::InvalidBeta { .. }
            | Error::BoxContamination { .. }
            | Error::DomainCoverage(_) => 2,
            _ => 3,
        }
    }
}
