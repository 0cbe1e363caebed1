use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("tail not convergent: {0}")]
    TailNotConvergent(String),
    #[error("cutoff too small: omitted zero at |a| = {abs_zero} lies inside 2r = {twice_radius}")]
    CutoffTooSmall { abs_zero: f64, twice_radius: f64 },
    #[error("square substitution needs nonnegative zeros, found {0}")]
    MixedSignZeros(f64),
    #[error("invalid spec: {0}")]
    InvalidSpec(String),
    #[error("cannot decide convergence of the zero series: {0}")]
    CannotDecideConvergence(String),
    #[error("degenerate growth: {0}")]
    DegenerateGrowth(String),
    #[error("no candidate decay rays: {0}")]
    NoCandidates(String),
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("angle {theta} fails the sign conditions for m = {m}")]
    BadAngle { m: u32, theta: f64 },
    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),
    #[error("base radius is below the fixed point: {0}")]
    BelowFixedPoint(String),
    #[error("line {line}: field `{field}`: {message}")]
    Parse {
        line: usize,
        field: String,
        message: String,
    },
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
