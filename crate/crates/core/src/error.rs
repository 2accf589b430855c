use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid word: {0}")]
    InvalidWord(String),

    #[error("invalid system: {0}")]
    InvalidSystem(String),

    #[error("invalid potential: {0}")]
    InvalidPotential(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("depth too large for generic path: {m}^{n} words exceeds the enumeration cap {cap}")]
    DepthTooLarge { m: usize, n: usize, cap: usize },

    #[error("analytic path unavailable: {0}")]
    AnalyticUnavailable(String),

    #[error("infeasible: {0}")]
    Infeasible(String),

    #[error("under-resolved: {0}")]
    UnderResolved(String),

    #[error("mixed trajectories: Vitali extraction needs balls along a single trajectory")]
    MixedTrajectories,

    #[error("trajectory prefix exhausted")]
    ExhaustedPrefix,

    #[error("no sign change of the pressure in [{0}, {1}]")]
    NoSignChange(f64, f64),

    #[error("configuration is not ergodic: {0}")]
    NonErgodic(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("bound inversion: lower {lower} > upper {upper} ({context})")]
    BoundInversion { lower: f64, upper: f64, context: String },

    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
