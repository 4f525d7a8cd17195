use thiserror::Error;

/// Errors produced by the estimation library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("problem has no sample blocks")]
    EmptyProblem,

    #[error("block {block}: degree {degree} exceeds block size {size}")]
    InvalidDegrees {
        block: usize,
        degree: usize,
        size: usize,
    },

    #[error("rank {rank} out of range for index space of cardinality {cardinality}")]
    RankOutOfRange { rank: String, cardinality: String },

    #[error(
        "enumerating {cardinality} tuples exceeds the cap of {cap}; \
         use an incomplete estimator or raise the cap explicitly"
    )]
    EnumerationCap { cardinality: String, cap: u128 },

    #[error("term budget must be at least 1")]
    EmptyBudget,

    #[error("budget {requested} exceeds index-space cardinality {cardinality}")]
    BudgetTooLarge {
        requested: String,
        cardinality: String,
    },

    #[error("inclusion probability {0} outside (0, 1]")]
    InvalidInclusionProbability(f64),

    #[error("estimator requires a non-empty term set")]
    EmptyTermSet,

    #[error("sampling scheme {scheme} not usable here: {reason}")]
    SchemeMismatch {
        scheme: &'static str,
        reason: &'static str,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}:{line}:{column}: {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },

    #[error("io error on {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
