use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    /// The precedence graph contains a cycle; the ids trace one of them,
    /// with the first id repeated at the end.
    #[error("precedence cycle: {}", .0.join(" -> "))]
    Cycle(Vec<String>),

    #[error("duplicate task id `{0}`")]
    DuplicateId(String),

    #[error("edge {from} -> {to} refers to unknown task `{missing}`")]
    UnknownEndpoint {
        from: String,
        to: String,
        missing: String,
    },

    #[error("duplicate edge {0} -> {1}")]
    DuplicateEdge(String, String),

    #[error("task `{id}` has invalid duration {value}")]
    NegativeDuration { id: String, value: f64 },

    #[error("task `{id}` has invalid demand {value}")]
    NegativeDemand { id: String, value: f64 },

    #[error("task `{0}` has neither a duration nor three-point estimates")]
    MissingDuration(String),

    #[error("estimate for `{id}` violates optimistic <= likely <= pessimistic ({o}, {m}, {p})")]
    Ordering { id: String, o: f64, m: f64, p: f64 },

    #[error("schedule has {got} entries but network has {expected} tasks")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid schedule entry {value} at index {index}")]
    InvalidStart { index: usize, value: f64 },

    #[error("non-finite start time for task index {task} at iteration {iteration}")]
    NonFinite { iteration: usize, task: usize },

    #[error("network has {n} tasks; brute-force enumeration is limited to {limit}")]
    TooLarge { n: usize, limit: usize },

    #[error("infeasible generator spec: {0}")]
    InfeasibleSpec(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("instance seed {seed}: {source}")]
    Instance {
        seed: u64,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Short machine-readable tag, stable across releases.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Cycle(_) => "cycle",
            Error::DuplicateId(_) => "duplicate_id",
            Error::UnknownEndpoint { .. } => "unknown_endpoint",
            Error::DuplicateEdge(..) => "duplicate_edge",
            Error::NegativeDuration { .. } => "negative_duration",
            Error::NegativeDemand { .. } => "negative_demand",
            Error::MissingDuration(_) => "missing_duration",
            Error::Ordering { .. } => "ordering",
            Error::DimensionMismatch { .. } => "dimension_mismatch",
            Error::InvalidStart { .. } => "invalid_start",
            Error::NonFinite { .. } => "non_finite",
            Error::TooLarge { .. } => "too_large",
            Error::InfeasibleSpec(_) => "infeasible_spec",
            Error::Config(_) => "config",
            Error::Parse { .. } => "parse",
            Error::Schema(_) => "schema",
            Error::Instance { source, .. } => source.kind(),
            Error::Io(_) => "io",
        }
    }
}
