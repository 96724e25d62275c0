use thiserror::Error;

/// Metric axiom violations and other problems constructing a space.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("metric space has no points")]
    Empty,
    #[error("{labels} labels but {rows} matrix rows")]
    LabelMismatch { labels: usize, rows: usize },
    #[error("row {row} has {len} entries, expected {expected}")]
    NotSquare {
        row: usize,
        len: usize,
        expected: usize,
    },
    #[error("entry ({0}, {1}) is not a finite number")]
    NonFinite(usize, usize),
    #[error("diagonal entry ({0}, {0}) is nonzero")]
    NonzeroDiagonal(usize),
    #[error("entry ({0}, {1}) is negative")]
    NegativeEntry(usize, usize),
    #[error("entries ({0}, {1}) and ({1}, {0}) differ")]
    NotSymmetric(usize, usize),
    #[error("points {0} and {1} are at distance zero")]
    DuplicatePoint(usize, usize),
    #[error("triangle inequality fails: d({0},{2}) > d({0},{1}) + d({1},{2})")]
    TriangleViolation(usize, usize, usize),
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("snowflake exponent {0} is outside (0, 1]")]
    AlphaOutOfRange(f64),
    #[error("Minkowski norm exponent {0} must be at least 1")]
    InvalidNorm(f64),
    #[error("point set is empty")]
    EmptySet,
}

/// Errors building or querying a hyperbolic approximation graph.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ApproxError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("space has fewer than two points, so no truncation level exists")]
    DegenerateSpace,
    #[error("no radial path from vertex {from} up to vertex {to}")]
    NoRadialPath { from: usize, to: usize },
    #[error("vertex id {0} out of range")]
    InvalidVertex(usize),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum HyperbolicityError {
    #[error("{vertices} vertices exceed the exhaustive limit {limit} and sampling is disabled")]
    TooLarge { vertices: usize, limit: usize },
    #[error("deepest level has {0} vertices, need at least two")]
    DegenerateLevel(usize),
    #[error("visual parameter a = {0} must exceed 1")]
    InvalidBase(f64),
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PqError {
    #[error("source space has {0} points, need at least {1}")]
    TooFewPoints(usize, usize),
    #[error("invalid constants: {0}")]
    InvalidParams(String),
    #[error("map is not a bijection: {0}")]
    NotBijective(String),
    #[error("lemma hypothesis fails: {0}")]
    PreconditionViolated(String),
    #[error("power-set family needs at most {limit} points, got {got}")]
    FamilyTooLarge { got: usize, limit: usize },
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExtensionError {
    #[error("graphs use different parameters r = {source_r} and r = {target_r}")]
    ParameterMismatch { source_r: f64, target_r: f64 },
    #[error("map {0} space does not match the graph's space")]
    SpaceMismatch(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

/// Reading spaces and maps from files.
#[derive(Debug, Error)]
pub enum IoError {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Map(#[from] PqError),
}

/// Umbrella error for callers that mix stages.
#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Approx(#[from] ApproxError),
    #[error(transparent)]
    Hyperbolicity(#[from] HyperbolicityError),
    #[error(transparent)]
    Pq(#[from] PqError),
    #[error(transparent)]
    Extension(#[from] ExtensionError),
    #[error(transparent)]
    Io(#[from] IoError),
}
