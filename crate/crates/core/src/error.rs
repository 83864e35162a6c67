use std::path::PathBuf;

/// Errors raised while loading inputs, building matrices, or evaluating.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("duplicate identifier '{0}'")]
    DuplicateId(String),
    #[error(
        "sub-criterion '{id}': final importance {stated} does not equal \
         criterion importance {criterion} x group importance {group}"
    )]
    ImportanceProductMismatch {
        id: String,
        stated: u32,
        criterion: u32,
        group: u32,
    },
    #[error("empty level: {0}")]
    EmptyLevel(String),
    #[error("importance must be a positive integer ({0})")]
    NonPositiveImportance(String),
    #[error("unknown column '{0}'")]
    UnknownColumn(String),
    #[error("missing column '{0}'")]
    MissingColumn(String),
    #[error("unknown alternative '{0}'")]
    UnknownAlternative(String),
    #[error("no row for alternative '{0}'")]
    MissingAlternative(String),
    #[error("negative value {value} for ({alternative}, {sub_criterion})")]
    NegativeValue {
        alternative: String,
        sub_criterion: String,
        value: f64,
    },
    #[error("percent value {value} outside [0, 100] for ({alternative}, {sub_criterion})")]
    PercentOutOfRange {
        alternative: String,
        sub_criterion: String,
        value: f64,
    },
    #[error("cannot parse '{text}' as a number for ({alternative}, {sub_criterion})")]
    BadNumber {
        alternative: String,
        sub_criterion: String,
        text: String,
    },

    #[error("empty importance list")]
    EmptyList,
    #[error("all indicator values are zero")]
    AllValuesZero,
    #[error("need at least 2 alternatives with usable values, got {0}")]
    TooFewAlternatives(usize),
    #[error("invalid elicitation rule: {0}")]
    InvalidRule(String),
    #[error("entry {value} at ({row}, {col}) lies outside the nine-point scale")]
    EntryOutOfScale { row: usize, col: usize, value: f64 },
    #[error("invalid fuzzy scale: {0}")]
    InvalidScale(String),

    #[error("matrix is not square (row {row} has {len} entries, expected {n})")]
    NotSquare { row: usize, len: usize, n: usize },
    #[error("entry ({row}, {col}) = {value} is not a positive finite number")]
    NonPositiveEntry { row: usize, col: usize, value: f64 },
    #[error("entries ({row}, {col}) and ({col}, {row}) are not reciprocal: {a} x {b} != 1")]
    ReciprocityViolation {
        row: usize,
        col: usize,
        a: f64,
        b: f64,
    },
    #[error("diagonal entry {index} is {value}, expected 1")]
    DiagonalNotOne { index: usize, value: f64 },
    #[error("weight {0} is zero")]
    ZeroWeight(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("alternative sets differ")]
    AlternativeSetMismatch,
    #[error("triangular fuzzy number ({l}, {m}, {u}) must satisfy 0 < l <= m <= u")]
    NonPositiveComponent { l: f64, m: f64, u: f64 },
    #[error("weights sum to zero")]
    AllZero,

    #[error("cannot perturb diagonal entry ({0}, {0})")]
    DiagonalPerturbation(usize),
    #[error("perturbation factor must be positive, got {0}")]
    NonPositiveFactor(f64),

    #[error("consistency gate failed for {matrix}: GCI {gci} exceeds {threshold} (n = {n})")]
    ConsistencyGateFailure {
        matrix: String,
        gci: f64,
        threshold: f64,
        n: usize,
    },
    #[error("unsupported format '{0}'")]
    UnsupportedFormat(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
    #[error("{context}: {source}")]
    Context {
        context: String,
        #[source]
        source: Box<Error>,
    },
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// Wrap this error with a location such as a file path or sub-criterion id.
    pub fn context(self, context: impl Into<String>) -> Self {
        Error::Context {
            context: context.into(),
            source: Box::new(self),
        }
    }

    /// The innermost error, with all context layers removed.
    pub fn root(&self) -> &Error {
        match self {
            Error::Context { source, .. } => source.root(),
            other => other,
        }
    }

    /// Process exit code: 1 input error, 2 consistency gate, 3 invariant.
    pub fn exit_code(&self) -> i32 {
        match self.root() {
            Error::ConsistencyGateFailure { .. } => 2,
            Error::Invariant(_) => 3,
            _ => 1,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
