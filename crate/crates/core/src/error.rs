use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("poset has no elements")]
    EmptyPoset,
    #[error("duplicate element identifier `{0}`")]
    DuplicateElement(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("cover relations contain a cycle through `{0}`")]
    CycleDetected(String),
    #[error("poset has {0} elements, more than the supported {1}")]
    TooManyElements(usize, usize),

    #[error("frequency for `{0}` is missing")]
    MissingFrequency(String),
    #[error("frequency for `{0}` is not strictly positive")]
    NonpositiveFrequency(String),
    #[error("degenerate spectrum: `{0}` and `{1}` share a frequency")]
    DegenerateSpectrum(String, String),
    #[error("frequencies disagree with the order: `{0}` > `{1}` but its frequency is not larger")]
    OrderViolation(String, String),
    #[error("frequencies sum to {0}, not 1")]
    SumMismatch(f64),

    #[error("convention unsupported: {0}")]
    ConventionUnsupported(String),
    #[error("word is not a lattice word: {0}")]
    NotLattice(String),

    #[error("resource bound exceeded: {0}")]
    ResourceBound(String),
    #[error("survival horizon cap reached: {0}")]
    HorizonCap(String),
    #[error("survival bracket includes zero at state {0}")]
    VanishingSurvival(String),
    #[error("acceptance rate {rate} below floor {floor}")]
    AcceptanceTooLow { rate: f64, floor: f64 },

    #[error("dimension {0} outside supported range 1..={1}")]
    DimensionCap(usize, usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("invalid diagram: {0}")]
    InvalidDiagram(String),
    #[error("components share axis {0}; their intersection is infinite")]
    InfiniteIntersection(usize),

    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

impl Error {
    /// True for errors caused by size caps rather than malformed input.
    pub fn is_resource(&self) -> bool {
        matches!(self, Error::ResourceBound(_) | Error::HorizonCap(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
