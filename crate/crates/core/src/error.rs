use std::fmt;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Location-aware parse failure shared by every text format in the crate.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    /// 1-based (line, column), when the failure can be pinned to a position.
    pub location: Option<(usize, usize)>,
    pub message: String,
}

impl ParseError {
    pub fn at(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError {
            location: Some((line, column)),
            message: message.into(),
        }
    }

    pub fn new(message: impl Into<String>) -> Self {
        ParseError {
            location: None,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.location {
            Some((line, col)) => write!(f, "line {line}, column {col}: {}", self.message),
            None => write!(f, "{}", self.message),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("sign vectors live on different ground sets ({left} vs {right} elements)")]
    GroundMismatch { left: usize, right: usize },
    #[error("parse error: {0}")]
    Parse(ParseError),
    #[error("empty sign system")]
    EmptySystem,
    #[error("covector poset is not graded: maximal chains of lengths {shortest} and {longest}")]
    NotGraded { shortest: usize, longest: usize },
    #[error("element {0} is not in the ground set")]
    ElementNotFound(usize),
    #[error("sign vector {0} is not in the system")]
    VectorNotInSystem(String),
    #[error("system is not an oriented matroid (verdict {0})")]
    NotAnOm(String),
    #[error("system is neither an oriented matroid nor a COM")]
    NotOrientedStructure,
    #[error("system is not simple")]
    NotSimple,
    #[error("not a partial cube: {u} and {v} have Hamming distance {hamming} but graph distance {graph:?}")]
    NotPartialCube {
        u: String,
        v: String,
        hamming: usize,
        graph: Option<usize>,
    },
    #[error("sample {0} is not realizable")]
    UnrealizableSample(String),
    #[error("localization does not define an oriented matroid: {0}")]
    InvalidLocalization(String),
    #[error("extension element {0} is not in general position")]
    NotGeneralPosition(usize),
    #[error("no corner found")]
    NoCornerFound,
    #[error("covector recovery from topes failed: {0}")]
    RecoveryFailed(String),
    #[error("no corner peeling found")]
    NoPeelingFound,
    #[error("orientation of the arc {x1} -- {x2} is ambiguous ({candidates} candidates)")]
    OrientationAmbiguous { x1: String, x2: String, candidates: usize },
    #[error("polyhedron is empty")]
    EmptyPolyhedron,
    #[error("program is unbounded: half-arc at {node} points inward from {infinity}")]
    Unbounded { node: String, infinity: String },
    #[error("program has no optimal cocircuit")]
    NoOptimum,
    #[error("no injective corner assignment exists for {0}")]
    SearchExhausted(String),
    #[error("image collision: {0}")]
    ImageCollision(String),
    #[error("unknown image {0}")]
    UnknownImage(String),
    #[error("unknown instance key {0:?}")]
    UnknownKey(String),
    #[error("degenerate input: {0}")]
    DegenerateInput(String),
    #[error("universe of {size} elements exceeds the configured cap of {cap}")]
    UniverseTooLarge { size: usize, cap: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("invariant violated: {0}")]
    InvariantViolated(String),
}

impl From<ParseError> for Error {
    fn from(e: ParseError) -> Self {
        Error::Parse(e)
    }
}

macro_rules! ensure {
    ($cond:expr, $($arg:tt)+) => {
        if !$cond {
            return Err($crate::error::Error::InvariantViolated(format!($($arg)+)));
        }
    };
}
pub(crate) use ensure;
