use thiserror::Error;

/// Errors reported by the library. Agent indices are stored 0-based and
/// displayed 1-based.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("malformed header: {0}")]
    MalformedHeader(String),
    #[error("row {} has length {found}, expected {expected}", .row + 1)]
    RowLength {
        row: usize,
        found: usize,
        expected: usize,
    },
    #[error("invalid character {ch:?} at ({}, {})", .row + 1, .col + 1)]
    BadChar { row: usize, col: usize, ch: char },
    #[error("diagonal entry at ({}, {}) must be '0'", .0 + 1, .0 + 1)]
    Diagonal(usize),
    #[error("asymmetry violation at ({}, {})", .0 + 1, .1 + 1)]
    Asymmetry(usize, usize),
    #[error("agent count {0} is outside 1..={max}", max = crate::MAX_AGENTS)]
    Size(usize),
    #[error("agent {} is out of range for {n} agents", .agent + 1)]
    AgentOutOfRange { agent: usize, n: usize },
    #[error("agents must be distinct, got {} twice", .0 + 1)]
    SameAgent(usize),
    #[error("cannot pad {n} agents down to {k}")]
    PadTooSmall { n: usize, k: usize },
    #[error("unknown {kind} {name:?}")]
    Unknown { kind: &'static str, name: String },
    #[error("parameter out of range: {0}")]
    Parameter(String),
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("singular linear system: {0}")]
    Singular(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("cannot parse rational {0:?} (expected p/q or an integer)")]
    Rational(String),
    #[error("rule table: {0}")]
    Table(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("linear program is infeasible")]
    Infeasible,
    #[error("linear program is unbounded")]
    Unbounded,
}

pub type Result<T> = std::result::Result<T, Error>;
