use std::fmt;

use thiserror::Error;

/// Location of a token in parsed text. Lines and columns are 1-based.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SourceSpan {
    pub line: usize,
    pub column: usize,
    pub length: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum Error {
    #[error("invalid period: a rational coordinate needs a nonempty period")]
    InvalidPeriod,
    #[error("prefix mismatch: coordinate does not start with `{prefix}`")]
    PrefixMismatch { prefix: String },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("rectangles are not disjoint: {0} and {1}")]
    NotDisjoint(String, String),
    #[error("invalid domain pattern: {0}")]
    InvalidDomainPattern(String),
    #[error("invalid range pattern: {0}")]
    InvalidRangePattern(String),
    #[error("not a pattern: {0}")]
    NotAPattern(String),
    #[error("incompatible shapes: {0}")]
    IncompatibleShapes(String),
    #[error("element does not fix the point")]
    NotFixed,
    #[error("internal alignment failure at coordinate {index}: prefix lengths {domain_len} and {range_len} differ by a non-multiple of the period {period_len}")]
    InternalAlignment {
        index: usize,
        domain_len: usize,
        range_len: usize,
        period_len: usize,
    },
    #[error("irrational rigidity violated at coordinate {index}: domain prefix `{domain}` differs from range prefix `{range}`")]
    RigidityViolation {
        index: usize,
        domain: String,
        range: String,
    },
    #[error("coordinate {0} is irrational")]
    IrrationalCoordinate(usize),
    #[error("syntax error at {span}: {message}")]
    Syntax { span: SourceSpan, message: String },
}

impl Error {
    pub fn is_syntax(&self) -> bool {
        matches!(self, Error::Syntax { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
