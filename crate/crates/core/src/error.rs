use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {column}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub fn new(line: usize, column: usize, kind: ParseErrorKind) -> Self {
        ParseError { line, column, kind }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    Syntax(String),
    #[error("undeclared predicate `{0}`")]
    UndeclaredPredicate(String),
    #[error("predicate `{name}` has arity {expected}, used with {found} argument(s)")]
    ArityMismatch {
        name: String,
        expected: usize,
        found: usize,
    },
    #[error("variable `{0}` is not allowed; only `x` and `y` may be used")]
    ThirdVariable(String),
    #[error("variable `{0}` is not bound by any quantifier")]
    UnboundVariable(String),
    #[error("predicate name `{0}` is reserved for compiler-introduced symbols")]
    ReservedName(String),
    #[error("predicate `{0}` declared more than once")]
    DuplicatePredicate(String),
    #[error("missing `{0}:` line")]
    Missing(&'static str),
    #[error("`{0}:` given more than once")]
    Duplicate(&'static str),
    #[error("domain size must be a positive integer")]
    InvalidDomain,
    #[error("unknown directive `{0}`")]
    UnknownDirective(String),
    #[error("symmetric `weight:` and `statweight:` lines cannot be mixed")]
    MixedWeights,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    #[error("oracle limit exceeded: {atoms} ground atoms > limit {limit}")]
    OracleLimit { atoms: usize, limit: usize },
    #[error("empty distribution: the partition function is zero")]
    EmptyDistribution,
    #[error("invalid input: {0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
