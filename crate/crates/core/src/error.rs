use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("word length {len} outside 1..={max}")]
    LengthOutOfRange { len: usize, max: usize },
    #[error("value {bits} does not fit in {len} bits")]
    BitsOverflow { bits: u32, len: usize },
    #[error("invalid word {0:?}: expected a nonempty string over {{0,1}}")]
    BadWord(String),
    #[error("expected a word of length {expected}, found length {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("deletion radius {t} must satisfy 1 <= t < {len}")]
    RadiusOutOfRange { t: usize, len: usize },
    #[error("n = {n} outside supported range {lo}..={hi}")]
    UnsupportedN { n: usize, lo: usize, hi: usize },
    #[error("size formula for n = {n}: sum {sum} not divisible by {divisor}")]
    InexactDivision { n: usize, sum: u128, divisor: u128 },
    #[error("{0} codewords cover the received word; the code is not single-deletion correcting")]
    AmbiguousDecode(usize),
    #[error("constraint 6 with p = {p}, q = {q}: {reason}")]
    BadSplit { p: usize, q: usize, reason: String },
    #[error("model is infeasible: {0}")]
    Infeasible(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
    /// A problem with the input as a whole rather than one line.
    #[error("malformed input: {0}")]
    Format(String),
    #[error("unknown constraint family {0:?}; expected c0..c6")]
    UnknownFamily(String),
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("i/o: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
