//! Exact combinatorics of `(a,b)`-town families: collections of subsets of
//! `{1..n}` in which every member has cardinality `≡ a (mod k)` and every
//! pair of distinct members intersects in `≡ b (mod k)` elements.
//!
//! The crate is organised as a library with one thin command-line binary on
//! top. Each major capability has a runnable example under `examples/`:
//!
//! * `families_and_checking`: bitset families, the town checker, file format
//! * `constructions_tour`: the generators (stars, blocks, Hadamard products)
//! * `certificates`: linear-algebra certificates over GF(p^2)
//! * `bound_rules`: the upper-bound oracle and its rule dispatch
//! * `extremal_mod3`: exact extremal sizes by clique search, mod-3 table
//! * `conjecture_probe`: empirical sweeps of two open monotonicity questions
//!
//! All arithmetic is exact (integers and prime-field elements); nothing in
//! the core paths draws randomness, so every result is reproducible.

pub mod algebra;
pub mod bounds;
pub mod cli;
pub mod constructions;
pub mod search;
pub mod setcore;

pub use setcore::{CheckReport, Family, SetWord, TownSpec, Violation};

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid town parameters: {0}")]
    InvalidSpec(String),

    #[error("set width mismatch: {left} vs {right}")]
    WidthMismatch { left: usize, right: usize },

    #[error("duplicate member in family")]
    DuplicateMember,

    #[error("line {line}: {kind}")]
    Parse { line: usize, kind: ParseErrorKind },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("search limit exceeded: {0}")]
    SearchLimit(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    MissingHeader,
    MalformedHeader(String),
    InvalidElement(String),
    ElementOutOfRange { value: usize, n: usize },
    NotIncreasing,
    DuplicateSet,
}

impl std::fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ParseErrorKind::MissingHeader => write!(f, "missing `n k a b` header line"),
            ParseErrorKind::MalformedHeader(msg) => write!(f, "malformed header: {msg}"),
            ParseErrorKind::InvalidElement(tok) => write!(f, "not a set element: `{tok}`"),
            ParseErrorKind::ElementOutOfRange { value, n } => {
                write!(f, "element {value} outside the ground set 1..={n}")
            }
            ParseErrorKind::NotIncreasing => {
                write!(f, "elements must be strictly increasing within a line")
            }
            ParseErrorKind::DuplicateSet => write!(f, "set already listed in the family"),
        }
    }
}
