use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("lattice must have at least one element")]
    EmptyLattice,
    #[error("index {index} out of range for {len} elements")]
    IndexOutOfRange { index: usize, len: usize },
    #[error("size {requested} exceeds the limit {limit}")]
    SizeLimitExceeded { requested: usize, limit: usize },
    #[error("cover relation contains a cycle")]
    CyclicCovers,
    #[error("cover pair ({lower}, {upper}) is implied transitively")]
    NonCoverEdge { lower: usize, upper: usize },
    #[error("cover pair ({lower}, {upper}) is listed twice")]
    DuplicateCover { lower: usize, upper: usize },
    #[error("elements {x} and {y} have no unique {bound}")]
    NotALattice {
        x: usize,
        y: usize,
        bound: &'static str,
    },
    #[error("element set is not closed: {op} of {x} and {y} leaves it")]
    NotASublattice { x: usize, y: usize, op: &'static str },
    #[error("functions live on different lattices")]
    LatticeMismatch,
    #[error("expected {expected} values, found {found}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("negative value {value} at element {element}")]
    NegativeValue { element: usize, value: String },
    #[error("value {value} at element {element} is outside [0, 1]")]
    ValueOutOfUnitInterval { element: usize, value: f64 },
    #[error("input is not completely monotone (negative weight at element {element})")]
    NotCmInput { element: usize },
    #[error("lattice is not distributive")]
    NotDistributive,
    #[error("d_max = {d_max}: every power of a c.m. function is already c.m.")]
    NoSharpnessNeeded { d_max: usize },
    #[error("lattice is a chain")]
    ChainLattice,
    #[error("work estimate {required} exceeds the budget {budget}")]
    BudgetExceeded { required: u128, budget: u128 },
    #[error("invalid probability vector: {0}")]
    InvalidProbabilityVector(String),
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("not a void functional: mass {mass} at subset {witness}")]
    NotAVoidFunctional { witness: u32, mass: f64 },
    #[error("ground sets differ: {left} vs {right}")]
    GroundSetMismatch { left: u32, right: u32 },
    #[error("argument outside the domain: {0}")]
    DomainViolation(String),
    #[error("search failed: {0}")]
    SearchFailed(String),
    #[error("sequence has {available} terms, {needed} needed")]
    InsufficientLength { needed: usize, available: usize },
    #[error("no failure found up to order {cap}")]
    SearchBudgetExceeded { cap: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
}
