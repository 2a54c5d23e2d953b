use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime modulus (need 2 <= p <= 2^31)")]
    NotPrime(u64),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("division by the zero polynomial")]
    DivisionByZeroPoly,
    #[error("operands live over different moduli ({0} vs {1})")]
    ModulusMismatch(u32, u32),
    #[error("gcd of two zero polynomials is undefined")]
    BothZero,
    #[error("interpolation node {0} appears twice")]
    DuplicateNode(u32),
    #[error("interpolation table is empty")]
    EmptyTable,
    #[error("{nodes} interpolation nodes exceed the field size {p}")]
    TooManyNodes { nodes: usize, p: u32 },
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("polynomial matrix is singular")]
    SingularPolyMatrix,
    #[error("invalid invariant factor chain: {0}")]
    InvalidChain(String),
    #[error("search space too large: {0}")]
    TooLarge(String),
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("step budget exceeded: used {used}, budget {budget}")]
    BudgetExceeded { used: u64, budget: u64 },
    #[error("transition table of state {state} is not a function on F_p: {reason}")]
    NondeterministicTable { state: usize, reason: String },
    #[error("machine does not halt within {0} steps")]
    RunTooLong(usize),
    #[error("reduction {0} has not been verified")]
    Unverified(String),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
