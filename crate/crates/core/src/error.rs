use thiserror::Error;

/// Errors raised by construction, certification and recovery routines.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid degree: {0}")]
    InvalidDegree(String),
    #[error("field order p^(a*n) = {p}^{degree} does not fit below 2^63")]
    FieldTooLarge { p: u32, degree: u32 },
    #[error("modulus must be monic of degree {expected}, got {got:?}")]
    BadModulus { expected: usize, got: Vec<u32> },
    #[error("modulus {0:?} is reducible over GF(p)")]
    ReducibleModulus(Vec<u32>),
    #[error("element has {got} coefficients, field degree is {degree}")]
    BadElementLength { got: usize, degree: usize },
    #[error("coefficient {value} is out of range for p = {p}")]
    CoefficientOutOfRange { value: u64, p: u32 },
    #[error("zero has no inverse")]
    ZeroInverse,
    #[error("the zero element has no discrete logarithm")]
    ZeroLog,
    #[error("element is not a primitive root")]
    NotPrimitive,
    #[error("field order {order} exceeds the enumeration cap {cap}")]
    EnumerationCap { order: u64, cap: u64 },
    #[error("alpha does not generate GF(q^n) over GF(q): Frobenius orbit has size {orbit}, expected {n}")]
    AlphaNotGenerating { orbit: u32, n: u32 },
    #[error("construction requires {0}")]
    Precondition(String),
    #[error("index construction produced a repeated index {0}")]
    DuplicateIndex(u64),
    #[error("character index {a} outside [1, {max}]")]
    CharacterOutOfRange { a: u64, max: u64 },
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: u64, dim: u64 },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("sparsity {k} outside [1, {max}]")]
    SparsityOutOfRange { k: usize, max: usize },
    #[error("selected support is numerically singular (condition estimate {0:.3e})")]
    SingularSupport(f64),
    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("duplicate column index {0}")]
    DuplicateColumn(u64),
    #[error("matrix was not built by the AMUB construction")]
    NotAmub,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
