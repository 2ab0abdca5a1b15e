use thiserror::Error;

/// Errors raised by the constructions in this crate.
///
/// Verification failures are not errors: they come back as report values.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("q must be odd: characteristic 2 is not supported")]
    EvenCharacteristic,
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("field of order {order} exceeds the supported maximum of {max} elements")]
    FieldTooLarge { order: u64, max: u64 },
    #[error("no kappa witness found for q = {0}")]
    NoKappaFound(u32),
    #[error("kappa {kappa} fails the trace condition at a = {witness}")]
    InvalidKappa { kappa: String, witness: String },
    #[error("{r} colours requested but at most q^2 = {max} are available")]
    TooManyColours { r: usize, max: usize },
    #[error("lambda {0} appears more than once")]
    DuplicateLambda(String),
    #[error("k = {k} exceeds the line size {line_size}")]
    KTooLarge { k: usize, line_size: usize },
    #[error("vertex {vertex} has colour {colour}, outside [1, {r}]")]
    BadColour { vertex: usize, colour: u32, r: usize },
    #[error("assertion failed: {0}")]
    AssertionFailure(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
