use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("invalid interval [{a}, {b}]: need a < b")]
    InvalidInterval { a: f64, b: f64 },

    #[error("nodes ({y}, {x}, {z}) not admissible in [{a}, {b}]: need a <= y <= x <= z <= b")]
    InvalidNodes {
        y: f64,
        x: f64,
        z: f64,
        a: f64,
        b: f64,
    },

    #[error("evaluation point {t} outside [{a}, {b}]")]
    OutOfInterval { t: f64, a: f64, b: f64 },

    #[error("`{name}` provides derivatives up to order {available}, order {requested} requested")]
    DerivativeOrder {
        name: String,
        requested: usize,
        available: usize,
    },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("non-finite value at t = {t}")]
    NonFinite { t: f64 },

    #[error("harmonic sequence has {len} polynomials, at least {need} required")]
    SequenceTooShort { len: usize, need: usize },

    #[error("not a harmonic sequence: {0}")]
    NotHarmonic(String),

    #[error("missing data for requested bound: {0}")]
    MissingData(String),

    #[error("envelope violated: {0}")]
    EnvelopeViolation(String),

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;
