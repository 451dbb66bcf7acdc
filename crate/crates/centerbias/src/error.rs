//! Error type shared by every module of the crate.

use thiserror::Error;

/// All failure modes of the numeric layers.
///
/// Infrastructure errors (I/O, parsing) carry enough context to locate the
/// offending input; domain errors name the violated precondition.
#[derive(Debug, Error)]
pub enum Error {
    /// Sieve limit above the supported ceiling (2^40).
    #[error("sieve limit {0} exceeds the 2^40 capacity ceiling")]
    SieveCapacity(u64),

    /// A coefficient source was asked for a prime beyond its table.
    #[error("prime {p} is beyond the source cutoff {cutoff}; enlarge the table")]
    OutOfCutoff { p: u64, cutoff: u64 },

    /// A supplied character table is not completely multiplicative.
    #[error("character table is not multiplicative: chi({a})*chi({b}) != chi({a}*{b} mod q)")]
    NonMultiplicativeCharacter { a: u64, b: u64 },

    /// A supplied character value is not a root of unity (or zero off the units).
    #[error("character value at residue {residue} does not lie on the unit circle")]
    NonUnitaryCharacter { residue: u64 },

    /// Reduction type at p in {2,3} cannot be decided by the implemented
    /// rules; the a_p value must be supplied in the configuration.
    #[error("bad reduction at p={p} cannot be classified; supply a_p for p={p} in the config")]
    BadPrimeUndecided { p: u64 },

    /// A local Euler factor vanishes at the requested point.
    #[error("local factor at p={p} vanishes at the requested s; product is singular")]
    SingularFactor { p: u64 },

    /// Zero-data file is malformed.
    #[error("zero table {path}:{line}: {reason}")]
    ZeroParse {
        path: String,
        line: usize,
        reason: String,
    },

    /// Requested truncation height exceeds the stored table.
    #[error("requested T={requested} exceeds the table height T_max={t_max}")]
    InsufficientZeroData { requested: f64, t_max: f64 },

    /// An operation received arguments outside its documented domain.
    #[error("domain error: {0}")]
    Domain(String),

    /// An operation is only implemented for a subset of families.
    #[error("unsupported family: {0}")]
    UnsupportedFamily(String),

    /// Invalid experiment configuration.
    #[error("config error: {0}")]
    Config(String),

    /// Tau cache file is malformed or inconsistent.
    #[error("tau cache {path}: {reason}")]
    TauCache { path: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
