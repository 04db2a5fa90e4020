//! Error type shared across the library.

use thiserror::Error;

#[derive(Error, Debug)]
pub enum LabError {
    #[error("{0} is not prime")]
    NonPrime(u32),

    #[error("size cap exceeded: {what} = {size} > {cap}")]
    SizeCap { what: &'static str, size: u128, cap: u128 },

    #[error("level {r} is odd; this operation needs r = 2l")]
    OddLevel { r: u32 },

    #[error("level {l} out of range for ring of level {r}")]
    LevelOutOfRange { l: u32, r: u32 },

    #[error("element is not a unit")]
    NonUnit,

    #[error("matrix is singular over the residue field")]
    Singular,

    #[error("element does not lie in {0}")]
    NotInSubgroup(&'static str),

    #[error("discrete logarithm of zero")]
    DlogOfZero,

    #[error("group is not abelian")]
    NonAbelian,

    #[error("character is not generic")]
    NotGeneric,

    #[error("no generic character exists for this configuration")]
    NoGenericCharacter,

    #[error("incompatible specs: {0}")]
    IncompatibleSpecs(&'static str),

    #[error("unsupported configuration: {0}")]
    Unsupported(String),

    #[error("cache rejected: {0}")]
    CacheInvalid(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, LabError>;
