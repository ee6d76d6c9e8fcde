use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("group closure exceeded the cap of {cap} elements (infinite group or irrational parameters?)")]
    CapExceeded { cap: usize },

    #[error("matrix of generator {generator} is not orthogonal (max |QᵀQ - I| = {deviation:e})")]
    NotOrthogonal { generator: usize, deviation: f64 },

    #[error("generator {generator} maps body {from} to body {to} with different masses")]
    MassMismatch { generator: usize, from: usize, to: usize },

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("invalid group action: {0}")]
    InvalidAction(String),

    #[error("sample count {samples} is incompatible with the time action (needs a multiple of {required})")]
    GridIncompatible { samples: usize, required: usize },

    #[error("collision at sample {sample}: bodies {i} and {j} at distance {distance:e}")]
    Collision {
        sample: usize,
        i: usize,
        j: usize,
        distance: f64,
    },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("non-integrable singularity: {0}")]
    Singular(String),

    #[error("could not produce a collision-free seed after {attempts} attempts")]
    SeedFailure { attempts: usize },

    #[error("all {count} minimization runs failed")]
    AllRunsFailed { count: usize },

    #[error("unknown catalog entry `{0}`")]
    UnknownCatalogEntry(String),

    #[error("parameter out of range: {0}")]
    ParameterOutOfRange(String),

    #[error("malformed trajectory: {0}")]
    MalformedTrajectory(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
