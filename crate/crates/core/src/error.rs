use thiserror::Error;

/// Errors raised by the controller, the simulation and the file formats.
#[derive(Debug, Error)]
pub enum Error {
    #[error("health must be a multiple of 10 in 0..=100, got {0}")]
    InvalidHealth(u32),
    #[error("entity destroyed (health 0): no tier is allocated for a finished game")]
    DestroyedEntity,
    #[error("tier index must be in 1..=5, got {0}")]
    InvalidTier(u32),
    #[error("score {score} outside the {scheme} range [{min}, {max}]")]
    ScoreOutOfRange {
        scheme: &'static str,
        score: f64,
        min: f64,
        max: f64,
    },
    #[error("unknown scheme `{0}` (expected v1 or v2)")]
    UnknownScheme(String),
    #[error("unknown policy `{0}` (expected fixed, dda-v1 or dda-v2)")]
    UnknownPolicy(String),
    #[error("unknown profile `{0}` (expected weak, average, strong or custom)")]
    UnknownProfile(String),
    #[error("wave size must be at least 1")]
    EmptyWave,
    #[error("invalid parameter `{field}`: {reason}")]
    InvalidParameter { field: &'static str, reason: String },
    #[error("invalid config field `{field}`: {reason}")]
    InvalidConfig { field: String, reason: String },
    #[error("both conditions required: {0}")]
    MissingCondition(String),
    #[error("malformed record: {0}")]
    MalformedRecord(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
