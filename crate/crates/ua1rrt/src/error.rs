use thiserror::Error;

/// Errors raised across the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: non-finite input")]
    InvalidConfiguration,

    #[error("parameter out of range: s = {0}")]
    ParameterOutOfRange(f64),

    #[error("invalid truncation point: s = {0}")]
    InvalidTruncation(f64),

    #[error("initial path rate squared must be non-negative, got {0}")]
    NegativeInitialRate(f64),

    #[error("integration step size must be positive, got {0}")]
    InvalidStepSize(f64),

    #[error("path rate is zero at interior point s = {0}")]
    InteriorZeroRate(f64),

    #[error("profile did not complete its domain (terminated {0})")]
    IncompleteProfile(&'static str),

    #[error("start configuration is in collision")]
    StartInCollision,

    #[error("root velocity split invalid: nonzero velocity requires a positive initial path rate")]
    InvalidRootVelocity,

    #[error("environment saturated: {0} consecutive samples rejected")]
    EnvironmentSaturated(usize),

    #[error("junction rate mismatch at vertex {vertex}: stored {stored}, re-integrated {computed}")]
    JunctionMismatch {
        vertex: usize,
        stored: f64,
        computed: f64,
    },

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
