use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("config: {0}")]
    Config(String),

    #[error("invalid scenario: {}", .0.join("; "))]
    Invalid(Vec<String>),

    #[error("unknown {kind} `{name}` (known: {known})")]
    UnknownName {
        kind: &'static str,
        name: String,
        known: String,
    },

    #[error("null-form index order violated: need 0 <= a < b <= 3, got ({a}, {b})")]
    IndexOrder { a: usize, b: usize },

    #[error("weight W^(c) excludes every speed: all speeds equal {0}")]
    EmptyExclusion(f64),

    #[error("stencil out of range at {0}")]
    StencilRange(String),

    #[error("insufficient history: {0}")]
    InsufficientHistory(String),

    #[error("probe outside computed domain: {0}")]
    ProbeOutside(String),

    #[error("ray exits grid: {0}")]
    RayExits(String),

    #[error("fit window empty: {0}")]
    EmptyWindow(String),

    #[error("energy underflow: {0}")]
    EnergyUnderflow(String),

    #[error("fit refused: {0}")]
    FitRefused(String),

    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}

impl From<toml::de::Error> for Error {
    fn from(e: toml::de::Error) -> Self {
        Error::Config(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
