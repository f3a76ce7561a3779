use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid partition: {0}")]
    InvalidPartition(String),

    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),

    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("alphabet mismatch: data uses {data} symbols, channel expects {channel}")]
    AlphabetMismatch { data: usize, channel: usize },

    #[error("degenerate channel: all transition rows are equal, so rows carry no cluster signal")]
    DegenerateChannel,

    #[error("symbol {symbol} was observed but has zero probability under every channel input")]
    ImpossibleObservation { symbol: u8 },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("parameter out of range: {0}")]
    ParamRange(String),

    #[error("cluster area {0} exceeds the exact-formula limit of 10^6 entries")]
    AreaTooLarge(u64),

    #[error("matrix with {entries} entries exceeds the simulation guardrail of 10^8; set allowLargeSim to override")]
    TooLargeForSimulation { entries: u128 },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("invalid JSON: {0}")]
    Json(#[from] serde_json::Error),
}
