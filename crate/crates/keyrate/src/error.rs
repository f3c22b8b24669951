use thiserror::Error;

/// Errors produced by the rate models, searches and table writers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("pump power {pump_mw} mW outside the fit domain [{lo}, {hi}] mW")]
    PumpOutOfDomain { pump_mw: f64, lo: f64, hi: f64 },

    #[error("invalid up-conversion fit: {0}")]
    InvalidFit(String),

    #[error("filter bandwidth must be positive, got {0} Hz")]
    NonPositiveBandwidth(f64),

    #[error("dark count rate must be non-negative, got {0} /s")]
    NegativeDarkRate(f64),

    #[error("NEP undefined at pump {0} mW: detection efficiency is zero")]
    NepUndefined(f64),

    #[error("NEP search found no pump with nonzero efficiency")]
    NepSearchEmpty,

    #[error("grid step {step} mW invalid for pump domain of width {width} mW")]
    InvalidGridStep { step: f64, width: f64 },

    #[error("unknown detector preset `{0}`")]
    UnknownPreset(String),

    #[error("unknown figure preset `{0}`")]
    UnknownFigure(String),

    #[error("invalid channel parameters: {0}")]
    InvalidChannel(String),

    #[error("invalid detector operating point: {0}")]
    InvalidDetector(String),

    #[error("invalid protocol configuration: {0}")]
    InvalidProtocol(String),

    #[error("repetition rate {nu_hz} Hz exceeds the detector maximum {nu_max_hz} Hz")]
    RepetitionRateTooHigh { nu_hz: f64, nu_max_hz: f64 },

    #[error("signal probability {0} exceeds 1; inputs outside the model's validity range")]
    SignalProbabilityTooHigh(f64),

    #[error("error-correction factor undefined for error rate {0} (requires e < 0.5)")]
    ErrorRateOutOfRange(f64),

    #[error("invalid search interval: {0}")]
    InvalidSearchInterval(String),

    #[error("rate floor must be positive, got {0} bit/s")]
    InvalidRateFloor(f64),

    #[error(
        "optimized rate {rate_bps} bit/s at L = 0 is already below the floor {floor_bps} bit/s"
    )]
    FloorAboveRate { floor_bps: f64, rate_bps: f64 },

    #[error("invalid Monte Carlo inputs: {0}")]
    InvalidSimulation(String),

    #[error("z-score undefined: {0}")]
    UndefinedZScore(String),

    #[error("no rows to write")]
    EmptyTable,

    #[error("writing {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
