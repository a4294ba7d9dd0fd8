use thiserror::Error;

/// Errors produced by the optimization library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("unknown E-series `{0}` (expected one of E6, E12, E24, E48, E96)")]
    UnknownSeries(String),

    #[error("empty decade range [{min}, {max})")]
    EmptyDecadeRange { min: i32, max: i32 },

    #[error("invalid bias range: min {min} V, max {max} V, count {count}")]
    InvalidBiasRange { min: f64, max: f64, count: usize },

    #[error("invalid design space: {0}")]
    InvalidSpace(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("bias {vd} V outside photodiode range [0, {max}] V")]
    BiasOutOfRange { vd: f64, max: f64 },

    #[error("circuit model: {0}")]
    Model(String),

    #[error("invalid merit specification: {0}")]
    InvalidMeritSpec(String),

    #[error("invalid algorithm configuration: {0}")]
    InvalidConfig(String),

    #[error(
        "could not build an initial population of {wanted} non-zero merit chromosomes \
         within {attempts} draws ({accepted} accepted, zero-merit fraction {zero_fraction:.4})"
    )]
    Initialization {
        wanted: usize,
        accepted: usize,
        attempts: u64,
        zero_fraction: f64,
    },

    #[error("merit {merit} exceeds reference merit {reference}; the reference must be the global optimum")]
    InconsistentReference { merit: f64, reference: f64 },

    #[error("statistics error: {0}")]
    Stats(String),

    #[error("fixture parse error: {0}")]
    Fixture(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
