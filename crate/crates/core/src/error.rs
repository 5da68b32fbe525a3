use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("operator is not unitary: max |U·U† − I| = {max_deviation:e} at entry ({row}, {col})")]
    NonUnitary {
        max_deviation: f64,
        row: usize,
        col: usize,
    },

    #[error("state is not normalized: squared norm = {norm_sqr}")]
    NotNormalized { norm_sqr: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("invalid tolerance: {0}")]
    InvalidTolerance(String),

    #[error("parse error at position {position}: {message}")]
    Parse { position: usize, message: String },

    #[error("fourier transform needs dimension >= 2, got {0}")]
    InvalidDimension(usize),

    #[error("final state is unclassifiable: P(|-1>) = {p_minus:.6}, P(|0>) = {p_zero:.6}")]
    UnclassifiableState { p_minus: f64, p_zero: f64 },

    #[error("invalid pulse: {0}")]
    InvalidPulse(String),

    #[error("invalid relaxation parameters: {0}")]
    InvalidRelaxation(String),

    #[error("delay must be non-negative, got {0} s")]
    NegativeDelay(f64),

    #[error("gradient event '{0}' cannot appear in a unitary-only sequence")]
    GradientInUnitaryContext(String),

    #[error("unknown gate '{0}'")]
    UnknownGate(String),

    #[error("sequence template has no free parameters")]
    NoFreeParameters,

    #[error("invalid template: {0}")]
    InvalidTemplate(String),

    #[error("invalid FID: {0}")]
    InvalidFid(String),

    #[error(
        "spectral window too narrow: lines at ±{line_hz} Hz need a bandwidth above {required_bandwidth_hz} Hz \
         (dwell < {max_dwell_s:e} s), got {bandwidth_hz} Hz"
    )]
    WindowTooNarrow {
        line_hz: f64,
        required_bandwidth_hz: f64,
        max_dwell_s: f64,
        bandwidth_hz: f64,
    },

    #[error("spectrum has no bins")]
    EmptySpectrum,

    #[error("peak threshold must lie in (0, 1), got {0}")]
    InvalidThreshold(f64),

    #[error("spectrum is unclassifiable: line12 = {line12:e}, line23 = {line23:e}")]
    UnclassifiableSpectrum { line12: f64, line23: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// True for outcomes that come from the simulated physics rather than
    /// from bad input.
    pub fn is_unclassifiable(&self) -> bool {
        matches!(
            self,
            Error::UnclassifiableState { .. } | Error::UnclassifiableSpectrum { .. }
        )
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Io(e.to_string())
    }
}
