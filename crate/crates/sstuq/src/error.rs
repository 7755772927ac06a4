use thiserror::Error;

/// Unified error type for the whole pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("series is empty")]
    EmptySeries,
    #[error("non-finite sample at index {index}")]
    NonFiniteSample { index: usize },
    #[error("sampling rate must be positive")]
    NonPositiveRate,
    #[error("invalid frequency grid: c_max_hz={c_max_hz}, bins={bins}")]
    InvalidGridParams { c_max_hz: f64, bins: usize },
    #[error("window too short: m={m}, need m >= 4 (increase beta_s or rate)")]
    WindowTooShort { m: usize },
    #[error("invalid window shape: {0}")]
    InvalidWindowShape(String),
    #[error("grid frequency {freq_hz} Hz exceeds Nyquist {nyquist_hz} Hz")]
    FrequencyAboveNyquist { freq_hz: f64, nyquist_hz: f64 },
    #[error("frequency grid is empty")]
    GridEmpty,
    #[error("oracle instance too large: {cells} cells exceeds {max} (use the fast path)")]
    OracleTooLarge { cells: usize, max: usize },
    #[error("axis mismatch: {0}")]
    AxisMismatch(String),
    #[error("output frequency grid is empty")]
    EmptyOutGrid,
    #[error("time-frequency representation is empty")]
    EmptyTfr,
    #[error("reconstruction band holds no bins at time index {index}")]
    EmptyBand { index: usize },
    #[error("too few samples: {got}, need more than {need} for b*m = {params} parameters")]
    TooFewSamples { got: usize, need: usize, params: usize },
    #[error("series too short: {got} samples, need at least {need}")]
    SeriesTooShort { got: usize, need: usize },
    #[error("bootstrap recursion diverged: non-finite sample at index {index}")]
    NonFiniteBootstrap { index: usize },
    #[error("coarse grid node outside the full axes: {0}")]
    GridOutsideAxes(String),
    #[error("too few bootstrap replicates: {m}, need at least 40")]
    MTooSmall { m: usize },
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("coarse grid too coarse: {axis} axis has {got} nodes, spline needs at least 4")]
    GridTooCoarse { axis: &'static str, got: usize },
    #[error("model file malformed at line {line}: {msg}")]
    ModelParse { line: usize, msg: String },
    #[error("singular regression design that regularization could not repair")]
    SingularDesign,
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error("csv parse error at line {line}: {msg}")]
    CsvParse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
