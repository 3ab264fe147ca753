use std::path::PathBuf;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid geometry: {0}")]
    InvalidGeometry(String),

    /// The transverse wavenumber is below the free-space wavenumber, so the
    /// cell does not support a bound surface wave.
    #[error("fast wave: k_t = {k_t:.6} rad/m is below k_0 = {k_0:.6} rad/m")]
    FastWave { k_t: f64, k_0: f64 },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("invalid dispersion table: {0}")]
    InvalidTable(String),

    #[error("curve is not strictly decreasing in g; violating knots: {}", format_violations(.violations))]
    NonMonotone { violations: Vec<(f64, f64)> },

    #[error("reactance {requested:.6} ohm is outside the curve range; nearest achievable value is {nearest:.6} ohm")]
    OutOfRange { requested: f64, nearest: f64 },

    #[error("point ({x:.6}, {y:.6}) m lies inside the feed exclusion radius {radius:.6} m")]
    FeedRegion { x: f64, y: f64, radius: f64 },

    #[error("degenerate propagation direction: dispersion denominator vanishes at theta_k = {theta_k:.6} rad")]
    DegenerateDirection { theta_k: f64 },

    #[error("polarization undefined: both circular components are zero")]
    UndefinedPolarization,

    #[error("invalid design spec field `{field}`: {reason}")]
    InvalidSpec { field: &'static str, reason: String },

    #[error("{path}: line {line}: {message}")]
    Parse {
        path: String,
        line: u64,
        message: String,
    },

    #[error("no cut at phi = {requested} deg; nearest available cut is phi = {nearest} deg")]
    MissingCut { requested: f64, nearest: f64 },

    #[error(
        "window around theta = {center_deg} deg has no samples above -20 dB of the pattern peak"
    )]
    LowSignal { center_deg: f64 },

    #[error("unsupported format `{requested}`; supported formats: {supported}")]
    UnsupportedFormat {
        requested: String,
        supported: &'static str,
    },

    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error("{0}")]
    Usage(String),

    #[error("failed to access {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("invalid json in {path}: {source}")]
    Json {
        path: String,
        #[source]
        source: serde_json::Error,
    },
}

fn format_violations(v: &[(f64, f64)]) -> String {
    v.iter()
        .map(|(g, x)| format!("(g = {g} mm, x_eff = {x} ohm)"))
        .collect::<Vec<_>>()
        .join(", ")
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Process exit code for the command-line front-end: 2 usage,
    /// 3 validation, 4 numerical.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Usage(_) | Error::UnsupportedFormat { .. } => 2,
            Error::FastWave { .. }
            | Error::OutOfRange { .. }
            | Error::FeedRegion { .. }
            | Error::DegenerateDirection { .. }
            | Error::UndefinedPolarization
            | Error::LowSignal { .. } => 4,
            _ => 3,
        }
    }
}
