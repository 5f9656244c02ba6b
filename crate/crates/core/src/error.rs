use thiserror::Error;

/// Which RGB channel an error refers to.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Channel {
    Red,
    Green,
    Blue,
}

impl Channel {
    pub const ALL: [Channel; 3] = [Channel::Red, Channel::Green, Channel::Blue];

    pub fn name(self) -> &'static str {
        match self {
            Channel::Red => "red",
            Channel::Green => "green",
            Channel::Blue => "blue",
        }
    }
}

impl std::fmt::Display for Channel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Errors from the Radiance `.hdr` codec. Each malformation has its own variant.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum HdrError {
    #[error("missing #?RADIANCE / #?RGBE signature")]
    BadMagic,
    #[error("unsupported pixel format {0:?}")]
    UnsupportedFormat(String),
    #[error("header ended before the resolution line")]
    TruncatedHeader,
    #[error("unsupported or malformed resolution line {0:?}")]
    BadResolution(String),
    #[error("scanline {row} truncated")]
    TruncatedScanline { row: usize },
    #[error("scanline {row}: run-length data overruns the scanline width")]
    RleOverrun { row: usize },
    #[error("scanline {row}: encoded width {found} does not match image width {expected}")]
    ScanlineWidthMismatch { row: usize, found: usize, expected: usize },
    #[error("scanline {row}: zero-length run")]
    ZeroLengthRun { row: usize },
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("cannot normalize weights: {channel} channel sums to zero")]
    ZeroSumChannel { channel: Channel },
    #[error("target drift is singular at t = {t} (requires t < 1)")]
    SingularTime { t: f64 },
    #[error("empty batch")]
    EmptyBatch,
    #[error("degenerate mean intensity: image is black")]
    DegenerateMean,
    #[error("zero-energy reference")]
    ZeroEnergy,
    #[error(
        "rank-deficient least-squares system: condition number {condition:.3e}, {rank} of {params} parameters resolved"
    )]
    RankDeficient { condition: f64, rank: usize, params: usize },
    #[error("invalid {what}: {reason}")]
    Invalid { what: &'static str, reason: String },
    #[error(transparent)]
    Hdr(#[from] HdrError),
    #[error("image i/o: {0}")]
    Image(#[from] image::ImageError),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }

    pub(crate) fn invalid(what: &'static str, reason: impl Into<String>) -> Self {
        Error::Invalid {
            what,
            reason: reason.into(),
        }
    }

    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
