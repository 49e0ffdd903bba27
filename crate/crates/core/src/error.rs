use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Every failure the engine reports. The variant name doubles as the
/// machine-readable reason code (see [`Error::code`]).
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("log contains no event records")]
    EmptyLog,
    #[error("missing or malformed '#device' header line")]
    MissingDeviceHeader,
    #[error("{rejected} of {total} records malformed (lines {lines:?})")]
    CorruptLog {
        rejected: usize,
        total: usize,
        lines: Vec<usize>,
    },
    #[error("invalid device profile: {0}")]
    InvalidDevice(String),
    #[error("axis px->mm factors differ by {skew_pct:.3}% (strict mode allows 1%)")]
    AnisotropicDevice { skew_pct: f64 },

    #[error("sample count must be at least 2, got {0}")]
    InvalidSampleCount(usize),
    #[error("vector lengths differ: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("cosine similarity undefined for a zero-norm vector")]
    ZeroNorm,
    #[error("euclid weight must lie in [0, 1], got {0}")]
    InvalidWeight(f64),

    #[error("k = {k} exceeds the {available} available vectors")]
    TooFewPoints { k: usize, available: usize },
    #[error("k must be at least 1")]
    InvalidClusterCount,
    #[error("no points inside the selection circle")]
    EmptySelection,
    #[error("confidence coefficient must lie in (0, 1], got {0}")]
    InvalidConfidence(f64),
    #[error("confidence {confidence} retains no points of a {selected}-point selection")]
    EmptyRetention { selected: usize, confidence: f64 },
    #[error("point ({x}, {y}) lies outside the screen")]
    OutOfBounds { x: f64, y: f64 },

    #[error("layout period has zero length")]
    DegeneratePeriod,
    #[error("semantic regions {0} and {1} overlap")]
    AmbiguousRegions(u32, u32),
    #[error("semantic ring {0} is used by more than one region")]
    DuplicateRing(u32),
    #[error("grid dimensions must be at least 1x1")]
    InvalidGrid,
    #[error("invalid layout configuration: {0}")]
    InvalidLayoutConfig(String),
}

impl Error {
    /// Stable reason code, identical to the variant name.
    pub fn code(&self) -> &'static str {
        match self {
            Error::EmptyLog => "EmptyLog",
            Error::MissingDeviceHeader => "MissingDeviceHeader",
            Error::CorruptLog { .. } => "CorruptLog",
            Error::InvalidDevice(_) => "InvalidDevice",
            Error::AnisotropicDevice { .. } => "AnisotropicDevice",
            Error::InvalidSampleCount(_) => "InvalidSampleCount",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::ZeroNorm => "ZeroNorm",
            Error::InvalidWeight(_) => "InvalidWeight",
            Error::TooFewPoints { .. } => "TooFewPoints",
            Error::InvalidClusterCount => "InvalidClusterCount",
            Error::EmptySelection => "EmptySelection",
            Error::InvalidConfidence(_) => "InvalidConfidence",
            Error::EmptyRetention { .. } => "EmptyRetention",
            Error::OutOfBounds { .. } => "OutOfBounds",
            Error::DegeneratePeriod => "DegeneratePeriod",
            Error::AmbiguousRegions(..) => "AmbiguousRegions",
            Error::DuplicateRing(_) => "DuplicateRing",
            Error::InvalidGrid => "InvalidGrid",
            Error::InvalidLayoutConfig(_) => "InvalidLayoutConfig",
        }
    }
}
