use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}x{1} vs {2}x{3}")]
    DimensionMismatch(usize, usize, usize, usize),
    #[error("pixel size mismatch: {0} vs {1}")]
    PixelSizeMismatch(f64, f64),
    #[error("image contains non-finite data at index {0}")]
    NonFiniteData(usize),
    #[error("invalid image: {0}")]
    InvalidImage(String),
    #[error("invalid patch size {0}: must be even and at least 8")]
    InvalidPatchSize(usize),
    #[error("patch size {patch} exceeds image dimensions {width}x{height}")]
    PatchTooLarge {
        patch: usize,
        width: usize,
        height: usize,
    },
    #[error("patch sizes differ: {0} vs {1}")]
    SizeMismatch(usize, usize),
    #[error("ring bin width must be positive and finite, got {0}")]
    ZeroBinWidth(f64),
    #[error("FRC threshold must lie in [0, 1], got {0}")]
    InvalidThreshold(f64),
    #[error("hallucination threshold must lie in [0, 0.5] cycles/pixel, got {0}")]
    InvalidHallucinationThreshold(f64),
    #[error("annotation refers to unknown image id {0:?}")]
    UnknownImageId(String),
    #[error("no annotations")]
    NoAnnotations,
    #[error("every annotated patch is low-content; cannot tune the hallucination threshold")]
    AllAnnotatedPatchesLowContent,
    #[error("invalid annotation: {0}")]
    InvalidAnnotation(String),
    #[error("invalid threshold range: {0}")]
    InvalidRange(String),
    #[error("invalid band [{0}, {1}): need 0 <= low < high <= 0.5")]
    InvalidBand(f64, f64),
    #[error("band list is empty")]
    EmptyBands,
    #[error("image {width}x{height} is smaller than the {window}x{window} window")]
    ImageTooSmall {
        width: usize,
        height: usize,
        window: usize,
    },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("image dimensions {width}x{height} are not divisible by {factor}")]
    NotDivisible {
        width: usize,
        height: usize,
        factor: usize,
    },
    #[error("angle list is empty")]
    EmptyAngles,
    #[error("angles must be finite and strictly ascending")]
    UnsortedAngles,
    #[error("dose fraction must lie in (0, 1], got {0}")]
    NonPositiveDose(f64),
    #[error("phantom size {0} is below the minimum of 32")]
    SizeTooSmall(usize),
    #[error("bad magic in {0}")]
    BadMagic(PathBuf),
    #[error("truncated payload in {path}: expected {expected} bytes, found {found}")]
    TruncatedPayload {
        path: PathBuf,
        expected: usize,
        found: usize,
    },
    #[error("malformed file {path}: {reason}")]
    Malformed { path: PathBuf, reason: String },
    #[error("i/o failure on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("json error in {path}: {source}")]
    Json {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("png encoding failed: {0}")]
    Png(#[from] png::EncodingError),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
