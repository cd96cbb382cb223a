use std::fmt;
use std::path::PathBuf;

use thiserror::Error;

/// Pipeline stage an error originated in. Used to tag errors surfaced by
/// the end-to-end pipeline and the CLI.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Imaging,
    Segmentation,
    Wavelet,
    Features,
    Classify,
    Eval,
}

impl fmt::Display for Stage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Stage::Imaging => "imaging",
            Stage::Segmentation => "segmentation",
            Stage::Wavelet => "wavelet",
            Stage::Features => "features",
            Stage::Classify => "classify",
            Stage::Eval => "eval",
        })
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("MalformedFile: {0}")]
    MalformedFile(String),
    #[error("UnsupportedDepth: {0}")]
    UnsupportedDepth(String),
    #[error("NotFound: {}", .0.display())]
    NotFound(PathBuf),
    #[error("Io: {}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("EmptyImage")]
    EmptyImage,
    #[error("InvalidDimensions: {0}")]
    InvalidDimensions(String),

    #[error("NoForeground")]
    NoForeground,
    #[error("InvalidEllipse: {0}")]
    InvalidEllipse(String),
    #[error("OutOfBounds: {0}")]
    OutOfBounds(String),

    #[error("OddLength: signal length {0} is not even")]
    OddLength(usize),
    #[error("NotPowerOfTwo: signal length {0}")]
    NotPowerOfTwo(usize),
    #[error("OddDimension: {width}x{height}")]
    OddDimension { width: usize, height: usize },
    #[error("InsufficientDivisibility: {width}x{height} is not divisible by 2^{level}")]
    InsufficientDivisibility {
        width: usize,
        height: usize,
        level: u8,
    },
    #[error("MalformedPyramid: {0}")]
    MalformedPyramid(String),

    #[error("LengthMismatch: {0}")]
    LengthMismatch(String),
    #[error("EmptyGallery")]
    EmptyGallery,
    #[error("MalformedGallery: {0}")]
    MalformedGallery(String),

    #[error("MalformedManifest: {0}")]
    MalformedManifest(String),
    #[error("MissingImage: {}", .0.display())]
    MissingImage(PathBuf),
    #[error("SubjectTooSmall: subject {subject:?} has {count} image(s), need at least 2")]
    SubjectTooSmall { subject: String, count: usize },
    #[error("InconsistentSeriesLength: expected {expected}, {path} gives {found}")]
    InconsistentSeriesLength {
        expected: usize,
        found: usize,
        path: String,
    },

    #[error("InvalidConfig: {0}")]
    InvalidConfig(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: Stage,
        #[source]
        source: Box<Error>,
    },
    #[error("{}: {source}", path.display())]
    AtPath {
        path: PathBuf,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn at_stage(self, stage: Stage) -> Error {
        Error::Stage {
            stage,
            source: Box::new(self),
        }
    }

    pub fn at_path(self, path: impl Into<PathBuf>) -> Error {
        Error::AtPath {
            path: path.into(),
            source: Box::new(self),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Error {
        let path = path.into();
        if source.kind() == std::io::ErrorKind::NotFound {
            Error::NotFound(path)
        } else {
            Error::Io { path, source }
        }
    }

    /// The innermost error, with stage and path tags stripped.
    pub fn root(&self) -> &Error {
        match self {
            Error::Stage { source, .. } | Error::AtPath { source, .. } => source.root(),
            other => other,
        }
    }

    /// The stage tag closest to the root cause, if any.
    pub fn stage(&self) -> Option<Stage> {
        match self {
            Error::Stage { stage, source } => source.stage().or(Some(*stage)),
            Error::AtPath { source, .. } => source.stage(),
            _ => None,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Attach a stage tag to the error side of a result.
pub(crate) trait StageExt<T> {
    fn stage(self, stage: Stage) -> Result<T>;
}

impl<T> StageExt<T> for Result<T> {
    fn stage(self, stage: Stage) -> Result<T> {
        self.map_err(|e| e.at_stage(stage))
    }
}
