//! Crate-wide error type.

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("configuration error: {0}")]
    Config(String),

    #[error("camera sampling exhausted for scene {scene_index} after d_min relaxation")]
    CameraSampling { scene_index: u64 },

    #[error("cannot build a BVH over an empty scene")]
    EmptyScene,

    #[error("raster format error in {path}: {reason}")]
    RasterFormat { path: String, reason: String },

    #[error("resolution mismatch: expected {expected_w}x{expected_h}, got {got_w}x{got_h}")]
    ResolutionMismatch {
        expected_w: u32,
        expected_h: u32,
        got_w: u32,
        got_h: u32,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("config parse error: {0}")]
    TomlParse(#[from] toml::de::Error),

    #[error("config encode error: {0}")]
    TomlEncode(#[from] toml::ser::Error),

    #[error("png error: {0}")]
    Png(String),
}

impl Error {
    pub fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
