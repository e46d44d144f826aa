use std::path::PathBuf;

use thiserror::Error;

use crate::tile::{CellCoord, Side};

pub type Result<T, E = MosaicError> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum MosaicError {
    #[error("tile kind {0} out of range 0..=10")]
    InvalidTile(i64),

    #[error("tile T{tile} has no strand entering at {side}")]
    NoStrand { tile: u8, side: Side },

    #[error("parse error at row {row}, column {col}: {message}")]
    Parse { row: usize, col: usize, message: String },

    #[error("layout error at cell {cell}: {message}")]
    Layout { cell: CellCoord, message: String },

    #[error("malformed mosaic: {0}")]
    Malformed(String),

    #[error("strand leaves the grid or hits a missing connection at {cell} entering {side}")]
    Connectivity { cell: CellCoord, side: Side },

    #[error("not a knot: {0}")]
    NotAKnot(String),

    #[error("invalid PD code: {0}")]
    InvalidPd(String),

    #[error("catalog error: {0}")]
    Catalog(String),

    #[error("invariant computation failed for {name}: {source}")]
    Invariant {
        name: String,
        #[source]
        source: Box<MosaicError>,
    },

    #[error("store error at {path}:{line}: {message}")]
    Store { path: PathBuf, line: usize, message: String },

    #[error("{0}")]
    Report(String),

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl MosaicError {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        MosaicError::Io { path: path.into(), source }
    }
}
