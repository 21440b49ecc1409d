use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("degenerate annulus geometry: inner radius {inner} + eccentricity {eccentricity} must be below outer radius {outer}")]
    DegenerateGeometry { outer: f64, inner: f64, eccentricity: f64 },

    #[error("{path}:{line}: {message}")]
    MshParse {
        path: PathBuf,
        line: usize,
        message: String,
    },

    #[error("{path}:{line}: unsupported MSH version {version} (only ASCII 2.2 is read)")]
    MshVersion {
        path: PathBuf,
        line: usize,
        version: String,
    },

    #[error("io error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("point ({x}, {y}) lies outside the source mesh")]
    OutsideMesh { x: f64, y: f64 },

    #[error("value shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("boundary tag {0} is absent from the mesh")]
    TagAbsent(String),

    #[error("index ({row}, {col}) out of range for a {n_rows}x{n_cols} matrix")]
    IndexOutOfRange {
        row: usize,
        col: usize,
        n_rows: usize,
        n_cols: usize,
    },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("singular matrix: {0}")]
    Singular(String),

    #[error("invalid parameters: {0}")]
    InvalidParameters(String),

    #[error("nonlinear solve did not converge: {0}")]
    NotConverged(String),

    #[error("unsupported quadrature degree {0}")]
    QuadratureDegree(usize),
}
