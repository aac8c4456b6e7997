use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid mesh: {0}")]
    InvalidMesh(String),

    #[error("cell {cell} is degenerate: {reason}")]
    DegenerateCell { cell: usize, reason: String },

    #[error("cell index {0} out of range")]
    CellOutOfRange(usize),

    #[error("{path}:{line}: {msg}")]
    Parse {
        path: PathBuf,
        line: usize,
        msg: String,
    },

    #[error("mesh is disconnected: cell {0} is unreachable from cell 0")]
    DisconnectedMesh(usize),

    #[error("agglomerate seeded at cell {cell} is not simply connected ({loops} boundary loops)")]
    AgglomerateHole { cell: usize, loops: usize },

    #[error("corrupted hierarchy at level {level}: {msg}")]
    CorruptHierarchy { level: usize, msg: String },

    #[error("mesh has no interior degrees of freedom")]
    NoInteriorDofs,

    #[error("zero diagonal entry in row {0}")]
    ZeroDiagonal(usize),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is not positive definite (pivot {pivot} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },

    #[error("incomplete Cholesky breakdown at row {row} after {shifts} diagonal shifts")]
    IcBreakdown { row: usize, shifts: usize },

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
