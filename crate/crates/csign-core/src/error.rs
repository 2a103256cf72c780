use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix dimension {dim} exceeds the permanent limit of {max}")]
    DimensionExceeded { dim: usize, max: usize },

    #[error("photon number mismatch: input carries {input}, output carries {output}")]
    PhotonMismatch { input: u32, output: u32 },

    #[error("occupation vector has {got} modes, unitary has {expected}")]
    ModeMismatch { expected: usize, got: usize },

    #[error("matrix is not unitary (max deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("spectral norm {norm} exceeds 1")]
    NotContraction { norm: f64 },

    #[error("root finder did not converge (residual {residual:.3e})")]
    RootFinding { residual: f64 },

    #[error("no feasible matrix found down to alpha0 = {alpha0:.3e}")]
    NoFeasiblePoint { alpha0: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
