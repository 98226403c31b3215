use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unknown algebra `{0}`")]
    UnknownAlgebra(String),

    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("tensor of degree {degree} is not in HD (component {component})")]
    NotMember {
        degree: usize,
        component: usize,
        /// Coefficients over words of an element of ker(tau) on which the tensor is nonzero.
        witness: Vec<crate::Rat>,
    },

    #[error("point is outside the prolongation domain: frame images have rank {rank} < {needed}")]
    OutsideDomain { rank: usize, needed: usize },

    #[error("obstruction: {0}")]
    Obstruction(String),

    #[error("certificate failure: {0}")]
    Certificate(String),
}

impl Error {
    /// Process exit code used by the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::DimensionMismatch { .. }
            | Error::UnknownAlgebra(_)
            | Error::InvalidAlgebra(_)
            | Error::InvalidArgument(_)
            | Error::Parse(_) => 1,
            Error::NotMember { .. } | Error::OutsideDomain { .. } | Error::Obstruction(_) => 2,
            Error::Certificate(_) => 3,
        }
    }
}

pub(crate) fn check_len(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
