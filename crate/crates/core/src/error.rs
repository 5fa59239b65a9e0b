use thiserror::Error;

use crate::jet::JetError;

/// Coarse classification used for process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Parse,
    Precondition,
    Invariant,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error(transparent)]
    Jet(#[from] JetError),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("phi is not real: {0}")]
    NonReal(String),
    #[error("phi is not normalized at the origin: {0}")]
    NotNormalized(String),
    #[error("degenerate t-block: Hessian in t has rank {rank} of {size}")]
    DegenerateTBlock { rank: usize, size: usize },
    #[error("germ is not straightened: {0}")]
    NotStraightened(String),
    #[error("germ is not rigid: {0}")]
    NotRigid(String),
    #[error("no complex variables (nu = 0): the central manifold is a curve")]
    CurveCase,
    #[error("Levi form is degenerate: {0}")]
    LeviDegenerate(String),
    #[error("point is not on the hypersurface: {0}")]
    OffHypersurface(String),
    #[error("not an equivalence of the given hypersurfaces: {0}")]
    NotEquivalence(String),
    #[error("Levi form is not positive definite: {0}")]
    NotPositive(String),
    #[error("unusable lambda: {0}")]
    BadLambda(String),
    #[error("map is not shift-equivariant in the external variables: {0}")]
    NotShiftEquivariant(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("incompatible inputs: {0}")]
    Mismatch(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    pub fn kind(&self) -> ErrorKind {
        match self {
            Error::Parse(_) | Error::Jet(JetError::Parse(_)) => ErrorKind::Parse,
            Error::Invariant(_) | Error::Jet(JetError::Invariant(_)) => ErrorKind::Invariant,
            _ => ErrorKind::Precondition,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
