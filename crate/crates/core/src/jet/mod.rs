//! Exact truncated multivariate power series.
//!
//! A [`Jet`] is a polynomial over [`Gauss`] (the Gaussian rationals) stored
//! sparsely up to a total degree `K`. Complex coordinates are polarized: `z`
//! and `zb` are independent formal variables exchanged by the
//! [`Alphabet`]'s conjugation.

mod alphabet;
mod coeff;
mod compose;
mod monomial;
mod parse;
mod series;
mod solve;

pub use alphabet::{same_alphabet, Alphabet, Var, MAX_VARS};
pub use coeff::{parse_rational, rational_to_string, Gauss};
pub use compose::Assignment;
pub use monomial::Monomial;
pub use series::{monomial_to_string, Jet};
pub use solve::{compose_maps, implicit_solve, is_identity_map, reversion};

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum JetError {
    #[error("alphabet mismatch: {0}")]
    AlphabetMismatch(String),
    #[error("order mismatch: {left} vs {right}")]
    OrderMismatch { left: u32, right: u32 },
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("invalid alphabet: {0}")]
    InvalidAlphabet(String),
    #[error("no substitution given for variable {0:?}")]
    MissingAssignment(String),
    #[error("substitution for {0:?} has a nonzero constant term")]
    ConstantTerm(String),
    #[error("singular Jacobian at the origin (rank {rank} of {size})")]
    SingularJacobian { rank: usize, size: usize },
    #[error("equation {index} does not vanish at the origin")]
    NotVanishing { index: usize },
    #[error("not divisible by {var}: term {monomial} lacks it")]
    NotDivisible { var: String, monomial: String },
    #[error("constant term must be 1, found {0}")]
    NonUnitConstant(String),
    #[error("jet is not a unit")]
    NotAUnit,
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error("internal invariant violated: {0}")]
    Invariant(String),
}
