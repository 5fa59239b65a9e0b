//! Exact jet computations for germs of locally integrable structures of
//! hypersurface type: Levi forms, central manifolds and Morse normal forms,
//! Segre varieties and the Φ-function, the external CR lift, and lifting of
//! equivalences between central manifolds.

pub mod central;
pub mod cli;
pub mod equivalence;
pub mod error;
pub mod jet;
pub mod linalg;
pub mod marson;
pub mod report;
pub mod segre;
pub mod structure;

pub use error::{Error, ErrorKind, Result};
