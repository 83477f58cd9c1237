//! Desk-scale numerical workbench for operator-tuple analysis: structured
//! singular values over block-scalar structures, fundamental-operator
//! equations of commuting 7- and 5-tuples, truncated Hardy-space
//! characteristic-function models, and Schaffer/Douglas/canonical dilation
//! constructions, all verified by residual checks.

// Index loops with i <-> 7-i pairing arithmetic stay as index loops.
#![allow(clippy::needless_range_loop)]

pub mod dilation;
pub mod error;
pub mod fundamental;
pub mod generators;
pub mod hardy;
pub mod io;
pub mod kernel;
pub mod mu;
pub mod report;
pub mod threads;

pub use error::{Error, Result};
pub use kernel::ComplexMatrix;
