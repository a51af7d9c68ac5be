//! Spectra of Hodge Laplacians on Heisenberg-type nilpotent groups in
//! irreducible ladder representations, closed-form eigenvalue catalogs, and
//! heat-trace decay exponents.

// `!(x > 0.0)` is used on purpose so NaN inputs are rejected.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod basis;
pub mod catalog;
pub mod cli;
pub mod dgroup;
pub mod error;
pub mod heat;
pub mod heisenberg;
pub mod linalg;
pub mod nilpotent;
pub mod report;
pub mod rule;
pub mod sparse;
pub mod verify;

pub use basis::{BasisElement, FormWord, Generator, MultiIndex, Space};
pub use error::{Error, Result};
pub use rule::LinearRule;
pub use sparse::SparseVector;
