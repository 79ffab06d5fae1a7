//! Numerical laboratory for localization-induced thermality.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::excessive_precision)]

pub mod bench;
pub mod charge;
pub mod chiral;
pub mod crossing;
pub mod error;
pub mod fit;
pub mod gaussian;
pub mod quad;
pub mod smearing;
pub mod table;
pub mod wedge;
pub mod zf;

pub use error::{Error, Result};
