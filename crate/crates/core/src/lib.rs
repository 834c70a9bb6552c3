//! Schur functions, CMV operators and scattering data on the unit circle.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod circle;
pub mod classes;
pub mod cmv;
pub mod error;
pub mod generators;
pub mod io;
pub mod operators;
pub mod scattering;
pub mod schur;
pub mod transfer;

pub use error::{Error, Result};
