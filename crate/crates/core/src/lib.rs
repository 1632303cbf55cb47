//! Doubly universal Taylor series: numerical constructions.
//!
//! The pieces, bottom up: [`poly`] (centered polynomials), [`sets`] (compact
//! sets and their sampling grids), [`solver`] (degree-window minimax),
//! [`runge`] (joint approximation), [`sequence`] and [`construct`] (the
//! two-index construction with its [`certificate`]), and [`probe`] (decay of
//! window approximation errors).

// `!(x < y)` is used on purpose so that NaN fails the check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod certificate;
pub mod construct;
pub mod error;
pub mod numeric;
pub mod poly;
pub mod probe;
pub mod runge;
pub mod sequence;
pub mod sets;
pub mod solver;
pub mod target;
pub mod text;

pub use error::{Error, Result};
