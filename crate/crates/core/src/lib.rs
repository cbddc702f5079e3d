//! Exact factorial-basis toolkit for q-holonomic sequences.

#![allow(clippy::needless_range_loop)]

pub mod arith;
pub mod basis;
pub mod compat;
pub mod corpus;
pub mod error;
pub mod expr;
pub mod linalg;
pub mod ore;
pub mod pipeline;
pub mod product;
pub mod qfunc;
pub mod series;
pub mod solver;

pub use error::{Error, Result};
