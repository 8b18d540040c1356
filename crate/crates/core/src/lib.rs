//! Exact computations for Zhu algebras, intertwining operators and their
//! logarithmic generalizations for the Virasoro vertex operator algebra.

pub mod acceptance;
mod cache;
pub mod error;
pub mod exactla;
pub mod formalcalc;
pub mod intertwine;
pub mod logtransform;
pub mod virasoro;
pub mod zhumod;

pub use error::{Error, Result};
