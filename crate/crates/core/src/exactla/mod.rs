//! Exact rational arithmetic and sparse linear algebra over the rationals.

mod dense;
mod rational;
mod sparse;

pub use dense::Matrix;
pub use rational::{
    binomial, binomial_int, factorial, format_rational, frac, height, int, parse_rational, sign, Rational,
};
pub use sparse::{
    collect_sparse, from_dense, kernel_basis, span_membership, to_dense, Echelon, PivotRule, SparseMatrix, SparseVec,
};
