//! Logarithmic intertwining data on abstract graded spaces: the Jordan split
//! of `L(0)`, the series `x^{+-L(0)}`, and the passage between integer-graded
//! and logarithmic mode families.

mod family;
mod graded;
pub mod samples;

pub use family::{from_z_graded, l1_recursion, to_z_graded, BlockKey, GradedBlocks, LogModeFamily, Shape};
pub use graded::{
    action_matrix, derivation_consistent, jordan_split, x_pow_l0, Direction, GradedOperatorData, LogSeries,
};

#[cfg(test)]
mod tests;
