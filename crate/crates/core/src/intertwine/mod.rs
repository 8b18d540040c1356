//! Integer-graded intertwining operators between Verma modules, truncated to
//! a degree window, and the lowest-degree data they determine.

mod constraints;
mod family;
mod fusion;
mod solve;

pub use constraints::{
    build_constraints, candidate_instances, instance_rows, ConstraintRow, ConstraintSystem, Instance, Provenance,
};
pub use family::{HomData, Layout, Params, TruncatedModeFamily};
pub use fusion::{brute_force_hom_dimension, extend_hom, fusion_dim_hom};
pub use solve::{
    check_borcherds_residual, check_derivative_relation, check_zero_mode_factorization, dimension_profile,
    extract_hom, generalized_verma, solve_mode_families, zero_mode_scalar, Solution, TruncatedModule,
};

#[cfg(test)]
mod tests;
