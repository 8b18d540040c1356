//! Zhu products, the relation space `O(M)`, and normal forms in the quotients
//! of the vacuum and Verma modules.

mod poly;
mod products;
mod quotient;

pub use poly::{AVModule, NormalForm, Poly, Poly2};
pub use products::{circle, conformal_relation, conformal_relations, o_span_generators, residue_element, star, Side};
pub use quotient::{
    o_matrix, reduce_vacuum, reduce_vacuum_oracle, reduce_vacuum_rewriting, reduce_vacuum_with, reduce_verma,
    reduce_verma_with, vacuum_poly, verma_family, verma_poly, verma_poly_with, QuotientOracle, ReduceConfig,
};

#[cfg(test)]
mod tests;
