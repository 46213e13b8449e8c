//! Truncated B-valued distributions, free and correlated joins, and the
//! truncation-scaling tests of R-additivity and S-multiplicativity.

mod dist;
mod join;
mod json;
mod theorems;

pub use dist::{default_norm_bound, BDist, JointBDist, Word};
pub use join::{
    correlated_join, free_join, freeness_oracle, marginal_cumulants, max_product_order, prod_dist, sum_dist,
};
pub use theorems::{
    additivity_radius, additivity_scaling, multiplicativity_radius, multiplicativity_scaling, theorem25_test,
    theorem45_test, ScalingOptions, ScalingReport, RESIDUAL_FLOOR,
};
