//! The transforms `g_a` and `Ψ_a`, their certified inverses, and the R- and
//! S-transforms built from them.

mod fixed_point;
mod model;
mod ops;

pub use fixed_point::{
    g_certificate, inverse_expectation, invert_g, invert_psi, psi_certificate, FixedPointReport, DEFAULT_TOL,
    MAX_ITERATIONS,
};
pub use model::{ConcreteModel, ElementModel, TruncatedModel, TRUNCATION_DOMAIN};
pub use ops::{
    additivity_check, check_dilation, check_rs_relation, dg, dg_bound, dpsi, dpsi_bound, g_transform,
    multiplicativity_check, psi_transform, r_transform, r_transform_via, s_transform, s_transform_detailed,
    DilationReport, RPath, RsReport, TransformValue,
};
