//! Matrix Banach-algebra substrate: dense complex matrices, the spectral
//! norm, resolvents, and the conditional expectations onto the four
//! supported subalgebras.

mod context;
mod element;

pub use context::{resolvent, AlgebraContext, DomainCertificate, Side, SubalgebraKind, TransformTag, MEMBERSHIP_TOL};
pub use element::{Element, PIVOT_THRESHOLD};
