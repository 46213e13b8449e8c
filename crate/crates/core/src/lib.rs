//! Operator-valued R- and S-transforms over matrix Banach algebras.
//!
//! * [`balg`]: matrices, spectral norms, resolvents and conditional
//!   expectations onto scalar, diagonal, block-tensor or full subalgebras.
//! * [`transforms`]: `g_a`, `Ψ_a`, their derivatives and certified
//!   fixed-point inverses, and the R- and S-transforms.
//! * [`nccomb`]: non-crossing partitions and B-valued free cumulants.
//! * [`freedist`]: truncated B-valued distributions, free joins, sums and
//!   products, and the scaling tests of the additivity and multiplicativity
//!   theorems.

pub mod balg;
pub mod error;
pub mod freedist;
pub mod nccomb;
pub mod sampling;
pub mod transforms;

pub use balg::{AlgebraContext, DomainCertificate, Element, Side, SubalgebraKind, TransformTag};
pub use error::{Error, Result};
pub use freedist::{BDist, JointBDist, ScalingReport, Word};
pub use nccomb::{CumulantFamily, MultilinearTensor, NCPartition};
pub use num_complex::Complex64;
pub use transforms::{ConcreteModel, ElementModel, FixedPointReport, TruncatedModel};
