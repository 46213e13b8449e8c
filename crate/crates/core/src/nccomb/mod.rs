//! Non-crossing partitions and B-valued moment/cumulant combinatorics over a
//! diagonal subalgebra.

pub mod cumulants;
pub mod partition;
pub mod tensor;

pub use cumulants::{
    cumulants_to_moments, kappa_pi_eval, lemma31_check, lemma31_sides, moments_to_cumulants, r_series, CumulantFamily,
    Lemma31Sides, MAX_LEMMA_ORDER,
};
pub use partition::{
    catalan, compositions, enumerate_nc, find_crossing, interval_refinements, Composition, NCPartition, MAX_ENUMERATION,
};
pub use tensor::{MultilinearTensor, MAX_COORDS, MAX_ORDER};
