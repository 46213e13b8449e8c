//! Fixtures shared by the benchmarks.

use amalgam_core::balg::{AlgebraContext, Element};
use amalgam_core::freedist::BDist;
use amalgam_core::nccomb::CumulantFamily;
use amalgam_core::transforms::ConcreteModel;
use amalgam_core::Complex64;

/// A fixed, well-conditioned `m × m` matrix of spectral norm 1.
pub fn fixed_matrix(m: usize) -> Element {
    let x = Element::from_fn(m, |i, j| {
        let t = (i * m + j) as f64;
        Complex64::new(0.3 * (1.7 * t).sin() + if i == j { 1.0 } else { 0.0 }, 0.2 * (0.9 * t).cos())
    });
    x.scale_real(1.0 / x.op_norm())
}

/// The concrete model of [`fixed_matrix`] in the given context.
pub fn fixed_model(ctx: AlgebraContext) -> ConcreteModel {
    ConcreteModel::new(ctx, fixed_matrix(ctx.ambient_dim())).expect("dimensions match")
}

/// A diagonal distribution with a mean shifted away from zero and nonzero
/// cumulants up to `order`.
pub fn fixed_dist(d: usize, order: usize) -> BDist {
    let mut fam = CumulantFamily::semicircular(d, order, 0.5);
    for (i, z) in fam.kappa_mut(1).data_mut().iter_mut().enumerate() {
        *z = Complex64::new(1.0 + 0.1 * i as f64, 0.0);
    }
    BDist::from_cumulants(&fam, None).expect("valid family")
}
