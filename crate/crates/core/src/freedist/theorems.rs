//! R-additivity and S-multiplicativity tested on truncated distributions.
//!
//! Truncated models reproduce the transforms of the underlying variables
//! only up to `O(w^{N_eff})`, so the theorems are tested by scaling: the
//! residual must either be negligible or shrink by at least `2^{N_eff−1}`
//! when `w` is halved. A violated identity leaves an `O(w)` residual that
//! only halves.

use serde::{Deserialize, Serialize};

use super::dist::JointBDist;
use super::join::{free_join, max_product_order, prod_dist, sum_dist};
use super::BDist;
use crate::balg::Element;
use crate::error::{Error, Result};
use crate::transforms::{
    additivity_check, g_certificate, multiplicativity_check, psi_certificate, ElementModel, TruncatedModel,
};

/// Residuals below this count as exact.
pub const RESIDUAL_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingOptions {
    /// Fixed-point tolerance for every inversion.
    pub tol: f64,
}

impl Default for ScalingOptions {
    fn default() -> Self {
        ScalingOptions { tol: 1e-15 }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScalingReport {
    pub residual: f64,
    pub residual_half: f64,
    pub ratio: f64,
    pub n_eff: usize,
    pub required_ratio: f64,
    /// `residual / ‖w‖^{N_eff}`; informational.
    pub c_estimate: f64,
    pub below_floor: bool,
    pub passed: bool,
}

fn scaling(n_eff: usize, w: &Element, residual_at: impl Fn(&Element) -> Result<f64>) -> Result<ScalingReport> {
    let residual = residual_at(w)?;
    let residual_half = residual_at(&w.scale_real(0.5))?;
    let ratio = if residual_half > 0.0 {
        residual / residual_half
    } else if residual > 0.0 {
        f64::INFINITY
    } else {
        1.0
    };
    let required_ratio = 2f64.powi(n_eff as i32 - 1);
    let below_floor = residual < RESIDUAL_FLOOR && residual_half < RESIDUAL_FLOOR;
    Ok(ScalingReport {
        residual,
        residual_half,
        ratio,
        n_eff,
        required_ratio,
        c_estimate: residual / w.op_norm().powi(n_eff as i32),
        below_floor,
        passed: below_floor || ratio >= required_ratio,
    })
}

fn require_invertible(model: &dyn ElementModel, w: &Element) -> Result<()> {
    model.context().inverse_in_b(w).map(|_| ()).map_err(|_| Error::NotInvertibleInB)
}

fn marginal_models(joint: &JointBDist) -> (TruncatedModel, TruncatedModel) {
    (TruncatedModel::new(joint.marginal(1)), TruncatedModel::new(joint.marginal(2)))
}

/// Largest `‖w‖` admissible for the additivity test: the smallest onto-radius
/// of `g` among `a₁`, `a₂` and `a₁ + a₂`.
pub fn additivity_radius(joint: &JointBDist) -> Result<f64> {
    let (x, y) = marginal_models(joint);
    let s = TruncatedModel::new(sum_dist(joint)?);
    Ok([&x, &y, &s].iter().map(|m| g_certificate(*m).radius_onto).fold(f64::INFINITY, f64::min))
}

/// Smallest onto-radius of `Ψ` among `a₁`, `a₂` and `a₁a₂`.
pub fn multiplicativity_radius(joint: &JointBDist) -> Result<f64> {
    let (x, y) = marginal_models(joint);
    let p = TruncatedModel::new(prod_dist(joint, max_product_order(joint.order()))?);
    let mut r = f64::INFINITY;
    for m in [&x, &y, &p] {
        r = r.min(psi_certificate(m)?.radius_onto);
    }
    Ok(r)
}

/// `‖R_{a₁+a₂} − R_{a₁} − R_{a₂}‖` at `w` and `w/2` for any joint
/// distribution.
pub fn additivity_scaling(joint: &JointBDist, w: &Element, opts: ScalingOptions) -> Result<ScalingReport> {
    let (x, y) = marginal_models(joint);
    let s = TruncatedModel::new(sum_dist(joint)?);
    require_invertible(&s, w)?;
    scaling(joint.order(), w, |v| additivity_check(&x, &y, &s, v, opts.tol))
}

/// `‖S_{a₁a₂} − S_{a₁}S_{a₂}‖` at `w` and `w/2`, with the product known to
/// order `N/2`.
pub fn multiplicativity_scaling(joint: &JointBDist, w: &Element, opts: ScalingOptions) -> Result<ScalingReport> {
    let (x, y) = marginal_models(joint);
    let order = max_product_order(joint.order());
    let p = TruncatedModel::new(prod_dist(joint, order)?);
    require_invertible(&p, w)?;
    scaling(order.min(joint.order()), w, |v| multiplicativity_check(&x, &y, &p, v, opts.tol))
}

/// R-additivity for the free pair with marginals `x`, `y`.
pub fn theorem25_test(x: &BDist, y: &BDist, w: &Element, opts: ScalingOptions) -> Result<ScalingReport> {
    additivity_scaling(&free_join(x, y)?, w, opts)
}

/// S-multiplicativity for the free pair with marginals `x`, `y`.
pub fn theorem45_test(x: &BDist, y: &BDist, w: &Element, opts: ScalingOptions) -> Result<ScalingReport> {
    multiplicativity_scaling(&free_join(x, y)?, w, opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::freedist::correlated_join;
    use crate::nccomb::{CumulantFamily, MultilinearTensor};
    use crate::transforms::s_transform;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn random_family(rng: &mut ChaCha8Rng, d: usize, order: usize, mean: &[Complex64]) -> CumulantFamily {
        let tensors = (1..=order)
            .map(|n| {
                if n == 1 {
                    MultilinearTensor::new(d, 1, mean.to_vec()).unwrap()
                } else {
                    let s = 0.5f64.powi(n as i32 - 1);
                    MultilinearTensor::from_fn(d, n, |_, _| {
                        c(s * rng.random_range(-1.0..1.0), s * rng.random_range(-1.0..1.0))
                    })
                }
            })
            .collect();
        CumulantFamily::new(d, tensors).unwrap()
    }

    #[test]
    fn zero_partner_gives_zero_residual() {
        let x = BDist::from_cumulants(&CumulantFamily::semicircular(2, 6, 1.0), None).unwrap();
        let zero = BDist::from_cumulants(&CumulantFamily::zeros(2, 6), None).unwrap();
        let j = free_join(&x, &zero).unwrap();
        let w = Element::from_real_diag(&[0.5, 0.4]).scale_real(additivity_radius(&j).unwrap());
        let rep = theorem25_test(&x, &zero, &w, ScalingOptions::default()).unwrap();
        assert!(rep.residual < 1e-15 && rep.passed, "{rep:?}");
    }

    #[test]
    fn free_semicirculars_are_below_floor() {
        let x = BDist::from_cumulants(&CumulantFamily::semicircular(2, 6, 1.0), None).unwrap();
        let j = free_join(&x, &x).unwrap();
        let w = Element::from_real_diag(&[0.02, -0.015]).scale_real(additivity_radius(&j).unwrap());
        let rep = additivity_scaling(&j, &w, ScalingOptions::default()).unwrap();
        assert!(rep.below_floor && rep.passed, "{rep:?}");
    }

    #[test]
    fn correlated_pair_fails_scaling() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        let x = BDist::from_cumulants(&random_family(&mut rng, 2, 6, &[c(0.3, 0.0), c(-0.2, 0.1)]), None).unwrap();
        let y = BDist::from_cumulants(&random_family(&mut rng, 2, 6, &[c(0.1, 0.0), c(0.4, 0.0)]), None).unwrap();
        let free = free_join(&x, &y).unwrap();
        let corr = correlated_join(&x, &y).unwrap();
        let radius = additivity_radius(&free).unwrap().min(additivity_radius(&corr).unwrap());
        let w = Element::from_diag(&[c(0.5, 0.1), c(-0.3, 0.4)]).scale_real(radius);
        let good = additivity_scaling(&free, &w, ScalingOptions::default()).unwrap();
        let bad = additivity_scaling(&corr, &w, ScalingOptions::default()).unwrap();
        assert!(good.passed, "{good:?}");
        assert!(!bad.passed, "{bad:?}");
    }

    #[test]
    fn delta_pair_multiplies_exactly() {
        let (cv, ev) = (c(0.8, 0.0), c(-1.5, 0.5));
        let x = BDist::delta(&[cv], 6).unwrap();
        let y = BDist::delta(&[ev], 6).unwrap();
        let j = free_join(&x, &y).unwrap();
        let p = prod_dist(&j, 3).unwrap();
        for n in 1..=3 {
            assert!((p.moment(n).data()[0] - (cv * ev).powu(n as u32)).norm() < 1e-12);
        }
        let w = Element::scalar(1, c(1e-5, 0.0)).scale_real(multiplicativity_radius(&j).unwrap());
        let s = s_transform(&TruncatedModel::new(p), &w, 1e-16).unwrap();
        assert!((s.get(0, 0) - 1.0 / (cv * ev)).norm() < 1e-12);
        let rep = theorem45_test(&x, &y, &w.scale_real(1e4), ScalingOptions::default()).unwrap();
        assert!(rep.passed, "{rep:?}");
    }

    #[test]
    fn random_free_pair_scales() {
        let mut rng = ChaCha8Rng::seed_from_u64(21);
        for _ in 0..3 {
            let x = BDist::from_cumulants(&random_family(&mut rng, 2, 6, &[c(1.0, 0.2), c(0.8, 0.0)]), None).unwrap();
            let y = BDist::from_cumulants(&random_family(&mut rng, 2, 6, &[c(0.9, 0.0), c(1.1, -0.1)]), None).unwrap();
            let j = free_join(&x, &y).unwrap();
            let w = Element::from_diag(&[c(0.5, 0.2), c(0.4, -0.3)]).scale_real(multiplicativity_radius(&j).unwrap());
            let rep = multiplicativity_scaling(&j, &w, ScalingOptions::default()).unwrap();
            assert_eq!(rep.n_eff, 3);
            assert!(rep.passed, "{rep:?}");
        }
    }

    #[test]
    fn non_invertible_mean_is_rejected() {
        let x = BDist::from_cumulants(&CumulantFamily::semicircular(1, 6, 1.0), None).unwrap();
        let y = BDist::delta(&[c(1.0, 0.0)], 6).unwrap();
        let w = Element::scalar(1, c(1e-3, 0.0));
        assert_eq!(theorem45_test(&x, &y, &w, ScalingOptions::default()), Err(Error::ExpectationNotInvertible));
    }
}
