//! Inversion of `g_a` and `Ψ_a` by Banach fixed-point iteration.

use serde::{Deserialize, Serialize};

use super::model::ElementModel;
use crate::balg::{DomainCertificate, Element};
use crate::error::{Error, Result};

pub const DEFAULT_TOL: f64 = 1e-10;
pub const MAX_ITERATIONS: usize = 200;

/// Step ratios are only recorded while the previous step is above this
/// multiple of `ε · (‖w‖ + ‖b‖)`; below it the ratio measures roundoff.
const RATIO_NOISE_FACTOR: f64 = 1e4;

/// Trace of one inversion.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FixedPointReport {
    pub converged: bool,
    pub iterations: usize,
    pub final_residual: f64,
    /// `‖b_{k+1} − b_k‖ / ‖b_k − b_{k−1}‖` per step.
    pub contraction_estimates: Vec<f64>,
    pub certificate: DomainCertificate,
    /// Whether `‖w‖` was strictly inside the certified onto-ball.
    pub certified: bool,
    pub input_norm: f64,
    pub preimage_norm: f64,
}

impl FixedPointReport {
    pub fn max_contraction(&self) -> f64 {
        self.contraction_estimates.iter().copied().fold(0.0, f64::max)
    }
}

/// Certificate for `g_a` from the model's norm bound.
pub fn g_certificate(model: &dyn ElementModel) -> DomainCertificate {
    DomainCertificate::for_g(model.norm_bound())
}

/// `E(a)⁻¹` computed in `B`.
pub fn inverse_expectation(model: &dyn ElementModel) -> Result<Element> {
    model.context().inverse_in_b(&model.expectation_of_a()).map_err(|_| Error::ExpectationNotInvertible)
}

/// Certificate for `Ψ_a`; needs `E(a)` invertible.
pub fn psi_certificate(model: &dyn ElementModel) -> Result<DomainCertificate> {
    let inv = inverse_expectation(model)?;
    Ok(DomainCertificate::for_psi(model.norm_bound(), inv.op_norm()))
}

/// Solve `g_a(b) = w` with `b_{k+1} = w + b_k − g_a(b_k)`, `b₀ = 0`.
///
/// Inputs outside the certified onto-ball are still attempted; the report
/// then has `certified = false`.
pub fn invert_g(model: &dyn ElementModel, w: &Element, tol: f64) -> Result<(Element, FixedPointReport)> {
    iterate(model, w, tol, g_certificate(model), None, &|b| model.eval_g(b))
}

/// Solve `Ψ_a(b) = w` through `Γ_a(b) = Ψ_a(b)E(a)⁻¹`:
/// `b_{k+1} = b_k + (w − Ψ_a(b_k))E(a)⁻¹`, `b₀ = 0`.
pub fn invert_psi(model: &dyn ElementModel, w: &Element, tol: f64) -> Result<(Element, FixedPointReport)> {
    let inv = inverse_expectation(model)?;
    let cert = DomainCertificate::for_psi(model.norm_bound(), inv.op_norm());
    iterate(model, w, tol, cert, Some(&inv), &|b| model.eval_psi(b))
}

fn iterate(
    model: &dyn ElementModel,
    w: &Element,
    tol: f64,
    certificate: DomainCertificate,
    precond: Option<&Element>,
    eval: &dyn Fn(&Element) -> Result<Element>,
) -> Result<(Element, FixedPointReport)> {
    let ctx = model.context();
    ctx.ensure_in_b(w)?;
    let wn = w.op_norm();
    let certified = wn < certificate.radius_onto;
    let mut b = Element::zeros(ctx.ambient_dim());
    let mut bn = 0.0;
    let mut prev_step: Option<f64> = None;
    let mut estimates = Vec::new();
    let mut residual = f64::INFINITY;

    for iterations in 0..=MAX_ITERATIONS {
        let r = w.try_sub(&eval(&b)?)?;
        residual = r.op_norm();
        let step = match precond {
            Some(p) => r.mat_mul(p)?,
            None => r,
        };
        let sn = if precond.is_some() { step.op_norm() } else { residual };
        let threshold = f64::max(tol * f64::max(1.0, wn), 16.0 * f64::EPSILON * (wn + bn));
        if residual <= threshold && sn <= threshold {
            let report = FixedPointReport {
                converged: true,
                iterations,
                final_residual: residual,
                contraction_estimates: estimates,
                certificate,
                certified,
                input_norm: wn,
                preimage_norm: bn,
            };
            return Ok((b, report));
        }
        if iterations == MAX_ITERATIONS {
            break;
        }
        if let Some(p) = prev_step {
            if p > RATIO_NOISE_FACTOR * f64::EPSILON * (wn + bn) {
                estimates.push(sn / p);
            }
        }
        prev_step = Some(sn);
        b = b.try_add(&step)?;
        bn = b.op_norm();
    }
    Err(Error::NoConvergence { iterations: MAX_ITERATIONS, residual })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::balg::AlgebraContext;
    use crate::freedist::BDist;
    use crate::transforms::model::{ConcreteModel, TruncatedModel};
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn scalar_one() -> ConcreteModel {
        ConcreteModel::new(AlgebraContext::scalar(1), Element::identity(1)).unwrap()
    }

    #[test]
    fn zero_maps_to_zero() {
        let m = scalar_one();
        let (b, rep) = invert_g(&m, &Element::zeros(1), DEFAULT_TOL).unwrap();
        assert!(b.is_zero());
        assert_eq!(rep.iterations, 0);
        let (b, _) = invert_psi(&m, &Element::zeros(1), DEFAULT_TOL).unwrap();
        assert!(b.is_zero());
    }

    #[test]
    fn scalar_closed_form_inverse() {
        let m = scalar_one();
        let w = Element::scalar(1, c(0.05));
        let want = 0.05 / 1.05;
        let (b, rep) = invert_g(&m, &w, 1e-14).unwrap();
        assert!((b.get(0, 0) - c(want)).norm() < 1e-13);
        assert!(rep.converged && rep.certified);
        let (b, _) = invert_psi(&m, &w, 1e-14).unwrap();
        assert!((b.get(0, 0) - c(want)).norm() < 1e-13);
    }

    fn random_diag_model(rng: &mut ChaCha8Rng, m: usize) -> ConcreteModel {
        let a = Element::from_fn(m, |_, _| Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        let a = a.scale_real(1.0 / a.op_norm());
        ConcreteModel::new(AlgebraContext::diagonal(m), a).unwrap()
    }

    #[test]
    fn round_trip_inside_certified_ball() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let m = random_diag_model(&mut rng, 3);
            let cert = g_certificate(&m);
            // b in the preimage ball with g(b) in the onto ball
            let dir: Vec<Complex64> = (0..3).map(|_| Complex64::from_polar(1.0, rng.random_range(0.0..6.28))).collect();
            let b0 = Element::from_diag(&dir).scale_real(0.8 * cert.radius_onto);
            let w = m.eval_g(&b0).unwrap();
            assert!(w.op_norm() < cert.radius_onto);
            let (b, rep) = invert_g(&m, &w, 1e-13).unwrap();
            assert!(rep.certified && rep.converged);
            assert!((&b - &b0).op_norm() < 1e-12);
            assert!(rep.max_contraction() <= 0.5 + 1e-9);
            assert!(rep.preimage_norm <= cert.radius_preimage);
        }
    }

    #[test]
    fn psi_inverse_preserves_invertibility() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut seen = 0;
        while seen < 10 {
            let m = random_diag_model(&mut rng, 2);
            let Ok(cert) = psi_certificate(&m) else { continue };
            let w = Element::from_diag(&[c(0.9 * cert.radius_onto), Complex64::new(0.0, -0.5 * cert.radius_onto)]);
            let (b, rep) = invert_psi(&m, &w, 1e-12).unwrap();
            assert!(rep.certified);
            assert!(rep.max_contraction() <= cert.contraction_bound() + 1e-9);
            assert!(rep.final_residual <= 1e-12);
            assert!(m.context().is_invertible_in_b(&b).unwrap());
            seen += 1;
        }
    }

    #[test]
    fn psi_needs_invertible_mean() {
        let m = ConcreteModel::new(AlgebraContext::diagonal(2), Element::from_real_diag(&[1.0, 0.0])).unwrap();
        let w = Element::from_real_diag(&[0.01, 0.01]);
        assert_eq!(invert_psi(&m, &w, DEFAULT_TOL).unwrap_err(), Error::ExpectationNotInvertible);
    }

    #[test]
    fn truncated_model_inverts() {
        let a = Element::from_diag(&[c(0.7), c(-0.4)]);
        let t = TruncatedModel::new(BDist::from_matrix(&a, 6).unwrap());
        let cert = g_certificate(&t);
        let w = Element::from_diag(&[c(0.5 * cert.radius_onto), c(-0.3 * cert.radius_onto)]);
        let (b, rep) = invert_g(&t, &w, 1e-13).unwrap();
        assert!(rep.converged);
        assert!((&t.eval_g(&b).unwrap() - &w).op_norm() <= 1e-13);
    }
}
