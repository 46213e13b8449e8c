//! `g_a`, `Ψ_a`, their derivatives, the R- and S-transforms, and the
//! identities relating them.

use serde::{Deserialize, Serialize};

use super::fixed_point::{g_certificate, invert_g, invert_psi, psi_certificate, FixedPointReport};
use super::model::{ConcreteModel, ElementModel};
use crate::balg::Element;
use crate::error::{Error, Result};

/// Fixed-point tolerance used inside the identity checks, so that solver
/// error stays far below the residual being tested.
pub const CHECK_SOLVER_TOL: f64 = 1e-15;

pub fn g_transform(model: &dyn ElementModel, b: &Element) -> Result<Element> {
    model.eval_g(b)
}

pub fn psi_transform(model: &dyn ElementModel, b: &Element) -> Result<Element> {
    model.eval_psi(b)
}

/// `Dg_a(b)h = E((1−ba)⁻¹ h (1−ab)⁻¹)`.
pub fn dg(model: &ConcreteModel, b: &Element, h: &Element) -> Result<Element> {
    model.check_arg(b)?;
    let ctx = model.context();
    ctx.ensure_in_b(h)?;
    let left = model.left_resolvent(b)?;
    let right = model.right_resolvent(b)?;
    ctx.cond_expect(&left.mat_mul(h)?.mat_mul(&right)?)
}

/// `DΨ_a(b)h = E((1−ba)⁻¹ h a (1−ba)⁻¹)`.
pub fn dpsi(model: &ConcreteModel, b: &Element, h: &Element) -> Result<Element> {
    model.check_arg(b)?;
    let ctx = model.context();
    ctx.ensure_in_b(h)?;
    let left = model.left_resolvent(b)?;
    ctx.cond_expect(&left.mat_mul(h)?.mat_mul(model.a())?.mat_mul(&left)?)
}

/// Bound on `‖Dg_a(b) − Dg_a(0)‖`: `α(2−α)/(1−α)²` with `α = ‖b‖‖a‖`.
pub fn dg_bound(alpha: f64) -> f64 {
    alpha * (2.0 - alpha) / ((1.0 - alpha) * (1.0 - alpha))
}

/// Bound on `‖DΨ_a(b) − DΨ_a(0)‖`: `‖b‖‖a‖²(2−α)/(1−α)²`.
pub fn dpsi_bound(norm_b: f64, norm_a: f64) -> f64 {
    norm_a * dg_bound(norm_b * norm_a)
}

/// Which formula produces `R_a(w)` from `b = g_a⁻¹(w)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RPath {
    /// `E(a(1−ba)⁻¹) · E((1−ba)⁻¹)⁻¹`; defined for every `w` in the ball.
    Regular,
    /// `b⁻¹ − w⁻¹`; needs `w` invertible in `B`.
    Inverse,
}

/// A transform value with the inversion trace behind it.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformValue {
    pub value: Element,
    pub report: FixedPointReport,
    /// `false` when `B` is non-commutative, where the S-transform carries no
    /// theorem-level guarantee.
    pub theorem_grade: bool,
}

/// `R_a(w)` by the regular formula.
pub fn r_transform(model: &dyn ElementModel, w: &Element, tol: f64) -> Result<Element> {
    Ok(r_transform_via(model, w, tol, RPath::Regular)?.value)
}

pub fn r_transform_via(model: &dyn ElementModel, w: &Element, tol: f64, path: RPath) -> Result<TransformValue> {
    let ctx = model.context();
    let cert = g_certificate(model);
    let wn = w.op_norm();
    if wn >= cert.radius_onto {
        return Err(Error::OutOfCertifiedDomain { norm: wn, radius: cert.radius_onto });
    }
    let value;
    let report;
    match path {
        RPath::Regular => {
            let (b, rep) = invert_g(model, w, tol * wn.min(1.0))?;
            // E((1−ba)⁻¹) = 1 + Ψ(b)
            let denom = &model.eval_psi(&b)? + &Element::identity(ctx.ambient_dim());
            value = model.eval_a_resolvent(&b)?.mat_mul(&ctx.inverse_in_b(&denom)?)?;
            report = rep;
        }
        RPath::Inverse => {
            let w_inv = ctx.inverse_in_b(w)?;
            // an error δ in b becomes roughly ‖w⁻¹‖²δ in b⁻¹
            let n_inv = w_inv.op_norm();
            let (b, rep) = invert_g(model, w, tol * wn.min(1.0).min(1.0 / (n_inv * n_inv)))?;
            value = ctx.inverse_in_b(&b)?.try_sub(&w_inv)?;
            report = rep;
        }
    }
    Ok(TransformValue { value, report, theorem_grade: true })
}

/// `S_a(w) = w⁻¹(1+w)Ψ_a⁻¹(w)`.
pub fn s_transform(model: &dyn ElementModel, w: &Element, tol: f64) -> Result<Element> {
    Ok(s_transform_detailed(model, w, tol)?.value)
}

pub fn s_transform_detailed(model: &dyn ElementModel, w: &Element, tol: f64) -> Result<TransformValue> {
    let ctx = model.context();
    let cert = psi_certificate(model)?;
    let w_inv = ctx.inverse_in_b(w).map_err(|_| Error::NotInvertibleInB)?;
    let wn = w.op_norm();
    if wn >= cert.radius_onto {
        return Err(Error::OutOfCertifiedDomain { norm: wn, radius: cert.radius_onto });
    }
    let (b, report) = invert_psi(model, w, tol * wn.min(1.0))?;
    let one_plus_w = &Element::identity(ctx.ambient_dim()) + w;
    let value = w_inv.mat_mul(&one_plus_w)?.mat_mul(&b)?;
    Ok(TransformValue { value, report, theorem_grade: ctx.is_commutative() })
}

/// Residuals of `g(b)R(g(b)) = Ψ(b)` and `Ψ(b)S(Ψ(b)) = g(b)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RsReport {
    pub r_residual: f64,
    pub s_residual: f64,
    pub passed: bool,
}

pub fn check_rs_relation(model: &dyn ElementModel, b: &Element, tol: f64) -> Result<RsReport> {
    psi_certificate(model)?;
    let g = model.eval_g(b)?;
    let psi = model.eval_psi(b)?;
    let r = r_transform(model, &g, CHECK_SOLVER_TOL)?;
    let s = s_transform(model, &psi, CHECK_SOLVER_TOL)?;
    let r_residual = g.mat_mul(&r)?.try_sub(&psi)?.op_norm();
    let s_residual = psi.mat_mul(&s)?.try_sub(&g)?.op_norm();
    let scale = f64::max(1.0, g.op_norm());
    Ok(RsReport { r_residual, s_residual, passed: r_residual <= tol * scale && s_residual <= tol * scale })
}

/// Residuals of `Ψ_{za}(b) = Ψ_a(bz)`, `S_{za}(b) = S_a(b)S_z(b)` and
/// `S_z(b) = z⁻¹`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DilationReport {
    pub psi_residual: f64,
    pub s_residual: f64,
    pub s_z_residual: f64,
    pub passed: bool,
}

pub fn check_dilation(model: &ConcreteModel, z: &Element, b: &Element, tol: f64) -> Result<DilationReport> {
    let ctx = *model.context();
    let z_inv = ctx.inverse_in_b(z).map_err(|_| Error::NotInvertibleInB)?;
    let za = ConcreteModel::new(ctx, z.mat_mul(model.a())?)?;
    let z_model = ConcreteModel::new(ctx, z.clone())?;

    let psi_residual = za.eval_psi(b)?.try_sub(&model.eval_psi(&b.mat_mul(z)?)?)?.op_norm();
    let s_za = s_transform(&za, b, CHECK_SOLVER_TOL)?;
    let s_a = s_transform(model, b, CHECK_SOLVER_TOL)?;
    let s_z = s_transform(&z_model, b, CHECK_SOLVER_TOL)?;
    let s_residual = s_za.try_sub(&s_a.mat_mul(&s_z)?)?.op_norm();
    let s_z_residual = s_z.try_sub(&z_inv)?.op_norm();
    let scale = f64::max(1.0, s_za.op_norm());
    let passed = psi_residual <= tol * scale && s_residual <= tol * scale && s_z_residual <= tol * scale;
    Ok(DilationReport { psi_residual, s_residual, s_z_residual, passed })
}

/// `‖R_{sum}(w) − R₁(w) − R₂(w)‖`; vanishes when `model_sum` is the free sum.
pub fn additivity_check(
    model1: &dyn ElementModel,
    model2: &dyn ElementModel,
    model_sum: &dyn ElementModel,
    w: &Element,
    tol: f64,
) -> Result<f64> {
    let r1 = r_transform(model1, w, tol)?;
    let r2 = r_transform(model2, w, tol)?;
    let rs = r_transform(model_sum, w, tol)?;
    Ok(rs.try_sub(&r1)?.try_sub(&r2)?.op_norm())
}

/// `‖S_{prod}(w) − S₁(w)S₂(w)‖` over a commutative `B`.
pub fn multiplicativity_check(
    model1: &dyn ElementModel,
    model2: &dyn ElementModel,
    model_prod: &dyn ElementModel,
    w: &Element,
    tol: f64,
) -> Result<f64> {
    if !model_prod.context().is_commutative() {
        return Err(Error::NonCommutative);
    }
    let s1 = s_transform(model1, w, tol)?;
    let s2 = s_transform(model2, w, tol)?;
    let sp = s_transform(model_prod, w, tol)?;
    Ok(sp.try_sub(&s1.mat_mul(&s2)?)?.op_norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::balg::AlgebraContext;
    use crate::freedist::{free_join, prod_dist, sum_dist, BDist};
    use crate::nccomb::CumulantFamily;
    use crate::transforms::model::TruncatedModel;
    use crate::transforms::DEFAULT_TOL;
    use num_complex::Complex64;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn scalar_model(z: Complex64) -> ConcreteModel {
        ConcreteModel::new(AlgebraContext::scalar(1), Element::scalar(1, z)).unwrap()
    }

    fn random_matrix(rng: &mut ChaCha8Rng, m: usize) -> Element {
        let a = Element::from_fn(m, |_, _| c(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0)));
        a.scale_real(1.0 / a.op_norm())
    }

    fn random_diag(rng: &mut ChaCha8Rng, m: usize, lo: f64, hi: f64) -> Element {
        let v: Vec<Complex64> = (0..m)
            .map(|_| Complex64::from_polar(rng.random_range(lo..hi), rng.random_range(0.0..std::f64::consts::TAU)))
            .collect();
        Element::from_diag(&v)
    }

    #[test]
    fn derivatives_at_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let ctx = AlgebraContext::diagonal(3);
        let m = ConcreteModel::new(ctx, random_matrix(&mut rng, 3)).unwrap();
        let h = random_diag(&mut rng, 3, 0.5, 1.0);
        let zero = Element::zeros(3);
        assert!((&dg(&m, &zero, &h).unwrap() - &h).op_norm() < 1e-14);
        let want = h.mat_mul(&m.expectation_of_a()).unwrap();
        assert!((&dpsi(&m, &zero, &h).unwrap() - &want).op_norm() < 1e-14);
        let m0 = ConcreteModel::new(ctx, Element::zeros(3)).unwrap();
        assert!(dpsi(&m0, &h.scale_real(0.1), &h).unwrap().is_zero());
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let ctx = AlgebraContext::block_tensor(2, 2);
        for _ in 0..5 {
            let m = ConcreteModel::new(ctx, random_matrix(&mut rng, 4)).unwrap();
            let b = ctx.expand(&random_matrix(&mut rng, 2)).scale_real(0.5);
            let h = ctx.expand(&random_matrix(&mut rng, 2));
            let t = 1e-5;
            let fd = |f: &dyn Fn(&Element) -> Result<Element>| {
                let p = f(&(&b + &h.scale_real(t))).unwrap();
                let q = f(&(&b - &h.scale_real(t))).unwrap();
                (&p - &q).scale_real(0.5 / t)
            };
            let eg = (&fd(&|x| m.eval_g(x)) - &dg(&m, &b, &h).unwrap()).op_norm();
            let ep = (&fd(&|x| m.eval_psi(x)) - &dpsi(&m, &b, &h).unwrap()).op_norm();
            assert!(eg < 1e-8 && ep < 1e-8, "{eg} {ep}");
        }
    }

    #[test]
    fn delta_mass_transforms() {
        for cv in [c(0.7, 0.0), c(-1.3, 0.4), c(2.0, -1.0)] {
            let m = scalar_model(cv);
            let radius = psi_certificate(&m).unwrap().radius_onto.min(g_certificate(&m).radius_onto);
            let w = Element::scalar(1, c(0.5 * radius, 0.2 * radius));
            let r = r_transform(&m, &w, 1e-13).unwrap();
            assert!((r.get(0, 0) - cv).norm() < 1e-12);
            let s = s_transform(&m, &w, 1e-13).unwrap();
            assert!((s.get(0, 0) - 1.0 / cv).norm() < 1e-12);
        }
        let one = scalar_model(c(1.0, 0.0));
        let s = s_transform(&one, &Element::scalar(1, c(0.03, 0.0)), 1e-13).unwrap();
        assert!((s.get(0, 0) - c(1.0, 0.0)).norm() < 1e-13);
    }

    #[test]
    fn r_of_zero_element_vanishes() {
        let m = ConcreteModel::new(AlgebraContext::diagonal(2), Element::zeros(2)).unwrap();
        let w = Element::from_real_diag(&[0.3, -0.1]);
        assert!(r_transform(&m, &w, DEFAULT_TOL).unwrap().op_norm() < 1e-15);
    }

    #[test]
    fn coordinatewise_s_transform() {
        let ctx = AlgebraContext::diagonal(2);
        let a = Element::from_real_diag(&[0.8, -0.5]);
        let m = ConcreteModel::new(ctx, a).unwrap();
        let radius = psi_certificate(&m).unwrap().radius_onto;
        let w = Element::from_real_diag(&[0.4 * radius, -0.7 * radius]);
        let s = s_transform(&m, &w, 1e-13).unwrap();
        assert!((&s - &Element::from_real_diag(&[1.0 / 0.8, -1.0 / 0.5])).op_norm() < 1e-12);
    }

    #[test]
    fn r_paths_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let ctx = AlgebraContext::block_tensor(2, 2);
        for _ in 0..10 {
            let m = ConcreteModel::new(ctx, random_matrix(&mut rng, 4)).unwrap();
            let radius = g_certificate(&m).radius_onto;
            let w = ctx.expand(&random_matrix(&mut rng, 2)).scale_real(0.5 * radius);
            let r1 = r_transform_via(&m, &w, 1e-13, RPath::Regular).unwrap().value;
            let r2 = r_transform_via(&m, &w, 1e-13, RPath::Inverse).unwrap().value;
            assert!((&r1 - &r2).op_norm() < 1e-9);
        }
    }

    #[test]
    fn semicircle_r_is_identity_to_truncation_order() {
        let fam = CumulantFamily::semicircular(1, 6, 1.0);
        let t = TruncatedModel::new(BDist::from_cumulants(&fam, None).unwrap());
        let radius = g_certificate(&t).radius_onto;
        let w = Element::scalar(1, c(0.5 * radius, 0.0));
        let r = r_transform(&t, &w, 1e-14).unwrap();
        assert!((&r - &w).op_norm() < 40.0 * w.op_norm().powi(6));
    }

    #[test]
    fn rs_relation_on_block_tensor() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let ctx = AlgebraContext::block_tensor(2, 2);
        let mut done = 0;
        while done < 5 {
            let m = ConcreteModel::new(ctx, random_matrix(&mut rng, 4)).unwrap();
            let Ok(cert) = psi_certificate(&m) else { continue };
            let b = ctx.expand(&random_matrix(&mut rng, 2)).scale_real(0.3 * cert.radius_onto);
            let rep = check_rs_relation(&m, &b, 1e-12).unwrap();
            assert!(rep.r_residual <= 1e-9 && rep.s_residual <= 1e-9, "{rep:?}");
            done += 1;
        }
        let m0 = ConcreteModel::new(ctx, Element::zeros(4)).unwrap();
        assert_eq!(
            check_rs_relation(&m0, &Element::identity(4).scale_real(0.01), 1e-12),
            Err(Error::ExpectationNotInvertible)
        );
    }

    #[test]
    fn dilation_identities() {
        let ctx = AlgebraContext::scalar(1);
        let m = scalar_model(c(0.6, 0.0));
        let two = Element::scalar(1, c(2.0, 0.0));
        let radius =
            psi_certificate(&ConcreteModel::new(ctx, Element::scalar(1, c(1.2, 0.0))).unwrap()).unwrap().radius_onto;
        let b = Element::scalar(1, c(0.5 * radius, 0.0));
        let rep = check_dilation(&m, &two, &b, 1e-12).unwrap();
        assert!(rep.passed, "{rep:?}");
        let za = ConcreteModel::new(ctx, Element::scalar(1, c(1.2, 0.0))).unwrap();
        let s = s_transform(&za, &b, 1e-13).unwrap();
        assert!((s.get(0, 0) - c(1.0 / 1.2, 0.0)).norm() < 1e-12);
        let rep = check_dilation(&m, &Element::identity(1), &b, 1e-12).unwrap();
        assert!(rep.s_residual < 1e-13, "{rep:?}");
    }

    #[test]
    fn additivity_with_zero() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let ctx = AlgebraContext::diagonal(2);
        let a = random_matrix(&mut rng, 2);
        let m1 = ConcreteModel::new(ctx, a.clone()).unwrap();
        let m2 = ConcreteModel::new(ctx, Element::zeros(2)).unwrap();
        let w = Element::from_real_diag(&[0.02, -0.03]);
        assert!(additivity_check(&m1, &m2, &m1, &w, 1e-13).unwrap() < 1e-14);
    }

    #[test]
    fn free_semicirculars_add() {
        let fam = CumulantFamily::semicircular(2, 6, 1.0);
        let x = BDist::from_cumulants(&fam, None).unwrap();
        let sum = sum_dist(&free_join(&x, &x).unwrap()).unwrap();
        let (tx, ts) = (TruncatedModel::new(x), TruncatedModel::new(sum));
        let radius = g_certificate(&ts).radius_onto;
        let w = Element::from_real_diag(&[0.3 * radius, -0.2 * radius]);
        let rs = r_transform(&ts, &w, 1e-14).unwrap();
        assert!((&rs - &w.scale_real(2.0)).op_norm() < 1e-10);
        assert!(additivity_check(&tx, &tx, &ts, &w, 1e-14).unwrap() < 1e-10);
    }

    #[test]
    fn multiplicativity_with_unit() {
        let a = Element::from_diag(&[c(0.9, 0.1), c(-0.6, 0.0)]);
        let x = BDist::from_matrix(&a, 6).unwrap();
        let one = BDist::delta(&[c(1.0, 0.0), c(1.0, 0.0)], 6).unwrap();
        let p = prod_dist(&free_join(&x, &one).unwrap(), 3).unwrap();
        for n in 1..=3 {
            assert!(p.moment(n).max_abs_diff(x.moment(n)) < 1e-14);
        }
        // the exact unit, since a truncated δ₁ has S = 1 + O(w³)
        let unit = ConcreteModel::new(AlgebraContext::diagonal(2), Element::identity(2)).unwrap();
        let (tx, tp) = (TruncatedModel::new(x.truncated(3)), TruncatedModel::new(p));
        let radius = psi_certificate(&tp).unwrap().radius_onto.min(1.0 / 11.0);
        let w = Element::from_real_diag(&[0.2 * radius, 0.3 * radius]);
        let res = multiplicativity_check(&tx, &unit, &tp, &w, 1e-14).unwrap();
        assert!(res < 1e-13, "{res}");
        let full = ConcreteModel::new(AlgebraContext::full(2), a).unwrap();
        assert_eq!(multiplicativity_check(&full, &full, &full, &w, 1e-12), Err(Error::NonCommutative));
    }
}
