//! Seeded random elements for tests, benches and the check suites.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::balg::{AlgebraContext, Element, SubalgebraKind};

/// Smallest singular value allowed relative to the largest for elements
/// sampled as invertible.
pub const INVERTIBILITY_FLOOR: f64 = 0.1;

pub fn complex_gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

/// An `m × m` matrix with independent complex Gaussian entries, rescaled to
/// spectral norm `norm`.
pub fn random_element<R: Rng + ?Sized>(rng: &mut R, m: usize, norm: f64) -> Element {
    loop {
        let x = Element::from_fn(m, |_, _| complex_gaussian(rng));
        let n = x.op_norm();
        if n > 0.0 {
            return x.scale_real(norm / n);
        }
    }
}

/// A random element of `B` with spectral norm `norm`.
pub fn random_in_b<R: Rng + ?Sized>(rng: &mut R, ctx: &AlgebraContext, norm: f64) -> Element {
    let m = ctx.ambient_dim();
    let x = match ctx.kind() {
        SubalgebraKind::Full => random_element(rng, m, 1.0),
        SubalgebraKind::Scalar => Element::scalar(m, complex_gaussian(rng)),
        SubalgebraKind::Diagonal => Element::from_diag(&(0..m).map(|_| complex_gaussian(rng)).collect::<Vec<_>>()),
        SubalgebraKind::BlockTensor { k, .. } => ctx.expand(&random_element(rng, k, 1.0)),
    };
    let n = x.op_norm();
    if n == 0.0 {
        return Element::identity(m).scale_real(norm);
    }
    x.scale_real(norm / n)
}

/// A random invertible element of `B` with spectral norm `norm` whose
/// smallest singular value is at least `INVERTIBILITY_FLOOR · norm`.
pub fn random_invertible_in_b<R: Rng + ?Sized>(rng: &mut R, ctx: &AlgebraContext, norm: f64) -> Element {
    let m = ctx.ambient_dim();
    match ctx.kind() {
        SubalgebraKind::Scalar => {
            let phase = rng.random_range(0.0..std::f64::consts::TAU);
            Element::scalar(m, Complex64::from_polar(norm, phase))
        }
        SubalgebraKind::Diagonal => {
            let mut v: Vec<Complex64> = (0..m)
                .map(|_| {
                    let r = rng.random_range(INVERTIBILITY_FLOOR..=1.0);
                    Complex64::from_polar(r, rng.random_range(0.0..std::f64::consts::TAU))
                })
                .collect();
            // pin the largest modulus to exactly 1
            let top = v.iter().map(|z| z.norm()).fold(0.0, f64::max);
            for z in &mut v {
                *z *= norm / top;
            }
            Element::from_diag(&v)
        }
        SubalgebraKind::BlockTensor { .. } | SubalgebraKind::Full => loop {
            let x = random_in_b(rng, ctx, norm);
            if let Ok(inv) = ctx.inverse_in_b(&x) {
                if inv.op_norm() * norm * INVERTIBILITY_FLOOR <= 1.0 {
                    return x;
                }
            }
        },
    }
}

/// A unit vector of `ℂ^d` with uniformly random phases.
pub fn random_phases<R: Rng + ?Sized>(rng: &mut R, d: usize) -> Vec<Complex64> {
    (0..d).map(|_| Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU))).collect()
}
