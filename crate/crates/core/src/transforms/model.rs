//! Two ways of evaluating `g_a`, `Ψ_a` and `E(a(1−ba)⁻¹)`: exactly from a
//! matrix `a`, or as truncated series from a `BDist`.

use num_complex::Complex64;

use crate::balg::{AlgebraContext, Element, Side};
use crate::error::{Error, Result};
use crate::freedist::BDist;

/// Truncated models refuse arguments with `norm_bound · ‖b‖` above this.
pub const TRUNCATION_DOMAIN: f64 = 0.5;

/// The data a transform needs from the element `a`.
pub trait ElementModel: Sync {
    fn context(&self) -> &AlgebraContext;

    /// `‖a‖`, or a declared bound on it.
    fn norm_bound(&self) -> f64;

    /// `E(a)`.
    fn expectation_of_a(&self) -> Element;

    /// `g_a(b) = bE((1−ab)⁻¹)`.
    fn eval_g(&self, b: &Element) -> Result<Element>;

    /// `Ψ_a(b) = E((1−ba)⁻¹) − 1`.
    fn eval_psi(&self, b: &Element) -> Result<Element>;

    /// `E(a(1−ba)⁻¹)`.
    fn eval_a_resolvent(&self, b: &Element) -> Result<Element>;

    /// Order of the moment series behind the model; `None` when exact.
    fn truncation_order(&self) -> Option<usize> {
        None
    }
}

/// `a` given as a matrix in a concrete context; evaluation by exact
/// resolvents.
#[derive(Debug, Clone)]
pub struct ConcreteModel {
    ctx: AlgebraContext,
    a: Element,
    norm_a: f64,
    ea: Element,
}

impl ConcreteModel {
    pub fn new(ctx: AlgebraContext, a: Element) -> Result<Self> {
        let ea = ctx.cond_expect(&a)?;
        let norm_a = a.op_norm();
        Ok(ConcreteModel { ctx, a, norm_a, ea })
    }

    pub fn a(&self) -> &Element {
        &self.a
    }

    /// Checks `b ∈ B` and `‖b‖‖a‖ < 1`; returns `‖b‖`.
    pub(crate) fn check_arg(&self, b: &Element) -> Result<f64> {
        self.ctx.ensure_in_b(b)?;
        let nb = b.op_norm();
        if nb * self.norm_a >= 1.0 {
            return Err(Error::OutOfDomain { norm: nb, radius: 1.0 / self.norm_a });
        }
        Ok(nb)
    }

    pub(crate) fn left_resolvent(&self, b: &Element) -> Result<Element> {
        self.ctx.resolvent(&self.a, b, Side::Left)
    }

    pub(crate) fn right_resolvent(&self, b: &Element) -> Result<Element> {
        self.ctx.resolvent(&self.a, b, Side::Right)
    }

    /// The other form of `g_a`: `E((1−ba)⁻¹)b`.
    pub fn eval_g_left_form(&self, b: &Element) -> Result<Element> {
        self.check_arg(b)?;
        self.ctx.cond_expect(&self.left_resolvent(b)?)?.mat_mul(b)
    }
}

impl ElementModel for ConcreteModel {
    fn context(&self) -> &AlgebraContext {
        &self.ctx
    }

    fn norm_bound(&self) -> f64 {
        self.norm_a
    }

    fn expectation_of_a(&self) -> Element {
        self.ea.clone()
    }

    fn eval_g(&self, b: &Element) -> Result<Element> {
        self.check_arg(b)?;
        b.mat_mul(&self.ctx.cond_expect(&self.right_resolvent(b)?)?)
    }

    /// Evaluated as `bE(a(1−ba)⁻¹)`, which avoids cancelling against the 1
    /// in `E((1−ba)⁻¹) − 1` when `b` is small.
    fn eval_psi(&self, b: &Element) -> Result<Element> {
        b.mat_mul(&self.eval_a_resolvent(b)?)
    }

    fn eval_a_resolvent(&self, b: &Element) -> Result<Element> {
        self.check_arg(b)?;
        self.ctx.cond_expect(&self.a.mat_mul(&self.left_resolvent(b)?)?)
    }
}

/// `a` known only through its first `N` moment maps over diagonal `B`.
///
/// In diagonal coordinates (`⊙` the coordinatewise product):
/// `g(b) = b + Σ_{n≤N} b ⊙ M_n(b,…,b) ⊙ b`, `Ψ(b) = Σ_{n≤N} b ⊙ M_n(b,…,b)`
/// and `E(a(1−ba)⁻¹) = Σ_{n<N} M_{n+1}(b,…,b)`.
#[derive(Debug, Clone)]
pub struct TruncatedModel {
    dist: BDist,
    ctx: AlgebraContext,
}

impl TruncatedModel {
    pub fn new(dist: BDist) -> Self {
        let ctx = dist.context();
        TruncatedModel { dist, ctx }
    }

    pub fn dist(&self) -> &BDist {
        &self.dist
    }

    pub fn eval_moment_word(&self, inserts: &[&[Complex64]]) -> Result<Vec<Complex64>> {
        self.dist.eval_moment_word(inserts)
    }

    fn coords(&self, b: &Element) -> Result<Vec<Complex64>> {
        self.ctx.ensure_in_b(b)?;
        let nb = b.op_norm();
        let radius = TRUNCATION_DOMAIN / self.dist.norm_bound();
        if nb > radius {
            return Err(Error::OutOfDomain { norm: nb, radius });
        }
        Ok(b.diag())
    }

    /// `Σ_{n=1}^{N} M_n(b,…,b)`.
    fn moment_series(&self, b: &[Complex64]) -> Vec<Complex64> {
        let mut acc = vec![Complex64::new(0.0, 0.0); b.len()];
        for m in self.dist.moments() {
            for (s, z) in acc.iter_mut().zip(m.apply_uniform(b)) {
                *s += z;
            }
        }
        acc
    }
}

impl ElementModel for TruncatedModel {
    fn context(&self) -> &AlgebraContext {
        &self.ctx
    }

    fn norm_bound(&self) -> f64 {
        self.dist.norm_bound()
    }

    fn expectation_of_a(&self) -> Element {
        Element::from_diag(&self.dist.mean())
    }

    fn eval_g(&self, b: &Element) -> Result<Element> {
        let v = self.coords(b)?;
        let s = self.moment_series(&v);
        let out: Vec<Complex64> = v.iter().zip(&s).map(|(&x, &m)| x + x * m * x).collect();
        Ok(Element::from_diag(&out))
    }

    fn eval_psi(&self, b: &Element) -> Result<Element> {
        let v = self.coords(b)?;
        let s = self.moment_series(&v);
        let out: Vec<Complex64> = v.iter().zip(&s).map(|(&x, &m)| x * m).collect();
        Ok(Element::from_diag(&out))
    }

    fn eval_a_resolvent(&self, b: &Element) -> Result<Element> {
        let v = self.coords(b)?;
        Ok(Element::from_diag(&self.moment_series(&v)))
    }

    fn truncation_order(&self) -> Option<usize> {
        Some(self.dist.order())
    }
}
