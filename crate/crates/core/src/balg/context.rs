//! Subalgebras `B ⊂ A` and their conditional expectations.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::element::Element;
use crate::error::{Error, Result};

/// Membership tolerance for `E(b) = b`, relative to `max(1, ‖b‖)`.
pub const MEMBERSHIP_TOL: f64 = 1e-10;

/// Which unital subalgebra of `M_m(ℂ)` plays the role of `B`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubalgebraKind {
    /// `ℂ·1`, expectation = normalized trace.
    Scalar,
    /// Diagonal matrices, expectation = diagonal pinching.
    Diagonal,
    /// `M_k ⊗ 1_d`, expectation = normalized partial trace over the `d` factor.
    BlockTensor { k: usize, d: usize },
    /// All of `A`, expectation = identity.
    Full,
}

impl SubalgebraKind {
    /// Whether `B` is commutative.
    pub fn is_commutative(&self) -> bool {
        match *self {
            SubalgebraKind::Scalar | SubalgebraKind::Diagonal => true,
            SubalgebraKind::BlockTensor { k, .. } => k == 1,
            SubalgebraKind::Full => false,
        }
    }
}

/// The triple `(A, B, E)` with `A = M_m(ℂ)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct AlgebraContext {
    ambient_dim: usize,
    kind: SubalgebraKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    /// `(1 − b a)⁻¹`
    Left,
    /// `(1 − a b)⁻¹`
    Right,
}

impl AlgebraContext {
    pub fn new(ambient_dim: usize, kind: SubalgebraKind) -> Result<Self> {
        if ambient_dim == 0 {
            return Err(Error::BadSubalgebra("ambient dimension must be positive".into()));
        }
        if let SubalgebraKind::BlockTensor { k, d } = kind {
            if k == 0 || d == 0 || k * d != ambient_dim {
                return Err(Error::BadSubalgebra(format!(
                    "block tensor {k}x{d} does not factor ambient dimension {ambient_dim}"
                )));
            }
        }
        Ok(AlgebraContext { ambient_dim, kind })
    }

    pub fn scalar(m: usize) -> Self {
        Self::new(m, SubalgebraKind::Scalar).expect("positive dimension")
    }

    pub fn diagonal(m: usize) -> Self {
        Self::new(m, SubalgebraKind::Diagonal).expect("positive dimension")
    }

    pub fn block_tensor(k: usize, d: usize) -> Self {
        Self::new(k * d, SubalgebraKind::BlockTensor { k, d }).expect("positive factors")
    }

    pub fn full(m: usize) -> Self {
        Self::new(m, SubalgebraKind::Full).expect("positive dimension")
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient_dim
    }

    pub fn kind(&self) -> SubalgebraKind {
        self.kind
    }

    pub fn is_commutative(&self) -> bool {
        self.kind.is_commutative()
    }

    fn check_dim(&self, x: &Element) -> Result<()> {
        if x.dim() != self.ambient_dim {
            return Err(Error::DimMismatch { expected: self.ambient_dim, found: x.dim() });
        }
        Ok(())
    }

    /// The conditional expectation `E: A → B`.
    pub fn cond_expect(&self, x: &Element) -> Result<Element> {
        self.check_dim(x)?;
        let m = self.ambient_dim;
        Ok(match self.kind {
            SubalgebraKind::Full => x.clone(),
            SubalgebraKind::Scalar => Element::scalar(m, x.trace() / m as f64),
            SubalgebraKind::Diagonal => Element::from_diag(&x.diag()),
            SubalgebraKind::BlockTensor { k, d } => {
                let block = partial_trace(x, k, d);
                embed_block(&block, k, d)
            }
        })
    }

    /// Distance `‖E(b) − b‖` from `b` to the subalgebra.
    pub fn distance_to_b(&self, b: &Element) -> Result<f64> {
        let eb = self.cond_expect(b)?;
        Ok((&eb - b).op_norm())
    }

    /// Fails with `NotInSubalgebra` unless `E(b) = b` to tolerance.
    pub fn ensure_in_b(&self, b: &Element) -> Result<()> {
        let eb = self.cond_expect(b)?;
        let distance = (&eb - b).max_abs();
        if distance > MEMBERSHIP_TOL * f64::max(1.0, b.max_abs()) {
            return Err(Error::NotInSubalgebra { distance });
        }
        Ok(())
    }

    /// The `k×k` coordinate block of an element of `B`. For `Scalar` this is
    /// `1×1`, for `Diagonal` and `Full` it is the element itself.
    pub fn compress(&self, b: &Element) -> Element {
        match self.kind {
            SubalgebraKind::Scalar => Element::scalar(1, b.get(0, 0)),
            SubalgebraKind::Diagonal | SubalgebraKind::Full => b.clone(),
            SubalgebraKind::BlockTensor { k, d } => Element::from_fn(k, |i, j| b.get(i * d, j * d)),
        }
    }

    /// Inverse of `compress`.
    pub fn expand(&self, block: &Element) -> Element {
        match self.kind {
            SubalgebraKind::Scalar => Element::scalar(self.ambient_dim, block.get(0, 0)),
            SubalgebraKind::Diagonal | SubalgebraKind::Full => block.clone(),
            SubalgebraKind::BlockTensor { k, d } => embed_block(block, k, d),
        }
    }

    /// Whether `b ∈ B` is invertible within `B`.
    pub fn is_invertible_in_b(&self, b: &Element) -> Result<bool> {
        self.ensure_in_b(b)?;
        Ok(self.inverse_in_b(b).is_ok())
    }

    /// Inverse of `b` computed inside `B`.
    pub fn inverse_in_b(&self, b: &Element) -> Result<Element> {
        self.check_dim(b)?;
        let scale = b.max_abs();
        let threshold = super::element::PIVOT_THRESHOLD * scale;
        match self.kind {
            SubalgebraKind::Scalar | SubalgebraKind::Diagonal => {
                let diag =
                    if self.kind == SubalgebraKind::Scalar { vec![b.get(0, 0); self.ambient_dim] } else { b.diag() };
                let mut inv = Vec::with_capacity(diag.len());
                for z in diag {
                    if z.norm() <= threshold || z.norm() == 0.0 {
                        return Err(Error::Singular { pivot: z.norm(), threshold });
                    }
                    inv.push(Complex64::new(1.0, 0.0) / z);
                }
                Ok(Element::from_diag(&inv))
            }
            SubalgebraKind::BlockTensor { .. } | SubalgebraKind::Full => {
                let block = self.compress(b);
                Ok(self.expand(&block.mat_inv()?))
            }
        }
    }

    /// `(1 − ba)⁻¹` for `Side::Left`, `(1 − ab)⁻¹` for `Side::Right`.
    pub fn resolvent(&self, a: &Element, b: &Element, side: Side) -> Result<Element> {
        self.check_dim(a)?;
        self.check_dim(b)?;
        resolvent(a, b, side)
    }
}

/// `(1 − ba)⁻¹` or `(1 − ab)⁻¹` by direct LU inversion.
pub fn resolvent(a: &Element, b: &Element, side: Side) -> Result<Element> {
    let prod = match side {
        Side::Left => b.mat_mul(a)?,
        Side::Right => a.mat_mul(b)?,
    };
    prod.one_minus().mat_inv()
}

/// `tr_d` applied blockwise, normalized: `E(x)_{ij} = tr(X_{ij}) / d`.
fn partial_trace(x: &Element, k: usize, d: usize) -> Element {
    Element::from_fn(k, |i, j| {
        let s: Complex64 = (0..d).map(|p| x.get(i * d + p, j * d + p)).sum();
        s / d as f64
    })
}

/// `block ⊗ 1_d`.
fn embed_block(block: &Element, k: usize, d: usize) -> Element {
    Element::from_fn(k * d, |r, c| if r % d == c % d { block.get(r / d, c / d) } else { Complex64::new(0.0, 0.0) })
}

/// Transform tag carried by a `DomainCertificate`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TransformTag {
    G,
    Psi,
}

/// The explicit balls on which `g_a` (resp. `Ψ_a`) is injective, onto, and
/// where the preimage of the onto-ball lies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DomainCertificate {
    pub norm_a: f64,
    pub radius_inject: f64,
    pub radius_onto: f64,
    pub radius_preimage: f64,
    pub transform_tag: TransformTag,
}

impl DomainCertificate {
    /// Radii `1/(4‖a‖)`, `1/(11‖a‖)`, `2/(11‖a‖)`.
    pub fn for_g(norm_a: f64) -> Self {
        DomainCertificate {
            norm_a,
            radius_inject: 1.0 / (4.0 * norm_a),
            radius_onto: 1.0 / (11.0 * norm_a),
            radius_preimage: 2.0 / (11.0 * norm_a),
            transform_tag: TransformTag::G,
        }
    }

    /// Radii `1/(4‖a‖²ν)`, `1/(11‖a‖²ν²)`, `2/(11‖a‖²ν)` with `ν = ‖E(a)⁻¹‖`.
    pub fn for_psi(norm_a: f64, norm_inv_ea: f64) -> Self {
        let n2 = norm_a * norm_a;
        DomainCertificate {
            norm_a,
            radius_inject: 1.0 / (4.0 * n2 * norm_inv_ea),
            radius_onto: 1.0 / (11.0 * n2 * norm_inv_ea * norm_inv_ea),
            radius_preimage: 2.0 / (11.0 * n2 * norm_inv_ea),
            transform_tag: TransformTag::Psi,
        }
    }

    /// Bound on every contraction ratio of the fixed-point map inside the
    /// certificate: `α(2−α)/(1−α)²` at `α = 2/11`.
    pub fn contraction_bound(&self) -> f64 {
        40.0 / 81.0
    }
}
