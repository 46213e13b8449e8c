//! B-valued free cumulants over a diagonal (commutative) `B ≅ ℂ^d`.
//!
//! A partition `π ∈ NC(n)` acts on the word `a b₁ a b₂ ⋯ b_{n−1} a`: each
//! block evaluates its cumulant on the insertions between its legs, and the
//! value of a nested block is multiplied into the insertion slot of the block
//! that encloses it. Insertion `i` sits between legs `i` and `i+1`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::partition::{compositions, enumerate_nc, interval_refinements, NCPartition};
use super::tensor::{basis, check_shape, hadamard, unflatten, MultilinearTensor, MAX_ORDER};
use crate::error::{Error, Result};
use crate::freedist::BDist;

/// Largest `r` accepted by [`lemma31_check`].
pub const MAX_LEMMA_ORDER: usize = 7;

const C1: Complex64 = Complex64::new(1.0, 0.0);

/// Cumulant maps `κ_1, …, κ_N` of a single variable over diagonal `B`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CumulantFamily {
    d: usize,
    cumulants: Vec<MultilinearTensor>,
}

impl CumulantFamily {
    /// `cumulants[n−1]` must have order `n`.
    pub fn new(d: usize, cumulants: Vec<MultilinearTensor>) -> Result<Self> {
        check_shape(d)?;
        if cumulants.len() > MAX_ORDER {
            return Err(Error::OrderExceeded { requested: cumulants.len(), available: MAX_ORDER });
        }
        for (i, k) in cumulants.iter().enumerate() {
            if k.d() != d || k.order() != i + 1 {
                return Err(Error::ShapeMismatch(format!(
                    "cumulant {} has shape (d={}, order={})",
                    i + 1,
                    k.d(),
                    k.order()
                )));
            }
        }
        Ok(CumulantFamily { d, cumulants })
    }

    pub fn zeros(d: usize, order: usize) -> Self {
        CumulantFamily { d, cumulants: (1..=order).map(|n| MultilinearTensor::zeros(d, n)).collect() }
    }

    /// The family with only `κ₂ = scale · (coordinatewise product)`, a
    /// semicircular element.
    pub fn semicircular(d: usize, order: usize, variance: f64) -> Self {
        let mut fam = Self::zeros(d, order);
        if order >= 2 {
            fam.cumulants[1] = MultilinearTensor::from_fn(d, 2, |i, j| {
                if i == j[0] {
                    Complex64::new(variance, 0.0)
                } else {
                    Complex64::new(0.0, 0.0)
                }
            });
        }
        fam
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn order(&self) -> usize {
        self.cumulants.len()
    }

    /// `κ_n` for `1 ≤ n ≤ order`.
    pub fn kappa(&self, n: usize) -> &MultilinearTensor {
        &self.cumulants[n - 1]
    }

    pub fn kappa_mut(&mut self, n: usize) -> &mut MultilinearTensor {
        &mut self.cumulants[n - 1]
    }

    pub fn tensors(&self) -> &[MultilinearTensor] {
        &self.cumulants
    }

    /// First cumulant as a vector (`E(a)` in coordinates).
    pub fn first(&self) -> Vec<Complex64> {
        self.cumulants.first().map(|k| k.data().to_vec()).unwrap_or_else(|| vec![Complex64::new(0.0, 0.0); self.d])
    }

    pub fn max_abs_diff(&self, other: &CumulantFamily) -> f64 {
        self.cumulants.iter().zip(&other.cumulants).map(|(x, y)| x.max_abs_diff(y)).fold(0.0, f64::max)
    }

    /// Keep only `κ_1, …, κ_order`.
    pub fn truncated(&self, order: usize) -> CumulantFamily {
        CumulantFamily { d: self.d, cumulants: self.cumulants[..order.min(self.order())].to_vec() }
    }
}

/// Nested evaluation of a partition on the word `a b₁ a ⋯ b_{n−1} a`.
///
/// `kappa(legs)` supplies the cumulant map for a block, or `None` when that
/// block's cumulant vanishes (which zeroes the whole term).
pub(crate) fn eval_nested<'k>(
    p: &NCPartition,
    inserts: &[&[Complex64]],
    d: usize,
    kappa: &dyn Fn(&[usize]) -> Option<&'k MultilinearTensor>,
) -> Vec<Complex64> {
    let mut maps = Vec::with_capacity(p.blocks().len());
    for legs in p.blocks() {
        match kappa(legs) {
            Some(t) => maps.push(t),
            None => return vec![Complex64::new(0.0, 0.0); d],
        }
    }
    let ev = Nested { p, inserts, maps, d };
    if p.n() == 0 {
        return vec![C1; d];
    }
    ev.segment(0, p.n() - 1)
}

struct Nested<'a, 'k> {
    p: &'a NCPartition,
    inserts: &'a [&'a [Complex64]],
    maps: Vec<&'k MultilinearTensor>,
    d: usize,
}

impl Nested<'_, '_> {
    /// Value of the sub-word `a_lo b_lo ⋯ b_{hi−1} a_hi`, a union of whole
    /// blocks.
    fn segment(&self, lo: usize, hi: usize) -> Vec<Complex64> {
        let mut acc = vec![C1; self.d];
        let mut pos = lo;
        while pos <= hi {
            let blk = self.p.block_of(pos);
            let last = *self.p.blocks()[blk].last().unwrap();
            acc = hadamard(&acc, &self.component(blk));
            if last < hi {
                acc = hadamard(&acc, self.inserts[last]);
            }
            pos = last + 1;
        }
        acc
    }

    fn component(&self, blk: usize) -> Vec<Complex64> {
        let legs = &self.p.blocks()[blk];
        let slots: Vec<Vec<Complex64>> = legs
            .windows(2)
            .map(|w| {
                let (l, r) = (w[0], w[1]);
                if r == l + 1 {
                    self.inserts[l].to_vec()
                } else {
                    let inner = self.segment(l + 1, r - 1);
                    hadamard(&hadamard(self.inserts[l], &inner), self.inserts[r - 1])
                }
            })
            .collect();
        let refs: Vec<&[Complex64]> = slots.iter().map(|s| s.as_slice()).collect();
        self.maps[blk].apply(&refs)
    }
}

/// `κ_π(a b₁ a ⋯ b_{n−1} a)` for `π ∈ NC(n)`.
pub fn kappa_pi_eval(fam: &CumulantFamily, p: &NCPartition, inserts: &[&[Complex64]]) -> Result<Vec<Complex64>> {
    if p.n() > fam.order() {
        return Err(Error::OrderExceeded { requested: p.n(), available: fam.order() });
    }
    if inserts.len() + 1 != p.n().max(1) {
        return Err(Error::ShapeMismatch(format!(
            "partition of {} points needs {} insertions, got {}",
            p.n(),
            p.n().saturating_sub(1),
            inserts.len()
        )));
    }
    Ok(eval_nested(p, inserts, fam.d(), &|legs| Some(fam.kappa(legs.len()))))
}

/// Tensor of the multilinear map `(b₁…b_{n−1}) ↦ Σ_π value(π, b)` computed
/// column by column on basis insertions.
pub(crate) fn tensor_from_partitions(
    d: usize,
    n: usize,
    mut value: impl FnMut(&[&[Complex64]]) -> Vec<Complex64>,
) -> MultilinearTensor {
    let basis_vecs: Vec<Vec<Complex64>> = (0..d).map(|i| basis(d, i)).collect();
    let mut out = MultilinearTensor::zeros(d, n);
    for col in 0..out.columns() {
        let idx = unflatten(col, d, n - 1);
        let inserts: Vec<&[Complex64]> = idx.iter().map(|&j| basis_vecs[j].as_slice()).collect();
        let v = value(&inserts);
        for (i, z) in v.into_iter().enumerate() {
            out.set(i, col, z);
        }
    }
    out
}

/// Free cumulants from moments via `κ_n = M_n − Σ_{π ≠ 1_n} κ_π`.
pub fn moments_to_cumulants(dist: &BDist) -> Result<CumulantFamily> {
    let (d, order) = (dist.d(), dist.order());
    if order > MAX_ORDER {
        return Err(Error::OrderExceeded { requested: order, available: MAX_ORDER });
    }
    let mut fam = CumulantFamily { d, cumulants: Vec::with_capacity(order) };
    for n in 1..=order {
        let lower: Vec<NCPartition> = enumerate_nc(n)?.into_iter().filter(|p| p.blocks().len() > 1).collect();
        let moment = dist.moment(n);
        let mut kappa = moment.clone();
        let sums = tensor_from_partitions(d, n, |inserts| {
            let mut acc = vec![Complex64::new(0.0, 0.0); d];
            for p in &lower {
                let v = eval_nested(p, inserts, d, &|legs| Some(&fam.cumulants[legs.len() - 1]));
                for (a, x) in acc.iter_mut().zip(v) {
                    *a += x;
                }
            }
            acc
        });
        kappa.axpy(Complex64::new(-1.0, 0.0), &sums);
        fam.cumulants.push(kappa);
    }
    Ok(fam)
}

/// Moments `M_n = Σ_{π ∈ NC(n)} κ_π`, with the default norm bound.
pub fn cumulants_to_moments(fam: &CumulantFamily) -> Result<BDist> {
    let moments = moment_tensors(fam)?;
    BDist::with_default_norm_bound(fam.d(), moments)
}

pub(crate) fn moment_tensors(fam: &CumulantFamily) -> Result<Vec<MultilinearTensor>> {
    let d = fam.d();
    if fam.order() > MAX_ORDER {
        return Err(Error::OrderExceeded { requested: fam.order(), available: MAX_ORDER });
    }
    (1..=fam.order())
        .map(|n| {
            let parts = enumerate_nc(n)?;
            Ok(tensor_from_partitions(d, n, |inserts| sum_over(&parts, fam, inserts)))
        })
        .collect()
}

fn sum_over(parts: &[NCPartition], fam: &CumulantFamily, inserts: &[&[Complex64]]) -> Vec<Complex64> {
    let d = fam.d();
    let mut acc = vec![Complex64::new(0.0, 0.0); d];
    for p in parts {
        let v = eval_nested(p, inserts, d, &|legs| Some(fam.kappa(legs.len())));
        for (a, x) in acc.iter_mut().zip(v) {
            *a += x;
        }
    }
    acc
}

/// Both sides of the irreducible-partition identity at order `r`, each
/// multiplied on the left by `b` (the word is `(ba)^{⊗r}`).
#[derive(Debug, Clone, PartialEq)]
pub struct Lemma31Sides {
    pub alternating_sum: Vec<Complex64>,
    pub irreducible_sum: Vec<Complex64>,
}

impl Lemma31Sides {
    pub fn residual(&self) -> f64 {
        self.alternating_sum.iter().zip(&self.irreducible_sum).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }
}

/// Left side: signed sum over compositions and their interval refinements.
/// Right side: sum over irreducible partitions.
pub fn lemma31_sides(fam: &CumulantFamily, r: usize, b: &[Complex64]) -> Result<Lemma31Sides> {
    if r == 0 || r > MAX_LEMMA_ORDER {
        return Err(Error::TooLarge { n: r, max: MAX_LEMMA_ORDER });
    }
    if r > fam.order() {
        return Err(Error::OrderExceeded { requested: r, available: fam.order() });
    }
    if b.len() != fam.d() {
        return Err(Error::DimMismatch { expected: fam.d(), found: b.len() });
    }
    let d = fam.d();
    let inserts: Vec<&[Complex64]> = vec![b; r - 1];
    let eval = |p: &NCPartition| hadamard(b, &kappa_pi_eval(fam, p, &inserts).expect("order checked"));

    let mut lhs = vec![Complex64::new(0.0, 0.0); d];
    for j in 1..=r {
        let sign = if j % 2 == 1 { 1.0 } else { -1.0 };
        for c in compositions(r, j) {
            for p in interval_refinements(r, &c)? {
                for (a, x) in lhs.iter_mut().zip(eval(&p)) {
                    *a += sign * x;
                }
            }
        }
    }

    let mut rhs = vec![Complex64::new(0.0, 0.0); d];
    for p in enumerate_nc(r)?.iter().filter(|p| p.is_irreducible()) {
        for (a, x) in rhs.iter_mut().zip(eval(p)) {
            *a += x;
        }
    }
    Ok(Lemma31Sides { alternating_sum: lhs, irreducible_sum: rhs })
}

/// `|LHS − RHS|` of the irreducible-partition identity.
pub fn lemma31_check(fam: &CumulantFamily, r: usize, b: &[Complex64]) -> Result<f64> {
    Ok(lemma31_sides(fam, r, b)?.residual())
}

/// Partial sum `Σ_{r ≤ order} κ_r(a ⊗ wa ⊗ ⋯ ⊗ wa)` of the cumulant series
/// for the R-transform.
pub fn r_series(fam: &CumulantFamily, w: &[Complex64], order: usize) -> Result<Vec<Complex64>> {
    if order > fam.order() {
        return Err(Error::OrderExceeded { requested: order, available: fam.order() });
    }
    if w.len() != fam.d() {
        return Err(Error::DimMismatch { expected: fam.d(), found: w.len() });
    }
    let mut acc = vec![Complex64::new(0.0, 0.0); fam.d()];
    for r in 1..=order {
        for (a, x) in acc.iter_mut().zip(fam.kappa(r).apply_uniform(w)) {
            *a += x;
        }
    }
    Ok(acc)
}
