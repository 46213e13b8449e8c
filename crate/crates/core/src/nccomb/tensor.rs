//! Dense multilinear maps `(ℂ^d)^{n−1} → ℂ^d` in diagonal coordinates.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Largest supported diagonal dimension.
pub const MAX_COORDS: usize = 4;
/// Largest supported moment / cumulant order.
pub const MAX_ORDER: usize = 8;

const C0: Complex64 = Complex64::new(0.0, 0.0);

/// The order-`n` moment or cumulant map `(b₁, …, b_{n−1}) ↦ φ(a b₁ a ⋯ b_{n−1} a)`
/// for diagonal `B ≅ ℂ^d`.
///
/// Entries are stored row-major by `(output, insertion₁, …, insertion_{n−1})`,
/// so `data.len() == d^n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MultilinearTensor {
    d: usize,
    order: usize,
    data: Vec<Complex64>,
}

impl MultilinearTensor {
    pub fn new(d: usize, order: usize, data: Vec<Complex64>) -> Result<Self> {
        if d == 0 || order == 0 {
            return Err(Error::ShapeMismatch("tensor needs d ≥ 1 and order ≥ 1".into()));
        }
        let want = d.pow(order as u32);
        if data.len() != want {
            return Err(Error::ShapeMismatch(format!(
                "order {order} tensor over d={d} needs {want} entries, got {}",
                data.len()
            )));
        }
        if data.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(MultilinearTensor { d, order, data })
    }

    pub fn zeros(d: usize, order: usize) -> Self {
        MultilinearTensor { d, order, data: vec![C0; d.pow(order as u32)] }
    }

    /// Build entries from a function of `(output, insertion indices)`.
    pub fn from_fn(d: usize, order: usize, mut f: impl FnMut(usize, &[usize]) -> Complex64) -> Self {
        let mut data = Vec::with_capacity(d.pow(order as u32));
        for flat in 0..d.pow(order as u32) {
            let idx = unflatten(flat, d, order);
            data.push(f(idx[0], &idx[1..]));
        }
        MultilinearTensor { d, order, data }
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    /// Number of insertion multi-indices, `d^{n−1}`.
    pub fn columns(&self) -> usize {
        self.d.pow(self.order as u32 - 1)
    }

    pub fn get(&self, output: usize, column: usize) -> Complex64 {
        self.data[output * self.columns() + column]
    }

    pub fn set(&mut self, output: usize, column: usize, z: Complex64) {
        let cols = self.columns();
        self.data[output * cols + column] = z;
    }

    /// Evaluate on `n−1` insertion vectors.
    pub fn apply(&self, inserts: &[&[Complex64]]) -> Vec<Complex64> {
        debug_assert_eq!(inserts.len() + 1, self.order);
        let d = self.d;
        // contract the last insertion first
        let mut cur: Vec<Complex64> = self.data.clone();
        for ins in inserts.iter().rev() {
            let next_len = cur.len() / d;
            let mut next = vec![C0; next_len];
            for (k, slot) in next.iter_mut().enumerate() {
                let row = &cur[k * d..(k + 1) * d];
                *slot = row.iter().zip(ins.iter()).map(|(&t, &b)| t * b).sum();
            }
            cur = next;
        }
        cur
    }

    /// Evaluate with every insertion equal to `b`.
    pub fn apply_uniform(&self, b: &[Complex64]) -> Vec<Complex64> {
        let inserts: Vec<&[Complex64]> = vec![b; self.order - 1];
        self.apply(&inserts)
    }

    /// `max_i Σ_cols |T[i; cols]|`: the exact norm of the map for the
    /// sup-norm on `ℂ^d`.
    pub fn row_sum_norm(&self) -> f64 {
        let cols = self.columns();
        (0..self.d)
            .map(|i| self.data[i * cols..(i + 1) * cols].iter().map(|z| z.norm()).sum::<f64>())
            .fold(0.0, f64::max)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    pub fn axpy(&mut self, alpha: Complex64, other: &MultilinearTensor) {
        for (x, &y) in self.data.iter_mut().zip(&other.data) {
            *x += alpha * y;
        }
    }

    pub fn max_abs_diff(&self, other: &MultilinearTensor) -> f64 {
        self.data.iter().zip(&other.data).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
    }
}

/// Digits of `flat` in base `d`, most significant first, `len` digits.
pub fn unflatten(mut flat: usize, d: usize, len: usize) -> Vec<usize> {
    let mut idx = vec![0; len];
    for slot in idx.iter_mut().rev() {
        *slot = flat % d;
        flat /= d;
    }
    idx
}

/// Standard basis vector `e_i` of `ℂ^d`.
pub fn basis(d: usize, i: usize) -> Vec<Complex64> {
    let mut v = vec![C0; d];
    v[i] = Complex64::new(1.0, 0.0);
    v
}

/// Coordinatewise product.
pub fn hadamard(x: &[Complex64], y: &[Complex64]) -> Vec<Complex64> {
    x.iter().zip(y).map(|(a, b)| a * b).collect()
}

pub fn sup_norm(x: &[Complex64]) -> f64 {
    x.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn check_shape(d: usize) -> Result<()> {
    if d == 0 || d > MAX_COORDS {
        return Err(Error::TooLarge { n: d, max: MAX_COORDS });
    }
    Ok(())
}
