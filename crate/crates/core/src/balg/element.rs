//! Dense square complex matrices.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

const C0: Complex64 = Complex64::new(0.0, 0.0);
const C1: Complex64 = Complex64::new(1.0, 0.0);

/// Power iteration stops once the residual `‖Mv − λv‖` drops below this
/// multiple of `λ`.
const NORM_TOL: f64 = 1e-12;
const NORM_MAX_ITER: usize = 10_000;

/// Relative pivot threshold for the LU factorization, measured against the
/// Frobenius norm of the input.
pub const PIVOT_THRESHOLD: f64 = 1e-12;

/// An `m × m` complex matrix stored row-major.
#[derive(Clone, PartialEq, Serialize, Deserialize)]
pub struct Element {
    dim: usize,
    entries: Vec<Complex64>,
}

impl Element {
    pub fn new(dim: usize, entries: Vec<Complex64>) -> Result<Self> {
        if dim == 0 || entries.len() != dim * dim {
            return Err(Error::BadShape { dim, len: entries.len() });
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Element { dim, entries })
    }

    /// Build from real entries, row-major.
    pub fn from_real(dim: usize, entries: &[f64]) -> Result<Self> {
        Self::new(dim, entries.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        Element { dim, entries: vec![C0; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        Self::scalar(dim, C1)
    }

    /// `c` times the identity.
    pub fn scalar(dim: usize, c: Complex64) -> Self {
        let mut out = Self::zeros(dim);
        for i in 0..dim {
            out.entries[i * dim + i] = c;
        }
        out
    }

    pub fn from_diag(diag: &[Complex64]) -> Self {
        let dim = diag.len();
        let mut out = Self::zeros(dim);
        for (i, &z) in diag.iter().enumerate() {
            out.entries[i * dim + i] = z;
        }
        out
    }

    pub fn from_real_diag(diag: &[f64]) -> Self {
        let diag: Vec<Complex64> = diag.iter().map(|&x| Complex64::new(x, 0.0)).collect();
        Self::from_diag(&diag)
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut entries = Vec::with_capacity(dim * dim);
        for i in 0..dim {
            for j in 0..dim {
                entries.push(f(i, j));
            }
        }
        Element { dim, entries }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.entries[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, z: Complex64) {
        self.entries[i * self.dim + j] = z;
    }

    pub fn diag(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn trace(&self) -> Complex64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    pub fn is_diagonal(&self) -> bool {
        (0..self.dim).all(|i| (0..self.dim).all(|j| i == j || self.get(i, j) == C0))
    }

    pub fn adjoint(&self) -> Self {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    pub fn scale(&self, c: Complex64) -> Self {
        Element { dim: self.dim, entries: self.entries.iter().map(|&z| z * c).collect() }
    }

    pub fn scale_real(&self, c: f64) -> Self {
        self.scale(Complex64::new(c, 0.0))
    }

    fn check_dims(&self, other: &Element) -> Result<()> {
        if self.dim != other.dim {
            return Err(Error::DimMismatch { expected: self.dim, found: other.dim });
        }
        Ok(())
    }

    pub fn try_add(&self, other: &Element) -> Result<Element> {
        self.check_dims(other)?;
        Ok(self.zip_with(other, |x, y| x + y))
    }

    pub fn try_sub(&self, other: &Element) -> Result<Element> {
        self.check_dims(other)?;
        Ok(self.zip_with(other, |x, y| x - y))
    }

    fn zip_with(&self, other: &Element, f: impl Fn(Complex64, Complex64) -> Complex64) -> Element {
        Element { dim: self.dim, entries: self.entries.iter().zip(&other.entries).map(|(&x, &y)| f(x, y)).collect() }
    }

    /// Matrix product.
    pub fn mat_mul(&self, other: &Element) -> Result<Element> {
        self.check_dims(other)?;
        let m = self.dim;
        let mut out = vec![C0; m * m];
        for i in 0..m {
            let row = &self.entries[i * m..(i + 1) * m];
            let out_row = &mut out[i * m..(i + 1) * m];
            for (k, &x) in row.iter().enumerate() {
                if x == C0 {
                    continue;
                }
                let other_row = &other.entries[k * m..(k + 1) * m];
                for (o, &y) in out_row.iter_mut().zip(other_row) {
                    *o += x * y;
                }
            }
        }
        Ok(Element { dim: m, entries: out })
    }

    /// `1 - self`.
    pub fn one_minus(&self) -> Element {
        let mut out = self.scale_real(-1.0);
        for i in 0..self.dim {
            out.entries[i * self.dim + i] += C1;
        }
        out
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Spectral norm (largest singular value).
    ///
    /// Diagonal matrices short-circuit to the largest modulus on the
    /// diagonal. Otherwise power iteration runs on `xᴴx` from the normalized
    /// all-ones vector; if that start happens to be orthogonal to the
    /// dominant eigenspace the iteration is restarted from the basis vector
    /// of the heaviest column.
    pub fn op_norm(&self) -> f64 {
        if self.is_diagonal() {
            return self.entries.iter().step_by(self.dim + 1).map(|z| z.norm()).fold(0.0, f64::max);
        }
        let gram = self.adjoint().mat_mul(self).expect("square");
        let m = self.dim;
        let ones = vec![Complex64::new(1.0 / (m as f64).sqrt(), 0.0); m];
        let mut lambda = power_iterate(&gram, ones);

        let (heavy, heavy_sq) = (0..m)
            .map(|j| (j, (0..m).map(|i| self.get(i, j).norm_sqr()).sum::<f64>()))
            .fold((0, 0.0), |acc, x| if x.1 > acc.1 { x } else { acc });
        if lambda < heavy_sq * (1.0 - 1e-12) {
            let mut e = vec![C0; m];
            e[heavy] = C1;
            lambda = lambda.max(power_iterate(&gram, e));
        }
        lambda.max(0.0).sqrt()
    }

    /// Inverse by LU with partial pivoting.
    pub fn mat_inv(&self) -> Result<Element> {
        let lu = Lu::factor(self)?;
        Ok(lu.inverse())
    }

    /// Solve `self · X = rhs`.
    pub fn solve(&self, rhs: &Element) -> Result<Element> {
        self.check_dims(rhs)?;
        let lu = Lu::factor(self)?;
        Ok(lu.solve_matrix(rhs))
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|&z| z == C0)
    }
}

fn mat_vec(x: &Element, v: &[Complex64]) -> Vec<Complex64> {
    let m = x.dim;
    (0..m).map(|i| x.entries[i * m..(i + 1) * m].iter().zip(v).map(|(&a, &b)| a * b).sum()).collect()
}

fn vec_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

/// Dominant eigenvalue of a Hermitian positive semidefinite matrix.
fn power_iterate(gram: &Element, start: Vec<Complex64>) -> f64 {
    let mut v = start;
    let mut lambda = 0.0;
    for _ in 0..NORM_MAX_ITER {
        let w = mat_vec(gram, &v);
        let rayleigh: f64 = v.iter().zip(&w).map(|(a, b)| (a.conj() * b).re).sum();
        lambda = f64::max(lambda, rayleigh);
        let wn = vec_norm(&w);
        if wn == 0.0 {
            break;
        }
        let resid = vec_norm(&w.iter().zip(&v).map(|(&b, &a)| b - a * rayleigh).collect::<Vec<_>>());
        if resid <= NORM_TOL * rayleigh.abs() {
            break;
        }
        v = w.into_iter().map(|z| z / wn).collect();
    }
    lambda
}

struct Lu {
    m: usize,
    lu: Vec<Complex64>,
    perm: Vec<usize>,
}

impl Lu {
    fn factor(x: &Element) -> Result<Lu> {
        let m = x.dim;
        let threshold = PIVOT_THRESHOLD * x.frobenius_norm();
        let mut lu = x.entries.clone();
        let mut perm: Vec<usize> = (0..m).collect();
        for k in 0..m {
            let (p, pivot) =
                (k..m).map(|i| (i, lu[i * m + k].norm())).fold((k, -1.0), |acc, x| if x.1 > acc.1 { x } else { acc });
            if pivot <= threshold || pivot == 0.0 {
                return Err(Error::Singular { pivot, threshold });
            }
            if p != k {
                for j in 0..m {
                    lu.swap(k * m + j, p * m + j);
                }
                perm.swap(k, p);
            }
            let d = lu[k * m + k];
            for i in k + 1..m {
                let f = lu[i * m + k] / d;
                lu[i * m + k] = f;
                if f != C0 {
                    for j in k + 1..m {
                        let t = lu[k * m + j];
                        lu[i * m + j] -= f * t;
                    }
                }
            }
        }
        Ok(Lu { m, lu, perm })
    }

    fn solve_vec(&self, b: &mut [Complex64]) {
        let m = self.m;
        for i in 0..m {
            let mut s = b[i];
            for j in 0..i {
                s -= self.lu[i * m + j] * b[j];
            }
            b[i] = s;
        }
        for i in (0..m).rev() {
            let mut s = b[i];
            for j in i + 1..m {
                s -= self.lu[i * m + j] * b[j];
            }
            b[i] = s / self.lu[i * m + i];
        }
    }

    fn solve_matrix(&self, rhs: &Element) -> Element {
        let m = self.m;
        let mut out = Element::zeros(m);
        let mut col = vec![C0; m];
        for j in 0..m {
            for (i, c) in col.iter_mut().enumerate() {
                *c = rhs.get(self.perm[i], j);
            }
            self.solve_vec(&mut col);
            for (i, &c) in col.iter().enumerate() {
                out.set(i, j, c);
            }
        }
        out
    }

    fn inverse(&self) -> Element {
        self.solve_matrix(&Element::identity(self.m))
    }
}

impl fmt::Debug for Element {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "Element({}x{})", self.dim, self.dim)?;
        for i in 0..self.dim {
            let row: Vec<String> = (0..self.dim)
                .map(|j| {
                    let z = self.get(i, j);
                    format!("{:+.4e}{:+.4e}i", z.re, z.im)
                })
                .collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        Ok(())
    }
}

// Operator sugar for same-dimension arithmetic; mismatched dimensions panic.
impl Add for &Element {
    type Output = Element;
    fn add(self, rhs: &Element) -> Element {
        self.try_add(rhs).expect("element dimensions must match")
    }
}

impl Sub for &Element {
    type Output = Element;
    fn sub(self, rhs: &Element) -> Element {
        self.try_sub(rhs).expect("element dimensions must match")
    }
}

impl Mul for &Element {
    type Output = Element;
    fn mul(self, rhs: &Element) -> Element {
        self.mat_mul(rhs).expect("element dimensions must match")
    }
}

impl Neg for &Element {
    type Output = Element;
    fn neg(self) -> Element {
        self.scale_real(-1.0)
    }
}
