//! Truncated B-valued distributions over diagonal `B ≅ ℂ^d`.

use std::collections::BTreeMap;
use std::fmt;

use num_complex::Complex64;
use rand::Rng;

use crate::balg::{AlgebraContext, Element, SubalgebraKind};
use crate::error::{Error, Result};
use crate::nccomb::tensor::{check_shape, hadamard, sup_norm, MultilinearTensor, MAX_ORDER};
use crate::nccomb::{cumulants, CumulantFamily};

/// Moment maps `M_1, …, M_N` of one variable, with a declared norm bound
/// used for domain certificates.
#[derive(Debug, Clone, PartialEq)]
pub struct BDist {
    d: usize,
    moments: Vec<MultilinearTensor>,
    norm_bound: f64,
}

impl BDist {
    pub fn new(d: usize, moments: Vec<MultilinearTensor>, norm_bound: f64) -> Result<Self> {
        check_shape(d)?;
        if moments.len() > MAX_ORDER {
            return Err(Error::OrderExceeded { requested: moments.len(), available: MAX_ORDER });
        }
        for (i, m) in moments.iter().enumerate() {
            if m.d() != d || m.order() != i + 1 {
                return Err(Error::ShapeMismatch(format!(
                    "moment {} has shape (d={}, order={})",
                    i + 1,
                    m.d(),
                    m.order()
                )));
            }
        }
        if !(norm_bound.is_finite() && norm_bound > 0.0) {
            return Err(Error::ShapeMismatch(format!("norm bound {norm_bound} must be positive")));
        }
        Ok(BDist { d, moments, norm_bound })
    }

    /// Uses [`default_norm_bound`].
    pub fn with_default_norm_bound(d: usize, moments: Vec<MultilinearTensor>) -> Result<Self> {
        let nb = default_norm_bound(&moments);
        Self::new(d, moments, nb)
    }

    /// Moments `M_n = Σ_{π∈NC(n)} κ_π` of a cumulant family.
    pub fn from_cumulants(fam: &CumulantFamily, norm_bound: Option<f64>) -> Result<Self> {
        let moments = cumulants::moment_tensors(fam)?;
        match norm_bound {
            Some(nb) => Self::new(fam.d(), moments, nb),
            None => Self::with_default_norm_bound(fam.d(), moments),
        }
    }

    /// Exact moments of a concrete matrix under the diagonal pinching:
    /// `M_n[i; j₁…j_{n−1}] = a_{i j₁} a_{j₁ j₂} ⋯ a_{j_{n−1} i}`, with
    /// `norm_bound = ‖a‖`.
    pub fn from_matrix(a: &Element, order: usize) -> Result<Self> {
        let d = a.dim();
        check_shape(d)?;
        let moments = (1..=order)
            .map(|n| {
                MultilinearTensor::from_fn(d, n, |i, js| {
                    let mut prev = i;
                    let mut z = Complex64::new(1.0, 0.0);
                    for &j in js {
                        z *= a.get(prev, j);
                        prev = j;
                    }
                    z * a.get(prev, i)
                })
            })
            .collect();
        let nb = a.op_norm().max(f64::MIN_POSITIVE);
        Self::new(d, moments, nb)
    }

    /// Point mass at the diagonal element `c` (moments `cⁿ` coordinatewise).
    pub fn delta(c: &[Complex64], order: usize) -> Result<Self> {
        let d = c.len();
        let moments = (1..=order)
            .map(|n| {
                MultilinearTensor::from_fn(d, n, |i, js| {
                    if js.iter().all(|&j| j == i) {
                        c[i].powu(n as u32)
                    } else {
                        Complex64::new(0.0, 0.0)
                    }
                })
            })
            .collect();
        Self::with_default_norm_bound(d, moments)
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn order(&self) -> usize {
        self.moments.len()
    }

    pub fn norm_bound(&self) -> f64 {
        self.norm_bound
    }

    pub fn with_norm_bound(mut self, norm_bound: f64) -> Result<Self> {
        if !(norm_bound.is_finite() && norm_bound > 0.0) {
            return Err(Error::ShapeMismatch(format!("norm bound {norm_bound} must be positive")));
        }
        self.norm_bound = norm_bound;
        Ok(self)
    }

    /// `M_n` for `1 ≤ n ≤ N`.
    pub fn moment(&self, n: usize) -> &MultilinearTensor {
        &self.moments[n - 1]
    }

    pub fn moments(&self) -> &[MultilinearTensor] {
        &self.moments
    }

    /// `E(a b₁ a ⋯ b_{n−1} a)`.
    pub fn eval_moment_word(&self, inserts: &[&[Complex64]]) -> Result<Vec<Complex64>> {
        let n = inserts.len() + 1;
        if n > self.order() {
            return Err(Error::OrderExceeded { requested: n, available: self.order() });
        }
        Ok(self.moment(n).apply(inserts))
    }

    /// `E(a)` as a diagonal vector.
    pub fn mean(&self) -> Vec<Complex64> {
        self.moments.first().map(|m| m.data().to_vec()).unwrap_or_else(|| vec![Complex64::new(0.0, 0.0); self.d])
    }

    /// The context `(M_d, diagonal, pinching)` that hosts `B`.
    pub fn context(&self) -> AlgebraContext {
        AlgebraContext::new(self.d, SubalgebraKind::Diagonal).expect("d ≥ 1")
    }

    pub fn truncated(&self, order: usize) -> BDist {
        BDist { d: self.d, moments: self.moments[..order.min(self.order())].to_vec(), norm_bound: self.norm_bound }
    }

    pub fn max_abs_diff(&self, other: &BDist) -> f64 {
        self.moments.iter().zip(&other.moments).map(|(x, y)| x.max_abs_diff(y)).fold(0.0, f64::max)
    }

    /// Largest ratio `‖M_n(b₁…)‖ / (norm_bound^n Π‖bᵢ‖)` over `samples` random
    /// unit insertions per order; at most `1 + 1e-9` for a consistent bound.
    pub fn norm_bound_violation<R: Rng + ?Sized>(&self, rng: &mut R, samples: usize) -> f64 {
        let mut worst: f64 = 0.0;
        for n in 1..=self.order() {
            for _ in 0..samples {
                let ins: Vec<Vec<Complex64>> = (0..n - 1)
                    .map(|_| {
                        let v: Vec<Complex64> = (0..self.d)
                            .map(|_| Complex64::from_polar(1.0, rng.random_range(0.0..std::f64::consts::TAU)))
                            .collect();
                        v
                    })
                    .collect();
                let refs: Vec<&[Complex64]> = ins.iter().map(|v| v.as_slice()).collect();
                let val = sup_norm(&self.moment(n).apply(&refs));
                worst = worst.max(val / self.norm_bound.powi(n as i32));
            }
        }
        worst
    }
}

/// `2 · max_n ‖M_n‖^{1/n}` where `‖M_n‖` is the exact sup-norm operator norm
/// of the multilinear map (its largest absolute row sum). Falls back to 1 for
/// the zero distribution.
pub fn default_norm_bound(moments: &[MultilinearTensor]) -> f64 {
    let growth = moments.iter().map(|m| m.row_sum_norm().powf(1.0 / m.order() as f64)).fold(0.0, f64::max);
    if growth > 0.0 {
        2.0 * growth
    } else {
        1.0
    }
}

/// A word in the two letters `a₁`, `a₂`; letters are stored as 1 or 2.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(Vec<u8>);

impl Word {
    pub fn new(letters: Vec<u8>) -> Result<Self> {
        if letters.is_empty() || letters.iter().any(|&l| l != 1 && l != 2) {
            return Err(Error::ShapeMismatch(format!("bad word {letters:?}")));
        }
        Ok(Word(letters))
    }

    pub fn letters(&self) -> &[u8] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Every word of length `n` in lexicographic order.
    pub fn all(n: usize) -> Vec<Word> {
        (0..1usize << n)
            .map(|bits| Word((0..n).map(|k| if bits >> (n - 1 - k) & 1 == 0 { 1 } else { 2 }).collect()))
            .collect()
    }

    /// `1 2 1 2 …` (or starting with 2), length `n`.
    pub fn alternating(n: usize, first: u8) -> Word {
        let other = 3 - first;
        Word((0..n).map(|k| if k % 2 == 0 { first } else { other }).collect())
    }

    pub fn constant(n: usize, letter: u8) -> Word {
        Word(vec![letter; n])
    }

    pub fn is_constant(&self) -> bool {
        self.0.windows(2).all(|w| w[0] == w[1])
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for l in &self.0 {
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({self})")
    }
}

impl std::str::FromStr for Word {
    type Err = Error;
    fn from_str(s: &str) -> Result<Word> {
        let letters = s
            .chars()
            .map(|ch| match ch {
                '1' => Ok(1),
                '2' => Ok(2),
                _ => Err(Error::Format(format!("bad word key {s:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Word::new(letters)
    }
}

/// Mixed moments `E(a_{w₁} b₁ a_{w₂} ⋯ b_{n−1} a_{wₙ})` for every word up to
/// length `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointBDist {
    d: usize,
    order: usize,
    norm_bounds: [f64; 2],
    moments: BTreeMap<Word, MultilinearTensor>,
}

impl JointBDist {
    pub fn new(
        d: usize,
        order: usize,
        norm_bounds: [f64; 2],
        moments: BTreeMap<Word, MultilinearTensor>,
    ) -> Result<Self> {
        check_shape(d)?;
        if order > MAX_ORDER {
            return Err(Error::OrderExceeded { requested: order, available: MAX_ORDER });
        }
        for n in 1..=order {
            for w in Word::all(n) {
                let t = moments.get(&w).ok_or_else(|| Error::ShapeMismatch(format!("missing word {w}")))?;
                if t.d() != d || t.order() != n {
                    return Err(Error::ShapeMismatch(format!("word {w} has wrong tensor shape")));
                }
            }
        }
        if moments.len() != (1..=order).map(|n| 1usize << n).sum::<usize>() {
            return Err(Error::ShapeMismatch("unexpected words in joint distribution".into()));
        }
        if norm_bounds.iter().any(|nb| !(nb.is_finite() && *nb > 0.0)) {
            return Err(Error::ShapeMismatch("norm bounds must be positive".into()));
        }
        Ok(JointBDist { d, order, norm_bounds, moments })
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn norm_bounds(&self) -> [f64; 2] {
        self.norm_bounds
    }

    pub fn moment(&self, w: &Word) -> &MultilinearTensor {
        &self.moments[w]
    }

    pub fn words(&self) -> impl Iterator<Item = (&Word, &MultilinearTensor)> {
        self.moments.iter()
    }

    /// Distribution of `a₁` (`letter = 1`) or `a₂` (`letter = 2`).
    pub fn marginal(&self, letter: u8) -> BDist {
        let moments = (1..=self.order).map(|n| self.moments[&Word::constant(n, letter)].clone()).collect();
        BDist { d: self.d, moments, norm_bound: self.norm_bounds[letter as usize - 1] }
    }

    /// `E(x₁ b₁ x₂ ⋯ b_{n−1} xₙ)` where letter `k` is `a_{wₖ}` when `kept[k]`
    /// and the scalar-like `−E(a_{wₖ})` otherwise; this is one term of the
    /// expansion of a product of centered letters.
    pub(crate) fn eval_with_replacements(
        &self,
        word: &Word,
        kept: &[bool],
        means: &[Vec<Complex64>; 2],
        inserts: &[&[Complex64]],
    ) -> Vec<Complex64> {
        let n = word.len();
        let d = self.d;
        let neg_mean =
            |k: usize| -> Vec<Complex64> { means[word.letters()[k] as usize - 1].iter().map(|z| -z).collect() };
        let kept_pos: Vec<usize> = (0..n).filter(|&k| kept[k]).collect();
        if kept_pos.is_empty() {
            let mut acc = vec![Complex64::new(1.0, 0.0); d];
            for k in 0..n {
                acc = hadamard(&acc, &neg_mean(k));
                if k + 1 < n {
                    acc = hadamard(&acc, inserts[k]);
                }
            }
            return acc;
        }
        let first = kept_pos[0];
        let last = *kept_pos.last().unwrap();
        let mut left = vec![Complex64::new(1.0, 0.0); d];
        for k in 0..first {
            left = hadamard(&hadamard(&left, &neg_mean(k)), inserts[k]);
        }
        let mut right = vec![Complex64::new(1.0, 0.0); d];
        for k in last + 1..n {
            right = hadamard(&hadamard(&right, inserts[k - 1]), &neg_mean(k));
        }
        let mut middle: Vec<Vec<Complex64>> = Vec::with_capacity(kept_pos.len() - 1);
        for win in kept_pos.windows(2) {
            let (s, t) = (win[0], win[1]);
            let mut slot = inserts[s].to_vec();
            for k in s + 1..t {
                slot = hadamard(&hadamard(&slot, &neg_mean(k)), inserts[k]);
            }
            middle.push(slot);
        }
        let sub_word = Word(kept_pos.iter().map(|&k| word.letters()[k]).collect());
        let refs: Vec<&[Complex64]> = middle.iter().map(|v| v.as_slice()).collect();
        let inner = self.moments[&sub_word].apply(&refs);
        hadamard(&hadamard(&left, &inner), &right)
    }
}
