//! Non-crossing partitions, compositions and interval refinements.

use std::fmt;

use crate::error::{Error, Result};

/// Largest `n` for which `NC(n)` is enumerated.
pub const MAX_ENUMERATION: usize = 12;

/// A non-crossing partition of `{0, …, n−1}` (zero-based).
///
/// Blocks are sorted by their smallest element; `parent[i]` is the innermost
/// block whose span strictly encloses block `i`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct NCPartition {
    n: usize,
    blocks: Vec<Vec<usize>>,
    parent: Vec<Option<usize>>,
    block_of: Vec<usize>,
}

impl NCPartition {
    /// Validates and normalizes `blocks` (each block sorted, blocks sorted by
    /// first element).
    pub fn new(n: usize, blocks: Vec<Vec<usize>>) -> Result<Self> {
        let mut blocks: Vec<Vec<usize>> = blocks
            .into_iter()
            .map(|mut b| {
                b.sort_unstable();
                b
            })
            .collect();
        if blocks.iter().any(|b| b.is_empty()) {
            return Err(Error::ShapeMismatch("empty block".into()));
        }
        blocks.sort_unstable_by_key(|b| b[0]);
        let mut block_of = vec![usize::MAX; n];
        for (bi, b) in blocks.iter().enumerate() {
            for w in b.windows(2) {
                if w[0] == w[1] {
                    return Err(Error::ShapeMismatch(format!("repeated index {}", w[0])));
                }
            }
            for &i in b {
                if i >= n || block_of[i] != usize::MAX {
                    return Err(Error::ShapeMismatch(format!("index {i} out of range or repeated")));
                }
                block_of[i] = bi;
            }
        }
        if block_of.contains(&usize::MAX) {
            return Err(Error::ShapeMismatch("blocks do not cover 0..n".into()));
        }
        if let Some((x, y)) = find_crossing(&blocks) {
            return Err(Error::ShapeMismatch(format!("blocks {x} and {y} cross")));
        }
        let parent = nesting(&blocks);
        Ok(NCPartition { n, blocks, parent, block_of })
    }

    /// Partition of zero points, the unit for `concat`.
    pub fn empty() -> Self {
        NCPartition { n: 0, blocks: vec![], parent: vec![], block_of: vec![] }
    }

    /// The one-block partition `1_n`.
    pub fn full(n: usize) -> Self {
        if n == 0 {
            return Self::empty();
        }
        Self::new(n, vec![(0..n).collect()]).expect("one block is non-crossing")
    }

    /// The all-singletons partition `0_n`.
    pub fn singletons(n: usize) -> Self {
        Self::new(n, (0..n).map(|i| vec![i]).collect()).expect("singletons are non-crossing")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn parent(&self, block: usize) -> Option<usize> {
        self.parent[block]
    }

    pub fn block_of(&self, i: usize) -> usize {
        self.block_of[i]
    }

    /// True iff the first and last points share a block.
    pub fn is_irreducible(&self) -> bool {
        self.n > 0 && self.block_of[0] == self.block_of[self.n - 1]
    }

    /// `self ⊔ other`: blocks of `other` shifted past `self.n`.
    pub fn concat(&self, other: &NCPartition) -> NCPartition {
        let shift = self.n;
        let mut blocks = self.blocks.clone();
        blocks.extend(other.blocks.iter().map(|b| b.iter().map(|i| i + shift).collect()));
        NCPartition::new(self.n + other.n, blocks).expect("concatenation is non-crossing")
    }

    /// Whether every block of `self` lies inside a block of `coarser`.
    pub fn refines(&self, coarser: &NCPartition) -> bool {
        self.n == coarser.n
            && self.blocks.iter().all(|b| b.iter().all(|&i| coarser.block_of[i] == coarser.block_of[b[0]]))
    }
}

impl fmt::Debug for NCPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .blocks
            .iter()
            .map(|b| {
                let v: Vec<String> = b.iter().map(|i| (i + 1).to_string()).collect();
                format!("{{{}}}", v.join(","))
            })
            .collect();
        write!(f, "NC[{}]", parts.join(" "))
    }
}

/// Returns a crossing pair of block indices, if any.
pub fn find_crossing(blocks: &[Vec<usize>]) -> Option<(usize, usize)> {
    for (x, bx) in blocks.iter().enumerate() {
        for (y, by) in blocks.iter().enumerate() {
            if x == y {
                continue;
            }
            // a < b < c < d with a, c ∈ bx and b, d ∈ by
            for &a in bx {
                for &b in by.iter().filter(|&&b| b > a) {
                    for &c in bx.iter().filter(|&&c| c > b) {
                        if by.iter().any(|&d| d > c) {
                            return Some((x, y));
                        }
                    }
                }
            }
        }
    }
    None
}

fn nesting(blocks: &[Vec<usize>]) -> Vec<Option<usize>> {
    let span = |b: &Vec<usize>| (b[0], *b.last().unwrap());
    blocks
        .iter()
        .map(|b| {
            let (lo, hi) = span(b);
            blocks
                .iter()
                .enumerate()
                .filter(|(_, o)| {
                    let (olo, ohi) = span(o);
                    olo < lo && hi < ohi
                })
                // innermost enclosing block has the largest start
                .max_by_key(|(_, o)| o[0])
                .map(|(i, _)| i)
        })
        .collect()
}

/// All of `NC(n)`, generated by placing the block of the first point and
/// recursing into the gaps it leaves.
pub fn enumerate_nc(n: usize) -> Result<Vec<NCPartition>> {
    if n > MAX_ENUMERATION {
        return Err(Error::TooLarge { n, max: MAX_ENUMERATION });
    }
    if n == 0 {
        return Ok(vec![NCPartition::empty()]);
    }
    Ok(blocks_on_interval(0, n)
        .into_iter()
        .map(|blocks| NCPartition::new(n, blocks).expect("generated partitions are non-crossing"))
        .collect())
}

/// Block lists of every non-crossing partition of `lo..hi`.
fn blocks_on_interval(lo: usize, hi: usize) -> Vec<Vec<Vec<usize>>> {
    if lo >= hi {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    extend_first_block(vec![lo], Vec::new(), hi, &mut out);
    out
}

/// `first` is the block of `lo` built so far; `inner` the blocks already
/// placed in its gaps. Either close the block (partition the tail) or pick
/// its next element `j`, partitioning the gap before `j`.
fn extend_first_block(first: Vec<usize>, inner: Vec<Vec<usize>>, hi: usize, out: &mut Vec<Vec<Vec<usize>>>) {
    let last = *first.last().unwrap();
    for tail in blocks_on_interval(last + 1, hi) {
        let mut blocks = Vec::with_capacity(1 + inner.len() + tail.len());
        blocks.push(first.clone());
        blocks.extend(inner.iter().cloned());
        blocks.extend(tail);
        out.push(blocks);
    }
    for j in last + 1..hi {
        for gap in blocks_on_interval(last + 1, j) {
            let mut f = first.clone();
            f.push(j);
            let mut inn = inner.clone();
            inn.extend(gap);
            extend_first_block(f, inn, hi, out);
        }
    }
}

/// Catalan number `C_n`.
pub fn catalan(n: usize) -> u64 {
    let mut c: u64 = 1;
    for k in 0..n as u64 {
        c = c * 2 * (2 * k + 1) / (k + 2);
    }
    c
}

/// An ordered list of positive parts.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Composition {
    parts: Vec<usize>,
}

impl Composition {
    pub fn new(parts: Vec<usize>) -> Result<Self> {
        if parts.contains(&0) {
            return Err(Error::BadComposition { r: parts.iter().sum(), parts });
        }
        Ok(Composition { parts })
    }

    pub fn parts(&self) -> &[usize] {
        &self.parts
    }

    pub fn total(&self) -> usize {
        self.parts.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.parts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// The interval partition `1_{n₁} ⊔ ⋯ ⊔ 1_{n_j}`.
    pub fn interval_partition(&self) -> NCPartition {
        self.parts.iter().fold(NCPartition::empty(), |acc, &p| acc.concat(&NCPartition::full(p)))
    }
}

/// All compositions of `r` into exactly `j` positive parts.
pub fn compositions(r: usize, j: usize) -> Vec<Composition> {
    fn rec(rest: usize, slots: usize, cur: &mut Vec<usize>, out: &mut Vec<Composition>) {
        if slots == 0 {
            if rest == 0 {
                out.push(Composition { parts: cur.clone() });
            }
            return;
        }
        for p in 1..=rest.saturating_sub(slots - 1) {
            cur.push(p);
            rec(rest - p, slots - 1, cur, out);
            cur.pop();
        }
    }
    let mut out = Vec::new();
    if j == 0 || j > r {
        return out;
    }
    rec(r, j, &mut Vec::new(), &mut out);
    out
}

/// Every `π ∈ NC(r)` with `π ≤ 1_{n₁} ⊔ ⋯ ⊔ 1_{n_j}`, built as the product
/// of independent enumerations of each interval.
pub fn interval_refinements(r: usize, c: &Composition) -> Result<Vec<NCPartition>> {
    if c.total() != r {
        return Err(Error::BadComposition { r, parts: c.parts.clone() });
    }
    let mut acc = vec![NCPartition::empty()];
    for &p in &c.parts {
        let pieces = enumerate_nc(p)?;
        acc = acc.iter().flat_map(|left| pieces.iter().map(move |q| left.concat(q))).collect();
    }
    Ok(acc)
}
