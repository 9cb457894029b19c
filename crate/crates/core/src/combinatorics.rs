//! Falling factorials and lazy enumerators for set partitions, permutations
//! and cyclic orders.
//!
//! All enumerators are deterministic. Elements are 1-based throughout, so a
//! permutation of `{1..n}` is stored as the vector of images
//! `[τ(1), …, τ(n)]`.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{invalid, Error};
use crate::rational::Rational;

/// `(x)_n = x (x - 1) ⋯ (x - n + 1)`; the empty product `1` when `n <= 0`.
pub fn falling_factorial(x: &Rational, n: i64) -> Rational {
    let mut acc = Rational::one();
    for k in 0..n.max(0) {
        acc *= x - Rational::from(k);
    }
    acc
}

pub fn factorial(n: usize) -> usize {
    (1..=n).product()
}

/// A partition of `{1..r}` in canonical order: blocks sorted by their
/// smallest element, elements ascending inside each block.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SetPartition {
    blocks: Vec<Vec<usize>>,
}

impl SetPartition {
    /// Builds a partition from a restricted growth string (`labels[i]` is
    /// the block of element `i + 1`).
    fn from_labels(labels: &[usize]) -> Self {
        let count = labels.iter().copied().max().map_or(0, |m| m + 1);
        let mut blocks = vec![Vec::new(); count];
        for (i, &b) in labels.iter().enumerate() {
            blocks[b].push(i + 1);
        }
        SetPartition { blocks }
    }

    pub fn blocks(&self) -> &[Vec<usize>] {
        &self.blocks
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    /// Blocks as bitmasks over `{1..r}` (bit `e - 1` for element `e`).
    pub fn block_masks(&self) -> Vec<u32> {
        self.blocks
            .iter()
            .map(|b| b.iter().fold(0u32, |m, &e| m | (1 << (e - 1))))
            .collect()
    }
}

/// Lazy stream of all partitions of `{1..r}`, generated as restricted
/// growth strings in lexicographic order. Memory is `O(r)`.
#[derive(Debug, Clone)]
pub struct SetPartitions {
    labels: Vec<usize>,
    // maxima[i] = max(labels[0..=i])
    maxima: Vec<usize>,
    done: bool,
}

impl Iterator for SetPartitions {
    type Item = SetPartition;

    fn next(&mut self) -> Option<SetPartition> {
        if self.done {
            return None;
        }
        let current = SetPartition::from_labels(&self.labels);
        // Advance: rightmost position that can still grow.
        let r = self.labels.len();
        let mut i = r;
        loop {
            if i <= 1 {
                self.done = true;
                break;
            }
            i -= 1;
            if self.labels[i] <= self.maxima[i - 1] {
                self.labels[i] += 1;
                self.maxima[i] = self.maxima[i - 1].max(self.labels[i]);
                for k in i + 1..r {
                    self.labels[k] = 0;
                    self.maxima[k] = self.maxima[i];
                }
                break;
            }
        }
        Some(current)
    }
}

pub fn enumerate_set_partitions(r: usize) -> Result<SetPartitions, Error> {
    if r == 0 {
        return Err(invalid("set partitions need r >= 1"));
    }
    Ok(SetPartitions { labels: vec![0; r], maxima: vec![0; r], done: false })
}

/// Lazy stream of the `n!` permutations of `{1..n}` in lexicographic order.
#[derive(Debug, Clone)]
pub struct Permutations {
    current: Option<Vec<usize>>,
}

impl Iterator for Permutations {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        let out = self.current.clone()?;
        let perm = self.current.as_mut().expect("checked above");
        if !next_lexicographic(perm) {
            self.current = None;
        }
        Some(out)
    }
}

fn next_lexicographic(p: &mut [usize]) -> bool {
    let n = p.len();
    if n < 2 {
        return false;
    }
    let mut i = n - 1;
    while i > 0 && p[i - 1] >= p[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = n - 1;
    while p[j] <= p[i - 1] {
        j -= 1;
    }
    p.swap(i - 1, j);
    p[i..].reverse();
    true
}

pub fn enumerate_permutations(n: usize) -> Result<Permutations, Error> {
    if n == 0 {
        return Err(invalid("permutations need n >= 1"));
    }
    Ok(Permutations { current: Some((1..=n).collect()) })
}

/// The permutation at position `index` of the lexicographic stream of
/// [`enumerate_permutations`]. Used to split the stream into work units.
pub fn nth_permutation(n: usize, mut index: usize) -> Option<Vec<usize>> {
    if n == 0 || index >= factorial(n) {
        return None;
    }
    let mut pool: Vec<usize> = (1..=n).collect();
    let mut out = Vec::with_capacity(n);
    for remaining in (1..=n).rev() {
        let block = factorial(remaining - 1);
        out.push(pool.remove(index / block));
        index %= block;
    }
    Some(out)
}

/// A bijection `σ: ℤ/|B| → B`, stored as `[σ(0), …, σ(|B| - 1)]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CyclicOrder {
    map: Vec<usize>,
}

impl CyclicOrder {
    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    /// `σ(i)` with `i` read modulo `|B|`.
    pub fn at(&self, i: usize) -> usize {
        self.map[i % self.map.len()]
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.map
    }
}

/// Lazy stream of all `|B|!` bijections `ℤ/|B| → B`.
#[derive(Debug, Clone)]
pub struct CyclicOrders {
    block: Vec<usize>,
    inner: Permutations,
}

impl Iterator for CyclicOrders {
    type Item = CyclicOrder;

    fn next(&mut self) -> Option<CyclicOrder> {
        let p = self.inner.next()?;
        Some(CyclicOrder { map: p.iter().map(|&i| self.block[i - 1]).collect() })
    }
}

pub fn enumerate_cyclic_orders(block: &[usize]) -> Result<CyclicOrders, Error> {
    if block.is_empty() {
        return Err(invalid("cyclic orders need a nonempty block"));
    }
    let mut sorted = block.to_vec();
    sorted.sort_unstable();
    if sorted.windows(2).any(|w| w[0] == w[1]) {
        return Err(invalid("block has repeated elements"));
    }
    let inner = enumerate_permutations(sorted.len())?;
    Ok(CyclicOrders { block: sorted, inner })
}
