//! Intersection numbers of the bundles `M̄_l = ½ Σ_{j,k} t_{l,j,k} Δ̂^α_{jk}`
//! on `X^r`, by two independent routes.
//!
//! The closed route sums over permutations `τ` (which factor sits at which
//! vertex), set partitions `π` of the vertices (the connected components of
//! the graphs that contribute) and cyclic orders `σ` of each block (how the
//! cycle through the block runs):
//!
//! * with `n = r` factors the geometric number is
//!   `Σ_τ Σ_π (-g)^{|π|} Π_B (1/|B|) Σ_σ Π_{i} t_{τ(σ(i)), σ(i), σ(i+1)}`;
//! * with `n = r + 1` factors the arithmetic number is assembled from three
//!   sums `c₁, c₂, c₃` (figure-8, dumbbell and theta shapes on a
//!   distinguished block `B'`) as
//!   `(3g c₁ + (2g+1) c₃)/(24(g-1))·ω̂² - c₃/12·φ + (g-1)(c₁ + c₃ - (g-1) c₂)/2·h`.
//!
//! The brute-force route expands every factor multilinearly into its edges
//! and evaluates each resulting graph with [`crate::graph`].
//!
//! ## Index placement in `c₂` and `c₃`
//!
//! Inside the distinguished block the path `σ(1) - σ(2) - … - σ(|B'|-1) - σ(0)`
//! carries the factors `τ(σ(i))` for `i = 1..|B'|-1`; the two remaining
//! edges start at `σ(0)` (factor `τ(σ(0))`) and at `σ(1)` (the extra factor
//! `τ(r+1)`). For `1 <= j < k <= |B'|`:
//!
//! * `c₂` (dumbbell) joins `σ(0)–σ(k)` and `σ(1)–σ(j)`;
//! * `c₃` (theta) joins `σ(0)–σ(j)` and `σ(1)–σ(k)`.
//!
//! The path product runs over its own index, independent of the pair
//! `(j, k)`. This reading agrees exactly with the brute-force expansion on
//! random tensors.
//!
//! Both routes expose their outer enumeration as independent work units so
//! that callers can spread them over threads; see [`WorkPlan`].

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::combinatorics::{
    enumerate_cyclic_orders, enumerate_set_partitions, factorial, nth_permutation,
};
use crate::error::{invalid, Error};
use crate::graph::{classify_cached, ClassCache, GraphClass, LocalCache};
use crate::rational::Rational;
use crate::symbolic::SymbolicValue;

/// Symmetric coefficients `t_{l,j,k}` for `n` factors on `r` vertices.
/// Indices are 1-based; unset entries are zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CoefficientTensor {
    r: usize,
    n: usize,
    entries: Vec<Rational>,
}

impl CoefficientTensor {
    pub fn zeros(r: usize, n: usize) -> Result<Self, Error> {
        if r == 0 {
            return Err(invalid("a tensor needs r >= 1"));
        }
        Ok(CoefficientTensor { r, n, entries: vec![Rational::zero(); n * r * r] })
    }

    /// Builds a tensor from `(l, j, k, t)` records, completing each entry
    /// symmetrically. Records that disagree on the same unordered slot are
    /// rejected.
    pub fn from_entries(
        r: usize,
        n: usize,
        records: impl IntoIterator<Item = (usize, usize, usize, Rational)>,
    ) -> Result<Self, Error> {
        let mut out = Self::zeros(r, n)?;
        let mut seen = vec![false; n * r * r];
        for (l, j, k, t) in records {
            out.check_index(l, j, k)?;
            let idx = out.index(l, j, k);
            if seen[idx] && out.entries[idx] != t {
                return Err(invalid(format!("conflicting values for t[{l}][{j}][{k}]")));
            }
            seen[idx] = true;
            seen[out.index(l, k, j)] = true;
            out.put(l, j, k, t);
        }
        Ok(out)
    }

    /// One `r × r` row-major matrix per factor. Each must be symmetric.
    pub fn from_matrices(r: usize, matrices: &[Vec<Rational>]) -> Result<Self, Error> {
        let mut out = Self::zeros(r, matrices.len())?;
        for (l, m) in matrices.iter().enumerate() {
            if m.len() != r * r {
                return Err(invalid(format!("factor {} has {} entries, expected {}", l + 1, m.len(), r * r)));
            }
            for j in 0..r {
                for k in 0..r {
                    if m[j * r + k] != m[k * r + j] {
                        return Err(invalid(format!("factor {} is not symmetric", l + 1)));
                    }
                    out.put(l + 1, j + 1, k + 1, m[j * r + k].clone());
                }
            }
        }
        Ok(out)
    }

    fn check_index(&self, l: usize, j: usize, k: usize) -> Result<(), Error> {
        if l == 0 || l > self.n || j == 0 || j > self.r || k == 0 || k > self.r {
            return Err(invalid(format!(
                "index ({l}, {j}, {k}) outside 1..={} x 1..={} x 1..={}",
                self.n, self.r, self.r
            )));
        }
        Ok(())
    }

    fn index(&self, l: usize, j: usize, k: usize) -> usize {
        ((l - 1) * self.r + (j - 1)) * self.r + (k - 1)
    }

    fn put(&mut self, l: usize, j: usize, k: usize, t: Rational) {
        let a = self.index(l, j, k);
        let b = self.index(l, k, j);
        self.entries[b] = t.clone();
        self.entries[a] = t;
    }

    /// Sets `t_{l,j,k} = t_{l,k,j} = t`.
    pub fn set(&mut self, l: usize, j: usize, k: usize, t: Rational) -> Result<(), Error> {
        self.check_index(l, j, k)?;
        self.put(l, j, k, t);
        Ok(())
    }

    /// `t_{l,j,k}`; panics on an index outside the tensor.
    pub fn get(&self, l: usize, j: usize, k: usize) -> &Rational {
        assert!(self.check_index(l, j, k).is_ok(), "index ({l}, {j}, {k}) out of range");
        &self.entries[self.index(l, j, k)]
    }

    /// Number of vertices `r`.
    pub fn r(&self) -> usize {
        self.r
    }

    /// Number of factors `n`.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Factor `l` of the result is factor `order[l - 1]` of `self`.
    pub fn permute_factors(&self, order: &[usize]) -> Result<Self, Error> {
        check_permutation(order, self.n)?;
        let mut out = Self::zeros(self.r, self.n)?;
        for (l, &src) in order.iter().enumerate() {
            for j in 1..=self.r {
                for k in 1..=self.r {
                    out.put(l + 1, j, k, self.get(src, j, k).clone());
                }
            }
        }
        Ok(out)
    }

    /// Moves vertex `j` to `perm[j - 1]` in every factor.
    pub fn relabel_vertices(&self, perm: &[usize]) -> Result<Self, Error> {
        check_permutation(perm, self.r)?;
        let mut out = Self::zeros(self.r, self.n)?;
        for l in 1..=self.n {
            for j in 1..=self.r {
                for k in 1..=self.r {
                    out.put(l, perm[j - 1], perm[k - 1], self.get(l, j, k).clone());
                }
            }
        }
        Ok(out)
    }

    /// Nonzero unordered slots `(j <= k, t)` of factor `l`.
    pub fn support(&self, l: usize) -> Vec<((usize, usize), Rational)> {
        let mut out = Vec::new();
        for j in 1..=self.r {
            for k in j..=self.r {
                let t = self.get(l, j, k);
                if !t.is_zero() {
                    out.push(((j, k), t.clone()));
                }
            }
        }
        out
    }
}

fn check_permutation(p: &[usize], n: usize) -> Result<(), Error> {
    let mut seen = vec![false; n];
    if p.len() != n {
        return Err(invalid("permutation has the wrong length"));
    }
    for &x in p {
        if x == 0 || x > n || seen[x - 1] {
            return Err(invalid("not a permutation"));
        }
        seen[x - 1] = true;
    }
    Ok(())
}

/// An evaluation split into independent units whose partial results are
/// combined exactly. Any split of the units across threads, and any
/// completion order, yields the same output.
pub trait WorkPlan {
    type Partial;
    type Output;

    fn unit_count(&self) -> usize;

    fn eval_unit(&self, index: usize, cache: &dyn ClassCache) -> Result<Self::Partial, Error>;

    /// Combines the partials of units `0..unit_count()`, in index order.
    fn finish(&self, partials: Vec<Self::Partial>) -> Result<Self::Output, Error>;
}

/// Runs every unit of `plan` on the current thread.
pub fn run_serial<P: WorkPlan>(plan: &P) -> Result<P::Output, Error> {
    let cache = LocalCache::new();
    let partials = (0..plan.unit_count())
        .map(|i| plan.eval_unit(i, &cache))
        .collect::<Result<Vec<_>, _>>()?;
    plan.finish(partials)
}

/// Set partitions of `{1..r}` as lists of block bitmasks.
fn partition_masks(r: usize) -> Result<Vec<Vec<u32>>, Error> {
    if r > 16 {
        return Err(invalid("r > 16 is not supported"));
    }
    Ok(enumerate_set_partitions(r)?.map(|p| p.block_masks()).collect())
}

fn mask_elements(mask: u32) -> Vec<usize> {
    (0..32).filter(|b| mask & (1 << b) != 0).map(|b| b + 1).collect()
}

/// `(1/|B|) Σ_σ Π_{i=0}^{|B|-1} t_{τ(σ(i)), σ(i), σ(i+1)}` for the block
/// `B` and the vertex-to-factor assignment `tau`.
fn cycle_sum(t: &CoefficientTensor, tau: &[usize], mask: u32) -> Result<Rational, Error> {
    let block = mask_elements(mask);
    let size = block.len();
    let mut sum = Rational::zero();
    for sigma in enumerate_cyclic_orders(&block)? {
        let mut prod = Rational::one();
        for i in 0..size {
            let (a, b) = (sigma.at(i), sigma.at(i + 1));
            prod *= t.get(tau[a - 1], a, b);
            if prod.is_zero() {
                break;
            }
        }
        sum += prod;
    }
    Ok(sum / Rational::from(size as i64))
}

/// Memo over block masks for one unit.
struct BlockMemo<T> {
    slots: Vec<Option<T>>,
}

impl<T: Clone> BlockMemo<T> {
    fn new(r: usize) -> Self {
        BlockMemo { slots: vec![None; 1 << r] }
    }

    fn get_or(&mut self, mask: u32, f: impl FnOnce() -> Result<T, Error>) -> Result<T, Error> {
        if let Some(v) = &self.slots[mask as usize] {
            return Ok(v.clone());
        }
        let v = f()?;
        self.slots[mask as usize] = Some(v.clone());
        Ok(v)
    }
}

/// Closed-form geometric intersection number, split over `τ ∈ S_r`.
pub struct GeometricPlan<'a> {
    tensor: &'a CoefficientTensor,
    g: Rational,
    partitions: Vec<Vec<u32>>,
}

impl<'a> GeometricPlan<'a> {
    pub fn new(tensor: &'a CoefficientTensor, g: &Rational) -> Result<Self, Error> {
        if tensor.n() != tensor.r() {
            return Err(invalid(format!(
                "geometric intersection needs n = r, got n = {} and r = {}",
                tensor.n(),
                tensor.r()
            )));
        }
        Ok(GeometricPlan { tensor, g: g.clone(), partitions: partition_masks(tensor.r())? })
    }
}

impl WorkPlan for GeometricPlan<'_> {
    type Partial = Rational;
    type Output = Rational;

    fn unit_count(&self) -> usize {
        factorial(self.tensor.r())
    }

    fn eval_unit(&self, index: usize, _: &dyn ClassCache) -> Result<Rational, Error> {
        let r = self.tensor.r();
        let tau = nth_permutation(r, index).ok_or_else(|| invalid("unit index out of range"))?;
        let minus_g = -&self.g;
        let mut memo = BlockMemo::new(r);
        let mut total = Rational::zero();
        for blocks in &self.partitions {
            let mut term = minus_g.pow(blocks.len() as i32);
            for &mask in blocks {
                term *= memo.get_or(mask, || cycle_sum(self.tensor, &tau, mask))?;
                if term.is_zero() {
                    break;
                }
            }
            total += term;
        }
        Ok(total)
    }

    fn finish(&self, partials: Vec<Rational>) -> Result<Rational, Error> {
        Ok(partials.iter().sum())
    }
}

/// The three sums `c₁` (figure-8), `c₂` (dumbbell) and `c₃` (theta).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ArithmeticSums {
    pub c1: Rational,
    pub c2: Rational,
    pub c3: Rational,
}

impl ArithmeticSums {
    fn add(&mut self, other: &ArithmeticSums) {
        self.c1 += &other.c1;
        self.c2 += &other.c2;
        self.c3 += &other.c3;
    }

    /// The arithmetic intersection number these sums determine at genus `g`.
    pub fn assemble(&self, g: &Rational) -> Result<SymbolicValue, Error> {
        check_arithmetic_genus(g)?;
        let one = Rational::one();
        let gm1 = g - &one;
        let omega2 = (Rational::from(3) * g * &self.c1
            + (Rational::from(2) * g + &one) * &self.c3)
            / (Rational::from(24) * &gm1);
        let phi = -(&self.c3 / Rational::from(12));
        let hnt = &gm1 * (&self.c1 + &self.c3 - &gm1 * &self.c2) / Rational::from(2);
        Ok(SymbolicValue::new(Rational::zero(), omega2, phi, hnt))
    }
}

fn check_arithmetic_genus(g: &Rational) -> Result<(), Error> {
    if g.is_zero() || g.is_one() {
        return Err(Error::SingularGenus(format!("{g}: arithmetic intersections need g not in {{0, 1}}")));
    }
    Ok(())
}

/// Tail sums over the distinguished block for one `τ`.
fn block_tails(
    t: &CoefficientTensor,
    tau: &[usize],
    extra: usize,
    mask: u32,
) -> Result<ArithmeticSums, Error> {
    let block = mask_elements(mask);
    let size = block.len();
    let mut out = ArithmeticSums::default();
    for sigma in enumerate_cyclic_orders(&block)? {
        let mut path = Rational::one();
        for i in 1..size {
            let (a, b) = (sigma.at(i), sigma.at(i + 1));
            path *= t.get(tau[a - 1], a, b);
            if path.is_zero() {
                break;
            }
        }
        if path.is_zero() {
            continue;
        }
        let (s0, s1) = (sigma.at(0), sigma.at(1));
        let from0 = tau[s0 - 1];
        for &k in &block {
            out.c1 += &path * t.get(from0, s0, k) * t.get(extra, s1, k);
        }
        for j in 1..=size {
            for k in j + 1..=size {
                let (sj, sk) = (sigma.at(j), sigma.at(k));
                out.c2 += &path * t.get(from0, s0, sk) * t.get(extra, s1, sj);
                out.c3 += &path * t.get(from0, s0, sj) * t.get(extra, s1, sk);
            }
        }
    }
    Ok(out)
}

/// Closed-form arithmetic intersection number, split over `τ ∈ S_{r+1}`.
pub struct ArithmeticPlan<'a> {
    tensor: &'a CoefficientTensor,
    g: Rational,
    partitions: Vec<Vec<u32>>,
}

impl<'a> ArithmeticPlan<'a> {
    pub fn new(tensor: &'a CoefficientTensor, g: &Rational) -> Result<Self, Error> {
        if tensor.n() != tensor.r() + 1 {
            return Err(invalid(format!(
                "arithmetic intersection needs n = r + 1, got n = {} and r = {}",
                tensor.n(),
                tensor.r()
            )));
        }
        check_arithmetic_genus(g)?;
        Ok(ArithmeticPlan { tensor, g: g.clone(), partitions: partition_masks(tensor.r())? })
    }

    /// The sums `c₁, c₂, c₃` before assembly.
    pub fn sums(&self) -> Result<ArithmeticSums, Error> {
        let cache = LocalCache::new();
        let mut total = ArithmeticSums::default();
        for i in 0..self.unit_count() {
            total.add(&self.eval_unit(i, &cache)?);
        }
        Ok(total)
    }
}

impl WorkPlan for ArithmeticPlan<'_> {
    type Partial = ArithmeticSums;
    type Output = SymbolicValue;

    fn unit_count(&self) -> usize {
        factorial(self.tensor.r() + 1)
    }

    fn eval_unit(&self, index: usize, _: &dyn ClassCache) -> Result<ArithmeticSums, Error> {
        let r = self.tensor.r();
        let tau = nth_permutation(r + 1, index).ok_or_else(|| invalid("unit index out of range"))?;
        let extra = tau[r];
        let minus_g = -&self.g;
        let mut cycles = BlockMemo::new(r);
        let mut tails = BlockMemo::new(r);
        let mut out = ArithmeticSums::default();
        for blocks in &self.partitions {
            let weight = minus_g.pow(blocks.len() as i32 - 1);
            let mut cyc = Vec::with_capacity(blocks.len());
            for &mask in blocks {
                cyc.push(cycles.get_or(mask, || cycle_sum(self.tensor, &tau, mask))?);
            }
            for (b, &mask) in blocks.iter().enumerate() {
                let mut rest = weight.clone();
                for (other, c) in cyc.iter().enumerate() {
                    if other != b {
                        rest *= c;
                    }
                }
                if rest.is_zero() {
                    continue;
                }
                let tail = tails.get_or(mask, || block_tails(self.tensor, &tau, extra, mask))?;
                out.c1 += &rest * &tail.c1;
                out.c2 += &rest * &tail.c2;
                out.c3 += &rest * &tail.c3;
            }
        }
        Ok(out)
    }

    fn finish(&self, partials: Vec<ArithmeticSums>) -> Result<SymbolicValue, Error> {
        let mut total = ArithmeticSums::default();
        for p in &partials {
            total.add(p);
        }
        total.assemble(&self.g)
    }
}

/// Multilinear expansion into graphs, split over the choices for the first
/// factor.
///
/// Each factor contributes `½ t_{l,j,k}` for every ordered pair `(j, k)`.
/// The graph only sees the unordered edge, so the two orders of an
/// off-diagonal pair are merged into a single edge of weight `t_{l,j,k}`;
/// a loop keeps weight `½ t_{l,j,j}`. Zero entries are skipped before any
/// graph is built.
pub struct BruteForcePlan {
    r: usize,
    g: Rational,
    choices: Vec<Vec<((usize, usize), Rational)>>,
    zero: bool,
}

impl BruteForcePlan {
    pub fn new(tensor: &CoefficientTensor, g: &Rational) -> Self {
        let r = tensor.r();
        let n = tensor.n();
        let half = Rational::frac(1, 2);
        let choices: Vec<Vec<((usize, usize), Rational)>> = (1..=n)
            .map(|l| {
                tensor
                    .support(l)
                    .into_iter()
                    .map(|((j, k), t)| ((j, k), if j == k { t * &half } else { t }))
                    .collect()
            })
            .collect();
        // Graphs with n not in {r, r + 1} all vanish.
        let zero = (n != r && n != r + 1) || choices.iter().any(|c| c.is_empty());
        BruteForcePlan { r, g: g.clone(), choices, zero }
    }

    fn descend(
        &self,
        depth: usize,
        weight: &Rational,
        edges: &mut Vec<(usize, usize)>,
        acc: &mut BTreeMap<GraphClass, Rational>,
        cache: &dyn ClassCache,
    ) -> Result<(), Error> {
        if depth == self.choices.len() {
            let class = classify_cached(cache, self.r, edges)?;
            if class != GraphClass::Zero {
                *acc.entry(class).or_insert_with(Rational::zero) += weight;
            }
            return Ok(());
        }
        for (edge, w) in &self.choices[depth] {
            edges.push(*edge);
            self.descend(depth + 1, &(weight * w), edges, acc, cache)?;
            edges.pop();
        }
        Ok(())
    }
}

impl WorkPlan for BruteForcePlan {
    type Partial = SymbolicValue;
    type Output = SymbolicValue;

    fn unit_count(&self) -> usize {
        if self.zero {
            0
        } else {
            self.choices[0].len()
        }
    }

    fn eval_unit(&self, index: usize, cache: &dyn ClassCache) -> Result<SymbolicValue, Error> {
        let (edge, w) = self.choices[0].get(index).ok_or_else(|| invalid("unit index out of range"))?;
        let mut edges = vec![*edge];
        let mut acc = BTreeMap::new();
        self.descend(1, w, &mut edges, &mut acc, cache)?;
        let mut out = SymbolicValue::zero();
        for (class, coeff) in &acc {
            if !coeff.is_zero() {
                out.add_scaled(coeff, &class.value(&self.g)?);
            }
        }
        Ok(out)
    }

    fn finish(&self, partials: Vec<SymbolicValue>) -> Result<SymbolicValue, Error> {
        Ok(partials.into_iter().sum())
    }
}

/// Brute-force `⟨M̄_1, …, M̄_n⟩` through graph evaluation. Any `n` is
/// accepted; the result vanishes unless `n ∈ {r, r + 1}`.
pub fn expand_bruteforce(tensor: &CoefficientTensor, g: &Rational) -> Result<SymbolicValue, Error> {
    run_serial(&BruteForcePlan::new(tensor, g))
}

/// Closed-form `⟨M_1, …, M_r⟩` for `n = r`. Valid at every rational `g`.
pub fn intersect_geometric(tensor: &CoefficientTensor, g: &Rational) -> Result<Rational, Error> {
    run_serial(&GeometricPlan::new(tensor, g)?)
}

/// Closed-form `⟨M̄_1, …, M̄_{r+1}⟩` for `n = r + 1`; the scalar component is
/// always zero.
pub fn intersect_arithmetic(tensor: &CoefficientTensor, g: &Rational) -> Result<SymbolicValue, Error> {
    run_serial(&ArithmeticPlan::new(tensor, g)?)
}

pub fn arithmetic_sums(tensor: &CoefficientTensor, g: &Rational) -> Result<ArithmeticSums, Error> {
    ArithmeticPlan::new(tensor, g)?.sums()
}

/// Outcome of comparing two functions of `g` pointwise.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityReport<T> {
    /// Points evaluated, including a mismatching one.
    pub checked: usize,
    /// The first `(g, lhs, rhs)` with `lhs != rhs`.
    pub mismatch: Option<(Rational, T, T)>,
}

impl<T> IdentityReport<T> {
    pub fn holds(&self) -> bool {
        self.mismatch.is_none()
    }
}

/// Evaluates `lhs` and `rhs` at each point and stops at the first
/// disagreement. If both sides are polynomials in `g` of degree at most `d`
/// and `points` holds more than `d` distinct values, agreement everywhere
/// proves the identity.
pub fn verify_identity<T, F1, F2>(lhs: F1, rhs: F2, points: &[Rational]) -> IdentityReport<T>
where
    T: PartialEq,
    F1: Fn(&Rational) -> T,
    F2: Fn(&Rational) -> T,
{
    let mut checked = 0;
    for g in points {
        checked += 1;
        let (a, b) = (lhs(g), rhs(g));
        if a != b {
            return IdentityReport { checked, mismatch: Some((g.clone(), a, b)) };
        }
    }
    IdentityReport { checked, mismatch: None }
}
