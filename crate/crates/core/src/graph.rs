//! Intersection multigraphs and their evaluation.
//!
//! A product of `n` bundles `Δ̂^α_{jk}` on `X^r` is encoded as a multigraph
//! on the vertices `1..=r` with one edge `{j, k}` per factor (a loop when
//! `j = k`). Its intersection number depends only on the shape of the graph:
//!
//! * it vanishes unless `r ∈ {n - 1, n}`, and whenever some vertex has
//!   degree `<= 1`;
//! * it is multiplicative over connected components;
//! * a degree-2 vertex that does not carry a loop can be contracted away,
//!   joining its two neighbours;
//! * what survives is a union of single loops ("circles") and at most one of
//!   the three terminal shapes below.
//!
//! | shape       | value                                           |
//! |-------------|-------------------------------------------------|
//! | circle      | `-2g`                                           |
//! | figure-8    | `g/(g-1)·ω̂² + 4(g-1)·h`                         |
//! | dumbbell    | `-4(g-1)²·h`                                    |
//! | theta       | `(2g+1)/(2g-2)·ω̂² - φ + 6(g-1)·h`               |

use alloc::collections::BTreeMap;
use alloc::format;
use alloc::vec;
use alloc::vec::Vec;
use core::cell::RefCell;

use crate::error::{invalid, Error};
use crate::rational::Rational;
use crate::symbolic::SymbolicValue;

/// `(is_loop, smaller end degree, larger end degree, multiplicity)`.
pub type EdgeClass = (bool, usize, usize, usize);

/// Undirected multigraph with loops on the vertices `1..=num_vertices`.
///
/// Edges are stored with their endpoints ordered (`j <= k`) and the list is
/// kept sorted, so `==` compares edge multisets.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntersectionGraph {
    num_vertices: usize,
    edges: Vec<(usize, usize)>,
}

impl IntersectionGraph {
    pub fn new(num_vertices: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self, Error> {
        if num_vertices == 0 {
            return Err(invalid("a graph needs at least one vertex"));
        }
        let mut out = Vec::new();
        for (j, k) in edges {
            if j == 0 || k == 0 || j > num_vertices || k > num_vertices {
                return Err(invalid(format!(
                    "edge ({j}, {k}) has an endpoint outside 1..={num_vertices}"
                )));
            }
            out.push((j.min(k), j.max(k)));
        }
        out.sort_unstable();
        Ok(IntersectionGraph { num_vertices, edges: out })
    }

    pub fn num_vertices(&self) -> usize {
        self.num_vertices
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Degree of each vertex, a loop counting twice.
    pub fn vertex_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.num_vertices];
        for &(j, k) in &self.edges {
            deg[j - 1] += 1;
            deg[k - 1] += 1;
        }
        deg
    }

    fn component_labels(&self) -> (Vec<usize>, usize) {
        let n = self.num_vertices;
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for &(j, k) in &self.edges {
            let (a, b) = (find(&mut parent, j - 1), find(&mut parent, k - 1));
            if a != b {
                parent[a.max(b)] = a.min(b);
            }
        }
        // Number components by their smallest vertex.
        let mut label = vec![usize::MAX; n];
        let mut count = 0;
        let mut out = vec![0; n];
        for (v, slot) in out.iter_mut().enumerate() {
            let root = find(&mut parent, v);
            if label[root] == usize::MAX {
                label[root] = count;
                count += 1;
            }
            *slot = label[root];
        }
        (out, count)
    }

    /// Number of connected components `b₀`; isolated vertices count.
    pub fn component_count(&self) -> usize {
        self.component_labels().1
    }

    /// Connected components, ordered by smallest vertex, each relabelled to
    /// `1..` preserving the vertex order.
    pub fn split_components(&self) -> Vec<IntersectionGraph> {
        let (labels, count) = self.component_labels();
        let mut new_index = vec![0; self.num_vertices];
        let mut sizes = vec![0usize; count];
        for v in 0..self.num_vertices {
            sizes[labels[v]] += 1;
            new_index[v] = sizes[labels[v]];
        }
        let mut parts: Vec<IntersectionGraph> = sizes
            .iter()
            .map(|&s| IntersectionGraph { num_vertices: s, edges: Vec::new() })
            .collect();
        for &(j, k) in &self.edges {
            parts[labels[j - 1]].edges.push((new_index[j - 1], new_index[k - 1]));
        }
        parts
    }

    /// Vertices of degree 2 that do not carry a loop.
    fn contractible(&self) -> Vec<usize> {
        let deg = self.vertex_degrees();
        let mut has_loop = vec![false; self.num_vertices];
        for &(j, k) in &self.edges {
            if j == k {
                has_loop[j - 1] = true;
            }
        }
        (1..=self.num_vertices).filter(|&v| deg[v - 1] == 2 && !has_loop[v - 1]).collect()
    }

    /// Removes the loop-free degree-2 vertex `v`, replacing its edges
    /// `{a, v}, {v, b}` by `{a, b}`.
    fn contract_vertex(&mut self, v: usize) {
        let incident: Vec<usize> =
            (0..self.edges.len()).filter(|&i| self.edges[i].0 == v || self.edges[i].1 == v).collect();
        debug_assert_eq!(incident.len(), 2);
        let other = |(j, k): (usize, usize)| if j == v { k } else { j };
        let a = other(self.edges[incident[0]]);
        let b = other(self.edges[incident[1]]);
        self.edges.remove(incident[1]);
        self.edges.remove(incident[0]);
        self.edges.push((a.min(b), a.max(b)));
        let shift = |x: usize| if x > v { x - 1 } else { x };
        for e in &mut self.edges {
            *e = (shift(e.0), shift(e.1));
        }
        self.edges.sort_unstable();
        self.num_vertices -= 1;
    }

    /// Contracts loop-free degree-2 vertices until none is left, always
    /// taking the smallest candidate.
    pub fn contract_degree_two(&self) -> IntersectionGraph {
        self.contract_degree_two_by(|_| 0)
    }

    /// As [`contract_degree_two`](Self::contract_degree_two), with `pick`
    /// choosing which of the current candidates (given in increasing order)
    /// to contract next. The result does not depend on the choices up to
    /// relabelling; the test suites check this.
    pub fn contract_degree_two_by(&self, mut pick: impl FnMut(&[usize]) -> usize) -> IntersectionGraph {
        let mut g = self.clone();
        loop {
            let candidates = g.contractible();
            // A lone vertex is never a candidate: its degree-2 edges are a loop.
            if candidates.is_empty() {
                return g;
            }
            let v = candidates[pick(&candidates) % candidates.len()];
            g.contract_vertex(v);
        }
    }

    /// A relabelling-invariant fingerprint: vertex count, sorted degree
    /// multiset, and the sorted multiset of edge classes
    /// `(is_loop, smaller end degree, larger end degree, multiplicity)`.
    /// It separates all graphs left after fully contracting components with
    /// at most one surplus edge.
    pub fn shape_signature(&self) -> (usize, Vec<usize>, Vec<EdgeClass>) {
        let deg = self.vertex_degrees();
        let mut mult: BTreeMap<(usize, usize), usize> = BTreeMap::new();
        for &e in &self.edges {
            *mult.entry(e).or_default() += 1;
        }
        let mut classes: Vec<EdgeClass> = mult
            .iter()
            .map(|(&(j, k), &m)| {
                let (dj, dk) = (deg[j - 1], deg[k - 1]);
                (j == k, dj.min(dk), dj.max(dk), m)
            })
            .collect();
        classes.sort_unstable();
        let mut sorted = deg;
        sorted.sort_unstable();
        (self.num_vertices, sorted, classes)
    }

    /// Classifies a connected, fully contracted graph.
    pub fn classify_terminal(&self) -> TerminalForm {
        let loops_at = |v: usize| self.edges.iter().filter(|&&(j, k)| j == v && k == v).count();
        let kind = match self.num_vertices {
            1 => match self.edges.len() {
                1 => TerminalKind::Circle,
                2 => TerminalKind::FigureEight,
                _ => TerminalKind::Vanishing,
            },
            2 => {
                let cross = self.edges.iter().filter(|&&(j, k)| j != k).count();
                match (loops_at(1), loops_at(2), cross) {
                    (1, 1, 1) => TerminalKind::Dumbbell,
                    (0, 0, 3) => TerminalKind::Theta,
                    _ => TerminalKind::Vanishing,
                }
            }
            _ => TerminalKind::Vanishing,
        };
        TerminalForm { kind, b0: 1 }
    }

    /// The shape class of the graph, which determines its value at every
    /// genus.
    pub fn class(&self) -> GraphClass {
        let r = self.num_vertices;
        let n = self.edges.len();
        if n != r && n != r + 1 {
            return GraphClass::Zero;
        }
        if self.vertex_degrees().iter().any(|&d| d <= 1) {
            return GraphClass::Zero;
        }
        let components = self.split_components();
        let b0 = components.len();
        if n == r {
            // Handshake: 2r = Σ deg and every degree is >= 2, so every
            // component is a cycle.
            return GraphClass::Circles { b0 };
        }
        let mut special = None;
        for c in &components {
            if c.num_edges() == c.num_vertices() + 1 {
                special = Some(c.contract_degree_two().classify_terminal().kind);
            }
        }
        match special {
            Some(TerminalKind::Vanishing) | Some(TerminalKind::Circle) | None => {
                debug_assert!(false, "no terminal shape in {self:?}");
                GraphClass::Zero
            }
            Some(kind) => GraphClass::Terminal(TerminalForm { kind, b0 }),
        }
    }

    pub fn key(&self) -> Option<GraphKey> {
        GraphKey::new(self.num_vertices, &self.edges)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TerminalKind {
    Circle,
    FigureEight,
    Dumbbell,
    Theta,
    Vanishing,
}

impl TerminalKind {
    /// The value of the bare terminal shape at genus `g`.
    pub fn value(self, g: &Rational) -> Result<SymbolicValue, Error> {
        let one = Rational::one();
        let gm1 = g - &one;
        if !matches!(self, TerminalKind::Circle | TerminalKind::Vanishing) && gm1.is_zero() {
            return Err(Error::SingularGenus(format!("{g}: {self:?} has a g - 1 denominator")));
        }
        let zero = Rational::zero;
        Ok(match self {
            TerminalKind::Circle => SymbolicValue::from_scalar(Rational::from(-2) * g),
            TerminalKind::Vanishing => SymbolicValue::zero(),
            TerminalKind::FigureEight => {
                SymbolicValue::new(zero(), g / &gm1, zero(), Rational::from(4) * &gm1)
            }
            TerminalKind::Dumbbell => {
                SymbolicValue::new(zero(), zero(), zero(), Rational::from(-4) * &gm1 * &gm1)
            }
            TerminalKind::Theta => SymbolicValue::new(
                zero(),
                (Rational::from(2) * g + &one) / (Rational::from(2) * &gm1),
                Rational::from(-1),
                Rational::from(6) * &gm1,
            ),
        })
    }
}

/// A terminal shape together with the component count `b₀` of the graph it
/// came from (the other `b₀ - 1` components are circles).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct TerminalForm {
    pub kind: TerminalKind,
    pub b0: usize,
}

/// Everything about a graph that its value depends on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum GraphClass {
    Zero,
    /// `b0` disjoint cycles; value `(-2g)^b0`.
    Circles { b0: usize },
    /// One terminal shape plus `b0 - 1` cycles.
    Terminal(TerminalForm),
}

impl GraphClass {
    pub fn value(&self, g: &Rational) -> Result<SymbolicValue, Error> {
        let minus_2g = Rational::from(-2) * g;
        match *self {
            GraphClass::Zero => Ok(SymbolicValue::zero()),
            GraphClass::Circles { b0 } => Ok(SymbolicValue::from_scalar(minus_2g.pow(b0 as i32))),
            GraphClass::Terminal(TerminalForm { kind, b0 }) => {
                Ok(kind.value(g)?.scale(&minus_2g.pow(b0 as i32 - 1)))
            }
        }
    }
}

/// `⟨Γ⟩` at genus `g`.
pub fn evaluate_graph(graph: &IntersectionGraph, g: &Rational) -> Result<SymbolicValue, Error> {
    graph.class().value(g)
}

/// `⟨Γ⟩` by contracting the whole graph in the order chosen by `pick` (see
/// [`IntersectionGraph::contract_degree_two_by`]) and multiplying the values
/// of the resulting components. Agrees with [`evaluate_graph`] for every
/// choice of `pick`.
pub fn evaluate_graph_by(
    graph: &IntersectionGraph,
    g: &Rational,
    pick: impl FnMut(&[usize]) -> usize,
) -> Result<SymbolicValue, Error> {
    let (r, n) = (graph.num_vertices(), graph.num_edges());
    if (n != r && n != r + 1) || graph.vertex_degrees().iter().any(|&d| d <= 1) {
        return Ok(SymbolicValue::zero());
    }
    let mut out = SymbolicValue::from_scalar(Rational::one());
    for c in graph.contract_degree_two_by(pick).split_components() {
        let v = c.classify_terminal().kind.value(g)?;
        out = out
            .checked_mul(&v)
            .ok_or_else(|| Error::Precondition("two components with surplus edges".into()))?;
    }
    Ok(out)
}

/// Exact edge multiset of a small graph, packed for use as a memo key.
/// Representable when there are at most 15 vertices and 16 edges.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GraphKey {
    vertices: u8,
    edges: u8,
    packed: u128,
}

impl GraphKey {
    pub fn new(num_vertices: usize, edges: &[(usize, usize)]) -> Option<GraphKey> {
        if num_vertices > 15 || edges.len() > 16 {
            return None;
        }
        let mut codes: Vec<u8> =
            edges.iter().map(|&(j, k)| ((j.min(k) as u8) << 4) | k.max(j) as u8).collect();
        codes.sort_unstable();
        let packed = codes.iter().fold(0u128, |acc, &c| (acc << 8) | c as u128);
        Some(GraphKey { vertices: num_vertices as u8, edges: edges.len() as u8, packed })
    }
}

/// Memo of graph classes. Inserts are idempotent: a key always maps to the
/// same class, so concurrent implementations may race freely.
pub trait ClassCache {
    fn get(&self, key: &GraphKey) -> Option<GraphClass>;
    fn insert(&self, key: GraphKey, class: GraphClass);
}

/// Always recomputes.
#[derive(Debug, Default, Clone, Copy)]
pub struct NoCache;

impl ClassCache for NoCache {
    fn get(&self, _: &GraphKey) -> Option<GraphClass> {
        None
    }
    fn insert(&self, _: GraphKey, _: GraphClass) {}
}

/// Single-threaded memo.
#[derive(Debug, Default)]
pub struct LocalCache(RefCell<BTreeMap<GraphKey, GraphClass>>);

impl LocalCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.0.borrow().len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.borrow().is_empty()
    }
}

impl ClassCache for LocalCache {
    fn get(&self, key: &GraphKey) -> Option<GraphClass> {
        self.0.borrow().get(key).copied()
    }
    fn insert(&self, key: GraphKey, class: GraphClass) {
        self.0.borrow_mut().insert(key, class);
    }
}

/// Class of the graph with the given edges, going through `cache`.
pub fn classify_cached(
    cache: &dyn ClassCache,
    num_vertices: usize,
    edges: &[(usize, usize)],
) -> Result<GraphClass, Error> {
    let key = GraphKey::new(num_vertices, edges);
    if let Some(class) = key.as_ref().and_then(|k| cache.get(k)) {
        return Ok(class);
    }
    let class = IntersectionGraph::new(num_vertices, edges.iter().copied())?.class();
    if let Some(k) = key {
        cache.insert(k, class);
    }
    Ok(class)
}
