//! Exact intersection numbers of tautological adelic line bundles on the
//! self-products `X^r` of a curve of genus `g`.
//!
//! Every number produced here is an exact rational, or a [`SymbolicValue`]:
//! a rational combination of the four basis quantities `1`, `ω̂²`, `φ(X)` and
//! `h_NT(x_α)`. The crate is organized bottom-up:
//!
//! * [`rational`] and [`combinatorics`] carry the arithmetic and the
//!   enumerators (set partitions, permutations, cyclic orders).
//! * [`symbolic`] is the value space.
//! * [`graph`] reduces intersection multigraphs to their terminal shapes and
//!   evaluates them.
//! * [`engine`] holds the two independent evaluators for linear combinations
//!   of the bundles `Δ̂^α_{jk}`: the closed partition/permutation sums and the
//!   brute-force multilinear expansion into graphs.
//! * [`heights`] and [`hodge`] derive Néron–Tate heights, Bogomolov bounds
//!   and lower bounds for `ω̂²` from the engines.
//!
//! The crate is `no_std` and only needs `alloc`. Thread-level parallelism is
//! left to callers: the engines expose their outer enumeration as
//! independent work units (see [`engine::WorkPlan`]).

#![no_std]

extern crate alloc;

pub mod combinatorics;
pub mod engine;
pub mod error;
pub mod graph;
pub mod heights;
pub mod hodge;
pub mod rational;
pub mod symbolic;

pub use combinatorics::{
    enumerate_cyclic_orders, enumerate_permutations, enumerate_set_partitions, factorial,
    falling_factorial, nth_permutation, CyclicOrder, SetPartition,
};
pub use engine::{
    expand_bruteforce, intersect_arithmetic, intersect_geometric, verify_identity,
    CoefficientTensor, IdentityReport,
};
pub use error::Error;
pub use graph::{evaluate_graph, evaluate_graph_by, GraphClass, IntersectionGraph, TerminalForm, TerminalKind};
pub use heights::{CurveParams, HeightCoefficients, PullbackSpec};
pub use hodge::BoundMatrix;
pub use rational::Rational;
pub use symbolic::{InvariantValues, SymbolicValue};
