//! Multi-threaded evaluation of the core work plans.
//!
//! Units run on a dedicated rayon pool, partials are collected in unit
//! order, and the reduction is exact, so the result is identical for every
//! thread count.

use std::collections::HashMap;
use std::sync::RwLock;

use rayon::prelude::*;
use tauto_core::engine::{run_serial, ArithmeticPlan, BruteForcePlan, GeometricPlan, WorkPlan};
use tauto_core::graph::{ClassCache, GraphClass, GraphKey};
use tauto_core::hodge::{better_witness, build_hodge_tensor, evaluate_candidate, BoundWitness};
use tauto_core::{BoundMatrix, CoefficientTensor, Error, PullbackSpec, Rational, SymbolicValue};

/// Class memo shared by all worker threads.
#[derive(Debug, Default)]
pub struct SharedClassCache(RwLock<HashMap<GraphKey, GraphClass>>);

impl SharedClassCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.0.read().expect("cache lock").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl ClassCache for SharedClassCache {
    fn get(&self, key: &GraphKey) -> Option<GraphClass> {
        self.0.read().expect("cache lock").get(key).copied()
    }

    fn insert(&self, key: GraphKey, class: GraphClass) {
        self.0.write().expect("cache lock").insert(key, class);
    }
}

fn pool(jobs: usize) -> Result<rayon::ThreadPool, Error> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|e| Error::InvalidArgument(format!("cannot start {jobs} threads: {e}")))
}

/// Runs `plan` on `jobs` threads; `jobs <= 1` stays on the calling thread.
pub fn run_plan<P>(plan: &P, jobs: usize) -> Result<P::Output, Error>
where
    P: WorkPlan + Sync,
    P::Partial: Send,
{
    if jobs <= 1 {
        return run_serial(plan);
    }
    let cache = SharedClassCache::new();
    let partials = pool(jobs)?.install(|| {
        (0..plan.unit_count())
            .into_par_iter()
            .map(|i| plan.eval_unit(i, &cache))
            .collect::<Result<Vec<_>, _>>()
    })?;
    plan.finish(partials)
}

pub fn intersect_geometric_par(t: &CoefficientTensor, g: &Rational, jobs: usize) -> Result<Rational, Error> {
    run_plan(&GeometricPlan::new(t, g)?, jobs)
}

pub fn intersect_arithmetic_par(t: &CoefficientTensor, g: &Rational, jobs: usize) -> Result<SymbolicValue, Error> {
    run_plan(&ArithmeticPlan::new(t, g)?, jobs)
}

pub fn expand_bruteforce_par(t: &CoefficientTensor, g: &Rational, jobs: usize) -> Result<SymbolicValue, Error> {
    run_plan(&BruteForcePlan::new(t, g), jobs)
}

pub fn hodge_form_par(spec: &PullbackSpec, b: &BoundMatrix, g: &Rational, jobs: usize) -> Result<SymbolicValue, Error> {
    intersect_arithmetic_par(&build_hodge_tensor(spec, b)?, g, jobs)
}

/// Parallel counterpart of `tauto_core::hodge::bound_search`; one candidate
/// per unit.
pub fn bound_search_par(
    spec: &PullbackSpec,
    g: &Rational,
    candidates: &[BoundMatrix],
    jobs: usize,
) -> Result<Option<BoundWitness>, Error> {
    let eval = |b: &BoundMatrix| -> Result<Option<BoundWitness>, Error> {
        Ok(evaluate_candidate(spec, g, b)?.map(|ratio| (b.clone(), ratio)))
    };
    let scored: Vec<Option<BoundWitness>> = if jobs <= 1 {
        candidates.iter().map(eval).collect::<Result<_, _>>()?
    } else {
        pool(jobs)?.install(|| candidates.par_iter().map(eval).collect::<Result<_, _>>())?
    };
    Ok(scored.into_iter().fold(None, better_witness))
}
