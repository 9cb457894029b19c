//! Seeded identity and oracle suites behind `tauto verify`.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tauto_core::heights::{
    arithmetic_self_intersection, bogomolov_bound, geometric_self_intersection, height_coefficients,
    height_from_self_intersections, pullback_tensor,
};
use tauto_core::hodge::alternating_cycle_matrix;
use tauto_core::{
    evaluate_graph, verify_identity, BoundMatrix, CoefficientTensor, CurveParams, Error, IdentityReport,
    IntersectionGraph, InvariantValues, PullbackSpec, Rational, SymbolicValue,
};

use crate::error::CliError;
use crate::parallel::{expand_bruteforce_par, hodge_form_par, intersect_arithmetic_par, intersect_geometric_par};

pub const SUITES: [&str; 6] = ["table1", "oracle-geometric", "oracle-arithmetic", "closed-forms", "heights", "bounds"];

#[derive(Debug, Clone, Copy)]
pub struct VerifyOptions {
    pub max_r: usize,
    pub seed: u64,
    pub jobs: usize,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { max_r: 4, seed: 0, jobs: 1 }
    }
}

/// Outcome of one named identity.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub checked: usize,
    /// First counterexample.
    pub failure: Option<String>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.failure.is_none()
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.failure {
            None => write!(f, "PASS {} ({} cases)", self.name, self.checked),
            Some(why) => write!(f, "FAIL {} after {} cases: {}", self.name, self.checked, why),
        }
    }
}

/// Accumulates cases for one check, keeping the first failure.
struct Tally {
    name: String,
    checked: usize,
    failure: Option<String>,
}

impl Tally {
    fn new(name: impl Into<String>) -> Self {
        Tally { name: name.into(), checked: 0, failure: None }
    }

    fn case<T: fmt::Display + PartialEq>(&mut self, context: impl fmt::Display, lhs: &T, rhs: &T) {
        if self.failure.is_some() {
            return;
        }
        self.checked += 1;
        if lhs != rhs {
            self.failure = Some(format!("{context}: {lhs} != {rhs}"));
        }
    }

    fn report<T: fmt::Display>(&mut self, context: impl fmt::Display, report: IdentityReport<T>) {
        if self.failure.is_some() {
            return;
        }
        self.checked += report.checked;
        if let Some((g, lhs, rhs)) = report.mismatch {
            self.failure = Some(format!("{context} at g = {g}: {lhs} != {rhs}"));
        }
    }

    fn done(self) -> Check {
        Check { name: self.name, checked: self.checked, failure: self.failure }
    }
}

fn q(n: i64) -> Rational {
    Rational::from(n)
}

fn points(lo: i64, hi: i64) -> Vec<Rational> {
    (lo..=hi).map(q).collect()
}

fn suite_rng(seed: u64, suite: &str) -> ChaCha8Rng {
    let tag = SUITES.iter().position(|s| *s == suite).unwrap_or(0) as u64;
    ChaCha8Rng::seed_from_u64(seed.wrapping_mul(0x9e37_79b9_7f4a_7c15).wrapping_add(tag))
}

/// Tensor with entries `a/b`, `|a| <= 2`, `b ∈ {1, 2}`.
pub fn random_tensor(rng: &mut impl Rng, r: usize, n: usize) -> CoefficientTensor {
    let mut t = CoefficientTensor::zeros(r, n).expect("r >= 1");
    for l in 1..=n {
        for j in 1..=r {
            for k in j..=r {
                let v = Rational::frac(rng.gen_range(-2..=2), rng.gen_range(1..=2));
                t.set(l, j, k, v).expect("in range");
            }
        }
    }
    t
}

/// `m` with `1 <= |m_j| <= 3`.
pub fn random_m(rng: &mut impl Rng, r: usize) -> PullbackSpec {
    let m = (0..r).map(|_| rng.gen_range(1..=3) * if rng.gen() { 1 } else { -1 }).collect();
    PullbackSpec::new(m).expect("nonzero entries")
}

/// Random tensors per vertex count; fewer where the brute force grows.
fn oracle_count(r: usize) -> usize {
    match r {
        0..=3 => 20,
        4 => 5,
        _ => 2,
    }
}

const ORACLE_GENERA: [i64; 3] = [2, 3, 5];

fn table1() -> Result<Vec<Check>, Error> {
    let g_points = points(2, 10);
    let graph = |r, e: &[(usize, usize)]| IntersectionGraph::new(r, e.iter().copied());
    type Row = (&'static str, IntersectionGraph, fn(&Rational) -> SymbolicValue);
    let rows: [Row; 4] = [
        ("table1/circle", graph(1, &[(1, 1)])?, |g| SymbolicValue::from_scalar(q(-2) * g)),
        ("table1/figure-eight", graph(1, &[(1, 1), (1, 1)])?, |g| {
            let gm1 = g - q(1);
            SymbolicValue::new(q(0), g / &gm1, q(0), q(4) * gm1)
        }),
        ("table1/dumbbell", graph(2, &[(1, 1), (1, 2), (2, 2)])?, |g| {
            let gm1 = g - q(1);
            SymbolicValue::new(q(0), q(0), q(0), q(-4) * &gm1 * &gm1)
        }),
        ("table1/theta", graph(2, &[(1, 2), (1, 2), (1, 2)])?, |g| {
            let gm1 = g - q(1);
            SymbolicValue::new(q(0), (q(2) * g + q(1)) / (q(2) * &gm1), q(-1), q(6) * gm1)
        }),
    ];
    Ok(rows
        .into_iter()
        .map(|(name, gr, expected)| {
            let mut tally = Tally::new(name);
            tally.report(
                "value",
                verify_identity(|g| shown(evaluate_graph(&gr, g)), |g| expected(g).to_string(), &g_points),
            );
            tally.done()
        })
        .collect())
}

/// A computed side of an identity as canonical text. Fractions print in
/// lowest terms, so equal texts mean equal values.
fn shown<T: fmt::Display, E: fmt::Display>(v: Result<T, E>) -> String {
    match v {
        Ok(v) => v.to_string(),
        Err(e) => format!("error: {e}"),
    }
}

fn oracle_geometric(opts: &VerifyOptions) -> Result<Vec<Check>, Error> {
    let mut rng = suite_rng(opts.seed, "oracle-geometric");
    let mut out = Vec::new();
    for r in 1..=opts.max_r {
        let mut tally = Tally::new(format!("oracle-geometric/r={r}"));
        for i in 0..oracle_count(r) {
            let g = q(ORACLE_GENERA[i % ORACLE_GENERA.len()]);
            let t = random_tensor(&mut rng, r, r);
            let closed = SymbolicValue::from_scalar(intersect_geometric_par(&t, &g, opts.jobs)?);
            let brute = expand_bruteforce_par(&t, &g, opts.jobs)?;
            tally.case(format_args!("tensor {i}, g = {g}"), &closed, &brute);
        }
        out.push(tally.done());
    }
    Ok(out)
}

fn oracle_arithmetic(opts: &VerifyOptions) -> Result<Vec<Check>, Error> {
    let mut rng = suite_rng(opts.seed, "oracle-arithmetic");
    let mut out = Vec::new();
    for r in 1..=opts.max_r {
        let mut tally = Tally::new(format!("oracle-arithmetic/r={r}"));
        for i in 0..oracle_count(r) {
            let g = q(ORACLE_GENERA[i % ORACLE_GENERA.len()]);
            let t = random_tensor(&mut rng, r, r + 1);
            let closed = intersect_arithmetic_par(&t, &g, opts.jobs)?;
            let brute = expand_bruteforce_par(&t, &g, opts.jobs)?;
            tally.case(format_args!("tensor {i}, g = {g}"), &closed, &brute);
        }
        out.push(tally.done());
    }
    Ok(out)
}

fn genus(g: &Rational) -> Result<CurveParams, Error> {
    CurveParams::new(g.to_i64().ok_or_else(|| Error::InvalidArgument(format!("genus {g}")))?, 1)
}

fn closed_forms(opts: &VerifyOptions) -> Result<Vec<Check>, Error> {
    let mut rng = suite_rng(opts.seed, "closed-forms");
    let mut geo = Tally::new("closed-forms/geometric");
    let mut ari = Tally::new("closed-forms/arithmetic");
    for r in 1..=opts.max_r {
        for _ in 0..3 {
            let spec = random_m(&mut rng, r);
            let tensor = pullback_tensor(&spec, r)?;
            geo.report(
                format_args!("m = {:?}", spec.m()),
                verify_identity(
                    |g| shown(genus(g).map(|p| geometric_self_intersection(&spec, &p))),
                    |g| shown(intersect_geometric_par(&tensor, g, opts.jobs)),
                    &points(1, 8),
                ),
            );
            let tensor = pullback_tensor(&spec, r + 1)?;
            ari.report(
                format_args!("m = {:?}", spec.m()),
                verify_identity(
                    |g| shown(genus(g).and_then(|p| arithmetic_self_intersection(&spec, &p))),
                    |g| shown(intersect_arithmetic_par(&tensor, g, opts.jobs)),
                    &points(2, 8),
                ),
            );
        }
    }
    Ok(vec![geo.done(), ari.done()])
}

fn heights(opts: &VerifyOptions) -> Result<Vec<Check>, Error> {
    let mut rng = suite_rng(opts.seed, "heights");
    let mut routes = Tally::new("heights/two-routes");
    let mut full = Tally::new("heights/r=g-vanishes");
    let mut genus2 = Tally::new("heights/genus-2-relation");
    for g in 2..=6i64 {
        for r in 1..g as usize {
            let spec = random_m(&mut rng, r);
            let p = CurveParams::new(g, rng.gen_range(1..=3))?;
            let closed = height_coefficients(&spec, &p)?.assembled();
            routes.case(format_args!("g = {g}, m = {:?}", spec.m()), &height_from_self_intersections(&spec, &p)?, &closed);
        }
    }
    for g in 3..=6i64 {
        let spec = random_m(&mut rng, g as usize);
        let v = arithmetic_self_intersection(&spec, &CurveParams::new(g, 1)?)?;
        full.case(format_args!("g = {g}, m = {:?}", spec.m()), &v, &SymbolicValue::zero());
    }
    let relation = InvariantValues::new(q(2), q(5), q(0));
    for _ in 0..5 {
        let spec = random_m(&mut rng, 2);
        let v = arithmetic_self_intersection(&spec, &CurveParams::new(2, 1)?)?;
        genus2.case(format_args!("m = {:?}", spec.m()), &v.evaluate_numeric(&relation), &q(0));
    }
    Ok(vec![routes.done(), full.done(), genus2.done()])
}

fn bounds(opts: &VerifyOptions) -> Result<Vec<Check>, Error> {
    let mut rng = suite_rng(opts.seed, "bounds");
    let jobs = opts.jobs;

    let mut two = Tally::new("bounds/two-vertex-form");
    let pair = PullbackSpec::new(vec![1, 1])?;
    for g in points(2, 12) {
        let b = BoundMatrix::uniform(2, q(1), g.clone())?;
        let g2 = &g * &g;
        let expected = SymbolicValue::new(q(0), -(q(4) * &g2 * (q(2) * &g + q(1))) / (&g - q(1)), q(4) * g2, q(0));
        two.case(format_args!("g = {g}"), &hodge_form_par(&pair, &b, &g, jobs)?.without_hnt(), &expected);
    }

    let mut four = Tally::new("bounds/alternating-form");
    let ones = PullbackSpec::new(vec![1; 4])?;
    let alt = alternating_cycle_matrix(4)?;
    for g in points(3, 8) {
        let cubic = q(15) * g.pow(3) - q(14) * g.pow(2) - q(19) * &g - q(6);
        let expected = SymbolicValue::new(
            q(0),
            -(q(4) * cubic) / (&g - q(1)),
            q(8) * (q(3) * g.pow(2) - &g - q(6)),
            q(0),
        );
        four.case(format_args!("g = {g}"), &hodge_form_par(&ones, &alt, &g, jobs)?.without_hnt(), &expected);
    }
    for (g, ratio) in [(3, Rational::frac(1, 3)), (4, Rational::frac(38, 109))] {
        let form = hodge_form_par(&ones, &alt, &q(g), jobs)?;
        four.case(format_args!("ratio at g = {g}"), &form.derive_phi_bound()?.unwrap_or_default(), &ratio);
    }

    let mut zero_sum = Tally::new("bounds/zero-sum-ratio");
    for g in 3..=10i64 {
        let r = rng.gen_range(2..g as usize).min(5);
        let m = loop {
            let mut m: Vec<i64> = (0..r - 1).map(|_| rng.gen_range(-3..=3)).collect();
            m.push(-m.iter().sum::<i64>());
            if !m.contains(&0) {
                break m;
            }
        };
        let spec = PullbackSpec::new(m)?;
        let h = height_coefficients(&spec, &CurveParams::new(g, 1)?)?;
        // 0 <= a·ω̂² + b·φ rearranged as 0 >= -a·ω̂² - b·φ.
        let ratio = SymbolicValue::new(q(0), -h.a, -h.b, q(0)).derive_phi_bound()?.unwrap_or_default();
        zero_sum.case(format_args!("g = {g}, m = {:?}", spec.m()), &ratio, &Rational::frac(2, 3 * g - 1));
    }

    let mut bogomolov = Tally::new("bounds/bogomolov-combination");
    for g in 3..=12i64 {
        for _ in 0..3 {
            let r = rng.gen_range(1..g as usize).min(6);
            let spec = random_m(&mut rng, r);
            let p = CurveParams::new(g, rng.gen_range(1..=3))?;
            let h = height_coefficients(&spec, &p)?;
            let combined = &h.prefactor * (&h.a * Rational::frac(g - 1, 2 * g + 1) + &h.b);
            bogomolov.case(format_args!("g = {g}, m = {:?}", spec.m()), &bogomolov_bound(&spec, &p)?, &combined);
        }
    }
    Ok(vec![two.done(), four.done(), zero_sum.done(), bogomolov.done()])
}

/// Runs one suite, or all of them for `"all"`.
pub fn run_suite(name: &str, opts: &VerifyOptions) -> Result<Vec<Check>, CliError> {
    if opts.max_r == 0 || opts.max_r > 8 {
        return Err(CliError::Usage(format!("--max-r must be in 1..=8, got {}", opts.max_r)));
    }
    let run = |s: &str| -> Result<Vec<Check>, Error> {
        match s {
            "table1" => table1(),
            "oracle-geometric" => oracle_geometric(opts),
            "oracle-arithmetic" => oracle_arithmetic(opts),
            "closed-forms" => closed_forms(opts),
            "heights" => heights(opts),
            "bounds" => bounds(opts),
            _ => unreachable!(),
        }
    };
    if name == "all" {
        let mut out = Vec::new();
        for s in SUITES {
            out.extend(run(s)?);
        }
        Ok(out)
    } else if SUITES.contains(&name) {
        Ok(run(name)?)
    } else {
        Err(CliError::Usage(format!("unknown suite {name:?}; expected one of {} or all", SUITES.join(", "))))
    }
}
