//! Acceptance suite: one PASS/FAIL line per criterion, exact equality
//! throughout, wall-clock limits asserted. Runs sequentially so that the
//! timings are not distorted by sibling tests.

use std::fmt::Write as _;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tauto::parallel::{expand_bruteforce_par, hodge_form_par, intersect_arithmetic_par, intersect_geometric_par};
use tauto::verify::{random_m, random_tensor};
use tauto_core::heights::{
    arithmetic_self_intersection, bogomolov_bound, geometric_self_intersection, height_coefficients,
    height_from_self_intersections, neron_tate_height, pullback_tensor,
};
use tauto_core::hodge::{alternating_cycle_matrix, build_hodge_tensor, check_constraint, constraint_pairing};
use tauto_core::{
    evaluate_graph, expand_bruteforce, intersect_arithmetic, intersect_geometric, verify_identity, BoundMatrix,
    CoefficientTensor, CurveParams, IntersectionGraph, InvariantValues, PullbackSpec, Rational, SymbolicValue,
};

type Outcome = Result<String, String>;

fn q(n: i64) -> Rational {
    Rational::from(n)
}

fn frac(n: i64, d: i64) -> Rational {
    Rational::frac(n, d)
}

fn sv(omega2: Rational, phi: Rational, hnt: Rational) -> SymbolicValue {
    SymbolicValue::new(q(0), omega2, phi, hnt)
}

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn eq<T: PartialEq + std::fmt::Display>(lhs: &T, rhs: &T, ctx: impl std::fmt::Display) -> Result<(), String> {
    ensure(lhs == rhs, || format!("{ctx}: {lhs} != {rhs}"))
}

/// `x (x-1) … (x-n+1)`, written out independently of the library.
fn falling(x: i64, n: i64) -> Rational {
    (0..n).map(|k| q(x - k)).product()
}

fn fact(n: i64) -> Rational {
    (1..=n).map(q).product()
}

fn criterion_1() -> Outcome {
    let graph = |r, e: &[(usize, usize)]| IntersectionGraph::new(r, e.iter().copied()).unwrap();
    let circle = graph(1, &[(1, 1)]);
    let eight = graph(1, &[(1, 1), (1, 1)]);
    let dumbbell = graph(2, &[(1, 1), (1, 2), (2, 2)]);
    let theta = graph(2, &[(1, 2), (1, 2), (1, 2)]);
    for g in 2..=10i64 {
        let gq = q(g);
        let val = |gr: &IntersectionGraph| evaluate_graph(gr, &gq).unwrap();
        eq(&val(&circle), &SymbolicValue::from_scalar(q(-2 * g)), format_args!("circle g={g}"))?;
        eq(&val(&eight), &sv(frac(g, g - 1), q(0), q(4 * (g - 1))), format_args!("figure-eight g={g}"))?;
        eq(&val(&dumbbell), &sv(q(0), q(0), q(-4 * (g - 1) * (g - 1))), format_args!("dumbbell g={g}"))?;
        eq(&val(&theta), &sv(frac(2 * g + 1, 2 * g - 2), q(-1), q(6 * (g - 1))), format_args!("theta g={g}"))?;
    }
    Ok("4 shapes, g = 2..10".into())
}

const GENERA: [i64; 3] = [2, 3, 5];

/// Returns the transcript of all values so reruns can be compared.
fn criterion_2(jobs: usize) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2002);
    let mut transcript = String::new();
    let mut count = 0;
    for r in 1..=4 {
        for i in 0..50 {
            let g = q(GENERA[i % 3]);
            let t = random_tensor(&mut rng, r, r);
            let closed = intersect_geometric_par(&t, &g, jobs).map_err(|e| e.to_string())?;
            let brute = expand_bruteforce_par(&t, &g, jobs).map_err(|e| e.to_string())?;
            ensure(brute.is_scalar(), || format!("r={r} tensor {i}: non-scalar expansion {brute}"))?;
            eq(&SymbolicValue::from_scalar(closed.clone()), &brute, format_args!("r={r} tensor {i} g={g}"))?;
            writeln!(transcript, "{r} {i} {g} {closed}").unwrap();
            count += 1;
        }
    }
    ensure(count >= 200, || format!("only {count} tensors"))?;
    Ok(transcript)
}

fn criterion_3(jobs: usize) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3003);
    let mut transcript = String::new();
    let mut count = 0;
    for r in 1..=3 {
        for i in 0..34 {
            let g = q(GENERA[i % 3]);
            let t = random_tensor(&mut rng, r, r + 1);
            let closed = intersect_arithmetic_par(&t, &g, jobs).map_err(|e| e.to_string())?;
            let brute = expand_bruteforce_par(&t, &g, jobs).map_err(|e| e.to_string())?;
            eq(&closed, &brute, format_args!("r={r} tensor {i} g={g}"))?;
            writeln!(transcript, "{r} {i} {g} {closed}").unwrap();
            count += 1;
        }
    }
    ensure(count >= 100, || format!("only {count} tensors"))?;
    Ok(transcript)
}

fn criterion_4() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(4004);
    let mut cases = 0;
    for r in 1..=4usize {
        for _ in 0..4 {
            let spec = random_m(&mut rng, r);
            let prod_sq: Rational = spec.m().iter().map(|&x| q(x * x)).product();
            let tensor = pullback_tensor(&spec, r).unwrap();
            for g in 1..=8i64 {
                let p = CurveParams::new(g, 1).unwrap();
                let closed = geometric_self_intersection(&spec, &p);
                let oracle = fact(r as i64) * falling(g, r as i64) * &prod_sq;
                eq(&closed, &oracle, format_args!("closed form m={:?} g={g}", spec.m()))?;
                let engine = intersect_geometric(&tensor, &q(g)).unwrap();
                eq(&closed, &engine, format_args!("geometric m={:?} g={g}", spec.m()))?;
                if r as i64 == g + 1 {
                    ensure(closed.is_zero(), || format!("r = g + 1 = {r} does not vanish"))?;
                }
                cases += 1;
            }
            if r <= 3 {
                let tensor = pullback_tensor(&spec, r + 1).unwrap();
                for g in 2..=8i64 {
                    let closed = arithmetic_self_intersection(&spec, &CurveParams::new(g, 1).unwrap()).unwrap();
                    let engine = intersect_arithmetic(&tensor, &q(g)).unwrap();
                    eq(&closed, &engine, format_args!("arithmetic m={:?} g={g}", spec.m()))?;
                    cases += 1;
                }
            }
        }
    }
    Ok(format!("{cases} closed-form evaluations, g = 1 included"))
}

fn criterion_5() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(5005);
    let mut cases = 0;
    for g in 2..=6i64 {
        for r in 1..g as usize {
            for _ in 0..3 {
                let spec = random_m(&mut rng, r);
                let p = CurveParams::new(g, rng.gen_range(1..=4)).unwrap();
                let route = height_from_self_intersections(&spec, &p).unwrap();
                let h = height_coefficients(&spec, &p).unwrap();
                let expected = sv(&h.prefactor * &h.a, &h.prefactor * &h.b, &h.prefactor * &h.c);
                eq(&route, &expected, format_args!("g={g} m={:?}", spec.m()))?;
                cases += 1;
            }
        }
    }
    for g in 3..=6i64 {
        let spec = random_m(&mut rng, g as usize);
        let v = arithmetic_self_intersection(&spec, &CurveParams::new(g, 1).unwrap()).unwrap();
        ensure(v.is_zero(), || format!("r = g = {g}: {v}"))?;
        let inv = InvariantValues::new(frac(7, 3), q(11), q(5));
        eq(&neron_tate_height(&spec, &CurveParams::new(g, 1).unwrap(), &inv).unwrap(), &q(0), "height at r = g")?;
    }
    let relation = InvariantValues::new(q(2), q(5), q(0));
    for _ in 0..5 {
        let spec = random_m(&mut rng, 2);
        let v = arithmetic_self_intersection(&spec, &CurveParams::new(2, 1).unwrap()).unwrap();
        eq(&v.evaluate_numeric(&relation), &q(0), format_args!("g = r = 2, m={:?}", spec.m()))?;
    }
    Ok(format!("{cases} height pairs, r = g vanishing"))
}

fn two_vertex_expected(g: i64) -> SymbolicValue {
    let gq = q(g);
    let g2 = &gq * &gq;
    sv(-(q(4) * &g2 * q(2 * g + 1)) / q(g - 1), q(4) * g2, q(0))
}

fn alternating_expected(g: i64) -> SymbolicValue {
    let cubic = 15 * g * g * g - 14 * g * g - 19 * g - 6;
    sv(frac(-4 * cubic, g - 1), q(8 * (3 * g * g - g - 6)), q(0))
}

fn criterion_6(jobs: usize) -> Outcome {
    let mut transcript = String::new();
    let pair = PullbackSpec::new(vec![1, 1]).unwrap();
    for g in 2..=12i64 {
        let b = BoundMatrix::uniform(2, q(1), q(g)).unwrap();
        ensure(check_constraint(&b, &q(g)), || format!("r=2 matrix violates constraint at g={g}"))?;
        let form = hodge_form_par(&pair, &b, &q(g), jobs).map_err(|e| e.to_string())?;
        eq(&form.without_hnt(), &two_vertex_expected(g), format_args!("r=2 g={g}"))?;
        let brute = expand_bruteforce(&build_hodge_tensor(&pair, &b).unwrap(), &q(g)).unwrap();
        eq(&form.hnt, &brute.hnt, format_args!("r=2 h_NT coefficient g={g}"))?;
        let ratio = form.without_hnt().derive_phi_bound().unwrap();
        ensure(ratio == Some(frac(g - 1, 2 * g + 1)), || format!("r=2 ratio g={g}: {ratio:?}"))?;
        writeln!(transcript, "2 {g} {form}").unwrap();
    }
    let ones = PullbackSpec::new(vec![1; 4]).unwrap();
    let alt = alternating_cycle_matrix(4).unwrap();
    for g in 3..=8i64 {
        let form = hodge_form_par(&ones, &alt, &q(g), jobs).map_err(|e| e.to_string())?;
        eq(&form.without_hnt(), &alternating_expected(g), format_args!("r=4 g={g}"))?;
        writeln!(transcript, "4 {g} {form}").unwrap();
    }
    for (g, ratio) in [(3, frac(1, 3)), (4, frac(38, 109))] {
        let form = hodge_form_par(&ones, &alt, &q(g), jobs).map_err(|e| e.to_string())?;
        let got = form.without_hnt().derive_phi_bound().unwrap();
        ensure(got == Some(ratio.clone()), || format!("r=4 ratio g={g}: {got:?}"))?;
    }
    // h_NT coefficient of the alternating form against the expansion.
    let g = 3;
    let form = hodge_form_par(&ones, &alt, &q(g), jobs).map_err(|e| e.to_string())?;
    let brute = expand_bruteforce_par(&build_hodge_tensor(&ones, &alt).unwrap(), &q(g), jobs).map_err(|e| e.to_string())?;
    eq(&form, &brute, "r=4 g=3 full value against expansion")?;
    Ok(transcript)
}

/// Symmetric matrix with small random entries, `t_{11}` then solved from
/// the constraint.
fn constrained_matrix(rng: &mut ChaCha8Rng, r: usize, g: &Rational) -> BoundMatrix {
    let mut t = vec![q(0); r * r];
    for j in 0..r {
        for k in j..r {
            let v = frac(rng.gen_range(-3..=3), rng.gen_range(1..=2));
            t[j * r + k] = v.clone();
            t[k * r + j] = v;
        }
    }
    let off: Rational = (0..r * r).filter(|i| i / r != i % r).map(|i| t[i].clone()).sum();
    let rest: Rational = (1..r).map(|j| t[j * r + j].clone()).sum();
    t[0] = off / g - rest;
    BoundMatrix::new(r, t).unwrap()
}

/// Returns `(literal, on_relation)`: whether every form is the zero value,
/// and whether every form vanishes on genus-2 curves (`φ = (5/2)ω̂²`, with a
/// zero `h_NT` coefficient so the value is independent of `α`).
fn criterion_7() -> (Outcome, Outcome) {
    let mut rng = ChaCha8Rng::seed_from_u64(7007);
    let g = q(2);
    let mut first_nonzero = None;
    let mut relation_failure = None;
    let mut count = 0;
    let mut checks: Vec<(PullbackSpec, BoundMatrix)> = vec![(PullbackSpec::new(vec![1; 4]).unwrap(), alternating_cycle_matrix(4).unwrap())];
    for _ in 0..24 {
        checks.push((random_m(&mut rng, 4), constrained_matrix(&mut rng, 4, &g)));
    }
    for (spec, b) in &checks {
        assert!(check_constraint(b, &g));
        let form = intersect_arithmetic(&build_hodge_tensor(spec, b).unwrap(), &g).unwrap();
        count += 1;
        if !form.is_zero() && first_nonzero.is_none() {
            first_nonzero = Some(format!("m={:?}: {form}", spec.m()));
        }
        let on_relation = form.evaluate_numeric(&InvariantValues::new(q(2), q(5), q(0)));
        if (!on_relation.is_zero() || !form.hnt.is_zero()) && relation_failure.is_none() {
            relation_failure = Some(format!("m={:?}: {form}", spec.m()));
        }
    }
    let literal = match first_nonzero {
        None => Ok(format!("{count} constraint-satisfying matrices give the zero value")),
        Some(e) => Err(format!("not the zero value, e.g. {e}")),
    };
    let relation = match relation_failure {
        None => Ok(format!("{count} matrices vanish under φ = (5/2)ω̂² with zero h_NT coefficient")),
        Some(e) => Err(e),
    };
    (literal, relation)
}

fn criterion_8() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(8008);
    let mut cases = 0;
    for i in 0..60 {
        let r = rng.gen_range(1..=4usize);
        // (g)_{r-1} must be nonzero for the equivalence with the constraint.
        let g = q(rng.gen_range(r.max(2) as i64..=7));
        let spec = random_m(&mut rng, r);
        let b = if i % 2 == 0 {
            constrained_matrix(&mut rng, r, &g)
        } else {
            let t: Vec<Rational> = (0..r * r).map(|_| frac(rng.gen_range(-3..=3), 2)).collect();
            let sym: Vec<Rational> = (0..r * r).map(|x| t[(x / r).min(x % r) * r + (x / r).max(x % r)].clone()).collect();
            BoundMatrix::new(r, sym).unwrap()
        };
        // r - 1 pullback factors and one factor 2·t_{jk}·m_j·m_k.
        let m = spec.m();
        let mut factors = vec![(0..r * r).map(|x| q(-m[x / r] * m[x % r])).collect::<Vec<_>>(); r - 1];
        factors.push((0..r * r).map(|x| q(2) * b.get(x / r + 1, x % r + 1) * q(m[x / r] * m[x % r])).collect());
        let tensor = CoefficientTensor::from_matrices(r, &factors).unwrap();
        let engine = intersect_geometric(&tensor, &g).unwrap();
        let closed = constraint_pairing(&spec, &b, &g).unwrap();
        eq(&closed, &engine, format_args!("case {i}, r={r}, g={g}"))?;
        ensure(closed.is_zero() == check_constraint(&b, &g), || format!("case {i}: zero/constraint mismatch"))?;
        cases += 1;
    }
    Ok(format!("{cases} random (m, B, g), half constraint-satisfying"))
}

fn criterion_9() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(9009);
    for g in 3..=10i64 {
        let r = rng.gen_range(2..g as usize).min(5);
        let m = loop {
            let mut m: Vec<i64> = (0..r - 1).map(|_| rng.gen_range(-3..=3)).collect();
            m.push(-m.iter().sum::<i64>());
            if !m.contains(&0) {
                break m;
            }
        };
        let spec = PullbackSpec::new(m).unwrap();
        let h = height_coefficients(&spec, &CurveParams::new(g, 1).unwrap()).unwrap();
        // 0 <= a·ω̂² + b·φ at h_NT = 0, read as ω̂² >= (-b/a)·φ.
        ensure(h.a.is_positive(), || format!("g={g}: a = {} not positive", h.a))?;
        eq(&(-&h.b / &h.a), &frac(2, 3 * g - 1), format_args!("g={g} m={:?}", spec.m()))?;
    }
    let points: Vec<Rational> = (3..=12).map(q).collect();
    for g in 3..=12i64 {
        for _ in 0..4 {
            let r = rng.gen_range(1..g as usize).min(6);
            let spec = random_m(&mut rng, r);
            let p = CurveParams::new(g, rng.gen_range(1..=3)).unwrap();
            let h = height_coefficients(&spec, &p).unwrap();
            let combined = &h.prefactor * (&h.a * frac(g - 1, 2 * g + 1) + &h.b);
            eq(&bogomolov_bound(&spec, &p).unwrap(), &combined, format_args!("g={g} m={:?}", spec.m()))?;

            let (s2, s, cross) = (spec.sum_sq(), spec.sum(), spec.cross());
            let report = verify_identity(
                |x| q(3) * x * (x - q(2)) * &s2 + q(2) * (q(2) * x + q(1)) * &cross,
                |x| (q(3) * x * x - q(8) * x - q(1)) * &s2 + (q(2) * x + q(1)) * &s * &s,
                &points,
            );
            ensure(report.holds(), || format!("quadratic identity fails for m={:?}", spec.m()))?;
        }
    }
    Ok("zero-sum ratio g = 3..10, bound combination g = 3..12".into())
}

fn criterion_10(c2: &str, c3: &str, c6: &str) -> Outcome {
    let jobs = 4;
    eq(&criterion_2(jobs)?.as_str(), &c2, "criterion 2 transcript").map_err(|_| "criterion 2 differs".to_string())?;
    eq(&criterion_3(jobs)?.as_str(), &c3, "criterion 3 transcript").map_err(|_| "criterion 3 differs".to_string())?;
    eq(&criterion_6(jobs)?.as_str(), &c6, "criterion 6 transcript").map_err(|_| "criterion 6 differs".to_string())?;
    Ok(format!("criteria 2, 3, 6 byte-identical with {jobs} threads"))
}

struct Runner {
    failures: usize,
}

impl Runner {
    fn run<T>(&mut self, label: &str, limit: Duration, f: impl FnOnce() -> Result<T, String>, show: impl Fn(&T) -> String) -> Option<T> {
        let start = Instant::now();
        let result = f();
        let elapsed = start.elapsed();
        let line = match &result {
            Ok(v) if elapsed <= limit => format!("PASS {label}: {} [{:.2?} <= {:?}]", show(v), elapsed, limit),
            Ok(_) => format!("FAIL {label}: exceeded time limit [{:.2?} > {:?}]", elapsed, limit),
            Err(e) => format!("FAIL {label}: {e} [{:.2?}]", elapsed),
        };
        println!("{line}");
        match result {
            Ok(v) if elapsed <= limit => Some(v),
            _ => {
                self.failures += 1;
                None
            }
        }
    }
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let mut runner = Runner { failures: 0 };
    let summary = |s: &String| s.clone();
    let lines = |s: &String| format!("{} values", s.lines().count());

    runner.run("criterion 1 (graph shapes)", secs(1), criterion_1, summary);
    let c2 = runner.run("criterion 2 (geometric oracle)", secs(120), || criterion_2(1), lines);
    let c3 = runner.run("criterion 3 (arithmetic oracle)", secs(300), || criterion_3(1), lines);
    runner.run("criterion 4 (self-intersection closed forms)", secs(300), criterion_4, summary);
    runner.run("criterion 5 (height routes)", secs(120), criterion_5, summary);
    let c6 = runner.run("criterion 6 (bound polynomials)", secs(30), || criterion_6(1), lines);

    let mut relation = Err(String::from("not run"));
    runner.run(
        "criterion 7 (g = 2, r = 4 vanishing, as the zero value)",
        secs(60),
        || {
            let (literal, on_relation) = criterion_7();
            relation = on_relation;
            literal
        },
        summary,
    );
    // Reported separately; not counted as criterion 7 passing.
    match relation {
        Ok(s) => println!("INFO criterion 7 on genus-2 curves: {s}"),
        Err(e) => println!("INFO criterion 7 on genus-2 curves fails: {e}"),
    }

    runner.run("criterion 8 (degree of M against the pullbacks)", secs(60), criterion_8, summary);
    runner.run("criterion 9 (derived bound identities)", secs(30), criterion_9, summary);
    match (c2, c3, c6) {
        (Some(c2), Some(c3), Some(c6)) => {
            runner.run("criterion 10 (determinism under threads)", secs(600), || criterion_10(&c2, &c3, &c6), summary);
        }
        _ => {
            println!("FAIL criterion 10 (determinism under threads): prerequisites failed");
            runner.failures += 1;
        }
    }

    if runner.failures == 0 {
        println!("acceptance: all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {} criteria fail", runner.failures);
        ExitCode::FAILURE
    }
}
