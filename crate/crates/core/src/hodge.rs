//! Lower bounds for `ω̂²` from the arithmetic Hodge index theorem.
//!
//! For `M̄ = Σ_{j,k} t_{jk} m_j m_k Δ̂^α_{jk}` (ordered sum) with
//! `g·Σ t_{jj} = Σ_{j≠k} t_{jk}`, the number
//! `⟨(f*_{m,α} L̂)^{r-1}, M̄²⟩` is `<= 0`. Evaluated at `α = ω/(2g-2)` it
//! has the shape `A·ω̂² + B·φ(X)`, and `A < 0` turns it into
//! `ω̂² >= (B/-A)·φ(X)`.

use alloc::format;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::combinatorics::{factorial, falling_factorial};
use crate::engine::{intersect_arithmetic, CoefficientTensor};
use crate::error::{invalid, Error};
use crate::heights::PullbackSpec;
use crate::rational::Rational;
use crate::symbolic::SymbolicValue;

/// Symmetric `r × r` coefficients `t_{jk}` of `M̄`, row-major. An unordered
/// off-diagonal edge with coefficient `w` is stored as `t_{jk} = t_{kj} = w/2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BoundMatrix {
    r: usize,
    t: Vec<Rational>,
}

impl BoundMatrix {
    pub fn new(r: usize, t: Vec<Rational>) -> Result<Self, Error> {
        if r == 0 {
            return Err(invalid("matrix needs r >= 1"));
        }
        if t.len() != r * r {
            return Err(invalid(format!("expected {} entries, got {}", r * r, t.len())));
        }
        for j in 0..r {
            for k in j + 1..r {
                if t[j * r + k] != t[k * r + j] {
                    return Err(invalid(format!("matrix is not symmetric at ({}, {})", j + 1, k + 1)));
                }
            }
        }
        Ok(BoundMatrix { r, t })
    }

    /// `t_{jj} = diag`, `t_{jk} = off` for `j != k`.
    pub fn uniform(r: usize, diag: Rational, off: Rational) -> Result<Self, Error> {
        let t = (0..r * r).map(|i| if i / r == i % r { diag.clone() } else { off.clone() }).collect();
        Self::new(r, t)
    }

    pub fn r(&self) -> usize {
        self.r
    }

    /// `t_{jk}`, 1-based.
    pub fn get(&self, j: usize, k: usize) -> &Rational {
        &self.t[(j - 1) * self.r + (k - 1)]
    }

    pub fn entries(&self) -> &[Rational] {
        &self.t
    }

    pub fn scale(&self, lambda: &Rational) -> BoundMatrix {
        BoundMatrix { r: self.r, t: self.t.iter().map(|x| x * lambda).collect() }
    }

    /// `Σ t_{jj}`.
    pub fn trace(&self) -> Rational {
        (1..=self.r).map(|j| self.get(j, j)).sum()
    }

    /// `Σ_{j≠k} t_{jk}`.
    pub fn off_diagonal_sum(&self) -> Rational {
        let mut out = Rational::zero();
        for j in 1..=self.r {
            for k in 1..=self.r {
                if j != k {
                    out += self.get(j, k);
                }
            }
        }
        out
    }
}

/// `g·Σ t_{jj} = Σ_{j≠k} t_{jk}`.
pub fn check_constraint(b: &BoundMatrix, g: &Rational) -> bool {
    g * b.trace() == b.off_diagonal_sum()
}

/// The `r + 1` factors `(f*L̂)^{r-1}, M̄, M̄` in engine form.
pub fn build_hodge_tensor(spec: &PullbackSpec, b: &BoundMatrix) -> Result<CoefficientTensor, Error> {
    let r = spec.r();
    if b.r() != r {
        return Err(invalid(format!("matrix is {0}x{0} but m has {1} entries", b.r(), r)));
    }
    let m = spec.m();
    let mm = |j: usize, k: usize| Rational::from(m[j] * m[k]);
    let pull: Vec<Rational> = (0..r * r).map(|i| -mm(i / r, i % r)).collect();
    let two = Rational::from(2);
    let mbar: Vec<Rational> =
        (0..r * r).map(|i| &two * &b.t[i] * mm(i / r, i % r)).collect();
    let mut factors = alloc::vec![pull; r - 1];
    factors.push(mbar.clone());
    factors.push(mbar);
    CoefficientTensor::from_matrices(r, &factors)
}

/// `⟨(f*_{m,α} L̂)^{r-1}, M̄²⟩`.
pub fn hodge_form(spec: &PullbackSpec, b: &BoundMatrix, g: &Rational) -> Result<SymbolicValue, Error> {
    intersect_arithmetic(&build_hodge_tensor(spec, b)?, g)
}

/// `⟨(f*_{m,α} L)^{r-1}, M⟩ = -2(r-1)!(g)_{r-1} Π m_j² (g Σ t_{jj} - Σ_{j≠k} t_{jk})`.
pub fn constraint_pairing(spec: &PullbackSpec, b: &BoundMatrix, g: &Rational) -> Result<Rational, Error> {
    let r = spec.r();
    if b.r() != r {
        return Err(invalid(format!("matrix is {0}x{0} but m has {1} entries", b.r(), r)));
    }
    let defect = g * b.trace() - b.off_diagonal_sum();
    Ok(Rational::from(-2 * factorial(r - 1) as i64)
        * falling_factorial(g, r as i64 - 1)
        * spec.prod_sq()
        * defect)
}

/// `M̄ = Δ̂₁₂ - Δ̂₂₃ + Δ̂₃₄ - … - Δ̂_{1r}` for even `r >= 4`: the cycle
/// `1 - 2 - … - r - 1` with alternating signs, starting with `+` on `(1, 2)`.
pub fn alternating_cycle_matrix(r: usize) -> Result<BoundMatrix, Error> {
    if r < 4 || r % 2 == 1 {
        return Err(invalid(format!("alternating matrix needs even r >= 4, got {r}")));
    }
    let half = Rational::frac(1, 2);
    let mut t = alloc::vec![Rational::zero(); r * r];
    let mut put = |j: usize, k: usize, w: &Rational| {
        t[(j - 1) * r + (k - 1)] = w.clone();
        t[(k - 1) * r + (j - 1)] = w.clone();
    };
    for j in 1..r {
        let w = if j % 2 == 1 { half.clone() } else { -&half };
        put(j, j + 1, &w);
    }
    put(1, r, &-&half);
    BoundMatrix::new(r, t)
}

/// A candidate that passed the constraint together with its bound.
pub type BoundWitness = (BoundMatrix, Rational);

/// The better of two witnesses: larger ratio, then lexicographically smaller
/// matrix. Commutative and associative, so any reduction order agrees.
pub fn better_witness(a: Option<BoundWitness>, b: Option<BoundWitness>) -> Option<BoundWitness> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => match a.1.cmp(&b.1) {
            Ordering::Greater => Some(a),
            Ordering::Less => Some(b),
            Ordering::Equal => {
                if a.0.t <= b.0.t {
                    Some(a)
                } else {
                    Some(b)
                }
            }
        },
    }
}

/// The bound one candidate gives, or `None` if it violates the constraint
/// or the `ω̂²` coefficient is not negative.
pub fn evaluate_candidate(spec: &PullbackSpec, g: &Rational, b: &BoundMatrix) -> Result<Option<Rational>, Error> {
    if !check_constraint(b, g) {
        return Ok(None);
    }
    hodge_form(spec, b, g)?.without_hnt().derive_phi_bound()
}

/// Best bound `ω̂² >= c·φ` over the candidates.
pub fn bound_search(
    spec: &PullbackSpec,
    g: &Rational,
    candidates: impl IntoIterator<Item = BoundMatrix>,
) -> Result<Option<BoundWitness>, Error> {
    let mut best = None;
    for b in candidates {
        if let Some(ratio) = evaluate_candidate(spec, g, &b)? {
            best = better_witness(best, Some((b, ratio)));
        }
    }
    Ok(best)
}

/// Every symmetric `r × r` matrix with entries from `values`.
pub fn symmetric_grid(r: usize, values: &[Rational]) -> impl Iterator<Item = BoundMatrix> + '_ {
    let slots = r * (r + 1) / 2;
    let total = values.len().checked_pow(slots as u32).unwrap_or(0);
    (0..total).map(move |mut code| {
        let mut t = alloc::vec![Rational::zero(); r * r];
        for j in 0..r {
            for k in j..r {
                let v = &values[code % values.len()];
                code /= values.len();
                t[j * r + k] = v.clone();
                t[k * r + j] = v.clone();
            }
        }
        BoundMatrix { r, t }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::engine::{expand_bruteforce, intersect_geometric};
    use crate::heights::pullback_tensor;
    use alloc::vec;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn q(n: i64) -> Rational {
        Rational::from(n)
    }

    fn spec(m: &[i64]) -> PullbackSpec {
        PullbackSpec::new(m.to_vec()).unwrap()
    }

    fn two_by_two(g: &Rational) -> BoundMatrix {
        BoundMatrix::uniform(2, q(1), g.clone()).unwrap()
    }

    /// Random symmetric matrix, then `t_{11}` solved from the constraint.
    fn constrained(rng: &mut ChaCha8Rng, r: usize, g: &Rational) -> BoundMatrix {
        let mut t = vec![Rational::zero(); r * r];
        for j in 0..r {
            for k in j..r {
                let v = Rational::frac(rng.gen_range(-3..=3), rng.gen_range(1..=2));
                t[j * r + k] = v.clone();
                t[k * r + j] = v;
            }
        }
        let mut b = BoundMatrix::new(r, t).unwrap();
        let rest = &b.trace() - b.get(1, 1);
        b.t[0] = b.off_diagonal_sum() / g - rest;
        assert!(check_constraint(&b, g));
        b
    }

    #[test]
    fn constraint_examples() {
        let g = q(3);
        assert!(check_constraint(&two_by_two(&g), &g));
        assert!(check_constraint(&alternating_cycle_matrix(4).unwrap(), &g));
        assert!(!check_constraint(&BoundMatrix::uniform(2, q(1), q(0)).unwrap(), &q(2)));
        assert!(BoundMatrix::new(2, vec![q(1), q(2), q(3), q(1)]).is_err());
    }

    #[test]
    fn alternating_layout() {
        let b = alternating_cycle_matrix(4).unwrap();
        let half = Rational::frac(1, 2);
        assert_eq!(b.get(1, 2), &half);
        assert_eq!(b.get(2, 3), &-&half);
        assert_eq!(b.get(3, 4), &half);
        assert_eq!(b.get(1, 4), &-&half);
        assert!(b.get(1, 3).is_zero() && b.get(2, 2).is_zero());
        for r in [4, 6, 8] {
            assert!(check_constraint(&alternating_cycle_matrix(r).unwrap(), &q(7)));
        }
        assert!(alternating_cycle_matrix(5).is_err());
        assert!(alternating_cycle_matrix(2).is_err());
    }

    #[test]
    fn hodge_tensor_layout() {
        let g = q(4);
        let t = build_hodge_tensor(&spec(&[1, 1]), &two_by_two(&g)).unwrap();
        assert_eq!(t.n(), 3);
        assert_eq!(t.get(1, 1, 2), &q(-1));
        assert_eq!(t.get(2, 1, 1), &q(2));
        assert_eq!(t.get(3, 1, 2), &q(8));
        assert!(build_hodge_tensor(&spec(&[1, 1, 1]), &two_by_two(&g)).is_err());
    }

    #[test]
    fn two_vertex_form() {
        for g in 2..=8 {
            let g = q(g);
            let gm1 = &g - q(1);
            let form = hodge_form(&spec(&[1, 1]), &two_by_two(&g), &g).unwrap();
            let g2 = &g * &g;
            let omega = -(q(4) * &g2 * (q(2) * &g + q(1))) / &gm1;
            assert_eq!(form.omega2, omega);
            assert_eq!(form.phi, q(4) * &g2);
            assert!(form.scalar.is_zero());
            assert_eq!(form.derive_phi_bound().unwrap(), Some(gm1 / (q(2) * &g + q(1))));
        }
    }

    #[test]
    fn four_vertex_alternating_form() {
        let b = alternating_cycle_matrix(4).unwrap();
        for g in 3..=5 {
            let g = q(g);
            let form = hodge_form(&spec(&[1, 1, 1, 1]), &b, &g).unwrap();
            let cubic = q(15) * g.pow(3) - q(14) * g.pow(2) - q(19) * &g - q(6);
            assert_eq!(form.omega2, -(q(4) * cubic) / (&g - q(1)));
            assert_eq!(form.phi, q(8) * (q(3) * g.pow(2) - &g - q(6)));
        }
    }

    #[test]
    fn forms_match_bruteforce() {
        let mut rng = ChaCha8Rng::seed_from_u64(31);
        for _ in 0..10 {
            let r = rng.gen_range(1..=3);
            let g = q(rng.gen_range(2..=5));
            let m: Vec<i64> = (0..r).map(|_| rng.gen_range(1..=2) * if rng.gen() { 1 } else { -1 }).collect();
            let b = constrained(&mut rng, r, &g);
            let t = build_hodge_tensor(&spec(&m), &b).unwrap();
            assert_eq!(hodge_form(&spec(&m), &b, &g).unwrap(), expand_bruteforce(&t, &g).unwrap());
        }
    }

    #[test]
    fn quadratic_in_the_matrix() {
        let g = q(5);
        let b = two_by_two(&g);
        let lambda = Rational::frac(-3, 2);
        let s = spec(&[2, -1]);
        let base = hodge_form(&s, &b, &g).unwrap();
        let scaled = hodge_form(&s, &b.scale(&lambda), &g).unwrap();
        assert_eq!(scaled, base.scale(&(&lambda * &lambda)));
    }

    #[test]
    fn constraint_pairing_examples() {
        let id = BoundMatrix::uniform(2, q(1), q(0)).unwrap();
        assert_eq!(constraint_pairing(&spec(&[1, 1]), &id, &q(2)).unwrap(), q(-16));
        let g = q(6);
        assert!(constraint_pairing(&spec(&[3, -2]), &two_by_two(&g), &g).unwrap().is_zero());
    }

    #[test]
    fn constraint_pairing_matches_geometric_engine() {
        let mut rng = ChaCha8Rng::seed_from_u64(32);
        for _ in 0..20 {
            let r = rng.gen_range(1..=4);
            let g = q(rng.gen_range(2..=6));
            let m: Vec<i64> = (0..r).map(|_| rng.gen_range(1..=3) * if rng.gen() { 1 } else { -1 }).collect();
            let s = spec(&m);
            let t: Vec<Rational> = (0..r * r).map(|_| q(0)).collect();
            let mut b = BoundMatrix::new(r, t).unwrap();
            for j in 0..r {
                for k in j..r {
                    let v = Rational::frac(rng.gen_range(-3..=3), 2);
                    b.t[j * r + k] = v.clone();
                    b.t[k * r + j] = v;
                }
            }
            let full = build_hodge_tensor(&s, &b).unwrap();
            let order: Vec<usize> = (1..=r).collect();
            let pullbacks = pullback_tensor(&s, r).unwrap();
            let mut tensor = pullbacks.permute_factors(&order).unwrap();
            for j in 1..=r {
                for k in 1..=r {
                    tensor.set(r, j, k, full.get(r, j, k).clone()).unwrap();
                }
            }
            let engine = intersect_geometric(&tensor, &g).unwrap();
            assert_eq!(constraint_pairing(&s, &b, &g).unwrap(), engine, "{m:?} {b:?}");
        }
    }

    #[test]
    fn search_picks_the_best_witness() {
        let g = q(5);
        let grid = [Rational::frac(-1, 2), q(0), Rational::frac(1, 2), q(1), g.clone()];
        let (_, ratio) = bound_search(&spec(&[1, 1]), &g, symmetric_grid(2, &grid)).unwrap().unwrap();
        assert_eq!(ratio, Rational::frac(4, 11));
        assert!(bound_search(&spec(&[1, 1]), &g, []).unwrap().is_none());
    }

    #[test]
    fn ties_go_to_the_smaller_matrix() {
        let a = (BoundMatrix::uniform(2, q(1), q(2)).unwrap(), q(1));
        let b = (BoundMatrix::uniform(2, q(2), q(4)).unwrap(), q(1));
        assert_eq!(better_witness(Some(a.clone()), Some(b.clone())), Some(a.clone()));
        assert_eq!(better_witness(Some(b), Some(a.clone())), Some(a));
    }
}
