//! Self-intersections of `f*_{m,α} L̂` on `X^r` and the Néron–Tate heights
//! and Bogomolov bounds of the tautological cycles `Z_{m,α}` they determine.
//!
//! Here `f_{m,α}(x_1, …, x_r) = Σ m_j (x_j - α)` and
//! `f*_{m,α} L̂ = -½ Σ_{j,k} m_j m_k Δ̂^α_{jk}`.

use alloc::format;
use alloc::vec::Vec;

use crate::combinatorics::{factorial, falling_factorial};
use crate::engine::CoefficientTensor;
use crate::error::{invalid, Error};
use crate::rational::Rational;
use crate::symbolic::{InvariantValues, SymbolicValue};

/// Genus `g` of the curve and degree `d_K` of its field of definition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CurveParams {
    pub g: i64,
    pub d_k: i64,
}

impl CurveParams {
    pub fn new(g: i64, d_k: i64) -> Result<Self, Error> {
        if g < 1 {
            return Err(invalid(format!("genus must be >= 1, got {g}")));
        }
        if d_k < 1 {
            return Err(invalid(format!("field degree must be >= 1, got {d_k}")));
        }
        Ok(CurveParams { g, d_k })
    }

    fn genus(&self) -> Rational {
        Rational::from(self.g)
    }

    fn require_arithmetic(&self) -> Result<(), Error> {
        if self.g < 2 {
            return Err(Error::SingularGenus(format!("{}: heights need g >= 2", self.g)));
        }
        Ok(())
    }
}

/// The multiplicities `m ∈ (ℤ∖{0})^r`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PullbackSpec {
    m: Vec<i64>,
}

impl PullbackSpec {
    pub fn new(m: Vec<i64>) -> Result<Self, Error> {
        if m.is_empty() {
            return Err(invalid("m must have at least one entry"));
        }
        if m.contains(&0) {
            return Err(invalid("every m_j must be nonzero"));
        }
        Ok(PullbackSpec { m })
    }

    pub fn m(&self) -> &[i64] {
        &self.m
    }

    pub fn r(&self) -> usize {
        self.m.len()
    }

    fn q(&self, j: usize) -> Rational {
        Rational::from(self.m[j])
    }

    /// `Σ m_j`.
    pub fn sum(&self) -> Rational {
        (0..self.r()).map(|j| self.q(j)).sum()
    }

    /// `Σ m_j²`.
    pub fn sum_sq(&self) -> Rational {
        (0..self.r()).map(|j| self.q(j) * self.q(j)).sum()
    }

    /// `Σ_{j<k} m_j m_k`.
    pub fn cross(&self) -> Rational {
        let mut out = Rational::zero();
        for j in 0..self.r() {
            for k in j + 1..self.r() {
                out += self.q(j) * self.q(k);
            }
        }
        out
    }

    /// `Π m_j²`.
    pub fn prod_sq(&self) -> Rational {
        (0..self.r()).map(|j| self.q(j) * self.q(j)).product()
    }
}

/// `h'(Z_{m,α}) = prefactor·(a·ω̂² + b·φ + c·h_NT)` with
/// `prefactor = (g - r)/(2 d_K)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeightCoefficients {
    pub a: Rational,
    pub b: Rational,
    pub c: Rational,
    pub prefactor: Rational,
}

impl HeightCoefficients {
    /// The height as a value, prefactor included.
    pub fn assembled(&self) -> SymbolicValue {
        SymbolicValue::new(Rational::zero(), self.a.clone(), self.b.clone(), self.c.clone())
            .scale(&self.prefactor)
    }
}

/// The tensor with `t_{l,j,k} = -m_j m_k` in each of `n_factors` factors.
pub fn pullback_tensor(spec: &PullbackSpec, n_factors: usize) -> Result<CoefficientTensor, Error> {
    if n_factors == 0 {
        return Err(invalid("need at least one factor"));
    }
    let r = spec.r();
    let mat: Vec<Rational> = (0..r * r).map(|i| -(spec.q(i / r) * spec.q(i % r))).collect();
    CoefficientTensor::from_matrices(r, &alloc::vec![mat; n_factors])
}

/// `⟨(f*_{m,α} L)^r⟩ = r!·(g)_r·Π m_j²`.
pub fn geometric_self_intersection(spec: &PullbackSpec, params: &CurveParams) -> Rational {
    let r = spec.r();
    Rational::from(factorial(r) as i64) * falling_factorial(&params.genus(), r as i64) * spec.prod_sq()
}

/// `⟨(f*_{m,α} L̂)^{r+1}⟩ = ((r+1)!·Π m_j²/24)·(a′·ω̂² + b′·φ + c′·h_NT)`.
pub fn arithmetic_self_intersection(spec: &PullbackSpec, params: &CurveParams) -> Result<SymbolicValue, Error> {
    params.require_arithmetic()?;
    let g = params.genus();
    let r = spec.r() as i64;
    let one = Rational::one();
    let gm1 = &g - &one;
    let ordered_cross = Rational::from(2) * spec.cross();
    let ff_a = falling_factorial(&(&g - Rational::from(2)), r - 1);
    let ff_b = falling_factorial(&(&g - Rational::from(3)), r - 2);
    let ff_c = falling_factorial(&gm1, r);

    let a = (Rational::from(3) * &g * &ff_a * spec.sum_sq()
        - (Rational::from(2) * &g + &one) * &ff_b * &ordered_cross)
        / &gm1;
    let b = Rational::from(2) * &ff_b * &ordered_cross;
    let sum = spec.sum();
    let c = Rational::from(12) * &ff_c * &sum * &sum;

    let scale = Rational::from(factorial(spec.r() + 1) as i64) * spec.prod_sq() / Rational::from(24);
    Ok(SymbolicValue::new(Rational::zero(), a, b, c).scale(&scale))
}

/// Closed-form height coefficients for `1 <= r <= g`.
pub fn height_coefficients(spec: &PullbackSpec, params: &CurveParams) -> Result<HeightCoefficients, Error> {
    params.require_arithmetic()?;
    let r = spec.r() as i64;
    let g = params.genus();
    if r > params.g {
        return Err(Error::OutOfRange(format!("r = {r} exceeds g = {}", params.g)));
    }
    if r >= 2 && params.g == 2 {
        return Err(Error::Precondition("r >= 2 needs g >= 3".into()));
    }
    let one = Rational::one();
    let gm1 = &g - &one;
    let gm1_sq = &gm1 * &gm1;
    let prefactor = Rational::from(params.g - r) / Rational::from(2 * params.d_k);
    let (a, b, c) = if r == 1 {
        let m2 = spec.sum_sq();
        (&m2 / (Rational::from(4) * &gm1_sq), Rational::zero(), &m2 / &g)
    } else {
        let gm2 = &g - Rational::from(2);
        let cross = spec.cross();
        let a = spec.sum_sq() / (Rational::from(4) * &gm1_sq)
            - (Rational::from(2) * &g + &one) * &cross / (Rational::from(6) * &g * &gm1_sq * &gm2);
        let b = &cross / (Rational::from(3) * &g * &gm1 * &gm2);
        let sum = spec.sum();
        (a, b, &sum * &sum / &g)
    };
    Ok(HeightCoefficients { a, b, c, prefactor })
}

/// `h'(Z_{m,α})` through the self-intersections,
/// `⟨(f*L̂)^{r+1}⟩ / (d_K (r+1) ⟨(f*L)^r⟩)`, for `r < g`.
pub fn height_from_self_intersections(spec: &PullbackSpec, params: &CurveParams) -> Result<SymbolicValue, Error> {
    params.require_arithmetic()?;
    let r = spec.r() as i64;
    if r >= params.g {
        return Err(Error::OutOfRange(format!("r = {r} must be below g = {}", params.g)));
    }
    let denom = Rational::from(params.d_k * (r + 1)) * geometric_self_intersection(spec, params);
    let recip = denom.recip().ok_or_else(|| Error::OutOfRange("vanishing degree".into()))?;
    Ok(arithmetic_self_intersection(spec, params)?.scale(&recip))
}

/// The height as a number once `ω̂²`, `φ` and `h_NT` are given. Zero for
/// `r = g`.
pub fn neron_tate_height(spec: &PullbackSpec, params: &CurveParams, inv: &InvariantValues) -> Result<Rational, Error> {
    params.require_arithmetic()?;
    let r = spec.r() as i64;
    if r > params.g {
        return Err(Error::OutOfRange(format!("r = {r} exceeds g = {}: Z_(m,α) has degree 0", params.g)));
    }
    if r == params.g {
        // Z_{m,α} is the whole Jacobian, whose height vanishes. At g = 2 the
        // quotient route is only zero modulo the genus-2 relation.
        return Ok(Rational::zero());
    }
    Ok(height_from_self_intersections(spec, params)?.evaluate_numeric(inv))
}

/// `c` with `h'(Z_{m,α}) >= c·φ(X)`, for `r < g`.
pub fn bogomolov_bound(spec: &PullbackSpec, params: &CurveParams) -> Result<Rational, Error> {
    params.require_arithmetic()?;
    let r = spec.r() as i64;
    if r >= params.g {
        return Err(Error::OutOfRange(format!("r = {r} must be below g = {}", params.g)));
    }
    let g = params.genus();
    let d = Rational::from(params.d_k);
    let two_g1 = Rational::from(2 * params.g + 1);
    if r == 1 {
        return Ok(spec.sum_sq() / (Rational::from(8) * d * two_g1));
    }
    let sum = spec.sum();
    let quad = Rational::from(3 * params.g * params.g - 8 * params.g - 1);
    let numer = Rational::from(params.g - r) * (quad * spec.sum_sq() + &two_g1 * &sum * &sum);
    let denom = Rational::from(24)
        * &g
        * (&g - Rational::from(1))
        * (&g - Rational::from(2))
        * &two_g1
        * d;
    Ok(numer / denom)
}

/// Local lower bound
/// `φ(X_v) >= (g-1)/(2g(7g+5))·δ₀ + Σ_j 2j(g-j)/g·δ_j`,
/// with `deltas[j - 1] = δ_j` for `j = 1..=⌊g/2⌋`. Missing trailing `δ_j`
/// count as zero.
pub fn phi_local_lower_bound(g: i64, delta0: &Rational, deltas: &[Rational]) -> Result<Rational, Error> {
    if g < 2 {
        return Err(Error::Precondition(format!("local bound needs g >= 2, got {g}")));
    }
    if deltas.len() > (g / 2) as usize {
        return Err(invalid(format!("at most {} values δ_j for g = {g}", g / 2)));
    }
    if delta0.is_negative() || deltas.iter().any(Rational::is_negative) {
        return Err(invalid("node counts must be >= 0"));
    }
    let gq = Rational::from(g);
    let mut out = Rational::from(g - 1) / Rational::from(2 * g * (7 * g + 5)) * delta0;
    for (i, d) in deltas.iter().enumerate() {
        let j = i as i64 + 1;
        out += Rational::from(2 * j * (g - j)) / &gq * d;
    }
    Ok(out)
}
