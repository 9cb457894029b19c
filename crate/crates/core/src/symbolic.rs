//! The value space of intersection numbers: rational combinations of the
//! four basis quantities `1`, `ω̂²`, `φ(X)` and `h_NT(x_α)`.

use core::fmt;
use core::ops::{Add, Mul, Neg, Sub};

use crate::error::{invalid, Error};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct SymbolicValue {
    /// Coefficient of `1`.
    pub scalar: Rational,
    /// Coefficient of `ω̂²`.
    pub omega2: Rational,
    /// Coefficient of `φ(X)`.
    pub phi: Rational,
    /// Coefficient of `h_NT(x_α)`.
    pub hnt: Rational,
}

/// Numeric stand-ins for `ω̂²`, `φ(X)` and `h_NT(x_α)`. No positivity is
/// enforced here.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct InvariantValues {
    pub omega2_val: Rational,
    pub phi_val: Rational,
    pub hnt_val: Rational,
}

impl InvariantValues {
    pub fn new(omega2_val: Rational, phi_val: Rational, hnt_val: Rational) -> Self {
        InvariantValues { omega2_val, phi_val, hnt_val }
    }
}

impl SymbolicValue {
    pub fn new(scalar: Rational, omega2: Rational, phi: Rational, hnt: Rational) -> Self {
        SymbolicValue { scalar, omega2, phi, hnt }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_scalar(scalar: Rational) -> Self {
        SymbolicValue { scalar, ..Self::default() }
    }

    pub fn is_zero(&self) -> bool {
        self.components().iter().all(|c| c.is_zero())
    }

    /// True when only the coefficient of `1` may be nonzero.
    pub fn is_scalar(&self) -> bool {
        self.omega2.is_zero() && self.phi.is_zero() && self.hnt.is_zero()
    }

    /// `[scalar, omega2, phi, hnt]`.
    pub fn components(&self) -> [&Rational; 4] {
        [&self.scalar, &self.omega2, &self.phi, &self.hnt]
    }

    pub fn scale(&self, c: &Rational) -> Self {
        SymbolicValue {
            scalar: &self.scalar * c,
            omega2: &self.omega2 * c,
            phi: &self.phi * c,
            hnt: &self.hnt * c,
        }
    }

    pub fn add_scaled(&mut self, c: &Rational, v: &SymbolicValue) {
        if c.is_zero() {
            return;
        }
        self.scalar += c * &v.scalar;
        self.omega2 += c * &v.omega2;
        self.phi += c * &v.phi;
        self.hnt += c * &v.hnt;
    }

    /// Product in the value space. Defined when at least one factor is a
    /// pure scalar; the product of two non-scalar values is not part of the
    /// span and yields `None`.
    pub fn checked_mul(&self, other: &SymbolicValue) -> Option<SymbolicValue> {
        if self.is_scalar() {
            Some(other.scale(&self.scalar))
        } else if other.is_scalar() {
            Some(self.scale(&other.scalar))
        } else {
            None
        }
    }

    /// The value at `α = ω/(2g-2)`, where `h_NT(x_α) = 0`.
    pub fn without_hnt(&self) -> SymbolicValue {
        SymbolicValue { hnt: Rational::zero(), ..self.clone() }
    }

    /// Substitutes numbers for the three invariants.
    pub fn evaluate_numeric(&self, inv: &InvariantValues) -> Rational {
        &self.scalar
            + &self.omega2 * &inv.omega2_val
            + &self.phi * &inv.phi_val
            + &self.hnt * &inv.hnt_val
    }

    /// Reads `0 >= A·ω̂² + B·φ` as the bound `ω̂² >= (B / -A)·φ`.
    ///
    /// Returns `None` when `A >= 0`, where the inequality bounds nothing.
    /// The `h_NT` coefficient is ignored: bounds are taken at
    /// `α = ω/(2g-2)`, where `h_NT(x_α) = 0`.
    pub fn derive_phi_bound(&self) -> Result<Option<Rational>, Error> {
        if !self.scalar.is_zero() {
            return Err(invalid("phi bound needs a zero scalar component"));
        }
        if self.omega2.is_negative() {
            Ok(Some(&self.phi / &(-&self.omega2)))
        } else {
            Ok(None)
        }
    }
}

/// Exact `Σ cᵢ·vᵢ`.
pub fn linear_combine<'a, I>(terms: I) -> SymbolicValue
where
    I: IntoIterator<Item = (&'a Rational, &'a SymbolicValue)>,
{
    let mut acc = SymbolicValue::zero();
    for (c, v) in terms {
        acc.add_scaled(c, v);
    }
    acc
}

pub fn evaluate_numeric(v: &SymbolicValue, inv: &InvariantValues) -> Rational {
    v.evaluate_numeric(inv)
}

pub fn derive_phi_bound(v: &SymbolicValue) -> Result<Option<Rational>, Error> {
    v.derive_phi_bound()
}

impl Add for SymbolicValue {
    type Output = SymbolicValue;
    fn add(self, rhs: SymbolicValue) -> SymbolicValue {
        &self + &rhs
    }
}

impl Add<&SymbolicValue> for &SymbolicValue {
    type Output = SymbolicValue;
    fn add(self, rhs: &SymbolicValue) -> SymbolicValue {
        SymbolicValue {
            scalar: &self.scalar + &rhs.scalar,
            omega2: &self.omega2 + &rhs.omega2,
            phi: &self.phi + &rhs.phi,
            hnt: &self.hnt + &rhs.hnt,
        }
    }
}

impl Sub<&SymbolicValue> for &SymbolicValue {
    type Output = SymbolicValue;
    fn sub(self, rhs: &SymbolicValue) -> SymbolicValue {
        self + &(-rhs)
    }
}

impl Sub for SymbolicValue {
    type Output = SymbolicValue;
    fn sub(self, rhs: SymbolicValue) -> SymbolicValue {
        &self - &rhs
    }
}

impl Neg for &SymbolicValue {
    type Output = SymbolicValue;
    fn neg(self) -> SymbolicValue {
        self.scale(&Rational::from(-1))
    }
}

impl Neg for SymbolicValue {
    type Output = SymbolicValue;
    fn neg(self) -> SymbolicValue {
        -&self
    }
}

impl Mul<&Rational> for &SymbolicValue {
    type Output = SymbolicValue;
    fn mul(self, rhs: &Rational) -> SymbolicValue {
        self.scale(rhs)
    }
}

impl core::iter::Sum for SymbolicValue {
    fn sum<I: Iterator<Item = SymbolicValue>>(iter: I) -> Self {
        iter.fold(SymbolicValue::zero(), |acc, v| acc + v)
    }
}

impl fmt::Display for SymbolicValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} + ({})·ω̂² + ({})·φ + ({})·h_NT",
            self.scalar, self.omega2, self.phi, self.hnt
        )
    }
}
