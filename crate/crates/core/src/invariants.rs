//! Exact numeric invariants of boundary data.
//!
//! For a Morse function `g` on a closed `(n−1)`-manifold with a sign
//! `σ: S(g) → {±1}`, `χ₊(g; σ) = Σ_{σ(x)=+1} (−1)^{ind x}`. For a Morse
//! function `f` on `M`, `χ₊[f]` uses the inward-normal signs of `f`, and
//! `χ(M) − χ₊[f]` is a complete cusp-cobordism invariant with values in
//! `ℤ/2` (even `n`) or `ℤ` (odd `n`).

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Neg};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::morse_model::{alternating_count, parity_sign, BoundaryCriticalPoint, MorseDescriptor, Sign};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum InvariantError {
    #[error("sign assignment has no entry for boundary point {id}")]
    MissingSign { id: String },
    #[error("sign assignment names unknown boundary point {id}")]
    UnknownSign { id: String },
    #[error("chi(P) = {declared} but the boundary list has alternating count {counted}")]
    EulerMismatch { declared: i64, counted: i64 },
    #[error("chi of the boundary is odd ({0}); it must be even")]
    OddEuler(i64),
    #[error("cannot combine classes of dimension {left} and {right}")]
    DimensionMismatch { left: i64, right: i64 },
}

/// A map from boundary critical point id to sign.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SignAssignment {
    pub entries: BTreeMap<String, Sign>,
}

impl SignAssignment {
    pub fn new() -> Self {
        Self::default()
    }

    /// The signs already stored on the points.
    pub fn stored(boundary: &[BoundaryCriticalPoint]) -> Self {
        boundary.iter().map(|p| (p.id.clone(), p.sigma)).collect()
    }

    pub fn get(&self, id: &str) -> Option<Sign> {
        self.entries.get(id).copied()
    }

    /// Changes the sign of an id already in the domain; returns whether it was present.
    pub fn set(&mut self, id: &str, sign: Sign) -> bool {
        match self.entries.get_mut(id) {
            Some(s) => {
                *s = sign;
                true
            }
            None => false,
        }
    }

    pub fn insert(&mut self, id: impl Into<String>, sign: Sign) {
        self.entries.insert(id.into(), sign);
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Checks that the domain is exactly the set of ids of `boundary`.
    pub fn check_domain(&self, boundary: &[BoundaryCriticalPoint]) -> Result<(), InvariantError> {
        if let Some(p) = boundary.iter().find(|p| !self.entries.contains_key(&p.id)) {
            return Err(InvariantError::MissingSign { id: p.id.clone() });
        }
        if let Some(id) = self.entries.keys().find(|k| !boundary.iter().any(|p| p.id == **k)) {
            return Err(InvariantError::UnknownSign { id: id.clone() });
        }
        Ok(())
    }

    /// Signs in the order of `boundary`; the domain must already be checked.
    fn signs_for(&self, boundary: &[BoundaryCriticalPoint]) -> Result<Vec<Sign>, InvariantError> {
        self.check_domain(boundary)?;
        Ok(boundary.iter().map(|p| self.entries[&p.id]).collect())
    }
}

impl FromIterator<(String, Sign)> for SignAssignment {
    fn from_iter<T: IntoIterator<Item = (String, Sign)>>(iter: T) -> Self {
        Self { entries: iter.into_iter().collect() }
    }
}

/// An element of `ℤ/2` (even `n`) or `ℤ` (odd `n`).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CobordismClass {
    pub n: i64,
    pub value: i64,
}

impl CobordismClass {
    /// Reduces `value` into the group for dimension `n`.
    pub fn new(n: i64, value: i64) -> Self {
        let value = if n.rem_euclid(2) == 0 { value.rem_euclid(2) } else { value };
        Self { n, value }
    }

    pub fn zero(n: i64) -> Self {
        Self::new(n, 0)
    }

    pub fn is_zero(&self) -> bool {
        self.value == 0
    }

    pub fn is_even_dimension(&self) -> bool {
        self.n.rem_euclid(2) == 0
    }

    /// `"Z/2"` or `"Z"`.
    pub fn group_name(&self) -> &'static str {
        if self.is_even_dimension() {
            "Z/2"
        } else {
            "Z"
        }
    }

    /// Whether the class generates its group.
    pub fn is_generator(&self) -> bool {
        if self.is_even_dimension() {
            self.value == 1
        } else {
            self.value.abs() == 1
        }
    }

    pub fn checked_add(self, other: CobordismClass) -> Result<CobordismClass, InvariantError> {
        if self.n != other.n {
            return Err(InvariantError::DimensionMismatch { left: self.n, right: other.n });
        }
        Ok(CobordismClass::new(self.n, self.value + other.value))
    }
}

impl Add for CobordismClass {
    type Output = CobordismClass;

    /// Panics on a dimension mismatch; use [`CobordismClass::checked_add`] otherwise.
    fn add(self, other: CobordismClass) -> CobordismClass {
        self.checked_add(other).expect("adding cobordism classes of different dimension")
    }
}

impl Neg for CobordismClass {
    type Output = CobordismClass;

    fn neg(self) -> CobordismClass {
        CobordismClass::new(self.n, -self.value)
    }
}

impl fmt::Display for CobordismClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} in {}", self.value, self.group_name())
    }
}

fn plus_sum<'a>(pairs: impl Iterator<Item = (i64, Sign)> + 'a) -> i64 {
    pairs.filter(|(_, s)| s.is_plus()).map(|(mu, _)| parity_sign(mu)).sum()
}

/// `χ₊[f]` from the stored signs.
pub fn chi_plus(d: &MorseDescriptor) -> i64 {
    plus_sum(d.boundary.iter().map(|p| (p.mu, p.sigma)))
}

/// `χ₊(g; σ)`, ignoring the signs stored on the points.
pub fn chi_plus_sigma(boundary: &[BoundaryCriticalPoint], sigma: &SignAssignment) -> Result<i64, InvariantError> {
    let signs = sigma.signs_for(boundary)?;
    Ok(plus_sum(boundary.iter().zip(signs).map(|(p, s)| (p.mu, s))))
}

/// Both sides of `χ(P)/2 − χ₊(g; σ) = −½ Σ (−1)^μ σ(x)`.
pub fn signed_defect(
    chi_p: i64,
    boundary: &[BoundaryCriticalPoint],
    sigma: &SignAssignment,
) -> Result<(Rational, Rational), InvariantError> {
    let counted = alternating_count(boundary);
    if counted != chi_p {
        return Err(InvariantError::EulerMismatch { declared: chi_p, counted });
    }
    let signs = sigma.signs_for(boundary)?;
    let chi_plus = plus_sum(boundary.iter().zip(signs.iter().copied()).map(|(p, s)| (p.mu, s)));
    let signed: i64 = boundary.iter().zip(&signs).map(|(p, s)| parity_sign(p.mu) * s.value()).sum();
    let lhs = Rational::new(chi_p, 2) - Rational::from_integer(chi_plus);
    let rhs = Rational::new(-signed, 2);
    Ok((lhs, rhs))
}

/// `χ(M) − χ₊[f]` in the group for dimension `d.n`.
pub fn cobordism_invariant(d: &MorseDescriptor) -> CobordismClass {
    CobordismClass::new(d.n, d.chi_m - chi_plus(d))
}

/// Necessary condition for a non-singular extension of `g` with signs `σ`:
/// `χ₊ ≡ χ(M) (mod 2)` for even `n`, `χ₊ = χ(M)` for odd `n`.
pub fn morse_van_schaack(
    n: i64,
    chi_m: i64,
    boundary: &[BoundaryCriticalPoint],
    sigma: &SignAssignment,
) -> Result<bool, InvariantError> {
    let chi_plus = chi_plus_sigma(boundary, sigma)?;
    Ok(if n.rem_euclid(2) == 0 { (chi_plus - chi_m).rem_euclid(2) == 0 } else { chi_plus == chi_m })
}

/// `χ(X) = χ(∂X)/2` for an odd-dimensional compact `X`.
pub fn euler_odd(chi_boundary: i64) -> Result<i64, InvariantError> {
    if chi_boundary.rem_euclid(2) != 0 {
        return Err(InvariantError::OddEuler(chi_boundary));
    }
    Ok(chi_boundary / 2)
}
