//! Finite descriptors of Morse functions on compact manifolds with boundary.
//!
//! A Morse function `f: M → ℝ` in this setting is a submersion near `∂M` whose
//! critical points, and those of `f|∂M`, are non-degenerate. The descriptor
//! keeps exactly the data the cobordism invariant depends on: the Euler
//! characteristics of `M` and `∂M`, the interior critical points, and for every
//! critical point of `f|∂M` its Morse index `μ` and the sign `σ` telling
//! whether `f` increases along the inward normal.
//!
//! `chi_M` is an independent input. No relation between interior critical
//! points and `χ(M)` is imposed.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::rational::{self, Rational};

/// A sign in `{+1, −1}`, encoded in JSON as `1` / `-1`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_i64(value: i64) -> Option<Self> {
        match value {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn value(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn is_plus(self) -> bool {
        self == Sign::Plus
    }
}

impl std::ops::Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+1",
            Sign::Minus => "-1",
        })
    }
}

impl Serialize for Sign {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_i64(self.value())
    }
}

impl<'de> Deserialize<'de> for Sign {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let raw = i64::deserialize(d)?;
        Sign::from_i64(raw).ok_or_else(|| serde::de::Error::custom(format!("sign must be 1 or -1, got {raw}")))
    }
}

/// `(−1)^k` for a (possibly negative) integer `k`.
pub fn parity_sign(k: i64) -> i64 {
    if k.rem_euclid(2) == 0 {
        1
    } else {
        -1
    }
}

/// A critical point of `f|∂M`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundaryCriticalPoint {
    pub id: String,
    pub mu: i64,
    pub sigma: Sign,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "rational::opt_serde")]
    pub value: Option<Rational>,
}

impl BoundaryCriticalPoint {
    pub fn new(id: impl Into<String>, mu: i64, sigma: Sign) -> Self {
        Self { id: id.into(), mu, sigma, value: None }
    }

    pub fn with_value(mut self, value: Rational) -> Self {
        self.value = Some(value);
        self
    }
}

/// A critical point of `f` in the interior of `M`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InteriorCriticalPoint {
    pub id: String,
    pub index: i64,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "rational::opt_serde")]
    pub value: Option<Rational>,
}

impl InteriorCriticalPoint {
    pub fn new(id: impl Into<String>, index: i64) -> Self {
        Self { id: id.into(), index, value: None }
    }

    pub fn with_value(mut self, value: Rational) -> Self {
        self.value = Some(value);
        self
    }
}

/// Alternating count `Σ (−1)^μ` over a list of boundary critical points, i.e.
/// the Euler characteristic of the closed manifold they live on.
pub fn alternating_count(points: &[BoundaryCriticalPoint]) -> i64 {
    points.iter().map(|p| parity_sign(p.mu)).sum()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MorseDescriptor {
    pub n: i64,
    pub oriented: bool,
    #[serde(rename = "chi_M")]
    pub chi_m: i64,
    pub chi_boundary: i64,
    #[serde(default)]
    pub interior: Vec<InteriorCriticalPoint>,
    #[serde(default)]
    pub boundary: Vec<BoundaryCriticalPoint>,
}

/// One violated descriptor invariant.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Violation {
    #[error("dimension n = {n} is below 2")]
    DimensionTooSmall { n: i64 },
    #[error("interior point {id}: index {index} outside [0, {n}]")]
    InteriorIndexOutOfRange { id: String, index: i64, n: i64 },
    #[error("boundary point {id}: mu = {mu} outside [0, {max}]")]
    BoundaryIndexOutOfRange { id: String, mu: i64, max: i64 },
    #[error("duplicate critical point id {id}")]
    DuplicateId { id: String },
    #[error("chi_boundary = {declared} but the alternating count of boundary points is {counted}")]
    BoundaryEulerMismatch { declared: i64, counted: i64 },
    #[error("chi_boundary = {chi_boundary} is odd")]
    OddBoundaryEuler { chi_boundary: i64 },
    #[error("n = {n} is odd but chi_M = {chi_m} differs from chi_boundary / 2 = {expected}")]
    OddDimensionEuler { n: i64, chi_m: i64, expected: i64 },
    #[error("odd number of boundary critical points ({count})")]
    OddBoundaryCount { count: usize },
}

/// Outcome of [`MorseDescriptor::validate`]; empty iff the descriptor is valid.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        for (k, v) in self.violations.iter().enumerate() {
            if k > 0 {
                f.write_str("\n")?;
            }
            write!(f, "{v}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ModelError {
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: i64, right: i64 },
    #[error("critical point {id} has no critical value")]
    MissingValue { id: String },
}

impl MorseDescriptor {
    /// The function on the empty manifold; identity element of the group.
    pub fn empty(n: i64) -> Self {
        Self { n, oriented: true, chi_m: 0, chi_boundary: 0, interior: Vec::new(), boundary: Vec::new() }
    }

    /// Builds a descriptor with `chi_boundary` computed from the boundary list.
    pub fn from_boundary(n: i64, chi_m: i64, boundary: Vec<BoundaryCriticalPoint>) -> Self {
        let chi_boundary = alternating_count(&boundary);
        Self { n, oriented: true, chi_m, chi_boundary, interior: Vec::new(), boundary }
    }

    pub fn is_empty(&self) -> bool {
        self.chi_m == 0 && self.chi_boundary == 0 && self.interior.is_empty() && self.boundary.is_empty()
    }

    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        let n = self.n;
        if n < 2 {
            violations.push(Violation::DimensionTooSmall { n });
        }
        let mut seen = HashSet::new();
        for p in &self.interior {
            if !(0..=n).contains(&p.index) {
                violations.push(Violation::InteriorIndexOutOfRange { id: p.id.clone(), index: p.index, n });
            }
            if !seen.insert(p.id.as_str()) {
                violations.push(Violation::DuplicateId { id: p.id.clone() });
            }
        }
        for p in &self.boundary {
            if !(0..n).contains(&p.mu) {
                violations.push(Violation::BoundaryIndexOutOfRange { id: p.id.clone(), mu: p.mu, max: n - 1 });
            }
            if !seen.insert(p.id.as_str()) {
                violations.push(Violation::DuplicateId { id: p.id.clone() });
            }
        }
        let counted = alternating_count(&self.boundary);
        if counted != self.chi_boundary {
            violations.push(Violation::BoundaryEulerMismatch { declared: self.chi_boundary, counted });
        }
        if self.chi_boundary.rem_euclid(2) != 0 {
            violations.push(Violation::OddBoundaryEuler { chi_boundary: self.chi_boundary });
        } else if n.rem_euclid(2) == 1 && self.chi_m != self.chi_boundary / 2 {
            violations.push(Violation::OddDimensionEuler { n, chi_m: self.chi_m, expected: self.chi_boundary / 2 });
        }
        if self.boundary.len() % 2 != 0 {
            violations.push(Violation::OddBoundaryCount { count: self.boundary.len() });
        }
        ValidationReport { violations }
    }

    /// Disjoint union `f₁ ⊔ f₂`.
    ///
    /// Ids of the second operand that collide with ids already present are
    /// relabeled by appending `'` until unique. The orientation flag of the
    /// result is that of the first non-empty operand.
    pub fn disjoint_union(&self, other: &MorseDescriptor) -> Result<MorseDescriptor, ModelError> {
        if self.n != other.n {
            return Err(ModelError::DimensionMismatch { left: self.n, right: other.n });
        }
        let mut used: HashSet<String> = self
            .interior
            .iter()
            .map(|p| p.id.clone())
            .chain(self.boundary.iter().map(|p| p.id.clone()))
            .collect();
        let mut fresh = |id: &str| {
            let mut candidate = id.to_string();
            while used.contains(&candidate) {
                candidate.push('\'');
            }
            used.insert(candidate.clone());
            candidate
        };
        let mut interior = self.interior.clone();
        interior.extend(other.interior.iter().map(|p| InteriorCriticalPoint { id: fresh(&p.id), ..p.clone() }));
        let mut boundary = self.boundary.clone();
        boundary.extend(other.boundary.iter().map(|p| BoundaryCriticalPoint { id: fresh(&p.id), ..p.clone() }));
        let oriented = if self.is_empty() { other.oriented } else { self.oriented };
        Ok(MorseDescriptor {
            n: self.n,
            oriented,
            chi_m: self.chi_m + other.chi_m,
            chi_boundary: self.chi_boundary + other.chi_boundary,
            interior,
            boundary,
        })
    }

    /// The descriptor of `−f` on `−M`.
    ///
    /// Interior index `i ↦ n − i`; boundary `(μ, σ) ↦ (n − 1 − μ, −σ)`;
    /// critical values are negated; Euler characteristics are unchanged.
    pub fn reverse(&self) -> MorseDescriptor {
        let n = self.n;
        MorseDescriptor {
            n,
            oriented: !self.oriented,
            chi_m: self.chi_m,
            chi_boundary: self.chi_boundary,
            interior: self
                .interior
                .iter()
                .map(|p| InteriorCriticalPoint { id: p.id.clone(), index: n - p.index, value: p.value.map(|v| -v) })
                .collect(),
            boundary: self
                .boundary
                .iter()
                .map(|p| BoundaryCriticalPoint {
                    id: p.id.clone(),
                    mu: n - 1 - p.mu,
                    sigma: -p.sigma,
                    value: p.value.map(|v| -v),
                })
                .collect(),
        }
    }

    /// `C^∞` stability: `f` is injective on `S(f) ⊔ S(f|∂M)`, i.e. all critical
    /// values are pairwise distinct.
    pub fn is_stable(&self) -> Result<bool, ModelError> {
        let mut values = Vec::with_capacity(self.interior.len() + self.boundary.len());
        let labelled = self
            .interior
            .iter()
            .map(|p| (&p.id, p.value))
            .chain(self.boundary.iter().map(|p| (&p.id, p.value)));
        for (id, value) in labelled {
            values.push(value.ok_or_else(|| ModelError::MissingValue { id: id.clone() })?);
        }
        values.sort();
        Ok(values.windows(2).all(|w| w[0] != w[1]))
    }
}
