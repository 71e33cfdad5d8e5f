//! Combinatorial model of the singular set of a generic map to the plane.
//!
//! The singular set `S(G)` of a generic `G: V → ℝ²` is a compact 1-manifold:
//! a disjoint union of circles and of intervals whose endpoints are the
//! critical points of `G|∂V` projected to the first coordinate. Each component
//! is recorded as the cyclic or linear sequence of fold arcs (with absolute
//! index `τ`) and cusps (with normal index `I`) met along it.
//!
//! Absolute index transitions at a cusp `p` with `τ(p) = max{I, n−2−I}`:
//! the two abutting fold arcs have indices `{τ(p), τ(p)+1}`, except when `n`
//! is even and `τ(p) = n/2 − 1`, where both have index `n/2`.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::invariants::{chi_plus_sigma, InvariantError, SignAssignment};
use crate::morse_model::{alternating_count, parity_sign, BoundaryCriticalPoint, Sign};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FoldArc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    pub tau: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Cusp {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub id: Option<String>,
    #[serde(rename = "I")]
    pub normal_index: i64,
}

impl Cusp {
    pub fn new(normal_index: i64) -> Self {
        Self { id: None, normal_index }
    }

    /// Absolute index `max{I, n−2−I}`.
    pub fn tau(&self, n: i64) -> i64 {
        self.normal_index.max(n - 2 - self.normal_index)
    }
}

impl FoldArc {
    pub fn new(tau: i64) -> Self {
        Self { id: None, tau }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Element {
    Arc(FoldArc),
    Cusp(Cusp),
}

impl Element {
    pub fn arc(tau: i64) -> Self {
        Element::Arc(FoldArc::new(tau))
    }

    pub fn cusp(normal_index: i64) -> Self {
        Element::Cusp(Cusp::new(normal_index))
    }

    pub fn as_arc(&self) -> Option<&FoldArc> {
        match self {
            Element::Arc(a) => Some(a),
            Element::Cusp(_) => None,
        }
    }

    pub fn as_cusp(&self) -> Option<&Cusp> {
        match self {
            Element::Cusp(c) => Some(c),
            Element::Arc(_) => None,
        }
    }

    pub fn is_cusp(&self) -> bool {
        matches!(self, Element::Cusp(_))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentKind {
    Circle,
    Interval,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Component {
    pub kind: ComponentKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub endpoints: Option<[String; 2]>,
    pub sequence: Vec<Element>,
}

impl Component {
    pub fn circle(sequence: Vec<Element>) -> Self {
        Self { kind: ComponentKind::Circle, endpoints: None, sequence }
    }

    pub fn interval(x0: impl Into<String>, x1: impl Into<String>, sequence: Vec<Element>) -> Self {
        Self { kind: ComponentKind::Interval, endpoints: Some([x0.into(), x1.into()]), sequence }
    }

    pub fn is_circle(&self) -> bool {
        self.kind == ComponentKind::Circle
    }

    pub fn is_interval(&self) -> bool {
        self.kind == ComponentKind::Interval
    }

    pub fn cusp_count(&self) -> usize {
        self.sequence.iter().filter(|e| e.is_cusp()).count()
    }

    pub fn arc_count(&self) -> usize {
        self.sequence.len() - self.cusp_count()
    }

    /// Position in `sequence` of the `k`-th arc.
    pub fn arc_position(&self, k: usize) -> Option<usize> {
        self.sequence.iter().enumerate().filter(|(_, e)| !e.is_cusp()).nth(k).map(|(pos, _)| pos)
    }

    /// Position in `sequence` of the `k`-th cusp.
    pub fn cusp_position(&self, k: usize) -> Option<usize> {
        self.sequence.iter().enumerate().filter(|(_, e)| e.is_cusp()).nth(k).map(|(pos, _)| pos)
    }

    /// The arcs on either side of the element at `pos`, cyclically for circles.
    pub fn neighbours(&self, pos: usize) -> Option<(usize, usize)> {
        let len = self.sequence.len();
        match self.kind {
            ComponentKind::Interval => {
                if pos == 0 || pos + 1 >= len {
                    None
                } else {
                    Some((pos - 1, pos + 1))
                }
            }
            ComponentKind::Circle => {
                if len == 0 {
                    None
                } else {
                    Some(((pos + len - 1) % len, (pos + 1) % len))
                }
            }
        }
    }

    fn endpoint_ids(&self) -> impl Iterator<Item = &String> {
        self.endpoints.iter().flat_map(|e| e.iter())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SingularPattern {
    pub n: i64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chi_ambient: Option<i64>,
    #[serde(default)]
    pub boundary_points: Vec<BoundaryCriticalPoint>,
    #[serde(default)]
    pub components: Vec<Component>,
}

/// One violated pattern rule, located by component and sequence position.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternViolation {
    #[error("dimension n = {n} is below 2")]
    DimensionTooSmall { n: i64 },
    #[error("component {component}: empty sequence")]
    EmptyComponent { component: usize },
    #[error("component {component}: position {position} breaks arc/cusp alternation")]
    NotAlternating { component: usize, position: usize },
    #[error("component {component}: interval must begin and end with an arc")]
    IntervalEndsWithCusp { component: usize },
    #[error("component {component}: circle of length {length} must have length 1 or even")]
    CircleLength { component: usize, length: usize },
    #[error("component {component} position {position}: arc tau {tau} outside [{min}, {max}]")]
    ArcIndexOutOfRange { component: usize, position: usize, tau: i64, min: i64, max: i64 },
    #[error("component {component} position {position}: cusp index {index} outside [0, {max}]")]
    CuspIndexOutOfRange { component: usize, position: usize, index: i64, max: i64 },
    #[error(
        "component {component} position {position}: cusp with tau {cusp_tau} between arcs {left} and {right}, expected {expected:?}"
    )]
    TransitionMismatch { component: usize, position: usize, cusp_tau: i64, left: i64, right: i64, expected: [i64; 2] },
    #[error("component {component}: interval without endpoints")]
    MissingEndpoints { component: usize },
    #[error("component {component}: circle with endpoints")]
    CircleWithEndpoints { component: usize },
    #[error("component {component}: endpoint {id} is not a listed boundary point")]
    UnknownEndpoint { component: usize, id: String },
    #[error("component {component}: arc at endpoint {id} has tau {found}, expected {expected}")]
    EndpointIndexMismatch { component: usize, id: String, expected: i64, found: i64 },
    #[error("boundary point {id} is not an endpoint of any interval")]
    UncoveredBoundaryPoint { id: String },
    #[error("boundary point {id} is an endpoint {count} times")]
    RepeatedEndpoint { id: String, count: usize },
    #[error("boundary point {id}: mu = {mu} outside [0, {max}]")]
    BoundaryIndexOutOfRange { id: String, mu: i64, max: i64 },
    #[error("duplicate boundary point id {id}")]
    DuplicateBoundaryId { id: String },
    #[error("component {component}: circle with {cusps} cusps in odd dimension")]
    OddCircleInOddDimension { component: usize, cusps: usize },
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct PatternReport {
    pub violations: Vec<PatternViolation>,
}

impl PatternReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for PatternReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("valid");
        }
        let lines: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        f.write_str(&lines.join("\n"))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PatternError {
    #[error("invalid pattern: {0}")]
    Invalid(String),
    #[error(transparent)]
    Sign(#[from] InvariantError),
    #[error("operation requires {expected} dimension, got n = {n}")]
    WrongParity { n: i64, expected: &'static str },
    #[error("pattern has no chi_ambient")]
    MissingChiAmbient,
    #[error("odd number of boundary points ({0})")]
    OddBoundaryCount(usize),
    #[error("cusp count {cusps} is not congruent to chi {chi} + {half} (mod 2)")]
    Lemma51Failure { cusps: usize, chi: i64, half: usize },
}

impl From<PatternReport> for PatternError {
    fn from(report: PatternReport) -> Self {
        PatternError::Invalid(report.to_string().replace('\n', "; "))
    }
}

/// Absolute index of the fold arc abutting a boundary critical point of index `mu`.
pub fn endpoint_tau(n: i64, mu: i64) -> i64 {
    mu.max(n - 1 - mu)
}

/// The unordered pair of arc indices allowed on the two sides of a cusp.
pub fn transition_pair(n: i64, cusp_tau: i64) -> [i64; 2] {
    if n % 2 == 0 && cusp_tau == n / 2 - 1 {
        [n / 2, n / 2]
    } else {
        [cusp_tau, cusp_tau + 1]
    }
}

impl SingularPattern {
    pub fn new(n: i64, boundary_points: Vec<BoundaryCriticalPoint>, components: Vec<Component>) -> Self {
        Self { n, chi_ambient: None, boundary_points, components }
    }

    pub fn with_chi_ambient(mut self, chi: i64) -> Self {
        self.chi_ambient = Some(chi);
        self
    }

    pub fn total_cusps(&self) -> usize {
        self.components.iter().map(Component::cusp_count).sum()
    }

    pub fn boundary_point(&self, id: &str) -> Option<&BoundaryCriticalPoint> {
        self.boundary_points.iter().find(|p| p.id == id)
    }

    /// Index of the interval having `id` as an endpoint.
    pub fn component_of_endpoint(&self, id: &str) -> Option<usize> {
        self.components.iter().position(|c| c.endpoint_ids().any(|e| e == id))
    }

    pub fn validate(&self) -> PatternReport {
        let mut v = Vec::new();
        let n = self.n;
        if n < 2 {
            v.push(PatternViolation::DimensionTooSmall { n });
        }
        for (k, p) in self.boundary_points.iter().enumerate() {
            if !(0..n).contains(&p.mu) {
                v.push(PatternViolation::BoundaryIndexOutOfRange { id: p.id.clone(), mu: p.mu, max: n - 1 });
            }
            if self.boundary_points[..k].iter().any(|q| q.id == p.id) {
                v.push(PatternViolation::DuplicateBoundaryId { id: p.id.clone() });
            }
        }
        let tau_min = n / 2;
        for (ci, comp) in self.components.iter().enumerate() {
            let seq = &comp.sequence;
            if seq.is_empty() {
                v.push(PatternViolation::EmptyComponent { component: ci });
                continue;
            }
            let mut alternating = true;
            for (pos, e) in seq.iter().enumerate() {
                if e.is_cusp() != (pos % 2 == 1) {
                    v.push(PatternViolation::NotAlternating { component: ci, position: pos });
                    alternating = false;
                }
                match e {
                    Element::Arc(a) if !(tau_min..n).contains(&a.tau) => {
                        v.push(PatternViolation::ArcIndexOutOfRange {
                            component: ci,
                            position: pos,
                            tau: a.tau,
                            min: tau_min,
                            max: n - 1,
                        })
                    }
                    Element::Cusp(c) if !(0..=n - 2).contains(&c.normal_index) => {
                        v.push(PatternViolation::CuspIndexOutOfRange {
                            component: ci,
                            position: pos,
                            index: c.normal_index,
                            max: n - 2,
                        })
                    }
                    _ => {}
                }
            }
            match comp.kind {
                ComponentKind::Interval => {
                    if seq.len() % 2 == 0 {
                        v.push(PatternViolation::IntervalEndsWithCusp { component: ci });
                        alternating = false;
                    }
                    match &comp.endpoints {
                        None => v.push(PatternViolation::MissingEndpoints { component: ci }),
                        Some([x0, x1]) => {
                            let ends = [(x0, seq.first()), (x1, seq.last())];
                            for (id, elem) in ends {
                                match self.boundary_point(id) {
                                    None => v.push(PatternViolation::UnknownEndpoint { component: ci, id: id.clone() }),
                                    Some(p) => {
                                        if let Some(Element::Arc(a)) = elem {
                                            let expected = endpoint_tau(n, p.mu);
                                            if a.tau != expected {
                                                v.push(PatternViolation::EndpointIndexMismatch {
                                                    component: ci,
                                                    id: id.clone(),
                                                    expected,
                                                    found: a.tau,
                                                });
                                            }
                                        }
                                    }
                                }
                            }
                        }
                    }
                }
                ComponentKind::Circle => {
                    if comp.endpoints.is_some() {
                        v.push(PatternViolation::CircleWithEndpoints { component: ci });
                    }
                    if seq.len() != 1 && seq.len() % 2 == 1 {
                        v.push(PatternViolation::CircleLength { component: ci, length: seq.len() });
                        alternating = false;
                    }
                    if n % 2 == 1 && comp.cusp_count() % 2 == 1 {
                        v.push(PatternViolation::OddCircleInOddDimension { component: ci, cusps: comp.cusp_count() });
                    }
                }
            }
            if !alternating {
                continue;
            }
            for (pos, e) in seq.iter().enumerate() {
                let Element::Cusp(c) = e else { continue };
                let Some((l, r)) = comp.neighbours(pos) else { continue };
                let (Some(la), Some(ra)) = (seq[l].as_arc(), seq[r].as_arc()) else { continue };
                let cusp_tau = c.tau(n);
                let expected = transition_pair(n, cusp_tau);
                let mut found = [la.tau, ra.tau];
                found.sort_unstable();
                if found != expected {
                    v.push(PatternViolation::TransitionMismatch {
                        component: ci,
                        position: pos,
                        cusp_tau,
                        left: la.tau,
                        right: ra.tau,
                        expected,
                    });
                }
            }
        }
        for p in &self.boundary_points {
            let count = self
                .components
                .iter()
                .filter(|c| c.is_interval())
                .flat_map(Component::endpoint_ids)
                .filter(|id| **id == p.id)
                .count();
            match count {
                0 => v.push(PatternViolation::UncoveredBoundaryPoint { id: p.id.clone() }),
                1 => {}
                count => v.push(PatternViolation::RepeatedEndpoint { id: p.id.clone(), count }),
            }
        }
        PatternReport { violations: v }
    }

    pub fn ensure_valid(&self) -> Result<(), PatternError> {
        let report = self.validate();
        if report.is_valid() {
            Ok(())
        } else {
            Err(report.into())
        }
    }

    fn sign(&self, sigma: &SignAssignment, id: &str) -> Sign {
        sigma.get(id).expect("sign assignment domain checked")
    }

    fn prepare(&self, sigma: &SignAssignment) -> Result<(), PatternError> {
        self.ensure_valid()?;
        sigma.check_domain(&self.boundary_points)?;
        Ok(())
    }

    fn require_parity(&self, even: bool) -> Result<(), PatternError> {
        if (self.n % 2 == 0) != even {
            return Err(PatternError::WrongParity { n: self.n, expected: if even { "even" } else { "odd" } });
        }
        Ok(())
    }

    /// `½ Σ_{x∈∂S} σ(x)` for a component (zero for circles).
    fn half_sigma_sum(&self, comp: &Component, sigma: &SignAssignment) -> i64 {
        comp.endpoint_ids().map(|id| self.sign(sigma, id).value()).sum::<i64>() / 2
    }

    /// `Σ_{x∈∂S} (−1)^μ σ(x)` for a component.
    fn signed_index_sum(&self, comp: &Component, sigma: &SignAssignment) -> i64 {
        comp.endpoint_ids()
            .map(|id| {
                let p = self.boundary_point(id).expect("validated endpoint");
                parity_sign(p.mu) * self.sign(sigma, id).value()
            })
            .sum()
    }

    /// Whether a non-vanishing field along `S(G)` with the prescribed boundary
    /// behaviour exists: circles carry an even number of cusps, and an interval
    /// carries an even number iff its endpoint signs differ.
    pub fn vector_field_exists(&self, sigma: &SignAssignment) -> Result<bool, PatternError> {
        self.prepare(sigma)?;
        Ok(self.components.iter().all(|comp| {
            let even = comp.cusp_count() % 2 == 0;
            match &comp.endpoints {
                Some([x0, x1]) if comp.is_interval() => even == (self.sign(sigma, x0) != self.sign(sigma, x1)),
                _ => even,
            }
        }))
    }

    /// Per component: `#cusps + ½ Σ σ ≡ 0 (mod 2)`.
    pub fn check_condition_even(&self, sigma: &SignAssignment) -> Result<Vec<bool>, PatternError> {
        self.require_parity(true)?;
        self.prepare(sigma)?;
        Ok(self.conditions_even_unchecked(sigma))
    }

    pub(crate) fn conditions_even_unchecked(&self, sigma: &SignAssignment) -> Vec<bool> {
        self.components
            .iter()
            .map(|comp| (comp.cusp_count() as i64 + self.half_sigma_sum(comp, sigma)).rem_euclid(2) == 0)
            .collect()
    }

    /// Per component: `Σ (−1)^μ σ = 0`.
    pub fn check_condition_odd(&self, sigma: &SignAssignment) -> Result<Vec<bool>, PatternError> {
        self.require_parity(false)?;
        self.prepare(sigma)?;
        Ok(self.components.iter().map(|comp| self.signed_index_sum(comp, sigma) == 0).collect())
    }

    /// Total cusp count `≡ χ(Y) + #S(g)/2 (mod 2)`.
    pub fn lemma51_check(&self) -> Result<bool, PatternError> {
        let chi = self.chi_ambient.ok_or(PatternError::MissingChiAmbient)?;
        self.lemma51_with(chi)
    }

    fn lemma51_with(&self, chi: i64) -> Result<bool, PatternError> {
        let count = self.boundary_points.len();
        if count % 2 != 0 {
            return Err(PatternError::OddBoundaryCount(count));
        }
        self.ensure_valid()?;
        Ok(self.lemma51_unchecked(chi))
    }

    pub(crate) fn lemma51_unchecked(&self, chi: i64) -> bool {
        (self.total_cusps() as i64 - chi - (self.boundary_points.len() / 2) as i64).rem_euclid(2) == 0
    }

    /// Both sides of `χ(V) − χ₊(g;σ) ≡ Σ_S [#(Σ∩S) + ½ Σ_{∂S} σ] (mod 2)`.
    pub fn aggregate_even(&self, sigma: &SignAssignment, chi_v: i64) -> Result<(i64, i64), PatternError> {
        self.require_parity(true)?;
        self.prepare(sigma)?;
        if !self.lemma51_with(chi_v)? {
            return Err(PatternError::Lemma51Failure {
                cusps: self.total_cusps(),
                chi: chi_v,
                half: self.boundary_points.len() / 2,
            });
        }
        let chi_plus = chi_plus_sigma(&self.boundary_points, sigma)?;
        let lhs = (chi_v - chi_plus).rem_euclid(2);
        let rhs = self
            .components
            .iter()
            .map(|comp| comp.cusp_count() as i64 + self.half_sigma_sum(comp, sigma))
            .sum::<i64>()
            .rem_euclid(2);
        Ok((lhs, rhs))
    }

    /// Both sides of `χ(∂V)/2 − χ₊(g;σ) = −½ Σ_S Σ_{x∈∂S} (−1)^μ σ(x)`.
    pub fn aggregate_odd(&self, sigma: &SignAssignment) -> Result<(Rational, Rational), PatternError> {
        self.require_parity(false)?;
        self.prepare(sigma)?;
        let chi_boundary = alternating_count(&self.boundary_points);
        let chi_plus = chi_plus_sigma(&self.boundary_points, sigma)?;
        let lhs = Rational::new(chi_boundary, 2) - Rational::from_integer(chi_plus);
        let total: i64 = self.components.iter().map(|comp| self.signed_index_sum(comp, sigma)).sum();
        Ok((lhs, Rational::new(-total, 2)))
    }
}
