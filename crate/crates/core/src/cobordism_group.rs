//! Group-level decisions and constructions on cusp-cobordism classes.

use rayon::prelude::*;
use thiserror::Error;

use crate::invariants::{cobordism_invariant, CobordismClass, InvariantError, SignAssignment};
use crate::morse_model::{BoundaryCriticalPoint, ModelError, MorseDescriptor, Sign, ValidationReport};

/// Elements of the cobordism group are represented by their invariant.
pub type GroupElement = CobordismClass;

/// Largest boundary size for which [`solve_sigma_for_target`] enumerates.
pub const EXHAUSTIVE_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Invariant(#[from] InvariantError),
    #[error("invalid descriptor: {0}")]
    Invalid(String),
    #[error("dimension n = {0} is below 2")]
    DimensionTooSmall(i64),
    #[error("target {target} is not attainable; attainable values: {attainable:?}")]
    NoSolution { target: i64, attainable: Vec<i64> },
}

impl From<ValidationReport> for GroupError {
    fn from(report: ValidationReport) -> Self {
        GroupError::Invalid(report.to_string().replace('\n', "; "))
    }
}

fn ensure_valid(d: &MorseDescriptor) -> Result<(), GroupError> {
    let report = d.validate();
    if report.is_valid() {
        Ok(())
    } else {
        Err(report.into())
    }
}

/// Whether `d1` and `d2` are cusp-cobordant, i.e. have equal invariants.
pub fn is_cobordant(d1: &MorseDescriptor, d2: &MorseDescriptor) -> Result<bool, GroupError> {
    if d1.n != d2.n {
        return Err(ModelError::DimensionMismatch { left: d1.n, right: d2.n }.into());
    }
    ensure_valid(d1)?;
    ensure_valid(d2)?;
    Ok(cobordism_invariant(d1) == cobordism_invariant(d2))
}

/// The height function on `Dⁿ` restricted to its boundary sphere, with both
/// boundary critical points pointing inward.
pub fn generator(n: i64) -> Result<MorseDescriptor, GroupError> {
    if n < 2 {
        return Err(GroupError::DimensionTooSmall(n));
    }
    Ok(MorseDescriptor::from_boundary(
        n,
        1,
        vec![BoundaryCriticalPoint::new("x0", 0, Sign::Plus), BoundaryCriticalPoint::new("x1", n - 1, Sign::Plus)],
    ))
}

/// Boundary data with signs replaced by `sigma`, on a manifold with Euler
/// characteristic `chi_m`. The interior list is left empty.
pub fn realize_sign_assignment(
    boundary: &[BoundaryCriticalPoint],
    sigma: &SignAssignment,
    n: i64,
    chi_m: i64,
) -> Result<MorseDescriptor, GroupError> {
    sigma.check_domain(boundary)?;
    let points = boundary
        .iter()
        .map(|p| BoundaryCriticalPoint { sigma: sigma.get(&p.id).expect("domain checked"), ..p.clone() })
        .collect();
    let d = MorseDescriptor::from_boundary(n, chi_m, points);
    ensure_valid(&d)?;
    Ok(d)
}

fn sign_of_bit(mask: u64, j: usize, k: usize) -> Sign {
    if mask >> (k - 1 - j) & 1 == 0 {
        Sign::Plus
    } else {
        Sign::Minus
    }
}

fn chi_plus_of_mask(boundary: &[BoundaryCriticalPoint], mask: u64) -> i64 {
    let k = boundary.len();
    boundary
        .iter()
        .enumerate()
        .filter(|(j, _)| sign_of_bit(mask, *j, k).is_plus())
        .map(|(_, p)| crate::morse_model::parity_sign(p.mu))
        .sum()
}

/// Counts of boundary points with even and odd index.
fn parity_counts(boundary: &[BoundaryCriticalPoint]) -> (i64, i64) {
    let even = boundary.iter().filter(|p| p.mu.rem_euclid(2) == 0).count() as i64;
    (even, boundary.len() as i64 - even)
}

/// All invariant values reachable by some sign assignment, sorted.
///
/// `χ₊` ranges over every integer in `[−#odd, #even]`.
pub fn attainable_values(boundary: &[BoundaryCriticalPoint], n: i64, chi_m: i64) -> Vec<i64> {
    let (even, odd) = parity_counts(boundary);
    let mut values: Vec<i64> = (-odd..=even).map(|cp| CobordismClass::new(n, chi_m - cp).value).collect();
    values.sort_unstable();
    values.dedup();
    values
}

fn target_matches(n: i64, chi_m: i64, chi_plus: i64, target: &GroupElement) -> bool {
    CobordismClass::new(n, chi_m - chi_plus) == CobordismClass::new(n, target.value)
}

fn solve_exhaustive(
    boundary: &[BoundaryCriticalPoint],
    n: i64,
    chi_m: i64,
    target: &GroupElement,
) -> Option<SignAssignment> {
    let k = boundary.len();
    let mask = (0..1u64 << k)
        .into_par_iter()
        .find_first(|&m| target_matches(n, chi_m, chi_plus_of_mask(boundary, m), target))?;
    Some(boundary.iter().enumerate().map(|(j, p)| (p.id.clone(), sign_of_bit(mask, j, k))).collect())
}

/// Lexicographically first assignment (`+1` before `−1`, earlier points more
/// significant) via a feasibility test on each suffix.
fn solve_greedy(
    boundary: &[BoundaryCriticalPoint],
    n: i64,
    chi_m: i64,
    target: &GroupElement,
) -> Option<SignAssignment> {
    let feasible = |rest: &[BoundaryCriticalPoint], acc: i64| {
        let (even, odd) = parity_counts(rest);
        (-odd..=even).any(|cp| target_matches(n, chi_m, acc + cp, target))
    };
    if !feasible(boundary, 0) {
        return None;
    }
    let mut acc = 0;
    let mut out = SignAssignment::new();
    for (j, p) in boundary.iter().enumerate() {
        let rest = &boundary[j + 1..];
        let plus = acc + crate::morse_model::parity_sign(p.mu);
        if feasible(rest, plus) {
            acc = plus;
            out.insert(p.id.clone(), Sign::Plus);
        } else {
            out.insert(p.id.clone(), Sign::Minus);
        }
    }
    Some(out)
}

/// A sign assignment whose realization has invariant `target`.
///
/// The returned assignment is the first in the order that tries `+1` before
/// `−1` with earlier points more significant. Inputs with at most
/// [`EXHAUSTIVE_LIMIT`] points are enumerated; larger ones use the interval
/// characterization of attainable `χ₊` values.
pub fn solve_sigma_for_target(
    boundary: &[BoundaryCriticalPoint],
    n: i64,
    chi_m: i64,
    target: &GroupElement,
) -> Result<SignAssignment, GroupError> {
    let probe = MorseDescriptor::from_boundary(n, chi_m, boundary.to_vec());
    ensure_valid(&probe)?;
    let found = if boundary.len() <= EXHAUSTIVE_LIMIT {
        solve_exhaustive(boundary, n, chi_m, target)
    } else {
        solve_greedy(boundary, n, chi_m, target)
    };
    found.ok_or_else(|| GroupError::NoSolution {
        target: CobordismClass::new(n, target.value).value,
        attainable: attainable_values(boundary, n, chi_m),
    })
}
