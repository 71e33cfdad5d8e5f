//! Compactly supported profiles and the fold-line perturbation check.
//!
//! `F = Λ + (0, α(t)·β(‖z‖²))` is a fold map with the single fold line
//! `z = 0` whenever `|α(t)β′(r)| < 1` everywhere; its image is the graph of
//! `t ↦ α(t)β(0)`.

use serde::{Deserialize, Serialize};

use super::detect::{detect_singular_set, GridSpec, Tolerances};
use super::{LocalMap, MapKind, NormalFormError};

/// `max_s |d/ds (1 − s²)³| = 96 / (25√5)`, attained at `s = 1/√5`.
pub fn bump_shape_max_slope() -> f64 {
    96.0 / (25.0 * 5f64.sqrt())
}

/// A real function of one variable.
///
/// `Bump` is `amplitude · (1 − s²)³` with `s = (x − center)/radius` on
/// `|s| < 1` and zero outside: a `C²` piecewise polynomial.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum Profile {
    Zero,
    Bump { center: f64, radius: f64, amplitude: f64 },
    Constant { value: f64 },
}

impl Profile {
    pub fn bump(center: f64, radius: f64, amplitude: f64) -> Result<Self, NormalFormError> {
        let p = Profile::Bump { center, radius, amplitude };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), NormalFormError> {
        match *self {
            Profile::Zero => Ok(()),
            Profile::Bump { radius, .. } if radius > 0.0 && radius.is_finite() => Ok(()),
            Profile::Bump { radius, .. } => Err(NormalFormError::BadRadius(radius)),
            Profile::Constant { value } if value == 0.0 => Ok(()),
            Profile::Constant { .. } => Err(NormalFormError::UnboundedSupport),
        }
    }

    fn scaled(&self, x: f64) -> Option<(f64, f64, f64)> {
        match *self {
            Profile::Bump { center, radius, amplitude } => {
                let s = (x - center) / radius;
                (s.abs() < 1.0).then_some((s, radius, amplitude))
            }
            _ => None,
        }
    }

    pub fn value(&self, x: f64) -> f64 {
        if let Profile::Constant { value } = *self {
            return value;
        }
        self.scaled(x).map_or(0.0, |(s, _, a)| a * (1.0 - s * s).powi(3))
    }

    pub fn derivative(&self, x: f64) -> f64 {
        self.scaled(x).map_or(0.0, |(s, r, a)| -6.0 * a * s * (1.0 - s * s).powi(2) / r)
    }

    pub fn second_derivative(&self, x: f64) -> f64 {
        self.scaled(x).map_or(0.0, |(s, r, a)| -6.0 * a * (1.0 - s * s) * (1.0 - 5.0 * s * s) / (r * r))
    }

    /// Support as a closed interval, `None` for the zero function.
    pub fn support(&self) -> Result<Option<(f64, f64)>, NormalFormError> {
        self.validate()?;
        Ok(match *self {
            Profile::Bump { center, radius, amplitude } if amplitude != 0.0 => Some((center - radius, center + radius)),
            _ => None,
        })
    }

    /// Exact `sup |f|`.
    pub fn sup_abs(&self) -> Result<f64, NormalFormError> {
        self.validate()?;
        Ok(match *self {
            Profile::Bump { amplitude, .. } => amplitude.abs(),
            _ => 0.0,
        })
    }

    /// Exact `sup |f′|`.
    pub fn sup_abs_derivative(&self) -> Result<f64, NormalFormError> {
        self.validate()?;
        Ok(match *self {
            Profile::Bump { amplitude, radius, .. } => amplitude.abs() * bump_shape_max_slope() / radius,
            _ => 0.0,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    /// Exact `sup |α|·sup |β′|`.
    pub sup_exact: f64,
    /// Largest `|α(t)β′(r)|` over the sample grid.
    pub sup_sampled: f64,
    pub margin: f64,
    pub holds: bool,
}

/// Whether `|α(t)β′(r)| < 1 − margin` for all `(t, r)`.
///
/// The supremum factorizes and is computed exactly from the profiles; the
/// sampled value over `samples × samples` points of the supports is reported
/// as a cross-check and never exceeds the exact one.
pub fn check_perturbation_condition(
    alpha: &Profile,
    beta: &Profile,
    samples: usize,
    margin: f64,
) -> Result<ConditionReport, NormalFormError> {
    let sup_exact = alpha.sup_abs()? * beta.sup_abs_derivative()?;
    let grid = |p: &Profile| -> Result<Vec<f64>, NormalFormError> {
        Ok(match p.support()? {
            Some((a, b)) => (0..=samples).map(|k| a + (b - a) * k as f64 / samples.max(1) as f64).collect(),
            None => vec![0.0],
        })
    };
    let a_max = grid(alpha)?.iter().map(|&t| alpha.value(t).abs()).fold(0.0, f64::max);
    let b_max = grid(beta)?.iter().map(|&r| beta.derivative(r).abs()).fold(0.0, f64::max);
    let sup_sampled = a_max * b_max;
    Ok(ConditionReport { sup_exact, sup_sampled, margin, holds: sup_exact < 1.0 - margin })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PerturbationReport {
    pub condition: ConditionReport,
    pub samples: usize,
    /// Largest `‖z‖` over detected singular points.
    pub max_fibre_norm: f64,
    /// Largest `|F₂ − α(t)β(0)|` over detected singular points.
    pub max_image_error: f64,
    /// Every grid value of `t` carries a detected singular point.
    pub covers_grid: bool,
    pub tol: f64,
    pub passes: bool,
}

/// Detects `S(F)` for the perturbed fold and compares it with `z = 0` and
/// its image with the graph of `t ↦ α(t)β(0)`.
pub fn perturbed_fold_image(
    n: usize,
    i: usize,
    alpha: Profile,
    beta: Profile,
    grid: &GridSpec,
    tolerances: &Tolerances,
) -> Result<PerturbationReport, NormalFormError> {
    let condition = check_perturbation_condition(&alpha, &beta, 2000, tolerances.margin)?;
    if !condition.holds {
        return Err(NormalFormError::ConditionViolated { sup: condition.sup_exact, bound: 1.0 - tolerances.margin });
    }
    let map = LocalMap::new(n, MapKind::PerturbedFold { i, alpha, beta })?;
    let detection = detect_singular_set(&map, grid, tolerances)?;
    let b0 = beta.value(0.0);
    let mut max_fibre_norm = 0.0f64;
    let mut max_image_error = 0.0f64;
    for sample in &detection.samples {
        let (s, w) = (sample.point[0], &sample.point[1..]);
        let z: f64 = w.iter().map(|v| v * v).sum::<f64>().sqrt();
        max_fibre_norm = max_fibre_norm.max(z);
        let image = map.eval(&sample.point)?;
        max_image_error = max_image_error.max((image[1] - alpha.value(s) * b0).abs());
    }
    let covers_grid = grid
        .t_values()
        .iter()
        .all(|&t| detection.samples.iter().any(|smp| (smp.point[0] - t).abs() <= tolerances.dedup_radius));
    let tol = tolerances.image_tol;
    let passes = covers_grid && max_fibre_norm < tol && max_image_error < tol;
    Ok(PerturbationReport {
        condition,
        samples: detection.samples.len(),
        max_fibre_norm,
        max_image_error,
        covers_grid,
        tol,
        passes,
    })
}
