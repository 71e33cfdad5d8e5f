//! Numerical detection of the singular set `(Dʷh)⁻¹(0)`.
//!
//! Fold points come from Newton in `w` at each grid value of `s`; cusps from
//! Newton in `(s, w)` on the square system `(Dʷh, det Hessʷh) = 0`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{LocalMap, NormalFormError};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub newton_residual: f64,
    pub dedup_radius: f64,
    /// Relative eigenvalue threshold below which a Hessian counts as degenerate.
    pub rank_threshold: f64,
    pub max_iterations: usize,
    pub margin: f64,
    pub image_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            newton_residual: 1e-12,
            dedup_radius: 1e-6,
            rank_threshold: 1e-5,
            max_iterations: 60,
            margin: 1e-6,
            image_tol: 1e-8,
        }
    }
}

/// Seed grid: `nt` values of `s` in `[t0, t1]` and `nz` values per fibre
/// coordinate in `[z0, z1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub t0: f64,
    pub t1: f64,
    pub nt: usize,
    pub z0: f64,
    pub z1: f64,
    pub nz: usize,
}

fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|k| if k + 1 == n { b } else { a + (b - a) * k as f64 / (n - 1) as f64 }).collect(),
    }
}

impl GridSpec {
    pub fn new(t0: f64, t1: f64, nt: usize, z0: f64, z1: f64, nz: usize) -> Result<Self, NormalFormError> {
        let g = Self { t0, t1, nt, z0, z1, nz };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<(), NormalFormError> {
        let finite = [self.t0, self.t1, self.z0, self.z1].iter().all(|v| v.is_finite());
        if !finite || self.t0 > self.t1 || self.z0 > self.z1 || self.nt == 0 || self.nz == 0 {
            return Err(NormalFormError::BadGrid(self.to_string()));
        }
        Ok(())
    }

    pub fn t_values(&self) -> Vec<f64> {
        linspace(self.t0, self.t1, self.nt)
    }

    pub fn z_values(&self) -> Vec<f64> {
        linspace(self.z0, self.z1, self.nz)
    }

    fn contains(&self, p: &[f64], slack: f64) -> bool {
        let inside = |v: f64, a: f64, b: f64| v >= a - slack && v <= b + slack;
        inside(p[0], self.t0, self.t1) && p[1..].iter().all(|&v| inside(v, self.z0, self.z1))
    }
}

impl fmt::Display for GridSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{},{}:{}:{}", self.t0, self.t1, self.nt, self.z0, self.z1, self.nz)
    }
}

impl FromStr for GridSpec {
    type Err = NormalFormError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let bad = || NormalFormError::BadGrid(s.to_string());
        let axis = |part: &str| -> Result<(f64, f64, usize), NormalFormError> {
            let f: Vec<&str> = part.split(':').map(str::trim).collect();
            if f.len() != 3 {
                return Err(bad());
            }
            Ok((f[0].parse().map_err(|_| bad())?, f[1].parse().map_err(|_| bad())?, f[2].parse().map_err(|_| bad())?))
        };
        let (t, z) = s.split_once(',').ok_or_else(bad)?;
        let ((t0, t1, nt), (z0, z1, nz)) = (axis(t)?, axis(z)?);
        Self::new(t0, t1, nt, z0, z1, nz)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "class", rename_all = "snake_case")]
pub enum SampleClass {
    Fold { lambda: usize },
    CuspCandidate,
    Unknown,
}

impl fmt::Display for SampleClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SampleClass::Fold { lambda } => write!(f, "fold:{lambda}"),
            SampleClass::CuspCandidate => write!(f, "cusp"),
            SampleClass::Unknown => write!(f, "unknown"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SingularSample {
    /// `(s, w)` in `ℝⁿ`.
    pub point: Vec<f64>,
    /// `‖Dʷh‖` at `point`.
    pub residual: f64,
    pub class: SampleClass,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct Detection {
    /// Canonically sorted, deduplicated.
    pub samples: Vec<SingularSample>,
}

impl Detection {
    pub fn cusps(&self) -> impl Iterator<Item = &SingularSample> {
        self.samples.iter().filter(|s| s.class == SampleClass::CuspCandidate)
    }

    pub fn folds(&self) -> impl Iterator<Item = &SingularSample> {
        self.samples.iter().filter(|s| matches!(s.class, SampleClass::Fold { .. }))
    }
}

/// Classifies by the spectrum of `Hessʷh`.
pub fn classify(map: &LocalMap, p: &[f64], rank_threshold: f64) -> SampleClass {
    let eig = map.hess_w(p[0], &p[1..]).symmetric_eigen().eigenvalues;
    let max = eig.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let min = eig.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()));
    if max == 0.0 {
        SampleClass::Unknown
    } else if min < rank_threshold * max {
        SampleClass::CuspCandidate
    } else {
        SampleClass::Fold { lambda: eig.iter().filter(|v| **v < 0.0).count() }
    }
}

/// Newton in `w` at fixed `s`; returns the residual history and final `w`.
fn newton_w(map: &LocalMap, s: f64, w0: &[f64], tol: &Tolerances) -> (Vec<f64>, Vec<f64>) {
    let mut w = DVector::from_column_slice(w0);
    let mut g = map.grad_w(s, w.as_slice());
    let mut history = vec![g.norm()];
    for _ in 0..tol.max_iterations {
        if history[history.len() - 1] < tol.newton_residual {
            break;
        }
        let Some(step) = map.hess_w(s, w.as_slice()).lu().solve(&g) else { break };
        w -= step;
        g = map.grad_w(s, w.as_slice());
        let r = g.norm();
        if !r.is_finite() {
            break;
        }
        history.push(r);
    }
    (history, w.as_slice().to_vec())
}

fn cusp_system(map: &LocalMap, x: &[f64]) -> DVector<f64> {
    let (s, w) = (x[0], &x[1..]);
    let g = map.grad_w(s, w);
    let mut out = DVector::zeros(x.len());
    out.rows_mut(0, g.len()).copy_from(&g);
    out[g.len()] = map.hess_w(s, w).determinant();
    out
}

/// Newton on `(Dʷh, det Hessʷh) = 0` in `(s, w)` with a central-difference Jacobian.
fn newton_cusp(map: &LocalMap, x0: &[f64], tol: &Tolerances) -> Option<Vec<f64>> {
    const STEP: f64 = 1e-6;
    let n = x0.len();
    let mut x = x0.to_vec();
    for _ in 0..tol.max_iterations {
        let f = cusp_system(map, &x);
        if !f.iter().all(|v| v.is_finite()) {
            return None;
        }
        if f.norm() < tol.newton_residual {
            return Some(x);
        }
        let mut jac = DMatrix::zeros(n, n);
        let mut y = x.clone();
        for k in 0..n {
            y[k] = x[k] + STEP;
            let plus = cusp_system(map, &y);
            y[k] = x[k] - STEP;
            let minus = cusp_system(map, &y);
            y[k] = x[k];
            jac.set_column(k, &((plus - minus) / (2.0 * STEP)));
        }
        let step = jac.lu().solve(&f)?;
        for (xi, di) in x.iter_mut().zip(step.iter()) {
            *xi -= di;
        }
    }
    (cusp_system(map, &x).norm() < tol.newton_residual).then_some(x)
}

fn seeds(map: &LocalMap, grid: &GridSpec) -> Vec<Vec<f64>> {
    let zs = grid.z_values();
    let mut fibres: Vec<Vec<f64>> = vec![Vec::new()];
    for _ in 0..map.fibre_dim() {
        fibres = fibres.iter().flat_map(|f| zs.iter().map(move |&z| [f.as_slice(), &[z]].concat())).collect();
    }
    grid.t_values().iter().flat_map(|&t| fibres.iter().map(move |f| [&[t][..], f].concat())).collect()
}

fn lex(a: &[f64], b: &[f64]) -> Ordering {
    a.iter().zip(b).map(|(x, y)| x.total_cmp(y)).find(|o| o.is_ne()).unwrap_or(Ordering::Equal)
}

fn dedup(mut samples: Vec<SingularSample>, radius: f64) -> Vec<SingularSample> {
    samples.sort_by(|a, b| lex(&a.point, &b.point).then(a.residual.total_cmp(&b.residual)));
    let mut kept: Vec<SingularSample> = Vec::with_capacity(samples.len());
    for p in samples {
        let duplicate = kept
            .iter()
            .rev()
            .take_while(|k| k.point[0] >= p.point[0] - radius)
            .any(|k| k.point.iter().zip(&p.point).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt() < radius);
        if !duplicate {
            kept.push(p);
        }
    }
    kept
}

/// Singular points of `map` reachable by Newton from the grid seeds and
/// lying inside the grid box.
pub fn detect_singular_set(map: &LocalMap, grid: &GridSpec, tol: &Tolerances) -> Result<Detection, NormalFormError> {
    grid.validate()?;
    if !(tol.newton_residual > 0.0 && tol.dedup_radius > 0.0) {
        return Err(NormalFormError::BadGrid("tolerances must be positive".into()));
    }
    let seeds = seeds(map, grid);
    let accept = |point: Vec<f64>| -> Option<SingularSample> {
        if !grid.contains(&point, tol.dedup_radius) {
            return None;
        }
        let residual = map.grad_w(point[0], &point[1..]).norm();
        (residual < tol.newton_residual).then(|| SingularSample {
            class: classify(map, &point, tol.rank_threshold),
            point,
            residual,
        })
    };
    let folds: Vec<SingularSample> = seeds
        .par_iter()
        .filter_map(|seed| {
            let (history, w) = newton_w(map, seed[0], &seed[1..], tol);
            (history[history.len() - 1] < tol.newton_residual).then(|| [&seed[..1], &w].concat())
        })
        .filter_map(accept)
        .collect();
    let cusp_seeds: Vec<&[f64]> = seeds
        .iter()
        .map(Vec::as_slice)
        .chain(folds.iter().filter(|s| s.class == SampleClass::CuspCandidate).map(|s| s.point.as_slice()))
        .collect();
    let cusps: Vec<SingularSample> = cusp_seeds
        .par_iter()
        .filter_map(|seed| newton_cusp(map, seed, tol))
        .filter_map(accept)
        .map(|mut s| {
            s.class = SampleClass::CuspCandidate;
            s
        })
        .collect();
    // cusps first so that they win ties against nearby fold samples
    let mut all = cusps;
    all.extend(folds);
    let mut cusp_points = dedup(all.iter().filter(|s| s.class == SampleClass::CuspCandidate).cloned().collect(), tol.dedup_radius);
    let fold_points: Vec<SingularSample> = dedup(all.into_iter().filter(|s| s.class != SampleClass::CuspCandidate).collect(), tol.dedup_radius)
        .into_iter()
        .filter(|f| {
            cusp_points.iter().all(|c| {
                c.point.iter().zip(&f.point).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt() >= tol.dedup_radius
            })
        })
        .collect();
    cusp_points.extend(fold_points);
    cusp_points.sort_by(|a, b| lex(&a.point, &b.point));
    Ok(Detection { samples: cusp_points })
}

/// Observed convergence order of Newton in `w` from `(s, w0)`, estimated from
/// the last three residuals above roundoff.
pub fn newton_order(map: &LocalMap, s: f64, w0: &[f64]) -> Option<f64> {
    let tol = Tolerances { newton_residual: 0.0, max_iterations: 60, ..Tolerances::default() };
    let (history, _) = newton_w(map, s, w0, &tol);
    let useful: Vec<f64> = history.into_iter().take_while(|r| *r > 1e-13).collect();
    let k = useful.len();
    if k < 3 {
        return None;
    }
    let (a, b, c) = (useful[k - 3], useful[k - 2], useful[k - 1]);
    Some((c / b).ln() / (b / a).ln())
}
