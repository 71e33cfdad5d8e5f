//! Local models of generic maps to the plane and their singular sets.
//!
//! Every model has the shape `(s, w) ↦ (s, h(s, w))` with `s ∈ ℝ` and
//! `w ∈ ℝⁿ⁻¹`, so the singular set is `(Dʷh)⁻¹(0)` and folds versus cusps are
//! told apart by the Hessian of `h` in `w`.
//!
//! - fold of index `i`: `h = Q_i(w)`, the quadratic form with `i` minus signs;
//! - cusp of index `k`: `h = s·w₁ + w₁³ + Q_k(w₂, …)`;
//! - swallow's tail at time `t`: `w = (x, z)`, `h = x⁴/12 − t·x²/2 + s·x + Q_i(z)`;
//! - perturbed fold: `h = Q_i(w) + α(s)·β(‖w‖²)`.

mod detect;
mod perturb;
mod render;

pub use detect::{detect_singular_set, newton_order, Detection, GridSpec, SampleClass, SingularSample, Tolerances};
pub use perturb::{check_perturbation_condition, perturbed_fold_image, ConditionReport, PerturbationReport, Profile};
pub use render::{render_svg, samples_to_csv, trace_curves, Curve, RunManifest};

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NormalFormError {
    #[error("dimension n = {0} is below 2")]
    DimensionTooSmall(usize),
    #[error("{name} = {value} outside [0, {max}]")]
    ParameterOutOfRange { name: &'static str, value: usize, max: usize },
    #[error("swallow's tail at t = 0 is not generic")]
    DegenerateSwallowTail,
    #[error("profile has unbounded support")]
    UnboundedSupport,
    #[error("profile radius must be positive, got {0}")]
    BadRadius(f64),
    #[error("point has {got} coordinates, map expects {expected}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("perturbation condition fails: sup |alpha beta'| = {sup} is not below {bound}")]
    ConditionViolated { sup: f64, bound: f64 },
    #[error("bad grid: {0}")]
    BadGrid(String),
}

/// Which normal form a [`LocalMap`] evaluates.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum MapKind {
    Fold { i: usize },
    Cusp { k: usize },
    SwallowTail { t: f64, i: usize },
    PerturbedFold { i: usize, alpha: Profile, beta: Profile },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LocalMap {
    pub n: usize,
    #[serde(flatten)]
    pub kind: MapKind,
}

/// `±1` coefficient of the `j`-th square in the form with `minus` minus signs.
fn q_sign(j: usize, minus: usize) -> f64 {
    if j < minus {
        -1.0
    } else {
        1.0
    }
}

fn quadratic(z: &[f64], minus: usize) -> f64 {
    z.iter().enumerate().map(|(j, v)| q_sign(j, minus) * v * v).sum()
}

fn check_range(name: &'static str, value: usize, max: usize) -> Result<(), NormalFormError> {
    if value > max {
        return Err(NormalFormError::ParameterOutOfRange { name, value, max });
    }
    Ok(())
}

impl LocalMap {
    pub fn fold(n: usize, i: usize) -> Result<Self, NormalFormError> {
        Self::new(n, MapKind::Fold { i })
    }

    pub fn cusp(n: usize, k: usize) -> Result<Self, NormalFormError> {
        Self::new(n, MapKind::Cusp { k })
    }

    pub fn swallow_tail(n: usize, t: f64, i: usize) -> Result<Self, NormalFormError> {
        Self::new(n, MapKind::SwallowTail { t, i })
    }

    pub fn perturbed_fold(n: usize, i: usize, alpha: Profile, beta: Profile) -> Result<Self, NormalFormError> {
        Self::new(n, MapKind::PerturbedFold { i, alpha, beta })
    }

    pub fn new(n: usize, kind: MapKind) -> Result<Self, NormalFormError> {
        if n < 2 {
            return Err(NormalFormError::DimensionTooSmall(n));
        }
        match &kind {
            MapKind::Fold { i } => check_range("i", *i, n - 1)?,
            MapKind::Cusp { k } => check_range("k", *k, n - 2)?,
            MapKind::SwallowTail { t, i } => {
                check_range("i", *i, n - 2)?;
                if *t == 0.0 {
                    return Err(NormalFormError::DegenerateSwallowTail);
                }
            }
            MapKind::PerturbedFold { i, alpha, beta } => {
                check_range("i", *i, n - 1)?;
                alpha.validate()?;
                beta.validate()?;
            }
        }
        Ok(Self { n, kind })
    }

    /// Number of fibre coordinates `w`.
    pub fn fibre_dim(&self) -> usize {
        self.n - 1
    }

    /// Short name used in file names and reports.
    pub fn name(&self) -> &'static str {
        match self.kind {
            MapKind::Fold { .. } => "fold",
            MapKind::Cusp { .. } => "cusp",
            MapKind::SwallowTail { .. } => "swallowtail",
            MapKind::PerturbedFold { .. } => "perturbed-fold",
        }
    }

    /// Column labels of the fibre coordinates.
    pub fn fibre_labels(&self) -> Vec<String> {
        match self.kind {
            MapKind::SwallowTail { .. } => {
                std::iter::once("x".to_string()).chain((1..self.n - 1).map(|j| format!("z{j}"))).collect()
            }
            _ => (1..self.n).map(|j| format!("z{j}")).collect(),
        }
    }

    pub fn h(&self, s: f64, w: &[f64]) -> f64 {
        match &self.kind {
            MapKind::Fold { i } => quadratic(w, *i),
            MapKind::Cusp { k } => s * w[0] + w[0].powi(3) + quadratic(&w[1..], *k),
            MapKind::SwallowTail { t, i } => {
                let x = w[0];
                x.powi(4) / 12.0 - t * x * x / 2.0 + s * x + quadratic(&w[1..], *i)
            }
            MapKind::PerturbedFold { i, alpha, beta } => {
                let r: f64 = w.iter().map(|v| v * v).sum();
                quadratic(w, *i) + alpha.value(s) * beta.value(r)
            }
        }
    }

    pub fn dh_ds(&self, s: f64, w: &[f64]) -> f64 {
        match &self.kind {
            MapKind::Fold { .. } => 0.0,
            MapKind::Cusp { .. } | MapKind::SwallowTail { .. } => w[0],
            MapKind::PerturbedFold { alpha, beta, .. } => {
                let r: f64 = w.iter().map(|v| v * v).sum();
                alpha.derivative(s) * beta.value(r)
            }
        }
    }

    /// `Dʷh`.
    pub fn grad_w(&self, s: f64, w: &[f64]) -> DVector<f64> {
        let m = w.len();
        match &self.kind {
            MapKind::Fold { i } => DVector::from_fn(m, |j, _| 2.0 * q_sign(j, *i) * w[j]),
            MapKind::Cusp { k } => DVector::from_fn(m, |j, _| {
                if j == 0 {
                    s + 3.0 * w[0] * w[0]
                } else {
                    2.0 * q_sign(j - 1, *k) * w[j]
                }
            }),
            MapKind::SwallowTail { t, i } => DVector::from_fn(m, |j, _| {
                if j == 0 {
                    w[0].powi(3) / 3.0 - t * w[0] + s
                } else {
                    2.0 * q_sign(j - 1, *i) * w[j]
                }
            }),
            MapKind::PerturbedFold { i, alpha, beta } => {
                let r: f64 = w.iter().map(|v| v * v).sum();
                let ab = alpha.value(s) * beta.derivative(r);
                DVector::from_fn(m, |j, _| 2.0 * q_sign(j, *i) * w[j] + 2.0 * ab * w[j])
            }
        }
    }

    /// Hessian of `h` in `w`.
    pub fn hess_w(&self, s: f64, w: &[f64]) -> DMatrix<f64> {
        let m = w.len();
        match &self.kind {
            MapKind::Fold { i } => DMatrix::from_fn(m, m, |a, b| if a == b { 2.0 * q_sign(a, *i) } else { 0.0 }),
            MapKind::Cusp { k } => DMatrix::from_fn(m, m, |a, b| match (a, b) {
                (0, 0) => 6.0 * w[0],
                _ if a == b => 2.0 * q_sign(a - 1, *k),
                _ => 0.0,
            }),
            MapKind::SwallowTail { t, i } => DMatrix::from_fn(m, m, |a, b| match (a, b) {
                (0, 0) => w[0] * w[0] - t,
                _ if a == b => 2.0 * q_sign(a - 1, *i),
                _ => 0.0,
            }),
            MapKind::PerturbedFold { i, alpha, beta } => {
                let r: f64 = w.iter().map(|v| v * v).sum();
                let a0 = alpha.value(s);
                let (b1, b2) = (beta.derivative(r), beta.second_derivative(r));
                DMatrix::from_fn(m, m, |a, b| {
                    let diag = if a == b { 2.0 * q_sign(a, *i) + 2.0 * a0 * b1 } else { 0.0 };
                    diag + 4.0 * a0 * b2 * w[a] * w[b]
                })
            }
        }
    }

    fn check_dim(&self, p: &[f64]) -> Result<(), NormalFormError> {
        if p.len() != self.n {
            return Err(NormalFormError::DimensionMismatch { expected: self.n, got: p.len() });
        }
        Ok(())
    }

    pub fn eval(&self, p: &[f64]) -> Result<[f64; 2], NormalFormError> {
        self.check_dim(p)?;
        Ok([p[0], self.h(p[0], &p[1..])])
    }

    /// The `2 × n` Jacobian.
    pub fn jacobian(&self, p: &[f64]) -> Result<DMatrix<f64>, NormalFormError> {
        self.check_dim(p)?;
        let (s, w) = (p[0], &p[1..]);
        let grad = self.grad_w(s, w);
        let mut j = DMatrix::zeros(2, self.n);
        j[(0, 0)] = 1.0;
        j[(1, 0)] = self.dh_ds(s, w);
        for k in 0..w.len() {
            j[(1, k + 1)] = grad[k];
        }
        Ok(j)
    }

    /// Central finite-difference Jacobian with step `step`.
    pub fn jacobian_fd(&self, p: &[f64], step: f64) -> Result<DMatrix<f64>, NormalFormError> {
        self.check_dim(p)?;
        let mut j = DMatrix::zeros(2, self.n);
        let mut q = p.to_vec();
        for k in 0..self.n {
            q[k] = p[k] + step;
            let plus = self.eval(&q)?;
            q[k] = p[k] - step;
            let minus = self.eval(&q)?;
            q[k] = p[k];
            for r in 0..2 {
                j[(r, k)] = (plus[r] - minus[r]) / (2.0 * step);
            }
        }
        Ok(j)
    }

    /// `‖J − J_fd‖ / max(‖J‖, 1)` in the Frobenius norm.
    pub fn jacobian_relative_error(&self, p: &[f64]) -> Result<f64, NormalFormError> {
        let exact = self.jacobian(p)?;
        let scale = p.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));
        let approx = self.jacobian_fd(p, 1e-5 * scale)?;
        Ok((&exact - &approx).norm() / exact.norm().max(1.0))
    }
}

/// The singular curve `φ_t(x) = (−x³/3 + t·x, x, 0)` of the swallow's tail.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SwallowTailCurve {
    pub t: f64,
}

pub fn swallow_tail_singular_curve(t: f64) -> Result<SwallowTailCurve, NormalFormError> {
    if t == 0.0 {
        return Err(NormalFormError::DegenerateSwallowTail);
    }
    Ok(SwallowTailCurve { t })
}

impl SwallowTailCurve {
    /// `φ_t(x)` in `ℝⁿ`.
    pub fn point(&self, x: f64, n: usize) -> Vec<f64> {
        let mut p = vec![0.0; n];
        p[0] = -x.powi(3) / 3.0 + self.t * x;
        p[1] = x;
        p
    }

    /// `H_t(φ_t(x)) = (−x³/3 + t·x, −x⁴/4 + t·x²/2)`.
    pub fn image(&self, x: f64) -> [f64; 2] {
        [-x.powi(3) / 3.0 + self.t * x, -x.powi(4) / 4.0 + self.t * x * x / 2.0]
    }

    /// Parameters of the two cusps `±√t`, empty for `t < 0`.
    pub fn cusp_parameters(&self) -> Vec<f64> {
        if self.t > 0.0 {
            let r = self.t.sqrt();
            vec![-r, r]
        } else {
            Vec::new()
        }
    }

    /// Whether `φ_t(x)` is a cusp.
    pub fn is_cusp(&self, x: f64) -> bool {
        self.cusp_parameters().contains(&x)
    }

    /// Absolute index of the fold point `φ_t(x)` for the form `Q_i` in
    /// dimension `n`: `max{i+1, n−2−i}` between the cusps, `max{i, n−1−i}`
    /// outside.
    pub fn fold_index(&self, x: f64, n: usize, i: usize) -> usize {
        let (n, i) = (n as i64, i as i64);
        let between = self.t > 0.0 && x * x < self.t;
        let tau = if between { (i + 1).max(n - 2 - i) } else { i.max(n - 1 - i) };
        tau as usize
    }

    /// Distance-like deviation of `p ∈ ℝⁿ` from the curve: `max(|u − φ(x)|, ‖z‖)`.
    pub fn deviation(&self, p: &[f64]) -> f64 {
        let x = p[1];
        let du = (p[0] - (-x.powi(3) / 3.0 + self.t * x)).abs();
        let z: f64 = p[2..].iter().map(|v| v * v).sum::<f64>().sqrt();
        du.max(z)
    }
}
