//! Sparse PCA: objective, proximal and Runge-Kutta updates, the per-component
//! solve loop, deflation, and the dense PCA baseline.
//!
//! The objective is `f(x) = g(x) + λ‖x‖₁` with `g(x) = -xᵀDᵀDx`. Every update
//! scheme moves `x` along the gradient flow `ẋ = -∇g(x) = 2DᵀDx` and then
//! applies the ℓ₁ proximal map, i.e. soft thresholding at `λt`.

mod pca;
mod solver;
mod step;

pub use pca::{fit_pca, project};
pub use solver::{
    deflate, fit, fit_sparse_pca, fit_sparse_pca_timed, fit_timed, initial_loading,
    solve_component, solve_component_timed,
};
pub use step::{
    grad_g, ista_step, objective, rk4_step, rk_coarse_step, soft_threshold, sparse_rk_update,
    RkOrder, SpcaObjective,
};

use alloc::format;
use alloc::vec::Vec;

use crate::{Error, Matrix, Result};

/// Power-iteration steps used to estimate `σ_max(D)²` for the default step.
pub const STEP_ESTIMATE_ITERS: usize = 50;
pub const DEFAULT_TOL: f64 = 1e-6;
pub const DEFAULT_MAX_ITERS: usize = 500;
/// Default threshold `λt` as a fraction of `1/√p`, the entry size of a flat
/// unit vector.
pub const DEFAULT_THRESHOLD_FRACTION: f64 = 0.1;

/// Dimensionality-reduction method.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    /// Proximal gradient: `x ← prox((I + 2tDᵀD) x)`.
    Ista,
    /// Two-stage Runge-Kutta step followed by the prox.
    RkCoarse,
    /// Classical fourth-order Runge-Kutta step followed by the prox.
    Rk4,
    /// Dense PCA from an eigendecomposition; no sparsity.
    PcaBaseline,
}

impl Method {
    /// Gradient evaluations per outer iteration.
    pub fn gradient_evals_per_iter(self) -> usize {
        match self {
            Method::Ista => 1,
            Method::RkCoarse => 2,
            Method::Rk4 => 4,
            Method::PcaBaseline => 0,
        }
    }

    pub fn is_sparse(self) -> bool {
        !matches!(self, Method::PcaBaseline)
    }

    pub fn name(self) -> &'static str {
        match self {
            Method::Ista => "ISTA sparse PCA",
            Method::RkCoarse => "Coarse Runge Kutta sparse PCA",
            Method::Rk4 => "Fourth order Runge Kutta sparse PCA",
            Method::PcaBaseline => "PCA",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverConfig {
    pub method: Method,
    /// Step `t`; `None` picks `1 / (2 σ_max(D)²)`.
    pub step_t: Option<f64>,
    /// Penalty `λ`; `None` picks `λ` so that `λt = 0.1 / √p`.
    pub lambda: Option<f64>,
    pub max_iters: usize,
    /// Stop once `‖x_{k+1} - x_k‖₂ < tol`. Zero disables early stopping.
    pub tol: f64,
    pub seed: u64,
    pub normalize_each_iter: bool,
}

impl SolverConfig {
    pub fn new(method: Method) -> Self {
        SolverConfig {
            method,
            step_t: None,
            lambda: None,
            max_iters: DEFAULT_MAX_ITERS,
            tol: DEFAULT_TOL,
            seed: 0,
            normalize_each_iter: true,
        }
    }

    pub fn with_step(mut self, t: f64) -> Self {
        self.step_t = Some(t);
        self
    }

    pub fn with_lambda(mut self, lambda: f64) -> Self {
        self.lambda = Some(lambda);
        self
    }

    pub fn with_max_iters(mut self, max_iters: usize) -> Self {
        self.max_iters = max_iters;
        self
    }

    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }

    pub fn with_normalize(mut self, on: bool) -> Self {
        self.normalize_each_iter = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if let Some(t) = self.step_t {
            if !(t > 0.0) || !t.is_finite() {
                return Err(Error::invalid(format!("step t must be finite and > 0, got {t}")));
            }
        }
        if let Some(l) = self.lambda {
            if !(l >= 0.0) || !l.is_finite() {
                return Err(Error::invalid(format!("lambda must be finite and >= 0, got {l}")));
            }
        }
        if !(self.tol >= 0.0) {
            return Err(Error::invalid(format!("tol must be >= 0, got {}", self.tol)));
        }
        if self.max_iters == 0 {
            return Err(Error::invalid("max_iters must be >= 1"));
        }
        Ok(())
    }

    /// Fixes `t` and `λ` for the data matrix `d`.
    pub fn resolve(&self, d: &Matrix) -> Result<SolverParams> {
        self.validate()?;
        let step_t = match self.step_t {
            Some(t) => t,
            None => default_step(d)?,
        };
        let lambda = match self.lambda {
            Some(l) => l,
            None => default_lambda(step_t, d.cols()),
        };
        Ok(SolverParams { step_t, lambda })
    }
}

impl Default for SolverConfig {
    fn default() -> Self {
        SolverConfig::new(Method::Ista)
    }
}

/// Concrete `t` and `λ` after defaults are applied.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverParams {
    pub step_t: f64,
    pub lambda: f64,
}

impl SolverParams {
    pub fn threshold(&self) -> f64 {
        self.lambda * self.step_t
    }
}

/// `1 / (2 σ_max(D)²)`, which maps the spectrum of `2tDᵀD` into `[0, 1]`.
pub fn default_step(d: &Matrix) -> Result<f64> {
    let s2 = crate::linalg::top_singular_value_sq(d, STEP_ESTIMATE_ITERS);
    if !(s2 > 0.0) || !s2.is_finite() {
        return Err(Error::invalid(format!(
            "cannot derive a step size: estimated sigma_max^2 = {s2}"
        )));
    }
    Ok(1.0 / (2.0 * s2))
}

pub fn default_lambda(step_t: f64, p: usize) -> f64 {
    DEFAULT_THRESHOLD_FRACTION / (libm::sqrt(p as f64) * step_t)
}

/// A loading vector together with its count of nonzero entries.
#[derive(Debug, Clone, PartialEq)]
pub struct LoadingVector {
    values: Vec<f64>,
    nnz: usize,
}

impl LoadingVector {
    pub fn new(values: Vec<f64>) -> Self {
        let nnz = values.iter().filter(|v| **v != 0.0).count();
        LoadingVector { values, nnz }
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn nnz(&self) -> usize {
        self.nnz
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn norm(&self) -> f64 {
        crate::linalg::norm2(&self.values)
    }
}

/// Ordered loading vectors of a common dimension `p`.
#[derive(Debug, Clone, PartialEq)]
pub struct ComponentBasis {
    columns: Vec<LoadingVector>,
}

impl ComponentBasis {
    pub fn new(columns: Vec<LoadingVector>) -> Result<Self> {
        let p = match columns.first() {
            Some(c) => c.dim(),
            None => return Err(Error::invalid("a component basis needs at least one column")),
        };
        if let Some(i) = columns.iter().position(|c| c.dim() != p) {
            return Err(Error::invalid(format!(
                "component {i} has dimension {}, expected {p}",
                columns[i].dim()
            )));
        }
        Ok(ComponentBasis { columns })
    }

    pub fn columns(&self) -> &[LoadingVector] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.columns[0].dim()
    }

    /// The `p × d` matrix with the loadings as columns.
    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_fn(self.dim(), self.len(), |i, j| self.columns[j].values[i])
    }

    pub fn total_nnz(&self) -> usize {
        self.columns.iter().map(LoadingVector::nnz).sum()
    }
}

/// Iteration statistics of one solve, or the sum over a multi-component fit.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SolveTrace {
    pub iterations_used: usize,
    pub gradient_evals: usize,
    /// `‖x_{k+1} - x_k‖₂` at exit.
    pub final_delta: f64,
    pub wall_seconds: f64,
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn config_validation() {
        assert!(SolverConfig::new(Method::Ista).validate().is_ok());
        assert!(SolverConfig::new(Method::Ista).with_step(0.0).validate().is_err());
        assert!(SolverConfig::new(Method::Ista).with_lambda(-1.0).validate().is_err());
        assert!(SolverConfig::new(Method::Ista).with_tol(-1e-3).validate().is_err());
        assert!(SolverConfig::new(Method::Ista).with_tol(f64::NAN).validate().is_err());
        assert!(SolverConfig::new(Method::Ista).with_max_iters(0).validate().is_err());
        assert!(SolverConfig::new(Method::Rk4).with_tol(0.0).validate().is_ok());
    }

    #[test]
    fn default_step_scales_spectrum_to_unit() {
        let d = Matrix::from_rows(&[[2.0, 0.0], [0.0, 1.0]]).unwrap();
        let t = default_step(&d).unwrap();
        assert!((t - 1.0 / 8.0).abs() < 1e-12);
        assert!(default_step(&Matrix::zeros(2, 2)).is_err());
        let params = SolverConfig::new(Method::Ista).resolve(&d).unwrap();
        assert!((params.threshold() - 0.1 / 2f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn loading_vector_counts_nonzeros() {
        let v = LoadingVector::new(vec![0.0, -0.5, 0.0, 2.0, -0.0]);
        assert_eq!(v.nnz(), 2);
        assert_eq!(v.dim(), 5);
    }

    #[test]
    fn basis_requires_common_dimension() {
        assert!(ComponentBasis::new(vec![]).is_err());
        let a = LoadingVector::new(vec![1.0, 0.0]);
        let b = LoadingVector::new(vec![1.0]);
        assert!(ComponentBasis::new(vec![a.clone(), b]).is_err());
        let basis = ComponentBasis::new(vec![a, LoadingVector::new(vec![0.0, 1.0])]).unwrap();
        assert_eq!(basis.to_matrix(), Matrix::identity(2));
    }

    #[test]
    fn evals_per_iteration() {
        assert_eq!(Method::Ista.gradient_evals_per_iter(), 1);
        assert_eq!(Method::RkCoarse.gradient_evals_per_iter(), 2);
        assert_eq!(Method::Rk4.gradient_evals_per_iter(), 4);
    }
}
