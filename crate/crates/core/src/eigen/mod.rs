//! Symmetric eigensolvers.
//!
//! [`dense_symmetric_eigen`] computes full spectra by Householder
//! tridiagonalization and implicit QL; [`top_eigenpair`] finds an extreme
//! eigenpair of any [`LinearOperator`] by restarted Lanczos.

use thiserror::Error;

mod dense;
mod lanczos;

pub use dense::{dense_symmetric_eigen, DenseMatrix};
pub use lanczos::{top_eigenpair, LanczosOptions, Which};

/// Default largest dimension handled by the dense solver.
pub const DEFAULT_DENSE_CAP: usize = 4000;
/// Environment variable overriding [`DEFAULT_DENSE_CAP`].
pub const DENSE_CAP_ENV: &str = "NETSPECTRA_DENSE_CAP";

/// The dense cap in effect: `NETSPECTRA_DENSE_CAP` if set and valid, else 4000.
pub fn dense_cap() -> usize {
    std::env::var(DENSE_CAP_ENV)
        .ok()
        .and_then(|v| v.trim().parse().ok())
        .filter(|&n: &usize| n > 0)
        .unwrap_or(DEFAULT_DENSE_CAP)
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EigenError {
    #[error("matrix is not symmetric: |a[{i}][{j}] - a[{j}][{i}]| = {diff:e}")]
    NotSymmetric { i: usize, j: usize, diff: f64 },
    #[error("dimension {n} exceeds the dense cap {cap} (set {DENSE_CAP_ENV} to raise it)")]
    DenseCap { n: usize, cap: usize },
    #[error("QL iteration did not converge for eigenvalue {index} after {iterations} iterations")]
    NoConvergence { index: usize, iterations: usize },
    #[error("eigenvalue identity check failed: {0}")]
    Identity(String),
    #[error("Lanczos stagnated after {restarts} restarts (residual {residual:e}, target {target:e})")]
    Stagnation { restarts: usize, residual: f64, target: f64 },
    #[error("empty operator")]
    Empty,
    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
}

/// Symmetric matrix-vector product.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    /// `y ← M x`; `y` has length [`dim`](Self::dim) and is overwritten.
    fn apply(&self, x: &[f64], y: &mut [f64]);
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MatrixKind {
    Adjacency,
    Modularity,
}

impl std::fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            MatrixKind::Adjacency => "adjacency",
            MatrixKind::Modularity => "modularity",
        })
    }
}

/// Full spectrum of one matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenReport {
    /// Ascending.
    pub eigenvalues: Vec<f64>,
    /// Unit eigenvector of the largest eigenvalue, when requested.
    pub top_vector: Option<Vec<f64>>,
    pub kind: Option<MatrixKind>,
    /// `‖M v − λ v‖` for the returned vector; zero when none was computed.
    pub residual: f64,
}

impl EigenReport {
    pub fn largest(&self) -> f64 {
        *self.eigenvalues.last().expect("reports are never empty")
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Largest eigenvalue of the symmetric tridiagonal matrix `(d, e)` and its
/// unit eigenvector, by shifted inverse iteration.
///
/// `e[i]` couples rows `i` and `i + 1`. The shift sits just above the
/// eigenvalue, so `T − σ I` is negative definite and the elimination needs no
/// pivoting.
pub(crate) fn tridiagonal_top_vector(d: &[f64], e: &[f64], lambda: f64) -> Vec<f64> {
    let n = d.len();
    let scale = d.iter().chain(e).fold(0.0_f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
    let sigma = lambda + 1e-10 * scale;
    // A non-constant start avoids being orthogonal to structured eigenvectors.
    let mut y: Vec<f64> = (0..n).map(|i| 0.5 + (0.618_033_988_75 * (i + 1) as f64).fract()).collect();
    // LDLᵀ of (T − σI)
    let mut diag = vec![0.0; n];
    let mut lower = vec![0.0; n.saturating_sub(1)];
    diag[0] = d[0] - sigma;
    for i in 1..n {
        lower[i - 1] = e[i - 1] / diag[i - 1];
        diag[i] = d[i] - sigma - lower[i - 1] * e[i - 1];
    }
    for _ in 0..3 {
        for i in 1..n {
            y[i] -= lower[i - 1] * y[i - 1];
        }
        for i in 0..n {
            y[i] /= diag[i];
        }
        for i in (0..n - 1).rev() {
            y[i] -= lower[i] * y[i + 1];
        }
        let nrm = norm(&y);
        y.iter_mut().for_each(|v| *v /= nrm);
    }
    y
}
