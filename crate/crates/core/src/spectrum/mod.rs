//! Analytic spectra of the modularity and adjacency matrices.
//!
//! The bulk density follows from the auxiliary function `h(z)` (see
//! [`fixed_point`]); band edges, the leading adjacency eigenvalue and hub
//! eigenvalues all reduce to real equations in `h` or in the Cauchy transform
//! of the degree distribution.

use num_complex::Complex64;
use std::f64::consts::PI;
use thiserror::Error;

use crate::degree_model::ModelError;

pub mod density;
pub mod fixed_point;
pub mod hub;
pub mod leading;

pub use density::{
    band_edges, default_eta, density_grid, spectral_density, stieltjes_g, stieltjes_g_by_sum, SpectralCurve,
};
pub use fixed_point::{solve_h, solve_h_tracked, HSolution, SolveMethod};
pub use hub::{critical_hub_degree, hub_eigenvalues, hub_eigenvector_profile, HubPrediction};
pub use leading::{leading_eigenvalue, leading_eigenvalue_approx, leading_eigenvalue_bisection};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpectrumError {
    #[error("{0}")]
    Domain(String),
    #[error("no convergence at z = {z} (residual {residual:e}, method {method:?})")]
    NoConvergence { z: Complex64, residual: f64, method: SolveMethod },
    #[error("no root with non-negative density at z = {z}")]
    NoPhysicalRoot { z: Complex64 },
    #[error("ambiguous root at z = {z}: {first} and {second} both give non-negative density")]
    AmbiguousRoot { z: Complex64, first: Complex64, second: Complex64 },
    #[error("density {value:e} at z = {z} is negative beyond tolerance")]
    NegativeDensity { z: f64, value: f64 },
    #[error("band edge not found: {0}")]
    EdgeNotFound(String),
    #[error("no leading eigenvalue separated from the band (upper edge {edge})")]
    NoLeadingRoot { edge: f64 },
    #[error("hub degree {k_n} must exceed the largest model degree {k_max}")]
    HubPole { k_n: f64, k_max: f64 },
    #[error("bisection failed: {0}")]
    BisectionFailed(String),
    #[error("hub degree {k_n} is below the critical degree {k_critical}: no detached eigenvalue")]
    NoHubEigenvalue { k_n: f64, k_critical: f64 },
    #[error("internal consistency check failed: {0}")]
    Consistency(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// Semicircle density of the normalized modularity matrix,
/// `(1/2π) √(4c − c²z²)` on `|z| ≤ 2/√c`.
pub fn semicircle_density(z: f64, c: f64) -> f64 {
    let arg = 4.0 * c - c * c * z * z;
    if arg <= 0.0 {
        0.0
    } else {
        arg.sqrt() / (2.0 * PI)
    }
}

/// Cauchy transform of `x ρ_c(x)` for the semicircle of variance `1/c`:
/// `½cz(z − √(z² − 4/c)) − 1`, on the branch that vanishes at infinity.
pub fn gamma_semicircle(z: Complex64, c: f64) -> Complex64 {
    let edge = 2.0 / c.sqrt();
    let z = Complex64::new(z.re, z.im + 0.0);
    let root = (z - edge).sqrt() * (z + edge).sqrt();
    // Equal to (4/c)/(z + root)², which avoids cancellation at large |z|.
    let s = z + root;
    (4.0 / c) / (s * s)
}
