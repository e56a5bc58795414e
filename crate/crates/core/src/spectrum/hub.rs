//! Eigenvalues and eigenvector localization produced by a single hub.
//!
//! A vertex of expected degree `k_n` above every model degree contributes the
//! pole `z = k_n h(z)` to the resolvent. Combined with the fixed-point
//! equation this gives `z² = (k_n²/c) Γ_p(k_n)`, which lies outside the band
//! only when `k_n` exceeds a critical degree.

use num_complex::Complex64;

use super::density::hub_z;
use super::fixed_point::{solve_scaled, ScaledModel};
use super::SpectrumError;
use crate::degree_model::{DegreeModel, ModelKind};

const BISECTION_STEPS: usize = 200;
const CRITICAL_SEARCH_FACTOR: f64 = 1e6;
const CONSISTENCY_TOLERANCE: f64 = 1e-8;

/// Predicted hub eigenvalues and eigenvector weights.
#[derive(Debug, Clone, PartialEq)]
pub struct HubPrediction {
    pub k_n: f64,
    /// Whether the eigenvalues detach from the band.
    pub exists: bool,
    pub z_plus: Option<f64>,
    pub z_minus: Option<f64>,
    pub k_critical: f64,
    /// Upper band edge.
    pub band_edge: f64,
    /// Squared weight of the leading eigenvector on the hub.
    pub vn_sq: Option<f64>,
    /// Mean squared weight on a neighbor of the hub.
    pub neighbor_vi_sq_mean: Option<f64>,
    /// `(degree, v_i²)` for a neighbor of each model degree.
    pub neighbor_profile: Vec<(f64, f64)>,
}

/// `G(t) = Σ p d (t − 2d)/(t − d)²`, proportional to `d z(t)²/dt`.
fn tangency(scaled: &ScaledModel, t: f64) -> f64 {
    scaled
        .terms
        .iter()
        .map(|&(p, delta)| {
            let d = delta * scaled.c;
            p * d * (t - 2.0 * d) / ((t - d) * (t - d))
        })
        .sum()
}

/// Root of [`tangency`] on `(k_max, 10⁶ k_max]`.
///
/// In `u = 1/t` the map `u ↦ z²` is `c/u + Σ p d²/(1 − d u)`, a sum of convex
/// functions, so the minimizer (and hence the root) is unique.
pub(crate) fn critical_degree_scaled(scaled: &ScaledModel, k_max: f64) -> Result<f64, SpectrumError> {
    if !(k_max > 0.0 && k_max.is_finite()) {
        return Err(SpectrumError::BisectionFailed(format!("invalid maximum degree {k_max}")));
    }
    let mut lo = k_max * (1.0 + 1e-12);
    if tangency(scaled, lo) >= 0.0 {
        // Continuous parts can put the minimum at the top of the support.
        return Ok(lo);
    }
    let mut hi = CRITICAL_SEARCH_FACTOR * k_max;
    if !(tangency(scaled, hi) > 0.0) {
        return Err(SpectrumError::BisectionFailed(format!("critical degree not bracketed in ({k_max}, {hi}]")));
    }
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if tangency(scaled, mid) < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Hub degree above which a detached eigenvalue appears.
pub fn critical_hub_degree(model: &DegreeModel) -> Result<f64, SpectrumError> {
    critical_degree_scaled(&ScaledModel::new(model), model.max_degree())
}

/// Eigenvalues `±z` produced by a hub of expected degree `k_n`.
///
/// `k_n` must exceed the largest model degree. Below the critical degree the
/// prediction is returned with `exists = false`.
pub fn hub_eigenvalues(model: &DegreeModel, k_n: f64) -> Result<HubPrediction, SpectrumError> {
    let k_max = model.max_degree();
    if !(k_n > k_max) || !k_n.is_finite() {
        return Err(SpectrumError::HubPole { k_n, k_max });
    }
    let scaled = ScaledModel::new(model);
    let c = scaled.c;
    let k_critical = critical_degree_scaled(&scaled, k_max)?;
    let band_edge = hub_z(&scaled, k_critical);
    let mut out = HubPrediction {
        k_n,
        exists: k_n > k_critical,
        z_plus: None,
        z_minus: None,
        k_critical,
        band_edge,
        vn_sq: None,
        neighbor_vi_sq_mean: None,
        neighbor_profile: Vec::new(),
    };
    if !out.exists {
        return Ok(out);
    }
    let z = hub_z(&scaled, k_n);
    out.z_plus = Some(z);
    out.z_minus = Some(-z);

    let h = solve_scaled(&scaled, Complex64::new(z, 0.0), None)?.h;
    let expected = z / k_n;
    if (h - expected).norm() > CONSISTENCY_TOLERANCE * expected.abs().max(1.0) {
        return Err(SpectrumError::Consistency(format!("h({z}) = {h}, expected {expected} for hub degree {k_n}")));
    }

    let vn_sq = if scaled.kind == ModelKind::PoissonEquivalent {
        (0.5 * k_n - c) / (k_n - c)
    } else {
        // h' = −F_z / F_h for F(h, z) = h − (1/c) Σ p d / (z − d h)
        let h = expected;
        let (mut f_z, mut f_h_sum) = (0.0, 0.0);
        for &(p, delta) in &scaled.terms {
            let d = delta * c;
            let inv = 1.0 / (z - d * h);
            f_z += p * d * inv * inv;
            f_h_sum += p * d * d * inv * inv;
        }
        let dh = -(f_z / c) / (1.0 - f_h_sum / c);
        1.0 / (1.0 - k_n * dh)
    };
    if !(0.0..=1.0).contains(&vn_sq) {
        return Err(SpectrumError::Consistency(format!("hub weight {vn_sq} outside [0, 1]")));
    }
    out.vn_sq = Some(vn_sq);

    // Neighbors are reached along an edge, so their degrees follow k p(k)/c.
    let mut mean = 0.0;
    for &(p, delta) in &scaled.terms {
        let d = delta * c;
        let ratio = 1.0 - d / k_n;
        let vi_sq = vn_sq / (z * z * ratio * ratio);
        out.neighbor_profile.push((d, vi_sq));
        mean += p * delta * vi_sq;
    }
    out.neighbor_vi_sq_mean = Some(if scaled.kind == ModelKind::PoissonEquivalent {
        (0.5 * k_n - c) / ((k_n - c) * (k_n - c))
    } else {
        mean
    });
    Ok(out)
}

/// As [`hub_eigenvalues`], but an error when no eigenvalue detaches.
pub fn hub_eigenvector_profile(model: &DegreeModel, k_n: f64) -> Result<HubPrediction, SpectrumError> {
    let pred = hub_eigenvalues(model, k_n)?;
    if !pred.exists {
        return Err(SpectrumError::NoHubEigenvalue { k_n, k_critical: pred.k_critical });
    }
    Ok(pred)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn poisson() -> DegreeModel {
        DegreeModel::poisson(100.0).unwrap()
    }

    #[test]
    fn poisson_critical_degree_is_twice_mean() {
        assert!((critical_hub_degree(&poisson()).unwrap() - 200.0).abs() < 1e-6);
    }

    #[test]
    fn poisson_hub_closed_forms() {
        let pred = hub_eigenvalues(&poisson(), 400.0).unwrap();
        assert!(pred.exists);
        let z = pred.z_plus.unwrap();
        assert!((z - 400.0 / 300f64.sqrt()).abs() < 1e-12);
        assert_eq!(pred.z_minus, Some(-z));
        assert!((pred.vn_sq.unwrap() - 1.0 / 3.0).abs() < 1e-12);
        assert!((pred.neighbor_vi_sq_mean.unwrap() - 1.0 / 900.0).abs() < 1e-15);
        assert!((pred.band_edge - 20.0).abs() < 1e-9);
    }

    #[test]
    fn implicit_derivative_matches_closed_form() {
        // Two atoms at the same degree go through the general branch.
        let m = DegreeModel::discrete(&[(100.0, 0.5), (100.0 * (1.0 + 2e-9), 0.5)]).unwrap();
        assert_eq!(m.kind(), ModelKind::Discrete);
        let pred = hub_eigenvalues(&m, 400.0).unwrap();
        assert!((pred.vn_sq.unwrap() - 1.0 / 3.0).abs() < 1e-6);
        assert!((pred.neighbor_vi_sq_mean.unwrap() - 1.0 / 900.0).abs() < 1e-8);
    }

    #[test]
    fn below_critical_degree_nothing_detaches() {
        let pred = hub_eigenvalues(&poisson(), 150.0).unwrap();
        assert!(!pred.exists && pred.z_plus.is_none() && pred.vn_sq.is_none());
        assert!(matches!(hub_eigenvector_profile(&poisson(), 150.0), Err(SpectrumError::NoHubEigenvalue { .. })));
        assert!(matches!(hub_eigenvalues(&poisson(), 100.0), Err(SpectrumError::HubPole { .. })));
    }

    #[test]
    fn near_transition_hub_weight_vanishes() {
        let pred = hub_eigenvalues(&poisson(), 200.0 + 1e-3).unwrap();
        assert!(pred.vn_sq.unwrap() < 0.01);
    }

    #[test]
    fn large_hub_limit() {
        let pred = hub_eigenvalues(&poisson(), 1e6).unwrap();
        assert!((pred.z_plus.unwrap() / 1e3 - 1.0).abs() < 1e-3);
    }

    #[test]
    fn two_degree_hub_is_consistent() {
        let m = DegreeModel::discrete(&[(50.0, 0.25), (100.0, 0.75)]).unwrap();
        let k_crit = critical_hub_degree(&m).unwrap();
        assert!(k_crit > 100.0);
        let mut last = 0.0;
        for k in [1.01, 1.2, 2.0, 5.0] {
            let pred = hub_eigenvalues(&m, k * k_crit).unwrap();
            let z = pred.z_plus.unwrap();
            assert!(z > pred.band_edge && z > last);
            last = z;
            let v = pred.vn_sq.unwrap();
            assert!(v > 0.0 && v < 1.0);
        }
    }
}
