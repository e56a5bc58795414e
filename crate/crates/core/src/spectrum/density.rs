//! Spectral density, Stieltjes transform and band edges.

use num_complex::Complex64;
use std::f64::consts::PI;

use super::fixed_point::{solve_scaled, ScaledModel};
use super::hub::critical_degree_scaled;
use super::SpectrumError;
use crate::degree_model::DegreeModel;

/// Values down to this are treated as rounding noise and clamped to zero.
const NEGATIVE_DENSITY_TOLERANCE: f64 = 1e-9;

/// `ρ(x)` evaluated at `x + iη`.
///
/// Uses `ρ = −(c/πx) Im h²`. At `x = 0` that form is `0/0`, so the
/// equivalent `−(1/π) Im g(iη)` is used instead.
pub fn spectral_density(model: &DegreeModel, x: f64, eta: f64) -> Result<f64, SpectrumError> {
    let scaled = ScaledModel::new(model);
    density_scaled(&scaled, x, eta, None).map(|(rho, _)| rho)
}

fn density_scaled(
    scaled: &ScaledModel,
    x: f64,
    eta: f64,
    previous: Option<Complex64>,
) -> Result<(f64, Complex64), SpectrumError> {
    if !(eta > 0.0) {
        return Err(SpectrumError::Domain(format!("eta must be positive, got {eta}")));
    }
    let z = Complex64::new(x, eta);
    let sol = solve_scaled(scaled, z, previous)?;
    let rho = if x == 0.0 {
        -g_from_sum(scaled, z, sol.h).im / PI
    } else {
        let u = sol.h * scaled.sqrt_c;
        -(u * u).im / (PI * x)
    };
    if rho < -NEGATIVE_DENSITY_TOLERANCE {
        return Err(SpectrumError::NegativeDensity { z: x, value: rho });
    }
    Ok((rho.max(0.0), sol.h))
}

/// `g(z) = Σ p_r / (z − d_r h)`.
fn g_from_sum(scaled: &ScaledModel, z: Complex64, h: Complex64) -> Complex64 {
    let zeta = z / scaled.sqrt_c;
    let u = h * scaled.sqrt_c;
    scaled.terms.iter().map(|&(p, d)| p / (zeta - d * u)).sum::<Complex64>() / scaled.sqrt_c
}

/// Stieltjes transform `g(z) = (1 + c h²(z)) / z` of the modularity spectrum.
pub fn stieltjes_g(model: &DegreeModel, z: Complex64) -> Result<Complex64, SpectrumError> {
    let scaled = ScaledModel::new(model);
    let sol = solve_scaled(&scaled, z, None)?;
    if z.norm() == 0.0 {
        return Ok(g_from_sum(&scaled, z, sol.h));
    }
    Ok((1.0 + scaled.c * sol.h * sol.h) / z)
}

/// Alternative form of [`stieltjes_g`] summing over the degree distribution.
pub fn stieltjes_g_by_sum(model: &DegreeModel, z: Complex64) -> Result<Complex64, SpectrumError> {
    let scaled = ScaledModel::new(model);
    let sol = solve_scaled(&scaled, z, None)?;
    Ok(g_from_sum(&scaled, z, sol.h))
}

/// Default Lorentzian width for a grid: `max(1e-9, range / (10·points))`.
pub fn default_eta(z_min: f64, z_max: f64, points: usize) -> f64 {
    f64::max(1e-9, (z_max - z_min) / (10.0 * points as f64))
}

/// Outer edges `(z_lower, z_upper)` of the bulk spectrum.
///
/// At the upper edge the two real solutions of the fixed-point equation
/// merge. Parametrizing the real branch by `t = z/h > k_max` gives
/// `z(t)² = (t²/c) Γ_p(t)`, whose minimum over `t` is the edge; the
/// minimizer is the critical hub degree. The equation is invariant under
/// `(h, z) → (−h, −z)`, so the lower edge is the mirror image.
pub fn band_edges(model: &DegreeModel) -> Result<(f64, f64), SpectrumError> {
    let scaled = ScaledModel::new(model);
    let k_crit = critical_degree_scaled(&scaled, model.max_degree())?;
    let upper = hub_z(&scaled, k_crit);
    let bound = 10.0 * model.moment(2).sqrt();
    if !(upper.is_finite() && upper > 0.0 && upper <= bound) {
        return Err(SpectrumError::EdgeNotFound(format!("edge candidate {upper} outside [0, {bound}]")));
    }
    Ok((-upper, upper))
}

/// `z(t) = t √(Γ_p(t)/c)` for real `t` above every degree.
pub(crate) fn hub_z(scaled: &ScaledModel, t: f64) -> f64 {
    let tau = t / scaled.c;
    // Γ_p(t)/c = Σ p δ / (τ − δ) in scaled units
    let gamma: f64 = scaled.terms.iter().map(|&(p, d)| p * d / (tau - d)).sum();
    t * (gamma / scaled.c).sqrt()
}

/// Samples of `ρ` on a uniform grid.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralCurve {
    pub z: Vec<f64>,
    pub rho: Vec<f64>,
    pub eta: f64,
    pub band: Option<(f64, f64)>,
    /// `|∫ρ − 1|` by the trapezoid rule.
    pub norm_defect: f64,
    /// `∫ z² ρ` by the trapezoid rule.
    pub second_moment: f64,
}

impl SpectralCurve {
    /// `∫ zʳ ρ(z) dz` by the trapezoid rule.
    pub fn moment(&self, r: u32) -> f64 {
        trapezoid(&self.z, |i| self.z[i].powi(r as i32) * self.rho[i])
    }

    /// Linear interpolation of the sampled density, zero outside the grid.
    pub fn interpolate(&self, x: f64) -> f64 {
        let idx = self.z.partition_point(|&z| z <= x);
        if idx == 0 || idx == self.z.len() {
            return if Some(&x) == self.z.last() { *self.rho.last().unwrap() } else { 0.0 };
        }
        let (z0, z1) = (self.z[idx - 1], self.z[idx]);
        let t = (x - z0) / (z1 - z0);
        self.rho[idx - 1] * (1.0 - t) + self.rho[idx] * t
    }

    /// CSV with header `z,rho`.
    pub fn to_csv(&self) -> String {
        let mut out = String::with_capacity(self.z.len() * 40);
        out.push_str("z,rho\n");
        for (z, r) in self.z.iter().zip(&self.rho) {
            out.push_str(&format!("{z},{r}\n"));
        }
        out
    }
}

fn trapezoid(z: &[f64], f: impl Fn(usize) -> f64) -> f64 {
    (1..z.len()).map(|i| 0.5 * (f(i) + f(i - 1)) * (z[i] - z[i - 1])).sum()
}

/// Density on `points` equally spaced values in `[z_min, z_max]`.
///
/// The sweep is sequential: each point starts from the previous `h`, which
/// keeps the selected root continuous along the grid. A grid point falling
/// exactly on zero is moved by half a grid step.
pub fn density_grid(
    model: &DegreeModel,
    z_min: f64,
    z_max: f64,
    points: usize,
    eta: Option<f64>,
) -> Result<SpectralCurve, SpectrumError> {
    if !(z_min < z_max) || !z_min.is_finite() || !z_max.is_finite() {
        return Err(SpectrumError::Domain(format!("need z_min < z_max, got [{z_min}, {z_max}]")));
    }
    if points < 2 {
        return Err(SpectrumError::Domain(format!("need at least 2 grid points, got {points}")));
    }
    let eta = eta.unwrap_or_else(|| default_eta(z_min, z_max, points));
    let step = (z_max - z_min) / (points - 1) as f64;
    let scaled = ScaledModel::new(model);
    let mut z = Vec::with_capacity(points);
    let mut rho = Vec::with_capacity(points);
    let mut previous = None;
    for i in 0..points {
        let mut x = if i == points - 1 { z_max } else { z_min + step * i as f64 };
        if x == 0.0 {
            x = 0.5 * step;
        }
        let (r, h) = density_scaled(&scaled, x, eta, previous)?;
        previous = Some(h);
        z.push(x);
        rho.push(r);
    }
    let total = trapezoid(&z, |i| rho[i]);
    let second_moment = trapezoid(&z, |i| z[i] * z[i] * rho[i]);
    Ok(SpectralCurve { z, rho, eta, band: band_edges(model).ok(), norm_defect: (total - 1.0).abs(), second_moment })
}
