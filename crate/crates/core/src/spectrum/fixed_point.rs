//! Solution of the self-consistent equation
//!
//! ```text
//! h(z) = (1/c) Σ_r p_r d_r / (z − d_r h(z))
//! ```
//!
//! Internally everything is expressed in the dimensionless variables
//! `u = √c·h`, `ζ = z/√c`, `δ_r = d_r/c`, in which the equation reads
//! `u = Σ_r p_r δ_r / (ζ − δ_r u)` and `Σ_r p_r δ_r = 1`.
//!
//! For `Im z > 0` the physical root is the unique solution with `Im h < 0`
//! (the normalized trace of `D (z − B)^{-1}` is a Nevanlinna function). For
//! real `z` outside the band it is the real root continuously connected to
//! `h ~ 1/z` at infinity, which is the fixed point with `|T'(u)| < 1`.

use num_complex::Complex64;

use super::SpectrumError;
use crate::degree_model::{DegreeModel, ModelKind};
use crate::poly::Poly;

/// Largest number of atoms solved through the polynomial route.
pub const MAX_POLYNOMIAL_ATOMS: usize = 12;
const DAMPING: f64 = 0.5;
const MAX_ITERATIONS: usize = 10_000;
const ITERATION_TOLERANCE: f64 = 1e-12;
const RESIDUAL_TOLERANCE: f64 = 1e-10;
const NEWTON_STEPS: usize = 60;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveMethod {
    ClosedForm,
    PolynomialRoots,
    DampedIteration,
}

/// One evaluation of `h(z)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HSolution {
    pub z: Complex64,
    pub h: Complex64,
    /// `|h − RHS(h)|` in the original (unscaled) units.
    pub residual: f64,
    pub method: SolveMethod,
}

/// The model in dimensionless form, ready for repeated evaluation.
#[derive(Debug, Clone)]
pub(crate) struct ScaledModel {
    pub c: f64,
    pub sqrt_c: f64,
    /// `(p_r, δ_r)` pairs.
    pub terms: Vec<(f64, f64)>,
    pub delta_max: f64,
    pub kind: ModelKind,
    pub atomic: bool,
}

impl ScaledModel {
    pub fn new(model: &DegreeModel) -> Self {
        let c = model.mean_degree();
        let terms: Vec<(f64, f64)> = model.points().iter().map(|p| (p.weight, p.degree / c)).collect();
        let delta_max = terms.iter().map(|t| t.1).fold(0.0, f64::max);
        Self { c, sqrt_c: c.sqrt(), terms, delta_max, kind: model.kind(), atomic: model.is_atomic() }
    }

    /// `T(u) = Σ p δ / (ζ − δ u)`.
    pub fn map(&self, u: Complex64, zeta: Complex64) -> Complex64 {
        self.terms.iter().map(|&(p, d)| p * d / (zeta - d * u)).sum()
    }

    /// `T(u)` and `T'(u) = Σ p δ² / (ζ − δ u)²`.
    pub fn map_with_derivative(&self, u: Complex64, zeta: Complex64) -> (Complex64, Complex64) {
        let mut t = Complex64::new(0.0, 0.0);
        let mut dt = Complex64::new(0.0, 0.0);
        for &(p, d) in &self.terms {
            let inv = 1.0 / (zeta - d * u);
            t += p * d * inv;
            dt += p * d * d * inv * inv;
        }
        (t, dt)
    }

    pub fn residual(&self, u: Complex64, zeta: Complex64) -> f64 {
        (u - self.map(u, zeta)).norm()
    }

    /// Newton iteration on `F(u) = u − T(u)`.
    fn newton(&self, mut u: Complex64, zeta: Complex64) -> Option<Complex64> {
        for _ in 0..NEWTON_STEPS {
            let (t, dt) = self.map_with_derivative(u, zeta);
            let f = u - t;
            let df = 1.0 - dt;
            if df.norm() == 0.0 || !f.re.is_finite() || !f.im.is_finite() {
                return None;
            }
            let step = f / df;
            u -= step;
            if step.norm() <= 1e-15 * u.norm().max(1e-3) {
                break;
            }
        }
        let scale = u.norm().max(1.0);
        (self.residual(u, zeta) < 1e-12 * scale).then_some(u)
    }

    /// Whether `u` is the physical root at `ζ`.
    fn is_physical(&self, u: Complex64, zeta: Complex64) -> bool {
        let scale = u.norm().max(1.0);
        if zeta.im > 0.0 {
            if u.im < -1e-12 * scale {
                return true;
            }
            if u.im > 1e-12 * scale {
                return false;
            }
            // Numerically real: accept only the attracting real branch.
            let (_, dt) = self.map_with_derivative(u, zeta);
            return dt.re < 1.0 && real_branch_ok(u.re, zeta.re, self.delta_max);
        }
        if u.im.abs() <= 1e-12 * scale {
            let (_, dt) = self.map_with_derivative(Complex64::new(u.re, 0.0), zeta);
            dt.re < 1.0 && real_branch_ok(u.re, zeta.re, self.delta_max)
        } else {
            u.im < 0.0
        }
    }
}

/// On the real axis outside the band `ζ − δ u` keeps the sign of `ζ` for
/// every degree, i.e. the diagonal resolvent entries stay positive.
fn real_branch_ok(u: f64, zeta: f64, delta_max: f64) -> bool {
    if zeta > 0.0 {
        u > 0.0 && zeta - delta_max * u > 0.0
    } else if zeta < 0.0 {
        u < 0.0 && zeta - delta_max * u < 0.0
    } else {
        false
    }
}

/// Solves for `h(z)`. Requires `Im z > 0`, or real `z` (outside the band for
/// the iterative route; the polynomial routes return the limit from above).
pub fn solve_h(model: &DegreeModel, z: Complex64) -> Result<HSolution, SpectrumError> {
    solve_h_tracked(model, z, None)
}

/// As [`solve_h`], using `previous` (an earlier `h` along a sweep) as a warm
/// start and to break ties between candidate roots.
pub fn solve_h_tracked(
    model: &DegreeModel,
    z: Complex64,
    previous: Option<Complex64>,
) -> Result<HSolution, SpectrumError> {
    let scaled = ScaledModel::new(model);
    solve_scaled(&scaled, z, previous)
}

pub(crate) fn solve_scaled(
    scaled: &ScaledModel,
    z: Complex64,
    previous: Option<Complex64>,
) -> Result<HSolution, SpectrumError> {
    if z.im < 0.0 || !z.re.is_finite() || !z.im.is_finite() {
        return Err(SpectrumError::Domain(format!("h(z) needs Im z >= 0, got z = {z}")));
    }
    // normalize a negative zero so the closed-form branch cut behaves
    let z = Complex64::new(z.re, z.im + 0.0);
    let zeta = z / scaled.sqrt_c;
    let prev_u = previous.map(|h| h * scaled.sqrt_c);
    let (u, method) = if scaled.kind == ModelKind::PoissonEquivalent {
        (closed_form_u(zeta), SolveMethod::ClosedForm)
    } else if scaled.atomic && scaled.terms.len() <= MAX_POLYNOMIAL_ATOMS {
        (polynomial_u(scaled, zeta, prev_u)?, SolveMethod::PolynomialRoots)
    } else {
        (iterative_u(scaled, zeta, prev_u)?, SolveMethod::DampedIteration)
    };
    let residual = scaled.residual(u, zeta) / scaled.sqrt_c;
    let h = u / scaled.sqrt_c;
    if !(residual < RESIDUAL_TOLERANCE * h.norm().max(1.0)) {
        return Err(SpectrumError::NoConvergence { z, residual, method });
    }
    Ok(HSolution { z, h, residual, method })
}

/// Single atom: `u² − ζu + 1 = 0`, with the branch that behaves as `1/ζ` at
/// infinity and has its cut on `[−2, 2]`.
pub(crate) fn closed_form_u(zeta: Complex64) -> Complex64 {
    let root = (zeta - 2.0).sqrt() * (zeta + 2.0).sqrt();
    let u = (zeta - root) / 2.0;
    // (ζ − root) cancels for large |ζ|; use the product of roots instead.
    if (zeta + root).norm() > (zeta - root).norm() {
        2.0 / (zeta + root)
    } else {
        u
    }
}

/// Builds `u Π(ζ − δ_r u) − Σ_r p_r δ_r Π_{s≠r}(ζ − δ_s u)`.
fn fixed_point_polynomial(scaled: &ScaledModel, zeta: Complex64) -> Poly {
    let one = Complex64::new(1.0, 0.0);
    let factors: Vec<Poly> = scaled.terms.iter().map(|&(_, d)| Poly::linear(zeta, Complex64::new(-d, 0.0))).collect();
    let all = factors.iter().fold(Poly::constant(one), |acc, f| acc.mul(f));
    let mut poly = all.mul(&Poly::linear(Complex64::new(0.0, 0.0), one));
    for (r, &(p, d)) in scaled.terms.iter().enumerate() {
        let others =
            factors.iter().enumerate().filter(|(s, _)| *s != r).fold(Poly::constant(one), |acc, (_, f)| acc.mul(f));
        poly = poly.add(&others.scale(Complex64::new(-p * d, 0.0)));
    }
    poly
}

fn polynomial_u(
    scaled: &ScaledModel,
    zeta: Complex64,
    previous: Option<Complex64>,
) -> Result<Complex64, SpectrumError> {
    let poly = fixed_point_polynomial(scaled, zeta);
    let raw = poly.roots().ok_or(SpectrumError::NoConvergence {
        z: zeta * scaled.sqrt_c,
        residual: f64::NAN,
        method: SolveMethod::PolynomialRoots,
    })?;
    let candidates: Vec<Complex64> = raw
        .into_iter()
        .map(|r| match scaled.newton(r, zeta) {
            Some(p) if (p - r).norm() < 1e-6 * r.norm().max(1.0) => p,
            _ => r,
        })
        .collect();
    select_root(scaled, zeta, &candidates, previous)
}

fn select_root(
    scaled: &ScaledModel,
    zeta: Complex64,
    candidates: &[Complex64],
    previous: Option<Complex64>,
) -> Result<Complex64, SpectrumError> {
    let mut physical: Vec<Complex64> = candidates.iter().copied().filter(|&u| scaled.is_physical(u, zeta)).collect();
    if zeta.im == 0.0 {
        // Real axis: prefer a real root (outside the band) closest to zero,
        // which is the branch continuous with u ~ 1/ζ.
        let mut real: Vec<Complex64> = physical
            .iter()
            .filter(|u| u.im.abs() <= 1e-12 * u.norm().max(1.0))
            .map(|u| Complex64::new(u.re, 0.0))
            .collect();
        if !real.is_empty() {
            real.sort_by(|a, b| a.re.abs().total_cmp(&b.re.abs()));
            return Ok(real[0]);
        }
    }
    physical.sort_by(|a, b| a.im.total_cmp(&b.im));
    physical.dedup_by(|a, b| (*a - *b).norm() <= 1e-8 * a.norm().max(1.0));
    match physical.len() {
        0 => Err(SpectrumError::NoPhysicalRoot { z: zeta * scaled.sqrt_c }),
        1 => Ok(physical[0]),
        _ => match previous {
            Some(prev) => Ok(*physical
                .iter()
                .min_by(|a, b| (**a - prev).norm().total_cmp(&(**b - prev).norm()))
                .expect("non-empty")),
            None => Err(SpectrumError::AmbiguousRoot {
                z: zeta * scaled.sqrt_c,
                first: physical[0] / scaled.sqrt_c,
                second: physical[1] / scaled.sqrt_c,
            }),
        },
    }
}

fn iterative_u(scaled: &ScaledModel, zeta: Complex64, previous: Option<Complex64>) -> Result<Complex64, SpectrumError> {
    if let Some(u0) = previous {
        if let Some(u) = scaled.newton(u0, zeta).filter(|&u| scaled.is_physical(u, zeta)) {
            return Ok(u);
        }
    }
    if let Some(u) = damped_iteration(scaled, zeta, initial_guess(zeta)) {
        if let Some(u) = scaled.newton(u, zeta).filter(|&u| scaled.is_physical(u, zeta)) {
            return Ok(u);
        }
    }
    continuation(scaled, zeta).ok_or_else(|| SpectrumError::NoConvergence {
        z: zeta * scaled.sqrt_c,
        residual: f64::NAN,
        method: SolveMethod::DampedIteration,
    })
}

fn initial_guess(zeta: Complex64) -> Complex64 {
    if zeta.norm() > 0.0 {
        1.0 / zeta
    } else {
        Complex64::new(0.0, -1.0)
    }
}

fn damped_iteration(scaled: &ScaledModel, zeta: Complex64, mut u: Complex64) -> Option<Complex64> {
    for _ in 0..MAX_ITERATIONS {
        let next = (1.0 - DAMPING) * u + DAMPING * scaled.map(u, zeta);
        if !next.re.is_finite() || !next.im.is_finite() {
            return None;
        }
        let step = (next - u).norm();
        u = next;
        if step < ITERATION_TOLERANCE * u.norm().max(1.0) {
            return Some(u);
        }
    }
    None
}

/// Follows the root from `Re ζ + i` down to the requested imaginary part.
fn continuation(scaled: &ScaledModel, zeta: Complex64) -> Option<Complex64> {
    let target = zeta.im;
    let mut eta = 1.0_f64.max(4.0 * target);
    let mut u = damped_iteration(scaled, Complex64::new(zeta.re, eta), initial_guess(Complex64::new(zeta.re, eta)))?;
    let floor = 1e-14 * zeta.re.abs().max(1.0);
    loop {
        let mut next_eta = (eta * 0.5).max(target);
        if next_eta < floor {
            next_eta = target;
        }
        let mut factor = 0.5;
        loop {
            let at = Complex64::new(zeta.re, next_eta);
            if let Some(v) = scaled.newton(u, at).filter(|&v| scaled.is_physical(v, at) || next_eta == 0.0) {
                u = v;
                eta = next_eta;
                break;
            }
            factor = 0.5 * (1.0 + factor);
            if factor > 0.999 {
                return None;
            }
            next_eta = (eta * factor).max(target);
        }
        if eta <= target {
            return scaled.is_physical(u, zeta).then_some(u);
        }
    }
}
