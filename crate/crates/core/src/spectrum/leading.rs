//! Leading eigenvalue of the adjacency matrix.
//!
//! The adjacency matrix is the modularity matrix plus the rank-one term
//! `k kᵀ/2m`, so its top eigenvalue solves `(z − 1) h(z) = 1` above the band.

use num_complex::Complex64;

use super::density::band_edges;
use super::fixed_point::{solve_scaled, ScaledModel, MAX_POLYNOMIAL_ATOMS};
use super::SpectrumError;
use crate::degree_model::{DegreeModel, ModelKind};
use crate::poly::Poly;

const ROOT_CHECK_TOLERANCE: f64 = 1e-8;
const BISECTION_STEPS: usize = 200;

/// `(z − 1) h(z) − 1` on the real axis.
fn leading_condition(scaled: &ScaledModel, z: f64) -> Result<f64, SpectrumError> {
    let h = solve_scaled(scaled, Complex64::new(z, 0.0), None)?.h;
    Ok((z - 1.0) * h.re - 1.0)
}

/// Largest real `z` above the band with `(z − 1) h(z) = 1`.
///
/// Atomic models with few atoms substitute `h = 1/(z − 1)` into the
/// fixed-point equation and take the largest admissible polynomial root;
/// other models use [`leading_eigenvalue_bisection`].
pub fn leading_eigenvalue(model: &DegreeModel) -> Result<f64, SpectrumError> {
    let (_, edge) = band_edges(model)?;
    let scaled = ScaledModel::new(model);
    if scaled.kind == ModelKind::PoissonEquivalent {
        let z = scaled.c + 1.0;
        return if z > edge * (1.0 + 1e-12) { Ok(z) } else { Err(SpectrumError::NoLeadingRoot { edge }) };
    }
    if !(scaled.atomic && scaled.terms.len() <= MAX_POLYNOMIAL_ATOMS) {
        return leading_eigenvalue_bisection(model);
    }
    let poly = leading_polynomial(&scaled);
    let roots = poly.roots().ok_or(SpectrumError::NoLeadingRoot { edge })?;
    let mut best: Option<f64> = None;
    for r in roots {
        if r.im.abs() > 1e-6 * r.norm().max(1.0) {
            continue;
        }
        let Some(z) = polish_leading(&scaled, r.re) else { continue };
        if z <= edge {
            continue;
        }
        let h = solve_scaled(&scaled, Complex64::new(z, 0.0), None)?.h;
        if ((z - 1.0) * h - 1.0).norm() < ROOT_CHECK_TOLERANCE && best.is_none_or(|b| z > b) {
            best = Some(z);
        }
    }
    best.ok_or(SpectrumError::NoLeadingRoot { edge })
}

/// `c Π(w − d_r) − (z − 1)² Σ p_r d_r Π_{s≠r}(w − d_s)` with `w = z² − z`.
///
/// The `z^{2ℓ}` terms cancel identically, so the top coefficient is dropped.
fn leading_polynomial(scaled: &ScaledModel) -> Poly {
    let re = |x: f64| Complex64::new(x, 0.0);
    let c = scaled.c;
    let factors: Vec<Poly> =
        scaled.terms.iter().map(|&(_, delta)| Poly(vec![re(-delta * c), re(-1.0), re(1.0)])).collect();
    let product = |skip: Option<usize>| {
        factors
            .iter()
            .enumerate()
            .filter(|(i, _)| Some(*i) != skip)
            .fold(Poly::constant(re(1.0)), |acc, (_, f)| acc.mul(f))
    };
    let z_minus_one_sq = Poly(vec![re(1.0), re(-2.0), re(1.0)]);
    let mut sum = Poly::constant(re(0.0));
    for (r, &(p, delta)) in scaled.terms.iter().enumerate() {
        sum = sum.add(&product(Some(r)).scale(re(p * delta * c)));
    }
    let mut poly = product(None).scale(re(c)).add(&z_minus_one_sq.mul(&sum).scale(re(-1.0)));
    poly.0.pop();
    poly
}

/// Newton on `c/(z − 1)² − Σ p d / (z(z − 1) − d)`.
fn polish_leading(scaled: &ScaledModel, mut z: f64) -> Option<f64> {
    let c = scaled.c;
    for _ in 0..60 {
        let zm1 = z - 1.0;
        let mut f = c / (zm1 * zm1);
        let mut df = -2.0 * c / (zm1 * zm1 * zm1);
        for &(p, delta) in &scaled.terms {
            let d = delta * c;
            let den = z * zm1 - d;
            f -= p * d / den;
            df += p * d * (2.0 * z - 1.0) / (den * den);
        }
        if !(df != 0.0 && f.is_finite() && df.is_finite()) {
            return None;
        }
        let step = f / df;
        z -= step;
        if step.abs() <= 1e-15 * z.abs().max(1.0) {
            break;
        }
    }
    z.is_finite().then_some(z)
}

/// Root of `(z − 1) h(z) − 1` above the band, by bisection.
pub fn leading_eigenvalue_bisection(model: &DegreeModel) -> Result<f64, SpectrumError> {
    let (_, edge) = band_edges(model)?;
    let scaled = ScaledModel::new(model);
    let mut lo = edge * (1.0 + 1e-12) + 1e-12;
    if leading_condition(&scaled, lo)? <= 0.0 {
        return Err(SpectrumError::NoLeadingRoot { edge });
    }
    let mut hi = 2.0 * (model.moment(2) / model.moment(1) + 1.0).max(edge);
    let mut expansions = 0;
    while leading_condition(&scaled, hi)? > 0.0 {
        hi *= 2.0;
        expansions += 1;
        if expansions > 60 {
            return Err(SpectrumError::BisectionFailed("leading eigenvalue not bracketed".into()));
        }
    }
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if leading_condition(&scaled, mid)? > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `⟨k²⟩/⟨k⟩`, the large-degree approximation to the leading eigenvalue.
pub fn leading_eigenvalue_approx(model: &DegreeModel) -> f64 {
    model.moment(2) / model.moment(1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_degree() -> DegreeModel {
        DegreeModel::discrete(&[(50.0, 0.25), (100.0, 0.75)]).unwrap()
    }

    #[test]
    fn poisson_leading_is_mean_plus_one() {
        assert_eq!(leading_eigenvalue(&DegreeModel::poisson(100.0).unwrap()).unwrap(), 101.0);
        let m = DegreeModel::poisson(100.0).unwrap();
        let h = solve_scaled(&ScaledModel::new(&m), Complex64::new(101.0, 0.0), None).unwrap().h;
        assert!((h.re - 0.01).abs() < 1e-15);
        assert!(matches!(
            leading_eigenvalue(&DegreeModel::poisson(1.0).unwrap()),
            Err(SpectrumError::NoLeadingRoot { .. })
        ));
    }

    #[test]
    fn two_degree_leading() {
        let z = leading_eigenvalue(&two_degree()).unwrap();
        assert!((z - 93.893).abs() < 1e-3, "{z}");
        let b = leading_eigenvalue_bisection(&two_degree()).unwrap();
        assert!((z - b).abs() < 1e-8, "{z} vs {b}");
        assert!((leading_eigenvalue_approx(&two_degree()) - 92.857).abs() < 1e-3);
    }

    #[test]
    fn polynomial_has_expected_degree() {
        let scaled = ScaledModel::new(&two_degree());
        assert_eq!(leading_polynomial(&scaled).degree(), 3);
    }

    #[test]
    fn continuous_model_uses_bisection() {
        let m = DegreeModel::uniform(50.0, 100.0, 64).unwrap();
        let z = leading_eigenvalue(&m).unwrap();
        let approx = leading_eigenvalue_approx(&m);
        assert!(z > approx && z < approx + 2.0, "{z} vs {approx}");
    }
}
