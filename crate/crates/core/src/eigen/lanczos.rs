use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{dot, norm, tridiagonal_top_vector, EigenError, LinearOperator};

/// Which end of the spectrum to target.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Which {
    #[default]
    Largest,
    Smallest,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanczosOptions {
    /// Converged once `‖M v − λ v‖ < tol·|λ|`.
    pub tol: f64,
    pub which: Which,
    /// Krylov dimension per cycle (capped at the operator dimension).
    pub krylov_dim: usize,
    pub max_restarts: usize,
    /// Seed of the random start vector.
    pub seed: u64,
}

impl Default for LanczosOptions {
    fn default() -> Self {
        Self { tol: 1e-10, which: Which::Largest, krylov_dim: 160, max_restarts: 50, seed: 0x5eed }
    }
}

/// Extreme eigenpair `(λ, v)` of a symmetric operator, `v` of unit norm.
///
/// Lanczos with full reorthogonalization, explicitly restarted from the
/// current Ritz vector.
pub fn top_eigenpair(op: &dyn LinearOperator, opts: &LanczosOptions) -> Result<(f64, Vec<f64>), EigenError> {
    let n = op.dim();
    if n == 0 {
        return Err(EigenError::Empty);
    }
    if !(opts.tol > 0.0) {
        return Err(EigenError::InvalidTolerance(opts.tol));
    }
    let sign = match opts.which {
        Which::Largest => 1.0,
        Which::Smallest => -1.0,
    };
    let apply = |x: &[f64], y: &mut [f64]| {
        op.apply(x, y);
        if sign < 0.0 {
            y.iter_mut().for_each(|v| *v = -*v);
        }
    };

    let m = opts.krylov_dim.clamp(1, n);
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    let mut start: Vec<f64> = (0..n).map(|_| rng.random_range(-1.0..1.0)).collect();
    let mut w = vec![0.0; n];
    let mut last_residual = f64::INFINITY;
    let mut last_target = 0.0;

    for _ in 0..=opts.max_restarts {
        let nrm = norm(&start);
        start.iter_mut().for_each(|v| *v /= nrm);
        let mut basis: Vec<Vec<f64>> = vec![start.clone()];
        let mut alpha = Vec::with_capacity(m);
        let mut beta = Vec::with_capacity(m);
        loop {
            let j = basis.len() - 1;
            apply(&basis[j], &mut w);
            let a = dot(&w, &basis[j]);
            alpha.push(a);
            // Two passes of classical Gram–Schmidt against the whole basis.
            for _ in 0..2 {
                for q in &basis {
                    let proj = dot(&w, q);
                    w.iter_mut().zip(q).for_each(|(wi, qi)| *wi -= proj * qi);
                }
            }
            if basis.len() == m {
                break;
            }
            let b = norm(&w);
            if b <= 1e-12 * a.abs().max(alpha.iter().fold(0.0_f64, |x, y| x.max(y.abs()))).max(f64::MIN_POSITIVE) {
                // Invariant subspace: the Ritz values are exact.
                break;
            }
            beta.push(b);
            basis.push(w.iter().map(|v| v / b).collect());
        }

        let theta = tridiagonal_largest(&alpha, &beta);
        let y = tridiagonal_top_vector(&alpha, &beta, theta);
        let mut x = vec![0.0; n];
        for (q, yi) in basis.iter().zip(&y) {
            x.iter_mut().zip(q).for_each(|(xi, qi)| *xi += yi * qi);
        }
        let nrm = norm(&x);
        x.iter_mut().for_each(|v| *v /= nrm);

        apply(&x, &mut w);
        let lambda = dot(&x, &w);
        let residual = w.iter().zip(&x).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt();
        last_residual = residual;
        last_target = opts.tol * lambda.abs();
        if residual < last_target || residual == 0.0 {
            return Ok((sign * lambda, x));
        }
        start = x;
    }
    Err(EigenError::Stagnation { restarts: opts.max_restarts, residual: last_residual, target: last_target })
}

/// Largest eigenvalue of a small symmetric tridiagonal matrix by bisection on
/// Sturm sequence counts.
fn tridiagonal_largest(d: &[f64], e: &[f64]) -> f64 {
    let n = d.len();
    let radius = (0..n)
        .map(|i| {
            let left = if i > 0 { e[i - 1].abs() } else { 0.0 };
            let right = if i < e.len() { e[i].abs() } else { 0.0 };
            d[i] + left + right
        })
        .fold(f64::NEG_INFINITY, f64::max);
    let lower_bound = (0..n)
        .map(|i| {
            let left = if i > 0 { e[i - 1].abs() } else { 0.0 };
            let right = if i < e.len() { e[i].abs() } else { 0.0 };
            d[i] - left - right
        })
        .fold(f64::INFINITY, f64::min);
    // count of eigenvalues strictly greater than x
    let above = |x: f64| {
        let mut count = 0;
        let mut q = 1.0;
        for i in 0..n {
            let off = if i > 0 { e[i - 1] * e[i - 1] } else { 0.0 };
            q = d[i] - x - if i > 0 { off / q } else { 0.0 };
            if q == 0.0 {
                q = -f64::EPSILON * (x.abs() + 1.0);
            }
            if q < 0.0 {
                count += 1;
            }
        }
        n - count
    };
    let (mut lo, mut hi) = (lower_bound, radius);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if above(mid) >= 1 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    hi
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::{dense_symmetric_eigen, DenseMatrix};

    #[test]
    fn rank_one_operator() {
        let k: Vec<f64> = (1..=30).map(|i| i as f64).collect();
        let two_m: f64 = k.iter().sum();
        let m = DenseMatrix::from_fn(30, |i, j| k[i] * k[j] / two_m);
        let (lambda, v) = top_eigenpair(&m, &LanczosOptions::default()).unwrap();
        let expected = k.iter().map(|x| x * x).sum::<f64>() / two_m;
        assert!((lambda - expected).abs() < 1e-10 * expected);
        let knorm = norm(&k);
        let cos = dot(&v, &k) / knorm;
        assert!((cos.abs() - 1.0).abs() < 1e-10);
    }

    #[test]
    fn matches_dense_solver_at_both_ends() {
        let n = 300;
        let m = DenseMatrix::from_fn(n, |i, j| {
            let (a, b) = (i.min(j) as f64, i.max(j) as f64);
            ((a * 0.37 + b * 1.13).sin() + if i == j { (i as f64 / n as f64) * 3.0 } else { 0.0 }) / 10.0
        });
        let dense = dense_symmetric_eigen(&m, None, false).unwrap();
        let (top, _) = top_eigenpair(&m, &LanczosOptions::default()).unwrap();
        assert!((top - dense.largest()).abs() < 1e-8, "{top} vs {}", dense.largest());
        let opts = LanczosOptions { which: Which::Smallest, ..Default::default() };
        let (bottom, _) = top_eigenpair(&m, &opts).unwrap();
        assert!((bottom - dense.eigenvalues[0]).abs() < 1e-8);
    }

    #[test]
    fn tiny_operators() {
        let m = DenseMatrix::from_rows(&[vec![2.0]]);
        assert_eq!(top_eigenpair(&m, &LanczosOptions::default()).unwrap().0, 2.0);
        let m = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]);
        let (l, v) = top_eigenpair(&m, &LanczosOptions::default()).unwrap();
        assert!((l - 1.0).abs() < 1e-12 && (v[0] - v[1]).abs() < 1e-10);
        let bad = LanczosOptions { tol: 0.0, ..Default::default() };
        assert!(top_eigenpair(&m, &bad).is_err());
    }

    #[test]
    fn sturm_bisection() {
        // path graph P3: eigenvalues −√2, 0, √2
        let l = tridiagonal_largest(&[0.0, 0.0, 0.0], &[1.0, 1.0]);
        assert!((l - 2f64.sqrt()).abs() < 1e-14);
    }
}
