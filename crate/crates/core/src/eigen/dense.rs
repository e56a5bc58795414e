use super::{dense_cap, norm, tridiagonal_top_vector, EigenError, EigenReport, LinearOperator, MatrixKind};

const MAX_QL_ITERATIONS: usize = 60;
const SYMMETRY_TOLERANCE: f64 = 1e-12;
const IDENTITY_TOLERANCE: f64 = 1e-8;

/// Square matrix in row-major order.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    n: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(n: usize) -> Self {
        Self { n, data: vec![0.0; n * n] }
    }

    pub fn from_fn(n: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in 0..n {
                m.data[i * n + j] = f(i, j);
            }
        }
        m
    }

    pub fn from_rows(rows: &[Vec<f64>]) -> Self {
        let n = rows.len();
        assert!(rows.iter().all(|r| r.len() == n), "matrix must be square");
        Self { n, data: rows.concat() }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] = v;
    }

    pub fn add(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.n + j] += v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn trace(&self) -> f64 {
        (0..self.n).map(|i| self.get(i, i)).sum()
    }

    pub fn frobenius_sq(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum()
    }

    /// Largest asymmetry `|a_ij − a_ji|` relative to the largest entry.
    fn check_symmetric(&self) -> Result<(), EigenError> {
        let scale = self.data.iter().fold(0.0_f64, |m, x| m.max(x.abs())).max(f64::MIN_POSITIVE);
        for i in 0..self.n {
            for j in 0..i {
                let diff = (self.get(i, j) - self.get(j, i)).abs();
                if !(diff <= SYMMETRY_TOLERANCE * scale) {
                    return Err(EigenError::NotSymmetric { i, j, diff });
                }
            }
        }
        Ok(())
    }
}

impl LinearOperator for DenseMatrix {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            *yi = super::dot(self.row(i), x);
        }
    }
}

/// One Householder reflector `I − β v vᵀ` acting on indices `offset..n`.
struct Reflector {
    offset: usize,
    beta: f64,
    v: Vec<f64>,
}

/// Reduces `a` to tridiagonal form in place, returning `(d, e, reflectors)`.
fn tridiagonalize(mut a: DenseMatrix) -> (Vec<f64>, Vec<f64>, Vec<Reflector>) {
    let n = a.n;
    let mut d = vec![0.0; n];
    let mut e = vec![0.0; n.saturating_sub(1)];
    let mut reflectors = Vec::with_capacity(n.saturating_sub(2));
    let mut p = vec![0.0; n];
    for k in 0..n.saturating_sub(1) {
        d[k] = a.get(k, k);
        let off = k + 1;
        let m = n - off;
        let mut v: Vec<f64> = a.row(k)[off..].to_vec();
        let tail: f64 = v[1..].iter().map(|x| x * x).sum();
        if m == 1 || tail == 0.0 {
            e[k] = v[0];
            continue;
        }
        let sigma = (v[0] * v[0] + tail).sqrt();
        let alpha = if v[0] > 0.0 { -sigma } else { sigma };
        v[0] -= alpha;
        let beta = 2.0 / (v[0] * v[0] + tail);
        e[k] = alpha;

        // p = β A' v, w = p − (β/2)(pᵀv) v, A' −= v wᵀ + w vᵀ
        let p = &mut p[..m];
        for (i, pi) in p.iter_mut().enumerate() {
            *pi = beta * super::dot(&a.row(off + i)[off..], &v);
        }
        let k_coef = 0.5 * beta * super::dot(p, &v);
        for (pi, vi) in p.iter_mut().zip(&v) {
            *pi -= k_coef * vi;
        }
        for i in 0..m {
            let (vi, wi) = (v[i], p[i]);
            let row = &mut a.data[(off + i) * n + off..(off + i + 1) * n];
            for ((x, vj), wj) in row.iter_mut().zip(&v).zip(p.iter()) {
                *x -= vi * wj + wi * vj;
            }
        }
        reflectors.push(Reflector { offset: off, beta, v });
    }
    if n > 0 {
        d[n - 1] = a.get(n - 1, n - 1);
    }
    (d, e, reflectors)
}

/// Eigenvalues of the symmetric tridiagonal matrix `(d, e)` by implicit QL
/// with Wilkinson shifts. Returns them unsorted.
fn tridiagonal_ql(mut d: Vec<f64>, e: &[f64]) -> Result<Vec<f64>, EigenError> {
    let n = d.len();
    let mut e: Vec<f64> = e.iter().copied().chain(std::iter::once(0.0)).collect();
    for l in 0..n {
        let mut iterations = 0;
        loop {
            let mut m = l;
            while m + 1 < n {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iterations += 1;
            if iterations > MAX_QL_ITERATIONS {
                return Err(EigenError::NoConvergence { index: l, iterations: MAX_QL_ITERATIONS });
            }
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c, mut p) = (1.0, 1.0, 0.0);
            let mut i = m;
            let mut underflow = false;
            while i > l {
                i -= 1;
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    underflow = true;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
            }
            if underflow {
                continue;
            }
            d[l] -= p;
            e[l] = g;
            e[m] = 0.0;
        }
    }
    Ok(d)
}

/// All eigenvalues of a symmetric matrix, ascending, and optionally the unit
/// eigenvector of the largest one.
///
/// The sum and sum of squares of the eigenvalues are checked against the
/// trace and squared Frobenius norm.
pub fn dense_symmetric_eigen(
    matrix: &DenseMatrix,
    kind: Option<MatrixKind>,
    want_top_vector: bool,
) -> Result<EigenReport, EigenError> {
    let n = matrix.n;
    if n == 0 {
        return Err(EigenError::Empty);
    }
    let cap = dense_cap();
    if n > cap {
        return Err(EigenError::DenseCap { n, cap });
    }
    matrix.check_symmetric()?;
    let (trace, frob) = (matrix.trace(), matrix.frobenius_sq());

    let (d, e, reflectors) = tridiagonalize(matrix.clone());
    let mut eigenvalues = tridiagonal_ql(d.clone(), &e)?;
    eigenvalues.sort_by(f64::total_cmp);

    let sum: f64 = eigenvalues.iter().sum();
    let sum_sq: f64 = eigenvalues.iter().map(|x| x * x).sum();
    let scale = frob.sqrt().max(f64::MIN_POSITIVE);
    if (sum - trace).abs() > IDENTITY_TOLERANCE * trace.abs().max(scale) {
        return Err(EigenError::Identity(format!("eigenvalue sum {sum} vs trace {trace}")));
    }
    if (sum_sq - frob).abs() > IDENTITY_TOLERANCE * frob.max(f64::MIN_POSITIVE) {
        return Err(EigenError::Identity(format!("eigenvalue square sum {sum_sq} vs Frobenius² {frob}")));
    }

    let mut report = EigenReport { eigenvalues, top_vector: None, kind, residual: 0.0 };
    if want_top_vector {
        let lambda = report.largest();
        let mut x = tridiagonal_top_vector(&d, &e, lambda);
        for r in reflectors.iter().rev() {
            let seg = &mut x[r.offset..];
            let s = r.beta * super::dot(&r.v, seg);
            for (xi, vi) in seg.iter_mut().zip(&r.v) {
                *xi -= s * vi;
            }
        }
        let nrm = norm(&x);
        x.iter_mut().for_each(|v| *v /= nrm);
        let mut mx = vec![0.0; n];
        matrix.apply(&x, &mut mx);
        report.residual = mx.iter().zip(&x).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt();
        report.top_vector = Some(x);
    }
    Ok(report)
}
