//! Dense polynomials with complex coefficients and an all-roots solver.

use num_complex::Complex64;
use std::f64::consts::PI;

const MAX_ABERTH_ITERATIONS: usize = 500;

/// Polynomial stored with ascending coefficients: `c[0] + c[1] x + ...`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly(pub Vec<Complex64>);

impl Poly {
    pub fn constant(c: Complex64) -> Self {
        Poly(vec![c])
    }

    /// `a + b x`.
    pub fn linear(a: Complex64, b: Complex64) -> Self {
        Poly(vec![a, b])
    }

    pub fn degree(&self) -> usize {
        self.0.len().saturating_sub(1)
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let mut out = vec![Complex64::new(0.0, 0.0); self.0.len() + other.0.len() - 1];
        for (i, a) in self.0.iter().enumerate() {
            for (j, b) in other.0.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly(out)
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let len = self.0.len().max(other.0.len());
        let zero = Complex64::new(0.0, 0.0);
        Poly(
            (0..len)
                .map(|i| self.0.get(i).copied().unwrap_or(zero) + other.0.get(i).copied().unwrap_or(zero))
                .collect(),
        )
    }

    pub fn scale(&self, s: Complex64) -> Poly {
        Poly(self.0.iter().map(|c| c * s).collect())
    }

    /// Drops leading coefficients that are negligible relative to the largest.
    pub fn trimmed(mut self, rel_tol: f64) -> Poly {
        let max = self.0.iter().map(|c| c.norm()).fold(0.0, f64::max);
        while self.0.len() > 1 && self.0.last().is_some_and(|c| c.norm() <= rel_tol * max) {
            self.0.pop();
        }
        self
    }

    /// Value and first derivative at `x` (Horner).
    pub fn eval_with_derivative(&self, x: Complex64) -> (Complex64, Complex64) {
        let mut p = Complex64::new(0.0, 0.0);
        let mut d = Complex64::new(0.0, 0.0);
        for c in self.0.iter().rev() {
            d = d * x + p;
            p = p * x + c;
        }
        (p, d)
    }

    pub fn eval(&self, x: Complex64) -> Complex64 {
        self.eval_with_derivative(x).0
    }

    /// All roots, by simultaneous Aberth–Ehrlich iteration.
    ///
    /// Returns `None` if the leading coefficient is zero or the iteration does
    /// not settle. The caller is expected to polish roots against the original
    /// (better conditioned) equation.
    pub fn roots(&self) -> Option<Vec<Complex64>> {
        let n = self.degree();
        let lead = *self.0.last()?;
        if lead.norm() == 0.0 {
            return None;
        }
        if n == 0 {
            return Some(Vec::new());
        }
        if n == 1 {
            return Some(vec![-self.0[0] / lead]);
        }
        // Initial guesses on a circle whose radius bounds the root moduli.
        let radius = self.0[..n]
            .iter()
            .enumerate()
            .map(|(k, c)| (c / lead).norm().powf(1.0 / (n - k) as f64))
            .fold(0.0, f64::max)
            .max(1e-300);
        let mut z: Vec<Complex64> =
            (0..n).map(|k| Complex64::from_polar(radius, 2.0 * PI * k as f64 / n as f64 + 0.4)).collect();
        for _ in 0..MAX_ABERTH_ITERATIONS {
            let mut max_step: f64 = 0.0;
            for i in 0..n {
                let (p, d) = self.eval_with_derivative(z[i]);
                if p.norm() == 0.0 {
                    continue;
                }
                let ratio = p / d;
                let repulsion: Complex64 = (0..n).filter(|&j| j != i).map(|j| 1.0 / (z[i] - z[j])).sum();
                let denom = Complex64::new(1.0, 0.0) - ratio * repulsion;
                let step = if d.norm() == 0.0 || denom.norm() == 0.0 {
                    Complex64::new(radius * 1e-3, radius * 1e-3)
                } else {
                    ratio / denom
                };
                z[i] -= step;
                max_step = max_step.max(step.norm() / z[i].norm().max(1e-300));
            }
            if max_step < 1e-15 {
                return Some(z);
            }
        }
        // Slow convergence happens at (near) multiple roots; the estimates
        // are still usable for polishing.
        if z.iter().all(|r| r.re.is_finite() && r.im.is_finite()) {
            Some(z)
        } else {
            None
        }
    }
}
