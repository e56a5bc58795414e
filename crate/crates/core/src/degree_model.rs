//! Expected-degree distributions.
//!
//! A [`DegreeModel`] is a probability distribution over expected vertex
//! degrees. It may mix point masses ("atoms") with a continuous density on a
//! bounded interval; the continuous part is discretized at construction into
//! Gauss–Legendre nodes, so every downstream computation sees a finite list
//! of weighted degrees.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::quadrature::gauss_legendre;

/// Default number of quadrature nodes for a continuous density.
pub const DEFAULT_NODES: usize = 256;
/// Upper bound on quadrature nodes accepted from model files.
pub const MAX_NODES: usize = 4096;
/// Tolerance accepted on the total weight of user-supplied atoms.
const INPUT_WEIGHT_TOLERANCE: f64 = 1e-9;
/// Degrees closer than this (relative) are merged into one atom.
const DEDUP_TOLERANCE: f64 = 1e-9;
/// Resolution of the tabulated CDF used for inverse-CDF sampling.
const CDF_TABLE_POINTS: usize = 2049;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ModelError {
    #[error("degree {0} is not a positive finite number")]
    InvalidDegree(f64),
    #[error("weight {0} is outside (0, 1]")]
    InvalidWeight(f64),
    #[error("weights sum to {0}, expected 1")]
    Unnormalized(f64),
    #[error("continuous support [{lo}, {hi}] must be finite with hi > lo >= 0")]
    InvalidSupport { lo: f64, hi: f64 },
    #[error("quadrature node count {0} outside 1..={MAX_NODES}")]
    InvalidNodeCount(usize),
    #[error("continuous density is negative or non-finite at k = {0}")]
    InvalidDensity(f64),
    #[error("continuous density has no mass on its support")]
    EmptyDensity,
    #[error("model has neither atoms nor a continuous part")]
    Empty,
    #[error("z = {z} lies on the atom at degree {degree}")]
    PoleAtAtom { z: f64, degree: f64 },
    #[error("invalid degree sequence: {0}")]
    InvalidSequence(String),
    #[error("invalid model file: {0}")]
    Parse(String),
}

/// One point of the (discretized) degree distribution.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedDegree {
    pub degree: f64,
    pub weight: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    /// A single atom: every vertex has the same expected degree.
    PoissonEquivalent,
    Discrete,
    Continuous,
}

/// Tabulated continuous part, kept for inverse-CDF sampling.
#[derive(Debug, Clone, PartialEq)]
struct ContinuousPart {
    lo: f64,
    hi: f64,
    nodes: usize,
    mass: f64,
    grid: Vec<f64>,
    pdf: Vec<f64>,
    cdf: Vec<f64>,
}

impl ContinuousPart {
    fn tabulate(lo: f64, hi: f64, nodes: usize, mass: f64, density: &dyn Fn(f64) -> f64) -> Result<Self, ModelError> {
        let step = (hi - lo) / (CDF_TABLE_POINTS - 1) as f64;
        let grid: Vec<f64> = (0..CDF_TABLE_POINTS).map(|i| lo + step * i as f64).collect();
        let pdf = grid
            .iter()
            .map(|&x| {
                let f = density(x);
                if f.is_finite() && f >= 0.0 {
                    Ok(f)
                } else {
                    Err(ModelError::InvalidDensity(x))
                }
            })
            .collect::<Result<Vec<_>, _>>()?;
        Self::from_table(lo, hi, nodes, mass, grid, pdf)
    }

    fn from_table(
        lo: f64,
        hi: f64,
        nodes: usize,
        mass: f64,
        grid: Vec<f64>,
        pdf: Vec<f64>,
    ) -> Result<Self, ModelError> {
        let mut cdf = Vec::with_capacity(grid.len());
        let mut acc = 0.0;
        cdf.push(0.0);
        for i in 1..grid.len() {
            acc += 0.5 * (pdf[i] + pdf[i - 1]) * (grid[i] - grid[i - 1]);
            cdf.push(acc);
        }
        if !(acc > 0.0) {
            return Err(ModelError::EmptyDensity);
        }
        cdf.iter_mut().for_each(|v| *v /= acc);
        Ok(Self { lo, hi, nodes, mass, grid, pdf, cdf })
    }

    /// Inverse CDF of the tabulated density, `u` in `[0, 1)`.
    fn quantile(&self, u: f64) -> f64 {
        let idx = self.cdf.partition_point(|&v| v <= u);
        if idx == 0 {
            return self.lo;
        }
        if idx >= self.cdf.len() {
            return self.hi;
        }
        let (c0, c1) = (self.cdf[idx - 1], self.cdf[idx]);
        let (x0, x1) = (self.grid[idx - 1], self.grid[idx]);
        if c1 > c0 {
            x0 + (u - c0) / (c1 - c0) * (x1 - x0)
        } else {
            x0
        }
    }
}

/// Distribution of expected degrees.
///
/// Immutable after construction. Atoms are sorted ascending and distinct, all
/// degrees are strictly positive and the total weight is one to within 1e-12.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeModel {
    atoms: Vec<WeightedDegree>,
    quadrature: Vec<WeightedDegree>,
    points: Vec<WeightedDegree>,
    continuous: Option<ContinuousPart>,
    kind: ModelKind,
}

impl DegreeModel {
    /// Every vertex has expected degree `c`.
    pub fn poisson(c: f64) -> Result<Self, ModelError> {
        Self::discrete(&[(c, 1.0)])
    }

    /// A purely atomic distribution from `(degree, weight)` pairs.
    pub fn discrete(atoms: &[(f64, f64)]) -> Result<Self, ModelError> {
        let atoms = validate_atoms(atoms)?;
        let total: f64 = atoms.iter().map(|a| a.weight).sum();
        if (total - 1.0).abs() > INPUT_WEIGHT_TOLERANCE {
            return Err(ModelError::Unnormalized(total));
        }
        Self::assemble(atoms, Vec::new(), None)
    }

    /// Uniform density on `[lo, hi]`.
    pub fn uniform(lo: f64, hi: f64, nodes: usize) -> Result<Self, ModelError> {
        Self::with_density(&[], lo, hi, nodes, |_| 1.0)
    }

    /// Atoms plus a continuous density on `[lo, hi]`.
    ///
    /// `density` need not be normalized: it is scaled so that the continuous
    /// part carries whatever weight the atoms leave over.
    pub fn with_density(
        atoms: &[(f64, f64)],
        lo: f64,
        hi: f64,
        nodes: usize,
        density: impl Fn(f64) -> f64,
    ) -> Result<Self, ModelError> {
        let (atoms, mass) = Self::continuous_prelude(atoms, lo, hi, nodes)?;
        let part = ContinuousPart::tabulate(lo, hi, nodes, mass, &density)?;
        let quadrature = discretize(lo, hi, nodes, mass, &density)?;
        Self::assemble(atoms, quadrature, Some(part))
    }

    /// Atoms plus a piecewise-linear density through `table` points `(k, f)`.
    pub fn with_table(
        atoms: &[(f64, f64)],
        lo: f64,
        hi: f64,
        nodes: usize,
        table: &[(f64, f64)],
    ) -> Result<Self, ModelError> {
        if table.len() < 2 || table.windows(2).any(|w| !(w[1].0 > w[0].0)) {
            return Err(ModelError::Parse(
                "tabulated density needs at least two points with strictly ascending k".into(),
            ));
        }
        let interp = |x: f64| linear_interp(table, x);
        Self::with_density(atoms, lo, hi, nodes, interp)
    }

    fn continuous_prelude(
        atoms: &[(f64, f64)],
        lo: f64,
        hi: f64,
        nodes: usize,
    ) -> Result<(Vec<WeightedDegree>, f64), ModelError> {
        if !(lo.is_finite() && hi.is_finite() && lo >= 0.0 && hi > lo) {
            return Err(ModelError::InvalidSupport { lo, hi });
        }
        if nodes == 0 || nodes > MAX_NODES {
            return Err(ModelError::InvalidNodeCount(nodes));
        }
        let atoms = validate_atoms(atoms)?;
        let atom_mass: f64 = atoms.iter().map(|a| a.weight).sum();
        let mass = 1.0 - atom_mass;
        if !(mass > INPUT_WEIGHT_TOLERANCE) {
            return Err(ModelError::Unnormalized(atom_mass));
        }
        Ok((atoms, mass))
    }

    fn assemble(
        mut atoms: Vec<WeightedDegree>,
        mut quadrature: Vec<WeightedDegree>,
        mut continuous: Option<ContinuousPart>,
    ) -> Result<Self, ModelError> {
        let total: f64 = atoms.iter().chain(&quadrature).map(|a| a.weight).sum();
        if total == 0.0 || !total.is_finite() {
            return Err(ModelError::Empty);
        }
        if (total - 1.0).abs() > INPUT_WEIGHT_TOLERANCE {
            return Err(ModelError::Unnormalized(total));
        }
        for a in atoms.iter_mut().chain(quadrature.iter_mut()) {
            a.weight /= total;
        }
        if let Some(part) = continuous.as_mut() {
            part.mass /= total;
        }
        let mut points: Vec<WeightedDegree> = atoms.iter().chain(&quadrature).copied().collect();
        points.sort_by(|a, b| a.degree.total_cmp(&b.degree));
        let points = dedup(points);
        let kind = match (&continuous, atoms.len()) {
            (Some(_), _) => ModelKind::Continuous,
            (None, 1) => ModelKind::PoissonEquivalent,
            (None, _) => ModelKind::Discrete,
        };
        Ok(Self { atoms, quadrature, points, continuous, kind })
    }

    pub fn kind(&self) -> ModelKind {
        self.kind
    }

    /// Discrete part only.
    pub fn atoms(&self) -> &[WeightedDegree] {
        &self.atoms
    }

    /// Atoms and quadrature nodes together, ascending by degree.
    pub fn points(&self) -> &[WeightedDegree] {
        &self.points
    }

    /// Support of the continuous part and its node count, if any.
    pub fn continuous_support(&self) -> Option<(f64, f64, usize)> {
        self.continuous.as_ref().map(|p| (p.lo, p.hi, p.nodes))
    }

    /// True when the model has no continuous part.
    pub fn is_atomic(&self) -> bool {
        self.continuous.is_none()
    }

    pub fn max_degree(&self) -> f64 {
        let pts = self.points.last().map_or(0.0, |p| p.degree);
        match &self.continuous {
            Some(part) => pts.max(part.hi),
            None => pts,
        }
    }

    pub fn min_degree(&self) -> f64 {
        self.points.first().map_or(0.0, |p| p.degree)
    }

    /// Mean expected degree `c`.
    pub fn mean_degree(&self) -> f64 {
        self.moment(1)
    }

    /// `<k^r>` under the model.
    pub fn moment(&self, r: u32) -> f64 {
        self.points.iter().map(|p| p.weight * p.degree.powi(r as i32)).sum()
    }

    /// Excess degree distribution `q(k) = k p(k) / c`.
    pub fn excess(&self) -> DegreeModel {
        let c = self.mean_degree();
        let reweight = |v: &[WeightedDegree]| -> Vec<WeightedDegree> {
            v.iter().map(|p| WeightedDegree { degree: p.degree, weight: p.weight * p.degree / c }).collect()
        };
        let atoms = reweight(&self.atoms);
        let quadrature = reweight(&self.quadrature);
        let continuous = self.continuous.as_ref().map(|part| {
            let mass = quadrature.iter().map(|p| p.weight).sum();
            let pdf = part.grid.iter().zip(&part.pdf).map(|(x, f)| x * f).collect();
            ContinuousPart::from_table(part.lo, part.hi, part.nodes, mass, part.grid.clone(), pdf)
                .expect("reweighting a valid density by k keeps it valid")
        });
        Self::assemble(atoms, quadrature, continuous).expect("excess of a valid model is valid")
    }

    /// `Γ_p(z) = Σ p_r d_r / (z − d_r)`, the Cauchy transform of `k p(k)`.
    pub fn cauchy_transform(&self, z: Complex64) -> Result<Complex64, ModelError> {
        if z.im == 0.0 {
            if let Some(p) = self.points.iter().find(|p| (z.re - p.degree).abs() < 1e-14 * p.degree) {
                return Err(ModelError::PoleAtAtom { z: z.re, degree: p.degree });
            }
        }
        Ok(self.points.iter().map(|p| p.weight * p.degree / (z - p.degree)).sum())
    }

    /// Draw `n` expected degrees, deterministically for a given `seed`.
    ///
    /// Each vertex consumes one uniform variate: it selects an atom by weight
    /// or, in the continuous part, is mapped through the tabulated inverse CDF.
    pub fn sample_degree_sequence(&self, n: usize, seed: u64) -> Result<DegreeSequence, ModelError> {
        if n == 0 {
            return Err(ModelError::InvalidSequence("n must be at least 1".into()));
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let atom_mass: f64 = self.atoms.iter().map(|a| a.weight).sum();
        let mut cumulative = Vec::with_capacity(self.atoms.len());
        let mut acc = 0.0;
        for a in &self.atoms {
            acc += a.weight;
            cumulative.push(acc);
        }
        let degrees = (0..n)
            .map(|_| {
                let u: f64 = rng.random();
                match &self.continuous {
                    Some(part) if u >= atom_mass => {
                        let v = ((u - atom_mass) / part.mass).clamp(0.0, 1.0);
                        part.quantile(v).max(f64::MIN_POSITIVE)
                    }
                    _ => {
                        let idx = cumulative.partition_point(|&c| c <= u).min(self.atoms.len() - 1);
                        self.atoms[idx].degree
                    }
                }
            })
            .collect();
        DegreeSequence::new(degrees)
    }
}

/// Expected degrees of the vertices of one network.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeSequence {
    degrees: Vec<f64>,
    two_m: f64,
}

impl DegreeSequence {
    pub fn new(degrees: Vec<f64>) -> Result<Self, ModelError> {
        if degrees.is_empty() {
            return Err(ModelError::InvalidSequence("empty sequence".into()));
        }
        if let Some(&bad) = degrees.iter().find(|k| !(k.is_finite() && **k > 0.0)) {
            return Err(ModelError::InvalidDegree(bad));
        }
        let two_m = degrees.iter().sum();
        Ok(Self { degrees, two_m })
    }

    pub fn degrees(&self) -> &[f64] {
        &self.degrees
    }

    pub fn len(&self) -> usize {
        self.degrees.len()
    }

    pub fn is_empty(&self) -> bool {
        self.degrees.is_empty()
    }

    /// Sum of expected degrees, `2m`.
    pub fn two_m(&self) -> f64 {
        self.two_m
    }

    /// Appends a vertex of expected degree `k_n`.
    pub fn attach_hub(&self, k_n: f64) -> Result<Self, ModelError> {
        let mut degrees = self.degrees.clone();
        degrees.push(k_n);
        Self::new(degrees)
    }
}

fn validate_atoms(atoms: &[(f64, f64)]) -> Result<Vec<WeightedDegree>, ModelError> {
    let mut out = Vec::with_capacity(atoms.len());
    for &(degree, weight) in atoms {
        if !(degree.is_finite() && degree > 0.0) {
            return Err(ModelError::InvalidDegree(degree));
        }
        if !(weight > 0.0 && weight <= 1.0) {
            return Err(ModelError::InvalidWeight(weight));
        }
        out.push(WeightedDegree { degree, weight });
    }
    out.sort_by(|a, b| a.degree.total_cmp(&b.degree));
    Ok(dedup(out))
}

fn dedup(sorted: Vec<WeightedDegree>) -> Vec<WeightedDegree> {
    let mut out: Vec<WeightedDegree> = Vec::with_capacity(sorted.len());
    for p in sorted {
        match out.last_mut() {
            Some(last) if (p.degree - last.degree).abs() <= DEDUP_TOLERANCE * p.degree => {
                last.weight += p.weight;
            }
            _ => out.push(p),
        }
    }
    out
}

fn discretize(
    lo: f64,
    hi: f64,
    nodes: usize,
    mass: f64,
    density: &dyn Fn(f64) -> f64,
) -> Result<Vec<WeightedDegree>, ModelError> {
    let mut raw = Vec::with_capacity(nodes);
    for (x, w) in gauss_legendre(nodes, lo, hi) {
        let f = density(x);
        if !(f.is_finite() && f >= 0.0) {
            return Err(ModelError::InvalidDensity(x));
        }
        if f > 0.0 {
            raw.push(WeightedDegree { degree: x, weight: w * f });
        }
    }
    let total: f64 = raw.iter().map(|p| p.weight).sum();
    if !(total > 0.0) {
        return Err(ModelError::EmptyDensity);
    }
    raw.iter_mut().for_each(|p| p.weight *= mass / total);
    Ok(raw)
}

fn linear_interp(table: &[(f64, f64)], x: f64) -> f64 {
    let idx = table.partition_point(|p| p.0 <= x);
    if idx == 0 || idx == table.len() {
        // Outside the table the density is zero, except at the last knot.
        return if idx == table.len() && x == table[table.len() - 1].0 { table[table.len() - 1].1 } else { 0.0 };
    }
    let (x0, f0) = table[idx - 1];
    let (x1, f1) = table[idx];
    f0 + (x - x0) / (x1 - x0) * (f1 - f0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_degree() -> DegreeModel {
        DegreeModel::discrete(&[(50.0, 0.25), (100.0, 0.75)]).unwrap()
    }

    #[test]
    fn mean_degree_examples() {
        assert_eq!(DegreeModel::poisson(100.0).unwrap().mean_degree(), 100.0);
        assert!((two_degree().mean_degree() - 87.5).abs() < 1e-12);
        let uniform = DegreeModel::uniform(10.0, 20.0, DEFAULT_NODES).unwrap();
        assert!((uniform.mean_degree() - 15.0).abs() < 1e-10);
    }

    #[test]
    fn moments() {
        assert!((two_degree().moment(2) - 8125.0).abs() < 1e-9);
        let p = DegreeModel::poisson(7.0).unwrap();
        for r in 1..5 {
            assert!((p.moment(r) - 7f64.powi(r as i32)).abs() < 1e-9);
        }
    }

    #[test]
    fn excess_two_degree() {
        let q = two_degree().excess();
        let atoms = q.atoms();
        assert!((atoms[0].weight - 1.0 / 7.0).abs() < 1e-14);
        assert!((atoms[1].weight - 6.0 / 7.0).abs() < 1e-14);
        let p = two_degree();
        assert!((q.mean_degree() - p.moment(2) / p.moment(1)).abs() < 1e-10);
        let single = DegreeModel::poisson(42.0).unwrap();
        assert_eq!(single.excess().points(), single.points());
    }

    #[test]
    fn cauchy_transform_examples() {
        let p = DegreeModel::poisson(30.0).unwrap();
        let g = p.cauchy_transform(Complex64::new(60.0, 0.0)).unwrap();
        assert!((g.re - 1.0).abs() < 1e-15 && g.im == 0.0);
        let g = two_degree().cauchy_transform(Complex64::new(200.0, 0.0)).unwrap();
        assert!((g.re - (12.5 / 150.0 + 0.75)).abs() < 1e-14);
        let z = Complex64::new(0.0, 1e8);
        let scaled = two_degree().cauchy_transform(z).unwrap() * z;
        assert!(((scaled.re - 87.5) / 87.5).abs() < 1e-6);
    }

    #[test]
    fn cauchy_transform_pole_is_an_error() {
        let err = two_degree().cauchy_transform(Complex64::new(50.0, 0.0)).unwrap_err();
        assert!(matches!(err, ModelError::PoleAtAtom { .. }));
        // off the real axis the same point is fine
        assert!(two_degree().cauchy_transform(Complex64::new(50.0, 1e-3)).is_ok());
    }

    #[test]
    fn construction_errors() {
        assert!(matches!(DegreeModel::discrete(&[(0.0, 1.0)]), Err(ModelError::InvalidDegree(_))));
        assert!(matches!(DegreeModel::discrete(&[(5.0, 1.5)]), Err(ModelError::InvalidWeight(_))));
        assert!(matches!(DegreeModel::discrete(&[(5.0, 0.5)]), Err(ModelError::Unnormalized(_))));
        assert!(matches!(DegreeModel::uniform(20.0, 10.0, 8), Err(ModelError::InvalidSupport { .. })));
        assert!(matches!(DegreeModel::uniform(1.0, f64::INFINITY, 8), Err(ModelError::InvalidSupport { .. })));
        assert!(matches!(DegreeModel::uniform(1.0, 2.0, 0), Err(ModelError::InvalidNodeCount(0))));
        assert!(matches!(DegreeModel::with_density(&[], 1.0, 2.0, 8, |_| 0.0), Err(ModelError::EmptyDensity)));
    }

    #[test]
    fn atoms_are_sorted_and_merged() {
        let m = DegreeModel::discrete(&[(100.0, 0.5), (50.0, 0.25), (100.0 * (1.0 + 1e-12), 0.25)]).unwrap();
        assert_eq!(m.atoms().len(), 2);
        assert_eq!(m.atoms()[0].degree, 50.0);
        assert!((m.atoms()[1].weight - 0.75).abs() < 1e-15);
        assert_eq!(m.kind(), ModelKind::Discrete);
        assert_eq!(DegreeModel::poisson(3.0).unwrap().kind(), ModelKind::PoissonEquivalent);
    }

    #[test]
    fn mixed_model_weights_sum_to_one() {
        let m = DegreeModel::with_density(&[(5.0, 0.3)], 10.0, 20.0, 64, |k| k * k).unwrap();
        assert_eq!(m.kind(), ModelKind::Continuous);
        let total: f64 = m.points().iter().map(|p| p.weight).sum();
        assert!((total - 1.0).abs() < 1e-12);
        let q = m.excess();
        let total: f64 = q.points().iter().map(|p| p.weight).sum();
        assert!((total - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sampling_single_atom_and_determinism() {
        let p = DegreeModel::poisson(100.0).unwrap();
        assert_eq!(p.sample_degree_sequence(5, 17).unwrap().degrees(), &[100.0; 5]);
        let m = two_degree();
        let a = m.sample_degree_sequence(1000, 3).unwrap();
        let b = m.sample_degree_sequence(1000, 3).unwrap();
        assert_eq!(a, b);
        assert_ne!(a, m.sample_degree_sequence(1000, 4).unwrap());
    }

    #[test]
    fn sampling_continuous_stays_in_support() {
        let m = DegreeModel::with_density(&[(3.0, 0.5)], 10.0, 20.0, 32, |k| 20.0 - k).unwrap();
        let seq = m.sample_degree_sequence(20_000, 9).unwrap();
        let cont: Vec<f64> = seq.degrees().iter().copied().filter(|&k| k != 3.0).collect();
        assert!(cont.iter().all(|&k| (10.0..=20.0).contains(&k)));
        let frac = cont.len() as f64 / 20_000.0;
        assert!((frac - 0.5).abs() < 0.02);
        // density 20-k on [10,20] has mean 10 + 10/3
        let mean = cont.iter().sum::<f64>() / cont.len() as f64;
        assert!((mean - 13.3333).abs() < 0.1, "mean {mean}");
    }

    #[test]
    fn tabulated_density_interpolates() {
        let m = DegreeModel::with_table(&[], 0.0, 10.0, 128, &[(0.0, 0.0), (10.0, 1.0)]).unwrap();
        // triangular density 2k/100 on [0,10]: mean 20/3
        assert!((m.mean_degree() - 20.0 / 3.0).abs() < 1e-9);
        assert!(DegreeModel::with_table(&[], 0.0, 10.0, 8, &[(1.0, 1.0)]).is_err());
    }

    #[test]
    fn degree_sequence_and_hub() {
        let seq = DegreeSequence::new(vec![100.0; 10_000]).unwrap();
        let hubbed = seq.attach_hub(400.0).unwrap();
        assert_eq!(hubbed.len(), 10_001);
        assert_eq!(hubbed.two_m(), 1e6 + 400.0);
        assert!(DegreeSequence::new(vec![1.0, -2.0]).is_err());
        assert!(DegreeSequence::new(vec![]).is_err());
    }
}
