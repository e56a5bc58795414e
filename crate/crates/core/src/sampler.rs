//! Random networks with independent Poisson edge counts.
//!
//! Vertices `i < j` are joined by `Poisson(k_i k_j / 2m)` edges and vertex `i`
//! carries `Poisson(k_i² / 4m)` self-loops, each self-loop adding 2 to its
//! degree (so `A_ii` is twice the loop count). The sampler draws the total
//! edge count `M ~ Poisson(m)` and then places each edge by picking both
//! endpoints independently with probability `k_i / 2m`; Poisson thinning makes
//! the per-pair counts exactly the independent Poisson variables above.

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::Poisson;
use thiserror::Error;

use crate::degree_model::DegreeSequence;
use crate::eigen::{dense_cap, DenseMatrix, LinearOperator};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SampleError {
    #[error("a network needs at least 2 vertices, got {0}")]
    TooFewVertices(usize),
    #[error("expected pair multiplicity {mean} for vertex {vertex} exceeds n = {n}")]
    MeanOverflow { vertex: usize, mean: f64, n: usize },
    #[error("dimension {n} exceeds the dense cap {cap}")]
    DenseCap { n: usize, cap: usize },
    #[error("invalid edge list: {0}")]
    Parse(String),
    #[error("sampling failed: {0}")]
    Distribution(String),
}

/// SplitMix64 finalizer applied to `a + φ·(b + 1)`, with `φ` the 64-bit golden
/// ratio constant. Used to derive independent seeds from `(seed, index)`.
pub fn mix_seed(a: u64, b: u64) -> u64 {
    let mut z = a.wrapping_add(0x9E37_79B9_7F4A_7C15_u64.wrapping_mul(b.wrapping_add(1)));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// One realization of the model.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledNetwork {
    degrees: DegreeSequence,
    /// `(i, j, multiplicity)` with `i ≤ j`, sorted, multiplicity ≥ 1. For
    /// `i == j` the multiplicity counts self-loops.
    edges: Vec<(usize, usize, u32)>,
    seed: u64,
}

/// Samples a network with the given expected degrees.
pub fn sample_network(degrees: &DegreeSequence, seed: u64) -> Result<SampledNetwork, SampleError> {
    let n = degrees.len();
    if n < 2 {
        return Err(SampleError::TooFewVertices(n));
    }
    let two_m = degrees.two_m();
    let (vertex, k_max) =
        degrees.degrees().iter().copied().enumerate().max_by(|a, b| a.1.total_cmp(&b.1)).expect("non-empty");
    let mean = k_max * k_max / two_m;
    if mean > n as f64 {
        return Err(SampleError::MeanOverflow { vertex, mean, n });
    }

    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let count =
        Poisson::new(0.5 * two_m).map_err(|e| SampleError::Distribution(e.to_string()))?.sample(&mut rng) as usize;
    let endpoint = WeightedIndex::new(degrees.degrees()).map_err(|e| SampleError::Distribution(e.to_string()))?;
    let mut pairs: Vec<(u32, u32)> = (0..count)
        .map(|_| {
            let a = endpoint.sample(&mut rng) as u32;
            let b = endpoint.sample(&mut rng) as u32;
            (a.min(b), a.max(b))
        })
        .collect();
    pairs.sort_unstable();
    let mut edges: Vec<(usize, usize, u32)> = Vec::new();
    for (a, b) in pairs {
        match edges.last_mut() {
            Some(last) if last.0 == a as usize && last.1 == b as usize => last.2 += 1,
            _ => edges.push((a as usize, b as usize, 1)),
        }
    }
    Ok(SampledNetwork { degrees: degrees.clone(), edges, seed })
}

impl SampledNetwork {
    pub fn n(&self) -> usize {
        self.degrees.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Expected degrees the network was drawn from.
    pub fn degrees(&self) -> &DegreeSequence {
        &self.degrees
    }

    /// `Σ k_i`.
    pub fn two_m_expected(&self) -> f64 {
        self.degrees.two_m()
    }

    pub fn edges(&self) -> &[(usize, usize, u32)] {
        &self.edges
    }

    /// `A_ij` for `i ≤ j` or `j ≤ i`.
    pub fn multiplicity(&self, i: usize, j: usize) -> u32 {
        let key = (i.min(j), i.max(j));
        self.edges.binary_search_by(|e| (e.0, e.1).cmp(&key)).map_or(0, |idx| self.edges[idx].2)
    }

    /// Row sums of `A`, self-loops counted twice.
    pub fn realized_degrees(&self) -> Vec<u64> {
        let mut out = vec![0u64; self.n()];
        for &(i, j, m) in &self.edges {
            out[i] += m as u64;
            out[j] += m as u64;
        }
        out
    }

    /// Vertices joined to `v` by at least one edge, excluding `v` itself.
    pub fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .edges
            .iter()
            .filter(|e| e.0 != e.1 && (e.0 == v || e.1 == v))
            .map(|e| if e.0 == v { e.1 } else { e.0 })
            .collect();
        out.sort_unstable();
        out
    }

    pub fn adjacency(&self) -> AdjacencyView<'_> {
        AdjacencyView { net: self }
    }

    pub fn modularity(&self) -> ModularityView<'_> {
        ModularityView { net: self, normalized: false }
    }

    /// `D^{-1/2} B D^{-1/2}` with `D` the expected degrees.
    pub fn normalized_modularity(&self) -> ModularityView<'_> {
        ModularityView { net: self, normalized: true }
    }

    fn check_cap(&self) -> Result<(), SampleError> {
        let cap = dense_cap();
        if self.n() > cap {
            return Err(SampleError::DenseCap { n: self.n(), cap });
        }
        Ok(())
    }

    pub fn densify_adjacency(&self) -> Result<DenseMatrix, SampleError> {
        self.check_cap()?;
        let mut a = DenseMatrix::zeros(self.n());
        for &(i, j, m) in &self.edges {
            if i == j {
                a.add(i, i, 2.0 * m as f64);
            } else {
                a.add(i, j, m as f64);
                a.add(j, i, m as f64);
            }
        }
        Ok(a)
    }

    /// `B_ij = A_ij − k_i k_j / 2m`.
    pub fn densify_modularity(&self) -> Result<DenseMatrix, SampleError> {
        let mut b = self.densify_adjacency()?;
        let k = self.degrees.degrees();
        let two_m = self.two_m_expected();
        let n = self.n();
        for i in 0..n {
            for j in 0..n {
                b.add(i, j, -k[i] * k[j] / two_m);
            }
        }
        Ok(b)
    }

    pub fn edge_list(&self) -> EdgeList {
        EdgeList { n: self.n(), seed: self.seed, two_m: self.two_m_expected(), edges: self.edges.clone() }
    }
}

fn apply_adjacency(net: &SampledNetwork, x: &[f64], y: &mut [f64]) {
    y.iter_mut().for_each(|v| *v = 0.0);
    for &(i, j, m) in &net.edges {
        let m = m as f64;
        if i == j {
            y[i] += 2.0 * m * x[i];
        } else {
            y[i] += m * x[j];
            y[j] += m * x[i];
        }
    }
}

/// `x ↦ A x` without forming `A`.
#[derive(Debug, Clone, Copy)]
pub struct AdjacencyView<'a> {
    net: &'a SampledNetwork,
}

impl LinearOperator for AdjacencyView<'_> {
    fn dim(&self) -> usize {
        self.net.n()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        apply_adjacency(self.net, x, y);
    }
}

/// `x ↦ B x = A x − k (kᵀ x) / 2m`, optionally normalized by `D^{-1/2}` on
/// both sides.
#[derive(Debug, Clone, Copy)]
pub struct ModularityView<'a> {
    net: &'a SampledNetwork,
    normalized: bool,
}

impl LinearOperator for ModularityView<'_> {
    fn dim(&self) -> usize {
        self.net.n()
    }

    fn apply(&self, x: &[f64], y: &mut [f64]) {
        let k = self.net.degrees.degrees();
        let two_m = self.net.two_m_expected();
        if self.normalized {
            let scaled: Vec<f64> = x.iter().zip(k).map(|(xi, ki)| xi / ki.sqrt()).collect();
            apply_adjacency(self.net, &scaled, y);
            let kx: f64 = scaled.iter().zip(k).map(|(a, b)| a * b).sum();
            for (yi, ki) in y.iter_mut().zip(k) {
                *yi = (*yi - ki * kx / two_m) / ki.sqrt();
            }
        } else {
            apply_adjacency(self.net, x, y);
            let kx: f64 = x.iter().zip(k).map(|(a, b)| a * b).sum();
            for (yi, ki) in y.iter_mut().zip(k) {
                *yi -= ki * kx / two_m;
            }
        }
    }
}

/// Text form of a sampled network.
///
/// ```text
/// # n=4 seed=7 two_m=12
/// 0 1 2
/// 1 3 1
/// 2 2 1
/// ```
///
/// Lines after the header are `i j multiplicity` with `i ≤ j < n`, sorted and
/// without repeated pairs.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeList {
    pub n: usize,
    pub seed: u64,
    pub two_m: f64,
    pub edges: Vec<(usize, usize, u32)>,
}

impl EdgeList {
    pub fn to_text(&self) -> String {
        let mut out = format!("# n={} seed={} two_m={}\n", self.n, self.seed, self.two_m);
        for (i, j, m) in &self.edges {
            out.push_str(&format!("{i} {j} {m}\n"));
        }
        out
    }

    pub fn parse(text: &str) -> Result<Self, SampleError> {
        let err = |line: usize, msg: &str| SampleError::Parse(format!("line {line}: {msg}"));
        let mut lines = text.lines().enumerate();
        let (_, header) = lines.next().ok_or_else(|| err(1, "missing header"))?;
        let fields = header.strip_prefix("# ").ok_or_else(|| err(1, "header must start with '# '"))?;
        let mut parts = fields.split(' ');
        let mut field = |name: &str| -> Result<&str, SampleError> {
            parts
                .next()
                .and_then(|p| p.strip_prefix(name))
                .and_then(|p| p.strip_prefix('='))
                .ok_or_else(|| err(1, &format!("expected {name}=")))
        };
        let n: usize = field("n")?.parse().map_err(|_| err(1, "bad n"))?;
        let seed: u64 = field("seed")?.parse().map_err(|_| err(1, "bad seed"))?;
        let two_m: f64 = field("two_m")?.parse().map_err(|_| err(1, "bad two_m"))?;
        if parts.next().is_some() {
            return Err(err(1, "trailing header fields"));
        }
        if !(two_m.is_finite() && two_m > 0.0) {
            return Err(err(1, "two_m must be positive and finite"));
        }
        let mut edges: Vec<(usize, usize, u32)> = Vec::new();
        for (idx, line) in lines {
            let lineno = idx + 1;
            let mut it = line.split(' ');
            let mut num = || it.next().ok_or_else(|| err(lineno, "expected three fields"));
            let i: usize = num()?.parse().map_err(|_| err(lineno, "bad vertex"))?;
            let j: usize = num()?.parse().map_err(|_| err(lineno, "bad vertex"))?;
            let m: u32 = num()?.parse().map_err(|_| err(lineno, "bad multiplicity"))?;
            if it.next().is_some() {
                return Err(err(lineno, "expected three fields"));
            }
            if i > j || j >= n {
                return Err(err(lineno, "need i <= j < n"));
            }
            if m == 0 {
                return Err(err(lineno, "multiplicity must be positive"));
            }
            if edges.last().is_some_and(|last| (last.0, last.1) >= (i, j)) {
                return Err(err(lineno, "pairs must be strictly ascending"));
            }
            edges.push((i, j, m));
        }
        Ok(Self { n, seed, two_m, edges })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::eigen::dense_symmetric_eigen;

    fn small_net(seed: u64) -> SampledNetwork {
        let k: Vec<f64> = (0..60).map(|i| 5.0 + (i % 7) as f64 * 3.0).collect();
        sample_network(&DegreeSequence::new(k).unwrap(), seed).unwrap()
    }

    #[test]
    fn deterministic_per_seed() {
        assert_eq!(small_net(5), small_net(5));
        assert_ne!(small_net(5).edges(), small_net(6).edges());
    }

    #[test]
    fn edges_are_canonical() {
        let net = small_net(1);
        assert!(net.edges().windows(2).all(|w| (w[0].0, w[0].1) < (w[1].0, w[1].1)));
        assert!(net.edges().iter().all(|&(i, j, m)| i <= j && j < net.n() && m >= 1));
        let total: u64 = net.realized_degrees().iter().sum();
        let stored: u64 = net.edges().iter().map(|e| 2 * e.2 as u64).sum();
        assert_eq!(total, stored);
    }

    #[test]
    fn views_match_dense_matrices() {
        let net = small_net(2);
        let x: Vec<f64> = (0..net.n()).map(|i| (i as f64 * 0.7).sin()).collect();
        let mut y = vec![0.0; net.n()];
        for (view, dense) in [
            (&net.adjacency() as &dyn LinearOperator, net.densify_adjacency().unwrap()),
            (&net.modularity() as &dyn LinearOperator, net.densify_modularity().unwrap()),
        ] {
            view.apply(&x, &mut y);
            let mut z = vec![0.0; net.n()];
            dense.apply(&x, &mut z);
            for (a, b) in y.iter().zip(&z) {
                assert!((a - b).abs() < 1e-12 * b.abs().max(1.0));
            }
        }
    }

    #[test]
    fn normalized_view_is_similar_scaling() {
        let net = small_net(3);
        let k = net.degrees().degrees().to_vec();
        let b = net.densify_modularity().unwrap();
        let x: Vec<f64> = (0..net.n()).map(|i| (i as f64).cos()).collect();
        let mut y = vec![0.0; net.n()];
        net.normalized_modularity().apply(&x, &mut y);
        for i in 0..net.n() {
            let expected: f64 = (0..net.n()).map(|j| b.get(i, j) * x[j] / (k[i] * k[j]).sqrt()).sum();
            assert!((y[i] - expected).abs() < 1e-12);
        }
    }

    #[test]
    fn modularity_row_sums() {
        let net = small_net(4);
        let b = net.densify_modularity().unwrap();
        let realized = net.realized_degrees();
        for (i, (&d, &k)) in realized.iter().zip(net.degrees().degrees()).enumerate() {
            let row: f64 = b.row(i).iter().sum();
            assert!((row - (d as f64 - k)).abs() < 1e-9);
        }
        let r = dense_symmetric_eigen(&b, None, false).unwrap();
        assert_eq!(r.eigenvalues.len(), net.n());
    }

    #[test]
    fn rejects_bad_inputs() {
        assert!(matches!(
            sample_network(&DegreeSequence::new(vec![3.0]).unwrap(), 0),
            Err(SampleError::TooFewVertices(1))
        ));
        let seq = DegreeSequence::new(vec![1e6, 1.0, 1.0]).unwrap();
        assert!(matches!(sample_network(&seq, 0), Err(SampleError::MeanOverflow { .. })));
    }

    #[test]
    fn edge_list_round_trip() {
        let net = small_net(9);
        let list = net.edge_list();
        let text = list.to_text();
        assert!(text.starts_with("# n=60 seed=9 two_m="));
        assert_eq!(EdgeList::parse(&text).unwrap(), list);
        for bad in [
            "",
            "0 1 1\n",
            "# n=2 seed=1 two_m=4\n1 0 1\n",
            "# n=2 seed=1 two_m=4\n0 2 1\n",
            "# n=2 seed=1 two_m=4\n0 1 0\n",
            "# n=3 seed=1 two_m=4\n0 1 1\n0 1 1\n",
            "# n=2 seed=1 two_m=nan\n",
            "# n=2 seed=1\n",
            "# n=2 seed=1 two_m=4 x=1\n",
            "# n=2 seed=1 two_m=4\n0 1\n",
        ] {
            assert!(EdgeList::parse(bad).is_err(), "accepted {bad:?}");
        }
    }

    #[test]
    fn mix_seed_spreads_indices() {
        let seeds: Vec<u64> = (0..100).map(|r| mix_seed(42, r)).collect();
        let mut sorted = seeds.clone();
        sorted.sort_unstable();
        sorted.dedup();
        assert_eq!(sorted.len(), 100);
        assert_ne!(mix_seed(42, 0), mix_seed(43, 0));
    }
}
