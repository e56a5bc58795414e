//! Monte Carlo ensembles of sampled networks.
//!
//! Replicate `r` of a run with base seed `s` uses the seed `mix_seed(s, r)`;
//! its degree sequence is drawn with `mix_seed(seed_r, 0)` and its edges with
//! `mix_seed(seed_r, 1)`. Replicates run in parallel and are always pooled in
//! replicate order, so results do not depend on scheduling.

use rayon::prelude::*;
use thiserror::Error;

use crate::degree_model::{DegreeModel, ModelError};
use crate::eigen::{dense_symmetric_eigen, top_eigenpair, EigenError, LanczosOptions, LinearOperator, MatrixKind};
use crate::sampler::{mix_seed, sample_network, SampleError, SampledNetwork};
use crate::spectrum::{band_edges, density_grid, SpectrumError};

/// Margin added on both sides of the analytic band for default histograms.
pub const DEFAULT_RANGE_MARGIN: f64 = 2.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EmpiricalError {
    #[error(transparent)]
    Model(#[from] ModelError),
    #[error(transparent)]
    Sample(#[from] SampleError),
    #[error(transparent)]
    Eigen(#[from] EigenError),
    #[error(transparent)]
    Spectrum(#[from] SpectrumError),
    #[error("{0}")]
    Invalid(String),
}

/// Seed of replicate `r`.
pub fn replicate_seed(base_seed: u64, r: usize) -> u64 {
    mix_seed(base_seed, r as u64)
}

/// Draws replicate `r`: `n` vertices from the model followed by one vertex
/// per entry of `hubs`.
pub fn sample_replicate(
    model: &DegreeModel,
    n: usize,
    base_seed: u64,
    r: usize,
    hubs: &[f64],
) -> Result<SampledNetwork, EmpiricalError> {
    let seed = replicate_seed(base_seed, r);
    let mut degrees = model.sample_degree_sequence(n, mix_seed(seed, 0))?;
    for &k in hubs {
        degrees = degrees.attach_hub(k)?;
    }
    Ok(sample_network(&degrees, mix_seed(seed, 1))?)
}

fn check_counts(n: usize, replicates: usize) -> Result<(), EmpiricalError> {
    if n < 2 {
        return Err(EmpiricalError::Invalid(format!("n must be at least 2, got {n}")));
    }
    if replicates == 0 {
        return Err(EmpiricalError::Invalid("replicates must be at least 1".into()));
    }
    Ok(())
}

/// Full ascending spectra of every replicate, in replicate order.
pub fn ensemble_spectra(
    model: &DegreeModel,
    n: usize,
    replicates: usize,
    base_seed: u64,
    kind: MatrixKind,
) -> Result<Vec<Vec<f64>>, EmpiricalError> {
    check_counts(n, replicates)?;
    (0..replicates)
        .into_par_iter()
        .map(|r| {
            let net = sample_replicate(model, n, base_seed, r, &[])?;
            let matrix = match kind {
                MatrixKind::Adjacency => net.densify_adjacency()?,
                MatrixKind::Modularity => net.densify_modularity()?,
            };
            Ok(dense_symmetric_eigen(&matrix, Some(kind), false)?.eigenvalues)
        })
        .collect()
}

/// Pooled eigenvalue histogram of an ensemble.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleHistogram {
    /// `bins + 1` ascending, equally spaced edges.
    pub bin_edges: Vec<f64>,
    /// Normalized so that `Σ density·width = 1` over the in-range values.
    pub density: Vec<f64>,
    pub replicates: usize,
    pub n: usize,
    pub base_seed: u64,
    /// Values outside the histogram range (for example an isolated leading
    /// adjacency eigenvalue).
    pub dropped: usize,
}

impl EnsembleHistogram {
    /// Histogram of `values` over `bins` equal bins spanning `range`.
    pub fn from_values(values: &[f64], bins: usize, range: (f64, f64)) -> Result<Self, EmpiricalError> {
        let (lo, hi) = range;
        if bins == 0 {
            return Err(EmpiricalError::Invalid("bins must be at least 1".into()));
        }
        if !(lo.is_finite() && hi.is_finite() && lo < hi) {
            return Err(EmpiricalError::Invalid(format!("invalid histogram range [{lo}, {hi}]")));
        }
        let width = (hi - lo) / bins as f64;
        let bin_edges: Vec<f64> = (0..=bins).map(|i| if i == bins { hi } else { lo + width * i as f64 }).collect();
        let mut counts = vec![0usize; bins];
        let mut dropped = 0;
        for &v in values {
            if !(lo..=hi).contains(&v) {
                dropped += 1;
                continue;
            }
            let idx = (((v - lo) / width) as usize).min(bins - 1);
            counts[idx] += 1;
        }
        let kept = (values.len() - dropped).max(1) as f64;
        let density = counts.iter().map(|&c| c as f64 / (kept * width)).collect();
        Ok(Self { bin_edges, density, replicates: 1, n: values.len(), base_seed: 0, dropped })
    }

    pub fn bins(&self) -> usize {
        self.density.len()
    }

    pub fn width(&self) -> f64 {
        (self.bin_edges[self.bins()] - self.bin_edges[0]) / self.bins() as f64
    }

    /// `Σ_b |h_b − ρ̄_b| · width`, where `ρ̄_b` is the analytic density
    /// averaged over bin `b` by the trapezoid rule on `sub` sub-intervals.
    pub fn l1_distance(&self, model: &DegreeModel, sub: usize) -> Result<f64, EmpiricalError> {
        let sub = sub.max(1);
        let (lo, hi) = (self.bin_edges[0], self.bin_edges[self.bins()]);
        let curve = density_grid(model, lo, hi, self.bins() * sub + 1, None)?;
        let width = self.width();
        let mut total = 0.0;
        for (b, h) in self.density.iter().enumerate() {
            let seg = b * sub..=(b + 1) * sub;
            let pts: Vec<usize> = seg.collect();
            let integral: f64 = pts
                .windows(2)
                .map(|w| 0.5 * (curve.rho[w[0]] + curve.rho[w[1]]) * (curve.z[w[1]] - curve.z[w[0]]))
                .sum();
            total += (h - integral / width).abs() * width;
        }
        Ok(total)
    }

    /// CSV with header `bin_lo,bin_hi,density`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("bin_lo,bin_hi,density\n");
        for (b, d) in self.density.iter().enumerate() {
            out.push_str(&format!("{},{},{}\n", self.bin_edges[b], self.bin_edges[b + 1], d));
        }
        out
    }
}

/// Histogram range used when none is given: the analytic band widened by
/// [`DEFAULT_RANGE_MARGIN`] on both sides.
pub fn default_range(model: &DegreeModel) -> Result<(f64, f64), EmpiricalError> {
    let (lo, hi) = band_edges(model)?;
    Ok((lo - DEFAULT_RANGE_MARGIN, hi + DEFAULT_RANGE_MARGIN))
}

/// Pooled spectra of `replicates` networks as a normalized histogram.
pub fn empirical_density(
    model: &DegreeModel,
    n: usize,
    replicates: usize,
    bins: usize,
    base_seed: u64,
    kind: MatrixKind,
    range: Option<(f64, f64)>,
) -> Result<EnsembleHistogram, EmpiricalError> {
    let range = match range {
        Some(r) => r,
        None => default_range(model)?,
    };
    // validate the histogram arguments before the expensive part
    EnsembleHistogram::from_values(&[], bins, range)?;
    let spectra = ensemble_spectra(model, n, replicates, base_seed, kind)?;
    let pooled: Vec<f64> = spectra.into_iter().flatten().collect();
    let mut hist = EnsembleHistogram::from_values(&pooled, bins, range)?;
    hist.replicates = replicates;
    hist.n = n;
    hist.base_seed = base_seed;
    Ok(hist)
}

/// Mean and standard error over replicates.
#[derive(Debug, Clone, PartialEq)]
pub struct EnsembleStats {
    pub mean: f64,
    /// Zero for a single replicate.
    pub stderr: f64,
    pub values: Vec<f64>,
}

impl EnsembleStats {
    pub fn from_values(values: Vec<f64>) -> Self {
        let r = values.len() as f64;
        let mean = values.iter().sum::<f64>() / r;
        let stderr = if values.len() > 1 {
            let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (r - 1.0);
            (var / r).sqrt()
        } else {
            0.0
        };
        Self { mean, stderr, values }
    }
}

fn top_of(net: &SampledNetwork, kind: MatrixKind) -> Result<(f64, Vec<f64>), EmpiricalError> {
    let opts = LanczosOptions::default();
    let op: &dyn LinearOperator = match kind {
        MatrixKind::Adjacency => &net.adjacency(),
        MatrixKind::Modularity => &net.modularity(),
    };
    Ok(top_eigenpair(op, &opts)?)
}

/// Largest eigenvalue across replicates, each with `hubs` appended.
pub fn ensemble_leading(
    model: &DegreeModel,
    n: usize,
    replicates: usize,
    base_seed: u64,
    kind: MatrixKind,
    hubs: &[f64],
) -> Result<EnsembleStats, EmpiricalError> {
    check_counts(n, replicates)?;
    let values = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let net = sample_replicate(model, n, base_seed, r, hubs)?;
            Ok(top_of(&net, kind)?.0)
        })
        .collect::<Result<Vec<f64>, EmpiricalError>>()?;
    Ok(EnsembleStats::from_values(values))
}

/// Squared elements of the leading modularity eigenvector around a hub.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HubVectorStats {
    pub eigenvalue: f64,
    pub vn_sq: f64,
    /// Mean over vertices sharing an edge with the hub.
    pub neighbor_mean_sq: f64,
    /// Mean over all other vertices except the hub.
    pub bulk_mean_sq: f64,
}

/// Localization of the leading modularity eigenvector on `hub_index`.
pub fn hub_vector_stats(net: &SampledNetwork, hub_index: usize) -> Result<HubVectorStats, EmpiricalError> {
    if hub_index >= net.n() {
        return Err(EmpiricalError::Invalid(format!("hub index {hub_index} out of range")));
    }
    let (eigenvalue, v) = top_of(net, MatrixKind::Modularity)?;
    let neighbors = net.neighbors(hub_index);
    let mut is_neighbor = vec![false; net.n()];
    neighbors.iter().for_each(|&j| is_neighbor[j] = true);
    let (mut nb_sum, mut nb_count, mut bulk_sum, mut bulk_count) = (0.0, 0usize, 0.0, 0usize);
    for (j, x) in v.iter().enumerate() {
        if j == hub_index {
            continue;
        }
        if is_neighbor[j] {
            nb_sum += x * x;
            nb_count += 1;
        } else {
            bulk_sum += x * x;
            bulk_count += 1;
        }
    }
    let mean = |s: f64, c: usize| if c > 0 { s / c as f64 } else { 0.0 };
    Ok(HubVectorStats {
        eigenvalue,
        vn_sq: v[hub_index] * v[hub_index],
        neighbor_mean_sq: mean(nb_sum, nb_count),
        bulk_mean_sq: mean(bulk_sum, bulk_count),
    })
}

/// Ensemble averages of [`hub_vector_stats`] for one hub of degree `k_n`.
#[derive(Debug, Clone, PartialEq)]
pub struct HubEnsemble {
    pub eigenvalue: EnsembleStats,
    pub vn_sq: EnsembleStats,
    pub neighbor_mean_sq: EnsembleStats,
    pub bulk_mean_sq: EnsembleStats,
}

pub fn ensemble_hub(
    model: &DegreeModel,
    n: usize,
    replicates: usize,
    base_seed: u64,
    k_n: f64,
) -> Result<HubEnsemble, EmpiricalError> {
    check_counts(n, replicates)?;
    let stats = (0..replicates)
        .into_par_iter()
        .map(|r| {
            let net = sample_replicate(model, n, base_seed, r, &[k_n])?;
            hub_vector_stats(&net, n)
        })
        .collect::<Result<Vec<_>, EmpiricalError>>()?;
    let pick = |f: fn(&HubVectorStats) -> f64| EnsembleStats::from_values(stats.iter().map(f).collect());
    Ok(HubEnsemble {
        eigenvalue: pick(|s| s.eigenvalue),
        vn_sq: pick(|s| s.vn_sq),
        neighbor_mean_sq: pick(|s| s.neighbor_mean_sq),
        bulk_mean_sq: pick(|s| s.bulk_mean_sq),
    })
}
