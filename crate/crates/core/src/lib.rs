//! Spectra of random graphs with arbitrary expected degrees.
//!
//! The analytic side ([`spectrum`]) solves the self-consistent equation for
//! the modularity and adjacency spectra of networks whose edge counts are
//! independent Poisson variables with means `k_i k_j / 2m`. The Monte Carlo
//! side ([`sampler`], [`eigen`], [`empirical`]) draws such networks and
//! measures the same quantities.

// `!(a < b)` is used deliberately so NaN inputs take the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod degree_model;
pub mod eigen;
pub mod empirical;
pub mod manifest;
pub mod model_file;
pub mod poly;
pub mod quadrature;
pub mod sampler;
pub mod spectrum;

pub use degree_model::{DegreeModel, DegreeSequence, ModelError, ModelKind, WeightedDegree};
pub use eigen::{dense_symmetric_eigen, top_eigenpair, DenseMatrix, EigenReport, LinearOperator, MatrixKind};
pub use empirical::EnsembleHistogram;
pub use manifest::RunManifest;
pub use model_file::{parse_model, ModelSpec};
pub use sampler::{sample_network, EdgeList, SampledNetwork};
pub use spectrum::{HSolution, HubPrediction, SpectralCurve, SpectrumError};
