//! Independent oracles for the analytic and numerical routines.

#![allow(clippy::needless_range_loop)]

use netspectra::eigen::{dense_symmetric_eigen, top_eigenpair, DenseMatrix, LanczosOptions};
use netspectra::empirical::sample_replicate;
use netspectra::spectrum::{
    band_edges, critical_hub_degree, density_grid, hub_eigenvalues, solve_h, spectral_density, stieltjes_g,
};
use netspectra::{DegreeModel, MatrixKind};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Cyclic Jacobi rotations; slow but obviously correct.
fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-26 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = c * akp - s * akq;
                    a[k][q] = s * akp + c * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = c * apk - s * aqk;
                    a[q][k] = s * apk + c * aqk;
                }
            }
        }
    }
    let mut d: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    d.sort_by(f64::total_cmp);
    d
}

fn random_rows(n: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = vec![vec![0.0; n]; n];
    for i in 0..n {
        for j in 0..=i {
            let v = rng.random_range(-1.0..1.0);
            rows[i][j] = v;
            rows[j][i] = v;
        }
    }
    rows
}

#[test]
fn dense_solver_matches_jacobi_oracle() {
    for seed in 0..5 {
        let rows = random_rows(50, seed);
        let oracle = jacobi_eigenvalues(rows.clone());
        let m = DenseMatrix::from_rows(&rows);
        let report = dense_symmetric_eigen(&m, None, false).unwrap();
        let diff = oracle.iter().zip(&report.eigenvalues).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(diff < 1e-8, "seed {seed}: max diff {diff:e}");
    }
}

#[test]
fn poisson_density_is_semicircle() {
    let c = 100.0;
    let model = DegreeModel::poisson(c).unwrap();
    let curve = density_grid(&model, -25.0, 25.0, 2001, Some(1e-6)).unwrap();
    for (&z, &rho) in curve.z.iter().zip(&curve.rho) {
        let exact = (4.0 * c - z * z).max(0.0).sqrt() / (2.0 * std::f64::consts::PI * c);
        assert!((rho - exact).abs() < 1e-3, "z = {z}: {rho} vs {exact}");
    }
}

#[test]
fn poisson_stieltjes_transform_is_closed_form() {
    let c = 64.0;
    let model = DegreeModel::poisson(c).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for _ in 0..100 {
        let z = Complex64::new(rng.random_range(-30.0..30.0), rng.random_range(1e-3..10.0));
        let root = (z - 2.0 * c.sqrt()).sqrt() * (z + 2.0 * c.sqrt()).sqrt();
        let exact = (z - root) / (2.0 * c);
        let g = stieltjes_g(&model, z).unwrap();
        assert!((g - exact).norm() < 1e-10 * exact.norm().max(1.0), "z = {z}");
    }
}

fn random_models(count: usize, seed: u64) -> Vec<DegreeModel> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..count)
        .map(|_| {
            let atoms: Vec<(f64, f64)> = (0..rng.random_range(1..=5))
                .map(|_| (rng.random_range(20.0..300.0), rng.random_range(0.1..1.0)))
                .collect();
            let total: f64 = atoms.iter().map(|a| a.1).sum();
            let atoms: Vec<(f64, f64)> = atoms.into_iter().map(|(d, w)| (d, w / total)).collect();
            DegreeModel::discrete(&atoms).unwrap()
        })
        .collect()
}

#[test]
fn composition_identity_holds() {
    let mut models = random_models(6, 11);
    models.push(DegreeModel::uniform(40.0, 160.0, 64).unwrap());
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for model in &models {
        let c = model.mean_degree();
        let scale = 2.0 * model.moment(2).sqrt();
        for _ in 0..100 {
            let z = Complex64::new(rng.random_range(-scale..scale), rng.random_range(1e-2..scale));
            let h = solve_h(model, z).unwrap().h;
            let lhs = c * h * h;
            let rhs = model.cauchy_transform(z / h).unwrap();
            assert!((lhs - rhs).norm() < 1e-9 * lhs.norm().max(1.0), "z = {z}: {lhs} vs {rhs}");
        }
    }
}

#[test]
fn density_vanishes_as_square_root_at_the_edge() {
    let model = DegreeModel::discrete(&[(50.0, 0.25), (100.0, 0.75)]).unwrap();
    let (_, edge) = band_edges(&model).unwrap();
    let rho = |eps: f64| spectral_density(&model, edge - eps, 1e-12).unwrap();
    let (e1, e2) = (1e-2, 1e-4);
    let slope = (rho(e1) / rho(e2)).ln() / (e1 / e2).ln();
    assert!((slope - 0.5).abs() < 0.02, "slope {slope}");
    assert!(spectral_density(&model, edge + 1e-3, 1e-12).unwrap() < 1e-6);
}

#[test]
fn detached_hub_eigenvalue_grows_with_hub_degree() {
    let model = DegreeModel::discrete(&[(50.0, 0.25), (100.0, 0.75)]).unwrap();
    let k_crit = critical_hub_degree(&model).unwrap();
    let (_, edge) = band_edges(&model).unwrap();
    let mut last = edge;
    for i in 1..=20 {
        let k = k_crit * (1.0 + 0.1 * i as f64);
        let z = hub_eigenvalues(&model, k).unwrap().z_plus.expect("above critical degree");
        assert!(z > last, "k = {k}: {z} <= {last}");
        last = z;
    }
    let just_above = hub_eigenvalues(&model, k_crit * (1.0 + 1e-6)).unwrap().z_plus.unwrap();
    assert!((just_above - edge).abs() < 1e-3 * edge);
}

#[test]
fn modularity_spectrum_interleaves_adjacency_spectrum() {
    let models = [
        DegreeModel::poisson(30.0).unwrap(),
        DegreeModel::discrete(&[(10.0, 0.5), (60.0, 0.5)]).unwrap(),
        DegreeModel::uniform(5.0, 50.0, 32).unwrap(),
    ];
    for (m, model) in models.iter().enumerate() {
        let net = sample_replicate(model, 150, 99, m, &[]).unwrap();
        let mut a = dense_symmetric_eigen(&net.densify_adjacency().unwrap(), Some(MatrixKind::Adjacency), false)
            .unwrap()
            .eigenvalues;
        let mut b = dense_symmetric_eigen(&net.densify_modularity().unwrap(), Some(MatrixKind::Modularity), false)
            .unwrap()
            .eigenvalues;
        a.reverse();
        b.reverse();
        for i in 0..a.len() {
            assert!(a[i] >= b[i] - 1e-9, "model {m}, i = {i}");
            if i + 1 < a.len() {
                assert!(b[i] >= a[i + 1] - 1e-9, "model {m}, i = {i}");
            }
        }
    }
}

#[test]
fn lanczos_agrees_with_dense_on_sampled_networks() {
    let model = DegreeModel::discrete(&[(50.0, 0.25), (100.0, 0.75)]).unwrap();
    let net = sample_replicate(&model, 500, 4, 0, &[]).unwrap();
    let dense = dense_symmetric_eigen(&net.densify_modularity().unwrap(), None, false).unwrap().largest();
    let (top, v) = top_eigenpair(&net.modularity(), &LanczosOptions::default()).unwrap();
    assert!((top - dense).abs() < 1e-8, "{top} vs {dense}");
    let norm: f64 = v.iter().map(|x| x * x).sum();
    assert!((norm - 1.0).abs() < 1e-10);
}
