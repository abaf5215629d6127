//! Iterative sparse symmetric eigensolver.
//!
//! Lanczos with full reorthogonalization. Converged Ritz pairs are locked
//! (deflated out of later sweeps), and a sweep that exhausts its subspace
//! restarts from the best unconverged Ritz vector, so clustered and
//! repeated eigenvalues are found one copy at a time. Convergence is
//! certified by the explicit residual ||A x - theta x|| / ||x|| with theta
//! the Rayleigh quotient, never by the cheap subspace estimate alone.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::graph::{Csr, RanGraph};
use crate::rng::{derive_seed, RanRng};
use crate::spectra::top_k_degrees;

/// Hard cap on matrix-vector products, per requested eigenvalue.
const MATVEC_BUDGET_PER_EIGENVALUE: u64 = 10_000;

/// Cap on the Lanczos basis memory (bytes) before a restart is forced.
const BASIS_MEMORY_CAP: usize = 256 << 20;

/// One computed eigenpair (vector discarded).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EigenPair {
    pub value: f64,
    /// ||A x - value x|| / ||x|| at the final iterate.
    pub residual: f64,
    /// Matrix-vector products consumed when this pair settled.
    pub iterations: u64,
    pub converged: bool,
}

/// Top-k adjacency eigenvalues and their degree ratios.
#[derive(Debug, Clone, Serialize)]
pub struct SpectralReport {
    /// Eigenvalues, non-increasing.
    pub lambdas: Vec<f64>,
    /// lambda_i / sqrt(Delta_i) against the sorted top degrees.
    pub ratios: Vec<f64>,
    pub solver_tol: f64,
    pub iterations: Vec<u64>,
    pub residuals: Vec<f64>,
    pub converged: Vec<bool>,
}

impl SpectralReport {
    pub fn all_converged(&self) -> bool {
        self.converged.iter().all(|&c| c)
    }
}

fn matvec(csr: &Csr, x: &[f64], y: &mut [f64]) {
    for u in 0..csr.n() {
        let mut acc = 0.0;
        for &w in csr.neighbors(u as u32) {
            acc += x[w as usize];
        }
        y[u] = acc;
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Remove the components of `w` along each of the given unit vectors.
fn orthogonalize<'a>(w: &mut [f64], others: impl IntoIterator<Item = &'a [f64]>) {
    for v in others {
        let coefficient = dot(w, v);
        if coefficient != 0.0 {
            for (wi, vi) in w.iter_mut().zip(v) {
                *wi -= coefficient * vi;
            }
        }
    }
}

/// Eigen-decomposition of the tridiagonal Lanczos matrix.
/// Returns (value, eigenvector) pairs sorted by descending value.
fn tridiagonal_eigen(alphas: &[f64], betas: &[f64]) -> Vec<(f64, DVector<f64>)> {
    let m = alphas.len();
    let mut t = DMatrix::zeros(m, m);
    for i in 0..m {
        t[(i, i)] = alphas[i];
        if i + 1 < m {
            t[(i, i + 1)] = betas[i];
            t[(i + 1, i)] = betas[i];
        }
    }
    let decomposition = t.symmetric_eigen();
    let mut order: Vec<usize> = (0..m).collect();
    order.sort_by(|&i, &j| {
        decomposition.eigenvalues[j]
            .partial_cmp(&decomposition.eigenvalues[i])
            .expect("finite eigenvalues")
    });
    order
        .into_iter()
        .map(|i| (decomposition.eigenvalues[i], decomposition.eigenvectors.column(i).into_owned()))
        .collect()
}

struct Locked {
    value: f64,
    vector: Vec<f64>,
    iterations: u64,
    residual: f64,
    converged: bool,
}

/// Compute the k algebraically largest eigenvalues of a CSR adjacency
/// matrix. Deterministic for a given (matrix, k, tol).
pub fn eigensolve_csr(csr: &Csr, k: usize, tol: f64) -> Vec<EigenPair> {
    let n = csr.n();
    assert!(k >= 1 && k <= n, "k must be in 1..=n");
    assert!(tol > 0.0, "tolerance must be positive");

    let mut rng = RanRng::new(derive_seed(0xE16E_u64, (n as u64) << 20 | k as u64));
    let mut locked: Vec<Locked> = Vec::new();
    let budget = MATVEC_BUDGET_PER_EIGENVALUE * k as u64;
    let mut matvecs = 0u64;
    let mut restart_vector: Option<Vec<f64>> = None;

    let random_unit = |rng: &mut RanRng| -> Vec<f64> {
        (0..n).map(|_| rng.unit_f64() - 0.5).collect()
    };

    let basis_cap = (BASIS_MEMORY_CAP / (8 * n)).clamp(8, 200);

    while locked.len() < k && matvecs < budget {
        let needed = k - locked.len();
        let free_dim = n - locked.len();
        let m_max = free_dim.min(basis_cap.max(needed + 2));

        // Start vector: prior unconverged Ritz vector if available,
        // otherwise fresh random; always deflated against locked pairs.
        let mut v = restart_vector.take().unwrap_or_else(|| random_unit(&mut rng));
        loop {
            orthogonalize(&mut v, locked.iter().map(|l| l.vector.as_slice()));
            let nv = norm(&v);
            if nv > 1e-9 {
                for vi in &mut v {
                    *vi /= nv;
                }
                break;
            }
            v = random_unit(&mut rng);
        }

        let mut basis: Vec<Vec<f64>> = Vec::new();
        let mut alphas: Vec<f64> = Vec::new();
        let mut betas: Vec<f64> = Vec::new();
        let mut w = vec![0.0; n];
        let mut breakdown = false;

        for j in 0..m_max {
            basis.push(v.clone());
            matvec(csr, &v, &mut w);
            matvecs += 1;
            let alpha = dot(&v, &w);
            alphas.push(alpha);
            for (wi, vi) in w.iter_mut().zip(&v) {
                *wi -= alpha * vi;
            }
            if j > 0 {
                let beta_prev = betas[j - 1];
                let prev = &basis[j - 1];
                for (wi, pi) in w.iter_mut().zip(prev) {
                    *wi -= beta_prev * pi;
                }
            }
            // Full reorthogonalization against locked and current basis.
            orthogonalize(&mut w, locked.iter().map(|l| l.vector.as_slice()));
            orthogonalize(&mut w, basis.iter().map(|b| b.as_slice()));

            let beta = norm(&w);
            let scale = 1.0 + alphas.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
            if beta <= 1e-12 * scale {
                breakdown = true;
                break;
            }

            // Cheap convergence probe: |beta * last component of y|.
            let last = j + 1 == m_max;
            if !last && (j + 1) % 8 == 0 {
                let ritz = tridiagonal_eigen(&alphas, &betas);
                let settled = ritz
                    .iter()
                    .take(needed)
                    .all(|(_, y)| beta * y[y.len() - 1].abs() <= tol * 0.25);
                if settled {
                    break;
                }
            }
            if last {
                break;
            }
            betas.push(beta);
            for wi in w.iter_mut() {
                *wi /= beta;
            }
            std::mem::swap(&mut v, &mut w);
        }

        // Harvest: verify Ritz pairs in descending order with the explicit
        // residual, locking the converged prefix.
        let ritz = tridiagonal_eigen(&alphas, &betas);
        let mut scratch = vec![0.0; n];
        let mut locked_any = false;
        for (_, y) in ritz.iter().take(needed + 1) {
            let mut x = vec![0.0; n];
            for (col, &coefficient) in basis.iter().zip(y.iter()) {
                for (xi, bi) in x.iter_mut().zip(col) {
                    *xi += coefficient * bi;
                }
            }
            orthogonalize(&mut x, locked.iter().map(|l| l.vector.as_slice()));
            let nx = norm(&x);
            if nx <= 1e-9 {
                continue;
            }
            for xi in &mut x {
                *xi /= nx;
            }
            matvec(csr, &x, &mut scratch);
            matvecs += 1;
            let theta = dot(&x, &scratch);
            let mut residual_sq = 0.0;
            for (si, xi) in scratch.iter().zip(&x) {
                let r = si - theta * xi;
                residual_sq += r * r;
            }
            let residual = residual_sq.sqrt();
            if residual <= tol {
                locked.push(Locked { value: theta, vector: x, iterations: matvecs, residual, converged: true });
                locked_any = true;
                if locked.len() == k {
                    break;
                }
            } else {
                restart_vector = Some(x);
                break;
            }
        }

        if !locked_any && breakdown && restart_vector.is_none() {
            // Invariant subspace exhausted without new pairs: fresh start.
            continue;
        }
    }

    // Budget exhausted: report best unconverged estimate(s) honestly.
    while locked.len() < k {
        if let Some(x) = restart_vector.take() {
            let mut scratch = vec![0.0; n];
            matvec(csr, &x, &mut scratch);
            let theta = dot(&x, &scratch);
            let mut residual_sq = 0.0;
            for (si, xi) in scratch.iter().zip(&x) {
                let r = si - theta * xi;
                residual_sq += r * r;
            }
            locked.push(Locked {
                value: theta,
                vector: x,
                iterations: matvecs,
                residual: residual_sq.sqrt(),
                converged: false,
            });
        } else {
            locked.push(Locked { value: f64::NAN, vector: Vec::new(), iterations: matvecs, residual: f64::INFINITY, converged: false });
        }
    }

    locked.sort_by(|a, b| b.value.partial_cmp(&a.value).unwrap_or(std::cmp::Ordering::Equal));
    locked
        .into_iter()
        .take(k)
        .map(|l| EigenPair { value: l.value, residual: l.residual, iterations: l.iterations, converged: l.converged })
        .collect()
}

/// Top-k adjacency eigenvalues of a graph with degree ratios.
///
/// Non-convergence within the iteration budget is reported through the
/// `converged` flags and residuals, not as an error.
pub fn top_k_eigenvalues(graph: &RanGraph, k: usize, tol: f64) -> Result<SpectralReport> {
    let n = graph.n();
    if k == 0 || k > n {
        return Err(Error::KTooLarge { k, n });
    }
    let csr = Csr::from_graph(graph);
    let pairs = eigensolve_csr(&csr, k, tol);
    let top = top_k_degrees(graph, k)?;
    let ratios = pairs
        .iter()
        .zip(&top)
        .map(|(pair, td)| pair.value / (td.degree as f64).sqrt())
        .collect();
    Ok(SpectralReport {
        lambdas: pairs.iter().map(|p| p.value).collect(),
        ratios,
        solver_tol: tol,
        iterations: pairs.iter().map(|p| p.iterations).collect(),
        residuals: pairs.iter().map(|p| p.residual).collect(),
        converged: pairs.iter().map(|p| p.converged).collect(),
    })
}
