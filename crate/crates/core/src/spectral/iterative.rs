//! Chebyshev-filtered subspace iteration for the low end of a PSD spectrum.
//!
//! A block of `s > k` vectors is repeatedly passed through a Chebyshev
//! polynomial that damps `[cut, upper]` and amplifies everything below `cut`,
//! then re-orthonormalized and Rayleigh-Ritz projected. `upper` comes from a
//! short Lanczos run (capped by Gershgorin) and `cut` is the largest Ritz
//! value of the current block. Being a block method it recovers repeated
//! eigenvalues up to multiplicity `s`, which plain single-vector Lanczos does
//! not.

use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{SolverOptions, SpectralError};
use crate::graph::SymMatrix;

const START_SEED: u64 = 0x454c_4445;
const FILTER_DEGREE: usize = 20;
const LANCZOS_STEPS: usize = 24;

fn block_size(n: usize, k: usize) -> usize {
    (2 * k + 8).min(n)
}

fn apply(a: &SymMatrix, x: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.dim();
    let mut y = DMatrix::zeros(n, x.ncols());
    for (xc, yc) in x
        .as_slice()
        .chunks_exact(n)
        .zip(y.as_mut_slice().chunks_exact_mut(n))
    {
        a.mul_vec_into(xc, yc);
    }
    y
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Upper bound on the largest eigenvalue: a few Lanczos steps give the top
/// Ritz value `θ` and residual `β`; `θ + β` bounds the spectrum in practice
/// and Gershgorin bounds it always.
fn spectrum_upper_bound(a: &SymMatrix, rng: &mut ChaCha8Rng) -> f64 {
    let n = a.dim();
    let gersh = a.gershgorin_bound();
    let steps = LANCZOS_STEPS.min(n);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(steps);
    let mut v: Vec<f64> = (0..n).map(|_| rng.gen_range(-1.0..1.0)).collect();
    let norm = dot(&v, &v).sqrt();
    v.iter_mut().for_each(|x| *x /= norm);
    let mut alphas = Vec::new();
    let mut betas = Vec::new();
    let mut beta = 0.0;
    for _ in 0..steps {
        let mut w = a.mul_vec(&v);
        let alpha = dot(&w, &v);
        basis.push(v.clone());
        for q in &basis {
            let c = dot(&w, q);
            w.iter_mut().zip(q).for_each(|(x, y)| *x -= c * y);
        }
        alphas.push(alpha);
        beta = dot(&w, &w).sqrt();
        if beta <= 1e-12 * gersh.max(1.0) {
            break;
        }
        betas.push(beta);
        v = w.into_iter().map(|x| x / beta).collect();
    }
    let m = alphas.len();
    let t = DMatrix::from_fn(m, m, |i, j| {
        if i == j {
            alphas[i]
        } else if i + 1 == j || j + 1 == i {
            betas[i.min(j)]
        } else {
            0.0
        }
    });
    let top = SymmetricEigen::new(t).eigenvalues.max();
    (top + beta).min(gersh).max(top)
}

fn chebyshev_filter(
    a: &SymMatrix,
    x: DMatrix<f64>,
    cut: f64,
    upper: f64,
    lowest: f64,
) -> DMatrix<f64> {
    let e = (upper - cut) / 2.0;
    let c = (upper + cut) / 2.0;
    let mut sigma = e / (lowest - c);
    let tau = 2.0 / sigma;
    let mut prev = x;
    let mut cur = (apply(a, &prev) - &prev * c) * (sigma / e);
    for _ in 2..=FILTER_DEGREE {
        let next_sigma = 1.0 / (tau - sigma);
        let next =
            (apply(a, &cur) - &cur * c) * (2.0 * next_sigma / e) - &prev * (sigma * next_sigma);
        prev = cur;
        cur = next;
        sigma = next_sigma;
    }
    cur
}

/// Rayleigh-Ritz on an orthonormal block: returns ascending Ritz values, the
/// rotated block, and the residual norm of each Ritz pair.
fn rayleigh_ritz(a: &SymMatrix, x: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>, Vec<f64>) {
    let ax = apply(a, x);
    let h = x.transpose() * &ax;
    let h = (&h + h.transpose()) * 0.5;
    let eig = SymmetricEigen::new(h);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&i, &j| eig.eigenvalues[i].total_cmp(&eig.eigenvalues[j]));
    let s = order.len();
    let rot = DMatrix::from_fn(s, s, |i, j| eig.eigenvectors[(i, order[j])]);
    let theta: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let x = x * &rot;
    let ax = ax * &rot;
    let residuals = (0..s)
        .map(|j| (ax.column(j) - x.column(j) * theta[j]).norm())
        .collect();
    (theta, x, residuals)
}

pub(super) fn smallest_eigenpairs(
    a: &SymMatrix,
    k: usize,
    opts: &SolverOptions,
) -> Result<(Vec<f64>, DMatrix<f64>), SpectralError> {
    let n = a.dim();
    let s = block_size(n, k);
    let max_iterations = opts.max_iterations.unwrap_or(10 * n);
    let mut rng = ChaCha8Rng::seed_from_u64(START_SEED);
    let upper = spectrum_upper_bound(a, &mut rng);
    // Residuals below a few hundred ulps of the spectral radius are noise.
    let floor = 100.0 * f64::EPSILON * upper.max(1.0);

    let start = DMatrix::from_fn(n, s, |_, _| rng.gen_range(-1.0..1.0));
    let mut x = start.qr().q();
    let mut iterations = 0;
    loop {
        let (theta, rotated, residuals) = rayleigh_ritz(a, &x);
        x = rotated;
        let worst = (0..k)
            .map(|j| residuals[j] / (opts.tolerance * theta[j].abs().max(1.0)).max(floor))
            .fold(0.0, f64::max);
        if worst <= 1.0 {
            let values = theta[..k].to_vec();
            let vectors = x.columns(0, k).into_owned();
            return Ok((values, vectors));
        }
        if iterations >= max_iterations {
            let residual = residuals[..k].iter().copied().fold(0.0, f64::max);
            return Err(SpectralError::ConvergenceFailure {
                iterations,
                residual,
            });
        }
        let top = theta[s - 1];
        let upper = upper.max(top * (1.0 + 1e-6) + 1e-12);
        let cut = top;
        let mut lowest = theta[0].min(0.0);
        if lowest >= cut {
            lowest = cut - 1e-3 * (upper - cut);
        }
        x = chebyshev_filter(a, x, cut, upper, lowest).qr().q();
        iterations += 1;
    }
}
