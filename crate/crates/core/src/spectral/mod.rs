//! Laplacian eigenmaps: the smallest `k` eigenpairs of a graph Laplacian with
//! a deterministic orientation for every eigenvector.
//!
//! Eigenvectors are oriented so that the first entry with magnitude above
//! [`SIGN_ZERO_TOL`] is positive, i.e. the lexicographically larger of `v`
//! and `-v`. Inside a block of (numerically) repeated eigenvalues the basis is
//! whatever the solver produced; columns of such a block are then ordered
//! lexicographically so the output is reproducible for a given solver, but a
//! different solver may legitimately return a rotated basis.
//!
//! Disconnected graphs are accepted. With `c` components the first `c`
//! eigenvalues are zero.

mod iterative;

use std::cmp::Ordering;

use nalgebra::{DMatrix, SymmetricEigen};
use thiserror::Error;

use crate::graph::{Graph, LaplacianKind, Storage, SymMatrix, DEFAULT_SPARSE_THRESHOLD};

/// Entries with magnitude at or below this are treated as zero by [`sign_fix`].
pub const SIGN_ZERO_TOL: f64 = 1e-12;

/// Relative width under which neighbouring eigenvalues count as one block.
pub const DEGENERATE_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectralError {
    #[error("embedding dimension k={k} exceeds the vertex count n={n}")]
    KTooLarge { k: usize, n: usize },
    #[error("embedding dimension must be at least 1")]
    ZeroK,
    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    ConvergenceFailure { iterations: usize, residual: f64 },
    #[error("vector has no entry above the zero threshold")]
    AllZeroVector,
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
}

/// Which eigensolver handled a matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Dense,
    Iterative,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverOptions {
    /// Graphs with more vertices than this use the iterative solver and
    /// sparse Laplacian storage.
    pub sparse_threshold: usize,
    /// Target residual `‖Lv − λv‖ / max(1, λ)` for the iterative solver.
    pub tolerance: f64,
    /// Filter sweeps before giving up; `None` means `10·n`.
    pub max_iterations: Option<usize>,
}

impl Default for SolverOptions {
    fn default() -> Self {
        SolverOptions {
            sparse_threshold: DEFAULT_SPARSE_THRESHOLD,
            tolerance: 1e-10,
            max_iterations: None,
        }
    }
}

impl SolverOptions {
    pub fn dense() -> Self {
        SolverOptions {
            sparse_threshold: usize::MAX,
            ..Default::default()
        }
    }

    pub fn iterative() -> Self {
        SolverOptions {
            sparse_threshold: 0,
            ..Default::default()
        }
    }

    pub fn solver_for(&self, n: usize) -> SolverKind {
        if n > self.sparse_threshold {
            SolverKind::Iterative
        } else {
            SolverKind::Dense
        }
    }
}

/// The `k` smallest Laplacian eigenvalues of a graph with their oriented,
/// unit-norm eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralEmbedding {
    n: usize,
    k: usize,
    eigenvalues: Vec<f64>,
    /// Column-major `n × k`.
    vectors: Vec<f64>,
}

impl SpectralEmbedding {
    /// Wraps raw parts, checking only the shapes.
    pub fn from_parts(
        n: usize,
        k: usize,
        eigenvalues: Vec<f64>,
        vectors: Vec<f64>,
    ) -> Result<Self, SpectralError> {
        if eigenvalues.len() != k {
            return Err(SpectralError::DimensionMismatch {
                expected: k,
                actual: eigenvalues.len(),
            });
        }
        if vectors.len() != n * k {
            return Err(SpectralError::DimensionMismatch {
                expected: n * k,
                actual: vectors.len(),
            });
        }
        Ok(SpectralEmbedding {
            n,
            k,
            eigenvalues,
            vectors,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    /// Eigenvector `r` as a slice of length `n`.
    pub fn column(&self, r: usize) -> &[f64] {
        &self.vectors[r * self.n..(r + 1) * self.n]
    }

    /// Column-major eigenvector entries.
    pub fn vectors(&self) -> &[f64] {
        &self.vectors
    }

    /// Coordinates of vertex `i`.
    pub fn point(&self, i: usize) -> Vec<f64> {
        (0..self.k).map(|r| self.vectors[r * self.n + i]).collect()
    }

    /// Drops the leading eigenpair.
    pub fn without_first(&self) -> SpectralEmbedding {
        assert!(self.k >= 2, "cannot drop the only eigenpair");
        SpectralEmbedding {
            n: self.n,
            k: self.k - 1,
            eigenvalues: self.eigenvalues[1..].to_vec(),
            vectors: self.vectors[self.n..].to_vec(),
        }
    }

    /// Keeps the leading `k` eigenpairs.
    pub fn truncate(&self, k: usize) -> SpectralEmbedding {
        assert!(k <= self.k);
        SpectralEmbedding {
            n: self.n,
            k,
            eigenvalues: self.eigenvalues[..k].to_vec(),
            vectors: self.vectors[..k * self.n].to_vec(),
        }
    }

    /// `‖L v_r − λ_r v_r‖` for each column.
    pub fn residuals(&self, l: &SymMatrix) -> Result<Vec<f64>, SpectralError> {
        self.check_dim(l)?;
        Ok((0..self.k)
            .map(|r| {
                let v = self.column(r);
                let lv = l.mul_vec(v);
                lv.iter()
                    .zip(v)
                    .map(|(a, b)| (a - self.eigenvalues[r] * b).powi(2))
                    .sum::<f64>()
                    .sqrt()
            })
            .collect())
    }

    fn check_dim(&self, l: &SymMatrix) -> Result<(), SpectralError> {
        if l.dim() != self.n {
            return Err(SpectralError::DimensionMismatch {
                expected: self.n,
                actual: l.dim(),
            });
        }
        Ok(())
    }
}

/// Embeds `g` with the default solver options.
pub fn embed(g: &Graph, k: usize, mode: LaplacianKind) -> Result<SpectralEmbedding, SpectralError> {
    embed_with(g, k, mode, &SolverOptions::default())
}

pub fn embed_with(
    g: &Graph,
    k: usize,
    mode: LaplacianKind,
    opts: &SolverOptions,
) -> Result<SpectralEmbedding, SpectralError> {
    let n = g.n();
    if k == 0 {
        return Err(SpectralError::ZeroK);
    }
    if k > n {
        return Err(SpectralError::KTooLarge { k, n });
    }
    let solver = opts.solver_for(n);
    let storage = match solver {
        SolverKind::Dense => Storage::Dense,
        SolverKind::Iterative => Storage::Sparse,
    };
    let l = mode.build(g, storage);
    embed_matrix(&l, k, solver, opts)
}

/// Smallest `k` eigenpairs of a symmetric positive semidefinite matrix,
/// oriented and ordered as described in the module docs.
pub fn embed_matrix(
    l: &SymMatrix,
    k: usize,
    solver: SolverKind,
    opts: &SolverOptions,
) -> Result<SpectralEmbedding, SpectralError> {
    let n = l.dim();
    if k == 0 {
        return Err(SpectralError::ZeroK);
    }
    if k > n {
        return Err(SpectralError::KTooLarge { k, n });
    }
    let (values, vectors) = match solver {
        SolverKind::Dense => dense_smallest(l, k),
        SolverKind::Iterative => iterative::smallest_eigenpairs(l, k, opts)?,
    };
    finish(n, k, values, vectors)
}

fn dense_smallest(l: &SymMatrix, k: usize) -> (Vec<f64>, DMatrix<f64>) {
    let eig = SymmetricEigen::new(l.to_dense());
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    order.truncate(k);
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(l.dim(), k, |i, r| eig.eigenvectors[(i, order[r])]);
    (values, vectors)
}

/// Clamps, normalizes, orients, and orders raw ascending eigenpairs.
fn finish(
    n: usize,
    k: usize,
    values: Vec<f64>,
    vectors: DMatrix<f64>,
) -> Result<SpectralEmbedding, SpectralError> {
    // Laplacians are PSD; anything below zero is rounding.
    let eigenvalues: Vec<f64> = values
        .into_iter()
        .map(|v| if v <= 0.0 { 0.0 } else { v })
        .collect();
    let mut columns = Vec::with_capacity(k);
    for r in 0..k {
        let mut col: Vec<f64> = vectors.column(r).iter().copied().collect();
        let norm = col.iter().map(|x| x * x).sum::<f64>().sqrt();
        col.iter_mut().for_each(|x| *x /= norm);
        columns.push(sign_fix(&col)?);
    }
    let mut start = 0;
    while start < k {
        let mut end = start + 1;
        while end < k
            && eigenvalues[end] - eigenvalues[end - 1]
                <= DEGENERATE_TOL * eigenvalues[end - 1].max(1.0)
        {
            end += 1;
        }
        columns[start..end].sort_by(|a, b| lex_cmp(b, a));
        start = end;
    }
    Ok(SpectralEmbedding {
        n,
        k,
        eigenvalues,
        vectors: columns.concat(),
    })
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Returns whichever of `v` and `-v` has a positive first non-negligible entry.
pub fn sign_fix(v: &[f64]) -> Result<Vec<f64>, SpectralError> {
    let lead = v
        .iter()
        .find(|x| x.abs() > SIGN_ZERO_TOL)
        .ok_or(SpectralError::AllZeroVector)?;
    Ok(if *lead < 0.0 {
        v.iter().map(|x| -x).collect()
    } else {
        v.to_vec()
    })
}

/// `Tr(Yᵀ L Y)` where the columns of `Y` are the embedding's eigenvectors.
pub fn embedding_trace(emb: &SpectralEmbedding, l: &SymMatrix) -> Result<f64, SpectralError> {
    emb.check_dim(l)?;
    Ok((0..emb.k()).map(|r| l.quadratic_form(emb.column(r))).sum())
}
