//! Exact optimal transport between uniform empirical measures on the line.

use thiserror::Error;

use crate::spectral::SpectralEmbedding;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TransportError {
    #[error("measure needs at least one support point")]
    EmptyMeasure,
    #[error("non-finite support value {0}")]
    NonFinite(f64),
    #[error("transport order p={0} must be at least 1")]
    InvalidOrder(f64),
    #[error("axis {axis} out of range for an embedding of dimension {k}")]
    AxisOutOfRange { axis: usize, k: usize },
}

/// Uniform empirical measure on the real line: mass `1/m` on each of `m`
/// support points, stored sorted ascending. Duplicates are separate atoms.
#[derive(Debug, Clone, PartialEq)]
pub struct Measure1D {
    values: Vec<f64>,
}

impl Measure1D {
    pub fn new(mut values: Vec<f64>) -> Result<Self, TransportError> {
        if values.is_empty() {
            return Err(TransportError::EmptyMeasure);
        }
        if let Some(&bad) = values.iter().find(|v| !v.is_finite()) {
            return Err(TransportError::NonFinite(bad));
        }
        values.sort_by(f64::total_cmp);
        Ok(Measure1D { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    /// Pushforward under `x ↦ c·x + t`.
    pub fn affine(&self, c: f64, t: f64) -> Measure1D {
        let mut values: Vec<f64> = self.values.iter().map(|v| c * v + t).collect();
        values.sort_by(f64::total_cmp);
        Measure1D { values }
    }

    /// Pushforward under `x ↦ −x`.
    pub fn reflected(&self) -> Measure1D {
        Measure1D {
            values: self.values.iter().rev().map(|v| -v).collect(),
        }
    }

    /// Picks between the measure and its reflection using only the multiset
    /// of support values, so the choice is unaffected by how the underlying
    /// points were ordered.
    ///
    /// The sorted-descending sequences of `values` and `−values` are compared
    /// lexicographically, ignoring differences within `rel_tol · max|x|`; the
    /// larger one wins. If no entry differs the measure is symmetric and is
    /// returned unchanged.
    pub fn canonical_reflection(&self, rel_tol: f64) -> Measure1D {
        let m = self.values.len();
        let scale = self.values.iter().fold(0.0_f64, |a, v| a.max(v.abs()));
        let tol = rel_tol * scale;
        for i in 0..m {
            // i-th largest of values against i-th largest of −values.
            let gap = self.values[m - 1 - i] + self.values[i];
            if gap > tol {
                return self.clone();
            }
            if gap < -tol {
                return self.reflected();
            }
        }
        self.clone()
    }

    /// Quantile function `Q(t) = inf{x : F(x) ≥ t}` for `t ∈ (0, 1]`.
    pub fn quantile(&self, t: f64) -> f64 {
        let m = self.values.len();
        let idx = ((t * m as f64).ceil() as usize).clamp(1, m) - 1;
        self.values[idx]
    }
}

/// How an embedding axis is oriented before it becomes a measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum AxisOrientation {
    /// Reflect to the canonical orientation of the value multiset. This keeps
    /// distances invariant under vertex relabelling.
    #[default]
    Canonical,
    /// Use the eigenvector sign exactly as stored in the embedding.
    Embedding,
}

/// Relative tolerance for [`Measure1D::canonical_reflection`] on embedding axes.
pub const REFLECTION_TOL: f64 = 1e-9;

/// The measure with atoms at `λ_r · v_r(i)` for every vertex `i`.
pub fn measure_from_axis(emb: &SpectralEmbedding, r: usize) -> Result<Measure1D, TransportError> {
    if r >= emb.k() {
        return Err(TransportError::AxisOutOfRange {
            axis: r,
            k: emb.k(),
        });
    }
    let lambda = emb.eigenvalues()[r];
    Measure1D::new(emb.column(r).iter().map(|v| lambda * v).collect())
}

pub fn oriented_measure_from_axis(
    emb: &SpectralEmbedding,
    r: usize,
    orientation: AxisOrientation,
) -> Result<Measure1D, TransportError> {
    let m = measure_from_axis(emb, r)?;
    Ok(match orientation {
        AxisOrientation::Canonical => m.canonical_reflection(REFLECTION_TOL),
        AxisOrientation::Embedding => m,
    })
}

/// Order-`p` Wasserstein distance between two uniform empirical measures.
///
/// Evaluates `(∫₀¹ |Q_a(t) − Q_b(t)|^p dt)^{1/p}` exactly: both quantile
/// functions are constant between consecutive points of the merged grid
/// `{i/m_a} ∪ {j/m_b}`. Grid positions are tracked as integers over the
/// common denominator `m_a·m_b`, so the result is exactly symmetric.
pub fn wasserstein_1d(a: &Measure1D, b: &Measure1D, p: f64) -> Result<f64, TransportError> {
    if !(p >= 1.0) || !p.is_finite() {
        return Err(TransportError::InvalidOrder(p));
    }
    let (ma, mb) = (a.len() as u128, b.len() as u128);
    let (mut i, mut j) = (0usize, 0usize);
    let mut pos: u128 = 0;
    let mut total = 0.0;
    while i < a.len() && j < b.len() {
        let next_a = (i as u128 + 1) * mb;
        let next_b = (j as u128 + 1) * ma;
        let next = next_a.min(next_b);
        let diff = (a.values[i] - b.values[j]).abs();
        let cost = if p == 1.0 { diff } else { diff.powf(p) };
        total += cost * (next - pos) as f64;
        pos = next;
        if next_a == next {
            i += 1;
        }
        if next_b == next {
            j += 1;
        }
    }
    let mean = total / (ma * mb) as f64;
    Ok(if p == 1.0 { mean } else { mean.powf(1.0 / p) })
}
