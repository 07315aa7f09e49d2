//! The Embedded Laplacian Distance between graphs of possibly different sizes.
//!
//! Each graph is embedded with its `k` smallest Laplacian eigenpairs. Axis
//! `r` of a graph becomes the uniform measure with atoms `λ_r · v_r(i)`, and
//! the distance is the mean over axes of the order-`p` Wasserstein distance
//! between the two graphs' axis measures.

use std::collections::HashMap;
use std::sync::{Arc, RwLock};

use thiserror::Error;

use crate::graph::{Graph, LaplacianKind};
use crate::spectral::{embed_with, SolverOptions, SpectralEmbedding, SpectralError};
use crate::transport::{
    oriented_measure_from_axis, wasserstein_1d, AxisOrientation, Measure1D, TransportError,
};

/// Default embedding dimension.
pub const DEFAULT_K: usize = 5;
/// Default transport order.
pub const DEFAULT_P: f64 = 1.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EldError {
    #[error("k={k} exceeds the {n} vertices of {}", graph.as_deref().unwrap_or("a graph"))]
    KTooLarge {
        k: usize,
        n: usize,
        graph: Option<String>,
    },
    #[error("embedding dimension must be at least 1")]
    ZeroK,
    #[error("transport order p={0} must be at least 1")]
    InvalidOrder(f64),
    #[error("{expected} labels required, got {actual}")]
    LabelCount { expected: usize, actual: usize },
    #[error(transparent)]
    Spectral(#[from] SpectralError),
    #[error(transparent)]
    Transport(#[from] TransportError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct EldParams {
    pub k: usize,
    pub p: f64,
    pub mode: LaplacianKind,
    /// Drop the leading (constant, for connected graphs) eigenvector and use
    /// eigenpairs `2..=k+1` instead, so `k + 1` vertices are required.
    pub skip_first: bool,
    pub orientation: AxisOrientation,
    pub solver: SolverOptions,
}

impl Default for EldParams {
    fn default() -> Self {
        EldParams {
            k: DEFAULT_K,
            p: DEFAULT_P,
            mode: LaplacianKind::Combinatorial,
            skip_first: false,
            orientation: AxisOrientation::Canonical,
            solver: SolverOptions::default(),
        }
    }
}

impl EldParams {
    pub fn new(k: usize, p: f64) -> Self {
        EldParams {
            k,
            p,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<(), EldError> {
        if self.k == 0 {
            return Err(EldError::ZeroK);
        }
        if !(self.p >= 1.0) || !self.p.is_finite() {
            return Err(EldError::InvalidOrder(self.p));
        }
        Ok(())
    }

    /// Number of eigenpairs each graph must provide.
    pub fn embedding_dim(&self) -> usize {
        self.k + usize::from(self.skip_first)
    }

    fn check_size(&self, g: &Graph, label: Option<&str>) -> Result<(), EldError> {
        if self.embedding_dim() > g.n() {
            return Err(EldError::KTooLarge {
                k: self.embedding_dim(),
                n: g.n(),
                graph: label.map(str::to_owned),
            });
        }
        Ok(())
    }

    pub fn embedding_key(&self, g: &Graph) -> EmbeddingKey {
        EmbeddingKey {
            graph_hash: g.content_hash(),
            k: self.embedding_dim(),
            mode: self.mode,
        }
    }
}

/// Cache key for a stored embedding. `p` does not influence embeddings.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EmbeddingKey {
    pub graph_hash: String,
    pub k: usize,
    pub mode: LaplacianKind,
}

/// Storage for embeddings shared by concurrent workers. Implementations only
/// need insert-once/read-many semantics; a second `store` for the same key
/// may be ignored.
pub trait EmbeddingStore: Sync {
    fn load(&self, key: &EmbeddingKey) -> Option<SpectralEmbedding>;
    fn store(&self, key: &EmbeddingKey, emb: &SpectralEmbedding);
}

#[derive(Debug, Default)]
pub struct MemoryStore {
    map: RwLock<HashMap<EmbeddingKey, Arc<SpectralEmbedding>>>,
}

impl MemoryStore {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.map.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl EmbeddingStore for MemoryStore {
    fn load(&self, key: &EmbeddingKey) -> Option<SpectralEmbedding> {
        self.map.read().unwrap().get(key).map(|e| (**e).clone())
    }

    fn store(&self, key: &EmbeddingKey, emb: &SpectralEmbedding) {
        self.map
            .write()
            .unwrap()
            .entry(key.clone())
            .or_insert_with(|| Arc::new(emb.clone()));
    }
}

/// Computes (or fetches) the embedding used for `g`, with `skip_first`
/// already applied.
pub fn embedding_for(
    g: &Graph,
    params: &EldParams,
    store: Option<&dyn EmbeddingStore>,
) -> Result<SpectralEmbedding, EldError> {
    params.validate()?;
    params.check_size(g, None)?;
    let dim = params.embedding_dim();
    let key = store.map(|_| params.embedding_key(g));
    let cached = match (store, &key) {
        (Some(s), Some(key)) => s.load(key).filter(|e| e.k() == dim && e.n() == g.n()),
        _ => None,
    };
    let emb = match cached {
        Some(e) => e,
        None => {
            let e = embed_with(g, dim, params.mode, &params.solver)?;
            if let (Some(s), Some(key)) = (store, &key) {
                s.store(key, &e);
            }
            e
        }
    };
    Ok(if params.skip_first {
        emb.without_first()
    } else {
        emb
    })
}

/// The per-axis measures of one embedded graph.
#[derive(Debug, Clone, PartialEq)]
pub struct AxisMeasures(Vec<Measure1D>);

impl AxisMeasures {
    pub fn from_embedding(
        emb: &SpectralEmbedding,
        orientation: AxisOrientation,
    ) -> Result<Self, EldError> {
        (0..emb.k())
            .map(|r| oriented_measure_from_axis(emb, r, orientation).map_err(EldError::from))
            .collect::<Result<Vec<_>, _>>()
            .map(AxisMeasures)
    }

    pub fn axes(&self) -> &[Measure1D] {
        &self.0
    }
}

/// Per-axis Wasserstein terms, in axis order.
pub fn axis_distances(a: &AxisMeasures, b: &AxisMeasures, p: f64) -> Result<Vec<f64>, EldError> {
    a.0.iter()
        .zip(&b.0)
        .map(|(x, y)| wasserstein_1d(x, y, p).map_err(EldError::from))
        .collect()
}

/// Mean of the per-axis terms.
pub fn eld_from_measures(a: &AxisMeasures, b: &AxisMeasures, p: f64) -> Result<f64, EldError> {
    let terms = axis_distances(a, b, p)?;
    Ok(terms.iter().sum::<f64>() / terms.len() as f64)
}

pub fn eld_from_embeddings(
    a: &SpectralEmbedding,
    b: &SpectralEmbedding,
    params: &EldParams,
) -> Result<f64, EldError> {
    params.validate()?;
    let ma = AxisMeasures::from_embedding(a, params.orientation)?;
    let mb = AxisMeasures::from_embedding(b, params.orientation)?;
    eld_from_measures(&ma, &mb, params.p)
}

/// Distance between two graphs.
pub fn eld_distance(g1: &Graph, g2: &Graph, params: &EldParams) -> Result<f64, EldError> {
    params.validate()?;
    params.check_size(g1, None)?;
    params.check_size(g2, None)?;
    let e1 = embedding_for(g1, params, None)?;
    let e2 = embedding_for(g2, params, None)?;
    eld_from_embeddings(&e1, &e2, params)
}

/// Symmetric matrix of pairwise distances with a zero diagonal. Each
/// unordered pair is stored once.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    labels: Vec<String>,
    /// Strict upper triangle, row-major.
    upper: Vec<f64>,
}

impl DistanceMatrix {
    /// Builds a matrix by evaluating `f(i, j)` for every `i < j`.
    pub fn from_fn(labels: Vec<String>, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let n = labels.len();
        let mut upper = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in i + 1..n {
                upper.push(f(i, j));
            }
        }
        DistanceMatrix { labels, upper }
    }

    fn index(&self, i: usize, j: usize) -> usize {
        let n = self.labels.len();
        let (r, c) = if i < j { (i, j) } else { (j, i) };
        r * n - r * (r + 1) / 2 + (c - r - 1)
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.len() && j < self.len());
        if i == j {
            0.0
        } else {
            self.upper[self.index(i, j)]
        }
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        (0..self.len())
            .map(|i| (0..self.len()).map(|j| self.get(i, j)).collect())
            .collect()
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self, EldError> {
        if labels.len() != self.labels.len() {
            return Err(EldError::LabelCount {
                expected: self.labels.len(),
                actual: labels.len(),
            });
        }
        self.labels = labels;
        Ok(self)
    }
}

fn default_labels(n: usize) -> Vec<String> {
    (1..=n).map(|i| format!("G{i}")).collect()
}

/// Pairwise distances over `graphs`, labelled `G1..Gn`. Embeddings are
/// computed once per distinct graph and pairs are evaluated in parallel when
/// the `parallel` feature is on. The result does not depend on scheduling.
pub fn distance_matrix(
    graphs: &[Graph],
    params: &EldParams,
    store: Option<&dyn EmbeddingStore>,
) -> Result<DistanceMatrix, EldError> {
    compute_matrix(default_labels(graphs.len()), graphs, params, store, true)
}

/// As [`distance_matrix`] but strictly on the calling thread.
pub fn distance_matrix_sequential(
    graphs: &[Graph],
    params: &EldParams,
    store: Option<&dyn EmbeddingStore>,
) -> Result<DistanceMatrix, EldError> {
    compute_matrix(default_labels(graphs.len()), graphs, params, store, false)
}

pub fn distance_matrix_labeled(
    labels: Vec<String>,
    graphs: &[Graph],
    params: &EldParams,
    store: Option<&dyn EmbeddingStore>,
    parallel: bool,
) -> Result<DistanceMatrix, EldError> {
    if labels.len() != graphs.len() {
        return Err(EldError::LabelCount {
            expected: graphs.len(),
            actual: labels.len(),
        });
    }
    compute_matrix(labels, graphs, params, store, parallel)
}

#[cfg(feature = "parallel")]
fn map_maybe_parallel<T, R, F>(items: &[T], parallel: bool, f: F) -> Vec<R>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    use rayon::prelude::*;
    if parallel {
        items.par_iter().map(f).collect()
    } else {
        items.iter().map(f).collect()
    }
}

#[cfg(not(feature = "parallel"))]
fn map_maybe_parallel<T, R, F>(items: &[T], _parallel: bool, f: F) -> Vec<R>
where
    F: Fn(&T) -> R,
{
    items.iter().map(f).collect()
}

fn compute_matrix(
    labels: Vec<String>,
    graphs: &[Graph],
    params: &EldParams,
    store: Option<&dyn EmbeddingStore>,
    parallel: bool,
) -> Result<DistanceMatrix, EldError> {
    params.validate()?;
    for (g, label) in graphs.iter().zip(&labels) {
        params.check_size(g, Some(label))?;
    }

    // One embedding per distinct graph content.
    let hashes: Vec<String> = map_maybe_parallel(graphs, parallel, Graph::content_hash);
    let mut slot_of = Vec::with_capacity(graphs.len());
    let mut unique: Vec<&Graph> = Vec::new();
    let mut seen: HashMap<&str, usize> = HashMap::new();
    for (g, h) in graphs.iter().zip(&hashes) {
        let slot = *seen.entry(h.as_str()).or_insert_with(|| {
            unique.push(g);
            unique.len() - 1
        });
        slot_of.push(slot);
    }
    let measures: Vec<AxisMeasures> = map_maybe_parallel(&unique, parallel, |g| {
        let emb = embedding_for(g, params, store)?;
        AxisMeasures::from_embedding(&emb, params.orientation)
    })
    .into_iter()
    .collect::<Result<_, _>>()?;

    let n = graphs.len();
    let pairs: Vec<(usize, usize)> = (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect();
    let values: Vec<f64> = map_maybe_parallel(&pairs, parallel, |&(i, j)| {
        eld_from_measures(&measures[slot_of[i]], &measures[slot_of[j]], params.p)
    })
    .into_iter()
    .collect::<Result<_, _>>()?;
    let mut it = values.into_iter();
    Ok(DistanceMatrix::from_fn(labels, |_, _| it.next().unwrap()))
}
