//! Simple undirected weighted graphs and their Laplacian matrices.

use std::collections::HashSet;
use std::fmt;

use nalgebra::DMatrix;
use sha2::{Digest, Sha256};
use thiserror::Error;

/// Vertex count at or below which Laplacians are stored densely by default.
pub const DEFAULT_SPARSE_THRESHOLD: usize = 2048;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum GraphError {
    #[error("graph must have at least one vertex")]
    Empty,
    #[error("self-loop at vertex {0}")]
    SelfLoop(usize),
    #[error("duplicate edge ({0}, {1})")]
    DuplicateEdge(usize, usize),
    #[error("negative weight {2} on edge ({0}, {1})")]
    NegativeWeight(usize, usize, f64),
    #[error("non-finite weight {2} on edge ({0}, {1})")]
    NonFiniteWeight(usize, usize, f64),
    #[error("vertex {vertex} out of range for a graph with {n} vertices")]
    VertexOutOfRange { vertex: usize, n: usize },
    #[error("permutation does not match the vertex count or is not a bijection")]
    BadPermutation,
}

/// An undirected edge with `u < v`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub w: f64,
}

/// A simple, undirected, non-negatively weighted graph on vertices `0..n`.
///
/// Immutable after construction. Edges are kept in insertion order with the
/// endpoints of each edge normalized so that `u < v`.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<Edge>,
}

impl Graph {
    /// Validates an edge list and builds the graph.
    pub fn new<I>(n: usize, edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        Self::build_indexed(n, edges).map_err(|(_, e)| e)
    }

    /// Like [`Graph::new`], but a failure also reports the position of the
    /// offending edge in the input.
    pub fn build_indexed<I>(n: usize, edges: I) -> Result<Self, (usize, GraphError)>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        if n == 0 {
            return Err((0, GraphError::Empty));
        }
        let mut seen = HashSet::new();
        let mut out = Vec::new();
        for (idx, (i, j, w)) in edges.into_iter().enumerate() {
            let fail = |e| Err((idx, e));
            for vertex in [i, j] {
                if vertex >= n {
                    return fail(GraphError::VertexOutOfRange { vertex, n });
                }
            }
            if i == j {
                return fail(GraphError::SelfLoop(i));
            }
            if w.is_nan() || w.is_infinite() {
                return fail(GraphError::NonFiniteWeight(i, j, w));
            }
            if w < 0.0 {
                return fail(GraphError::NegativeWeight(i, j, w));
            }
            let (u, v) = if i < j { (i, j) } else { (j, i) };
            if !seen.insert((u, v)) {
                return fail(GraphError::DuplicateEdge(i, j));
            }
            out.push(Edge { u, v, w });
        }
        Ok(Graph { n, edges: out })
    }

    /// Unit-weight graph from vertex pairs.
    pub fn unweighted<I>(n: usize, pairs: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        Self::new(n, pairs.into_iter().map(|(i, j)| (i, j, 1.0)))
    }

    /// The path on `n` vertices with unit weights.
    pub fn path(n: usize) -> Result<Self, GraphError> {
        Self::unweighted(n, (1..n).map(|i| (i - 1, i)))
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn is_unweighted(&self) -> bool {
        self.edges.iter().all(|e| e.w == 1.0)
    }

    /// Weighted degree of every vertex.
    pub fn degrees(&self) -> Vec<f64> {
        let mut deg = vec![0.0; self.n];
        for e in &self.edges {
            deg[e.u] += e.w;
            deg[e.v] += e.w;
        }
        deg
    }

    /// Number of incident edges per vertex, ignoring weights.
    pub fn edge_degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.n];
        for e in &self.edges {
            deg[e.u] += 1;
            deg[e.v] += 1;
        }
        deg
    }

    pub fn neighbors(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::new(); self.n];
        for e in &self.edges {
            adj[e.u].push(e.v);
            adj[e.v].push(e.u);
        }
        adj
    }

    /// Connectivity by breadth-first traversal over every stored edge,
    /// including zero-weight ones.
    pub fn is_connected(&self) -> bool {
        self.component_count() == 1
    }

    pub fn component_count(&self) -> usize {
        let adj = self.neighbors();
        let mut seen = vec![false; self.n];
        let mut count = 0;
        let mut queue = std::collections::VecDeque::new();
        for start in 0..self.n {
            if seen[start] {
                continue;
            }
            count += 1;
            seen[start] = true;
            queue.push_back(start);
            while let Some(x) = queue.pop_front() {
                for &y in &adj[x] {
                    if !seen[y] {
                        seen[y] = true;
                        queue.push_back(y);
                    }
                }
            }
        }
        count
    }

    /// Relabels vertex `i` as `perm[i]`.
    pub fn permute(&self, perm: &[usize]) -> Result<Graph, GraphError> {
        if perm.len() != self.n {
            return Err(GraphError::BadPermutation);
        }
        let mut hit = vec![false; self.n];
        for &p in perm {
            if p >= self.n || std::mem::replace(&mut hit[p], true) {
                return Err(GraphError::BadPermutation);
            }
        }
        Graph::new(
            self.n,
            self.edges.iter().map(|e| (perm[e.u], perm[e.v], e.w)),
        )
    }

    /// Hex SHA-256 of the canonical content: vertex count and the edge set
    /// sorted by endpoints, weights by their bit pattern. Independent of the
    /// order edges were supplied in.
    pub fn content_hash(&self) -> String {
        let mut sorted: Vec<Edge> = self.edges.clone();
        sorted.sort_by_key(|e| (e.u, e.v));
        let mut hasher = Sha256::new();
        hasher.update((self.n as u64).to_le_bytes());
        for e in &sorted {
            hasher.update((e.u as u64).to_le_bytes());
            hasher.update((e.v as u64).to_le_bytes());
            hasher.update(e.w.to_bits().to_le_bytes());
        }
        hasher
            .finalize()
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

impl fmt::Display for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, m={})", self.n, self.edges.len())
    }
}

/// How a [`SymMatrix`] stores its entries.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Storage {
    /// Dense up to [`DEFAULT_SPARSE_THRESHOLD`] vertices, sparse above.
    #[default]
    Auto,
    Dense,
    Sparse,
}

impl Storage {
    fn resolve(self, n: usize) -> Storage {
        match self {
            Storage::Auto if n <= DEFAULT_SPARSE_THRESHOLD => Storage::Dense,
            Storage::Auto => Storage::Sparse,
            s => s,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Entries {
    /// Upper triangle, row-major, `n(n+1)/2` values.
    Packed(Vec<f64>),
    /// Diagonal plus strictly-upper triplets sorted by `(row, col)`.
    Triplets {
        diag: Vec<f64>,
        upper: Vec<(usize, usize, f64)>,
    },
}

/// A real symmetric matrix. Each unordered off-diagonal pair is stored once
/// and mirrored on read, so symmetry holds exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct SymMatrix {
    dim: usize,
    entries: Entries,
}

impl SymMatrix {
    fn packed_index(dim: usize, i: usize, j: usize) -> usize {
        let (r, c) = if i <= j { (i, j) } else { (j, i) };
        r * dim - r * (r + 1) / 2 + c
    }

    /// Assembles a matrix from its diagonal and the strictly-upper entries.
    /// Repeated positions accumulate.
    pub fn from_parts(
        diag: Vec<f64>,
        upper: impl IntoIterator<Item = (usize, usize, f64)>,
        storage: Storage,
    ) -> Self {
        let dim = diag.len();
        match storage.resolve(dim) {
            Storage::Dense => {
                let mut packed = vec![0.0; dim * (dim + 1) / 2];
                for (i, &d) in diag.iter().enumerate() {
                    packed[Self::packed_index(dim, i, i)] = d;
                }
                for (i, j, v) in upper {
                    debug_assert!(i != j);
                    packed[Self::packed_index(dim, i, j)] += v;
                }
                SymMatrix {
                    dim,
                    entries: Entries::Packed(packed),
                }
            }
            _ => {
                let mut trips: Vec<(usize, usize, f64)> = upper
                    .into_iter()
                    .map(|(i, j, v)| if i < j { (i, j, v) } else { (j, i, v) })
                    .collect();
                trips.sort_by_key(|&(i, j, _)| (i, j));
                let mut merged: Vec<(usize, usize, f64)> = Vec::with_capacity(trips.len());
                for t in trips {
                    match merged.last_mut() {
                        Some(last) if last.0 == t.0 && last.1 == t.1 => last.2 += t.2,
                        _ => merged.push(t),
                    }
                }
                SymMatrix {
                    dim,
                    entries: Entries::Triplets {
                        diag,
                        upper: merged,
                    },
                }
            }
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn is_sparse(&self) -> bool {
        matches!(self.entries, Entries::Triplets { .. })
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        assert!(i < self.dim && j < self.dim, "index out of range");
        match &self.entries {
            Entries::Packed(p) => p[Self::packed_index(self.dim, i, j)],
            Entries::Triplets { diag, upper } => {
                if i == j {
                    return diag[i];
                }
                let key = if i < j { (i, j) } else { (j, i) };
                upper
                    .binary_search_by_key(&key, |&(r, c, _)| (r, c))
                    .map(|idx| upper[idx].2)
                    .unwrap_or(0.0)
            }
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    /// `y = A x`.
    pub fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        assert_eq!(x.len(), self.dim);
        assert_eq!(y.len(), self.dim);
        match &self.entries {
            Entries::Packed(p) => {
                y.iter_mut().for_each(|v| *v = 0.0);
                let mut idx = 0;
                for i in 0..self.dim {
                    y[i] += p[idx] * x[i];
                    idx += 1;
                    for j in i + 1..self.dim {
                        let a = p[idx];
                        y[i] += a * x[j];
                        y[j] += a * x[i];
                        idx += 1;
                    }
                }
            }
            Entries::Triplets { diag, upper } => {
                for i in 0..self.dim {
                    y[i] = diag[i] * x[i];
                }
                for &(i, j, a) in upper {
                    y[i] += a * x[j];
                    y[j] += a * x[i];
                }
            }
        }
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.dim];
        self.mul_vec_into(x, &mut y);
        y
    }

    /// `xᵀ A x`.
    pub fn quadratic_form(&self, x: &[f64]) -> f64 {
        self.mul_vec(x).iter().zip(x).map(|(a, b)| a * b).sum()
    }

    /// Gershgorin bound on the spectral radius.
    pub fn gershgorin_bound(&self) -> f64 {
        let mut rows: Vec<f64> = self.diagonal().iter().map(|d| d.abs()).collect();
        match &self.entries {
            Entries::Packed(_) => {
                for i in 0..self.dim {
                    for j in i + 1..self.dim {
                        let a = self.get(i, j).abs();
                        rows[i] += a;
                        rows[j] += a;
                    }
                }
            }
            Entries::Triplets { upper, .. } => {
                for &(i, j, a) in upper {
                    rows[i] += a.abs();
                    rows[j] += a.abs();
                }
            }
        }
        rows.into_iter().fold(0.0, f64::max)
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let mut m = DMatrix::zeros(self.dim, self.dim);
        match &self.entries {
            Entries::Packed(_) => {
                for i in 0..self.dim {
                    for j in i..self.dim {
                        let v = self.get(i, j);
                        m[(i, j)] = v;
                        m[(j, i)] = v;
                    }
                }
            }
            Entries::Triplets { diag, upper } => {
                for (i, &d) in diag.iter().enumerate() {
                    m[(i, i)] = d;
                }
                for &(i, j, v) in upper {
                    m[(i, j)] = v;
                    m[(j, i)] = v;
                }
            }
        }
        m
    }
}

/// Which Laplacian a graph is embedded with.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum LaplacianKind {
    /// `L = D − A`.
    #[default]
    Combinatorial,
    /// `I − D^{-1/2} A D^{-1/2}`, with zero rows for degree-0 vertices.
    Normalized,
}

impl LaplacianKind {
    pub fn build(self, g: &Graph, storage: Storage) -> SymMatrix {
        match self {
            LaplacianKind::Combinatorial => laplacian_with(g, storage),
            LaplacianKind::Normalized => normalized_laplacian_with(g, storage),
        }
    }
}

/// Combinatorial Laplacian with automatic storage selection.
pub fn laplacian(g: &Graph) -> SymMatrix {
    laplacian_with(g, Storage::Auto)
}

pub fn laplacian_with(g: &Graph, storage: Storage) -> SymMatrix {
    SymMatrix::from_parts(
        g.degrees(),
        g.edges.iter().map(|e| (e.u, e.v, -e.w)),
        storage,
    )
}

/// Normalized Laplacian with automatic storage selection.
pub fn normalized_laplacian(g: &Graph) -> SymMatrix {
    normalized_laplacian_with(g, Storage::Auto)
}

pub fn normalized_laplacian_with(g: &Graph, storage: Storage) -> SymMatrix {
    let deg = g.degrees();
    // Pseudo-inverse square root: isolated vertices get a zero row.
    let inv_sqrt: Vec<f64> = deg
        .iter()
        .map(|&d| if d > 0.0 { 1.0 / d.sqrt() } else { 0.0 })
        .collect();
    let diag = deg
        .iter()
        .map(|&d| if d > 0.0 { 1.0 } else { 0.0 })
        .collect();
    SymMatrix::from_parts(
        diag,
        g.edges
            .iter()
            .map(|e| (e.u, e.v, -e.w * inv_sqrt[e.u] * inv_sqrt[e.v])),
        storage,
    )
}
