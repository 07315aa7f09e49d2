//! Embedded Laplacian Distance (ELD) between simple undirected weighted
//! graphs, including graphs of different sizes.
//!
//! ```
//! use eld::{eld_distance, generators, EldParams};
//!
//! let a = generators::cycle(30).unwrap();
//! let b = generators::wheel(30).unwrap();
//! let d = eld_distance(&a, &b, &EldParams::new(5, 1.0)).unwrap();
//! assert!(d > 0.0);
//! assert_eq!(eld_distance(&a, &a, &EldParams::new(5, 1.0)).unwrap(), 0.0);
//! ```

pub mod eld;
pub mod generators;
pub mod graph;
pub mod io;
pub mod spectral;
pub mod transport;

pub use eld::{
    distance_matrix, distance_matrix_labeled, distance_matrix_sequential, eld_distance,
    DistanceMatrix, EldError, EldParams, EmbeddingKey, EmbeddingStore, MemoryStore,
};
pub use generators::{GeneratorSpec, WeightDist};
pub use graph::{laplacian, normalized_laplacian, Graph, GraphError, LaplacianKind, SymMatrix};
pub use spectral::{embed, embed_with, SolverOptions, SpectralEmbedding, SpectralError};
pub use transport::{wasserstein_1d, AxisOrientation, Measure1D};
