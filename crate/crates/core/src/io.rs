//! Edge-list files, distance-matrix export, and the binary embedding cache.
//!
//! Edge lists are whitespace-separated `i j [w]` lines; `w` defaults to 1.
//! Blank lines and lines starting with `#` are ignored, except the directive
//! `#n=<N>` which fixes the vertex count (for trailing isolated vertices).
//!
//! Embedding cache layout, all little-endian:
//!
//! ```text
//! "ELDE" | version: u16 | n: u64 | k: u64 | k × f64 eigenvalues | n·k × f64 column-major vectors
//! ```

use std::fs;
use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::sync::atomic::{AtomicU64, Ordering};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::eld::{DistanceMatrix, EmbeddingKey, EmbeddingStore};
use crate::graph::{Graph, GraphError, LaplacianKind};
use crate::spectral::SpectralEmbedding;

pub const CACHE_MAGIC: &[u8; 4] = b"ELDE";
pub const CACHE_VERSION: u16 = 1;

#[derive(Debug, Error)]
pub enum IoError {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("line {line}: {source}")]
    Graph {
        line: usize,
        #[source]
        source: GraphError,
    },
    #[error("malformed distance matrix: {0}")]
    Matrix(String),
    #[error(transparent)]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl IoError {
    fn io(path: &Path, source: io::Error) -> Self {
        IoError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

#[derive(Debug, Error)]
pub enum CacheError {
    #[error("not an embedding cache file (bad magic bytes)")]
    BadMagic,
    #[error("unsupported cache format version {found} (expected {CACHE_VERSION})")]
    VersionMismatch { found: u16 },
    #[error("cache file is truncated")]
    TruncatedFile,
    #[error("cache file has {0} unexpected trailing bytes")]
    TrailingData(usize),
    #[error(transparent)]
    Io(#[from] io::Error),
}

/// Parses edge-list text.
pub fn parse_edge_list(text: &str) -> Result<Graph, IoError> {
    let mut declared: Option<(usize, usize)> = None;
    let mut edges = Vec::new();
    let mut lines = Vec::new();
    let mut max_id = None::<usize>;
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            if let Some(value) = comment.trim().strip_prefix("n=") {
                let n = value.trim().parse::<usize>().map_err(|_| IoError::Parse {
                    line: line_no,
                    message: format!("bad vertex count directive {value:?}"),
                })?;
                declared = Some((n, line_no));
            }
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        if !(2..=3).contains(&fields.len()) {
            return Err(IoError::Parse {
                line: line_no,
                message: format!("expected `i j [w]`, found {} fields", fields.len()),
            });
        }
        let vertex = |s: &str| {
            s.parse::<usize>().map_err(|_| IoError::Parse {
                line: line_no,
                message: format!("bad vertex id {s:?}"),
            })
        };
        let (i, j) = (vertex(fields[0])?, vertex(fields[1])?);
        let w = match fields.get(2) {
            Some(s) => s.parse::<f64>().map_err(|_| IoError::Parse {
                line: line_no,
                message: format!("bad weight {s:?}"),
            })?,
            None => 1.0,
        };
        max_id = Some(max_id.map_or(i.max(j), |m| m.max(i).max(j)));
        edges.push((i, j, w));
        lines.push(line_no);
    }
    let n = match (declared, max_id) {
        (Some((n, _)), _) => n,
        (None, Some(m)) => m + 1,
        (None, None) => {
            return Err(IoError::Parse {
                line: text.lines().count().max(1),
                message: "no edges and no #n= directive".into(),
            })
        }
    };
    Graph::build_indexed(n, edges).map_err(|(idx, source)| IoError::Graph {
        line: lines
            .get(idx)
            .copied()
            .or(declared.map(|(_, l)| l))
            .unwrap_or(1),
        source,
    })
}

pub fn read_edge_list(path: impl AsRef<Path>) -> Result<Graph, IoError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
    parse_edge_list(&text)
}

/// Edge-list text that [`parse_edge_list`] reads back to an identical graph.
pub fn format_edge_list(g: &Graph) -> String {
    let mut out = format!("#n={}\n", g.n());
    for e in g.edges() {
        out.push_str(&format!("{} {} {}\n", e.u, e.v, e.w));
    }
    out
}

pub fn write_edge_list(g: &Graph, path: impl AsRef<Path>) -> Result<(), IoError> {
    let path = path.as_ref();
    fs::write(path, format_edge_list(g)).map_err(|e| IoError::io(path, e))
}

/// Shortest round-trip decimal of `x` rounded to 12 significant digits.
pub fn format_number(x: f64) -> String {
    let rounded: f64 = format!("{x:.11e}").parse().unwrap_or(x);
    format!("{rounded}")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum MatrixFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Serialize, Deserialize)]
struct MatrixJson {
    labels: Vec<String>,
    rows: Vec<Vec<f64>>,
}

/// CSV with a `label` header row and the labels as first column.
pub fn matrix_to_csv(dm: &DistanceMatrix) -> Result<String, IoError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let mut header = vec!["label".to_string()];
    header.extend(dm.labels().iter().cloned());
    w.write_record(&header)?;
    for (i, row) in dm.rows().into_iter().enumerate() {
        let mut rec = vec![dm.labels()[i].clone()];
        rec.extend(row.into_iter().map(format_number));
        w.write_record(&rec)?;
    }
    let bytes = w.into_inner().map_err(|e| IoError::Matrix(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

pub fn matrix_to_json(dm: &DistanceMatrix) -> Result<String, IoError> {
    let doc = MatrixJson {
        labels: dm.labels().to_vec(),
        rows: dm.rows(),
    };
    Ok(serde_json::to_string_pretty(&doc)? + "\n")
}

/// Builds a matrix from square rows; the upper triangle is used.
fn matrix_from_rows(labels: Vec<String>, rows: Vec<Vec<f64>>) -> Result<DistanceMatrix, IoError> {
    let n = labels.len();
    if rows.len() != n || rows.iter().any(|r| r.len() != n) {
        return Err(IoError::Matrix(format!("expected a {n}×{n} matrix")));
    }
    for i in 0..n {
        if rows[i][i] != 0.0 {
            return Err(IoError::Matrix(format!("nonzero diagonal at {i}")));
        }
        for j in 0..i {
            let (a, b) = (rows[i][j], rows[j][i]);
            if (a - b).abs() > 1e-10 * a.abs().max(b.abs()).max(1.0) {
                return Err(IoError::Matrix(format!("asymmetric entry ({i}, {j})")));
            }
        }
    }
    Ok(DistanceMatrix::from_fn(labels, |i, j| rows[i][j]))
}

pub fn matrix_from_csv(text: &str) -> Result<DistanceMatrix, IoError> {
    let mut r = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let labels: Vec<String> = r.headers()?.iter().skip(1).map(str::to_owned).collect();
    let mut rows = Vec::new();
    for rec in r.records() {
        let rec = rec?;
        let row = rec
            .iter()
            .skip(1)
            .map(|s| {
                s.parse::<f64>()
                    .map_err(|_| IoError::Matrix(format!("bad number {s:?}")))
            })
            .collect::<Result<Vec<_>, _>>()?;
        rows.push(row);
    }
    matrix_from_rows(labels, rows)
}

pub fn matrix_from_json(text: &str) -> Result<DistanceMatrix, IoError> {
    let doc: MatrixJson = serde_json::from_str(text)?;
    matrix_from_rows(doc.labels, doc.rows)
}

pub fn format_distance_matrix(
    dm: &DistanceMatrix,
    format: MatrixFormat,
) -> Result<String, IoError> {
    match format {
        MatrixFormat::Csv => matrix_to_csv(dm),
        MatrixFormat::Json => matrix_to_json(dm),
    }
}

pub fn write_distance_matrix(
    dm: &DistanceMatrix,
    format: MatrixFormat,
    path: impl AsRef<Path>,
) -> Result<(), IoError> {
    let path = path.as_ref();
    let text = format_distance_matrix(dm, format)?;
    fs::write(path, text).map_err(|e| IoError::io(path, e))
}

pub fn read_distance_matrix(
    path: impl AsRef<Path>,
    format: MatrixFormat,
) -> Result<DistanceMatrix, IoError> {
    let path = path.as_ref();
    let text = fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
    match format {
        MatrixFormat::Csv => matrix_from_csv(&text),
        MatrixFormat::Json => matrix_from_json(&text),
    }
}

/// Gnuplot-ready `row col value` triples with a blank line after each row.
pub fn heatmap_triples(dm: &DistanceMatrix) -> String {
    let mut out = String::from("# row col value\n");
    for (i, label) in dm.labels().iter().enumerate() {
        out.push_str(&format!("# {i}: {label}\n"));
    }
    for i in 0..dm.len() {
        for j in 0..dm.len() {
            out.push_str(&format!("{i} {j} {}\n", format_number(dm.get(i, j))));
        }
        out.push('\n');
    }
    out
}

pub fn write_heatmap(dm: &DistanceMatrix, path: impl AsRef<Path>) -> Result<(), IoError> {
    let path = path.as_ref();
    fs::write(path, heatmap_triples(dm)).map_err(|e| IoError::io(path, e))
}

pub fn encode_embedding(emb: &SpectralEmbedding) -> Vec<u8> {
    let mut out = Vec::with_capacity(22 + 8 * (emb.k() + emb.vectors().len()));
    out.extend_from_slice(CACHE_MAGIC);
    out.extend_from_slice(&CACHE_VERSION.to_le_bytes());
    out.extend_from_slice(&(emb.n() as u64).to_le_bytes());
    out.extend_from_slice(&(emb.k() as u64).to_le_bytes());
    for v in emb.eigenvalues().iter().chain(emb.vectors()) {
        out.extend_from_slice(&v.to_le_bytes());
    }
    out
}

pub fn decode_embedding(bytes: &[u8]) -> Result<SpectralEmbedding, CacheError> {
    if bytes.len() < 4 {
        return Err(if CACHE_MAGIC.starts_with(bytes) {
            CacheError::TruncatedFile
        } else {
            CacheError::BadMagic
        });
    }
    if &bytes[..4] != CACHE_MAGIC {
        return Err(CacheError::BadMagic);
    }
    let header = bytes.get(4..22).ok_or(CacheError::TruncatedFile)?;
    let version = u16::from_le_bytes([header[0], header[1]]);
    if version != CACHE_VERSION {
        return Err(CacheError::VersionMismatch { found: version });
    }
    let n = u64::from_le_bytes(header[2..10].try_into().unwrap());
    let k = u64::from_le_bytes(header[10..18].try_into().unwrap());
    let count = n
        .checked_mul(k)
        .and_then(|nk| nk.checked_add(k))
        .and_then(|c| c.checked_mul(8))
        .ok_or(CacheError::TruncatedFile)?;
    let body = &bytes[22..];
    if (body.len() as u64) < count {
        return Err(CacheError::TruncatedFile);
    }
    if body.len() as u64 > count {
        return Err(CacheError::TrailingData(body.len() - count as usize));
    }
    let mut floats = body
        .chunks_exact(8)
        .map(|c| f64::from_le_bytes(c.try_into().unwrap()));
    let (n, k) = (n as usize, k as usize);
    let eigenvalues: Vec<f64> = floats.by_ref().take(k).collect();
    let vectors: Vec<f64> = floats.collect();
    SpectralEmbedding::from_parts(n, k, eigenvalues, vectors).map_err(|_| CacheError::TruncatedFile)
}

pub fn write_embedding(emb: &SpectralEmbedding, mut w: impl Write) -> Result<(), CacheError> {
    w.write_all(&encode_embedding(emb))?;
    Ok(())
}

pub fn read_embedding(mut r: impl Read) -> Result<SpectralEmbedding, CacheError> {
    let mut bytes = Vec::new();
    r.read_to_end(&mut bytes)?;
    decode_embedding(&bytes)
}

static TEMP_COUNTER: AtomicU64 = AtomicU64::new(0);

/// Writes `bytes` to a sibling temp file and renames it over `path`.
fn write_atomic(path: &Path, bytes: &[u8]) -> io::Result<()> {
    let dir = path.parent().unwrap_or(Path::new("."));
    let tmp = dir.join(format!(
        ".{}.{}.{}.tmp",
        path.file_name().and_then(|s| s.to_str()).unwrap_or("cache"),
        std::process::id(),
        TEMP_COUNTER.fetch_add(1, Ordering::Relaxed)
    ));
    let result = fs::write(&tmp, bytes).and_then(|_| fs::rename(&tmp, path));
    if result.is_err() {
        let _ = fs::remove_file(&tmp);
    }
    result
}

pub fn save_embedding(emb: &SpectralEmbedding, path: impl AsRef<Path>) -> Result<(), CacheError> {
    Ok(write_atomic(path.as_ref(), &encode_embedding(emb))?)
}

pub fn load_embedding(path: impl AsRef<Path>) -> Result<SpectralEmbedding, CacheError> {
    decode_embedding(&fs::read(path)?)
}

/// Writes `emb` to `path` and reads it back.
pub fn embedding_cache_roundtrip(
    emb: &SpectralEmbedding,
    path: impl AsRef<Path>,
) -> Result<SpectralEmbedding, CacheError> {
    save_embedding(emb, &path)?;
    load_embedding(&path)
}

/// A directory of cache files, one per [`EmbeddingKey`]. Unreadable,
/// corrupt, or mismatched files count as misses; failed writes are dropped.
#[derive(Debug, Clone)]
pub struct CacheDir {
    dir: PathBuf,
}

impl CacheDir {
    pub fn new(dir: impl Into<PathBuf>) -> io::Result<Self> {
        let dir = dir.into();
        fs::create_dir_all(&dir)?;
        Ok(CacheDir { dir })
    }

    pub fn path_for(&self, key: &EmbeddingKey) -> PathBuf {
        let mode = match key.mode {
            LaplacianKind::Combinatorial => "comb",
            LaplacianKind::Normalized => "norm",
        };
        self.dir
            .join(format!("{}-k{}-{mode}.elde", key.graph_hash, key.k))
    }
}

impl EmbeddingStore for CacheDir {
    fn load(&self, key: &EmbeddingKey) -> Option<SpectralEmbedding> {
        load_embedding(self.path_for(key))
            .ok()
            .filter(|e| e.k() == key.k)
    }

    fn store(&self, key: &EmbeddingKey, emb: &SpectralEmbedding) {
        let _ = save_embedding(emb, self.path_for(key));
    }
}
