mod config;

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use eld::eld::{DEFAULT_K, DEFAULT_P};
use eld::graph::DEFAULT_SPARSE_THRESHOLD;
use eld::io::{
    format_distance_matrix, format_edge_list, format_number, read_edge_list, save_embedding,
    write_distance_matrix, write_edge_list, write_heatmap, CacheDir, MatrixFormat,
};
use eld::{
    distance_matrix_labeled, embed_with, EmbeddingStore, GeneratorSpec, Graph, LaplacianKind,
    WeightDist,
};

use config::{Failure, RunConfig};

#[derive(Parser)]
#[command(
    name = "eld",
    version,
    about = "Embedded Laplacian Distance between graphs"
)]
struct Cli {
    #[command(flatten)]
    opts: Opts,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Opts {
    /// Number of Laplacian eigenpairs per graph
    #[arg(short = 'k', global = true, default_value_t = DEFAULT_K)]
    k: usize,
    /// Wasserstein order
    #[arg(short = 'p', global = true, default_value_t = DEFAULT_P)]
    p: f64,
    #[arg(long, global = true, value_enum, default_value_t = Mode::Comb)]
    mode: Mode,
    /// Drop the first eigenpair and use the next k
    #[arg(long, global = true)]
    skip_first: bool,
    /// Use the iterative solver above this many vertices
    #[arg(long, global = true, value_name = "N", default_value_t = DEFAULT_SPARSE_THRESHOLD)]
    sparse_threshold: usize,
    /// Seed for random generator specs that do not carry their own
    #[arg(long, global = true, value_name = "S")]
    seed: Option<u64>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Worker threads for pairwise distances
    #[arg(long, global = true, value_name = "T")]
    threads: Option<usize>,
    /// Directory for cached embeddings
    #[arg(long, global = true, value_name = "DIR", env = "ELD_CACHE_DIR")]
    cache: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum Mode {
    Comb,
    Norm,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Model {
    Er,
    Ba,
}

#[derive(Subcommand)]
enum Command {
    /// Distance between two graphs (edge-list files or generator specs)
    Dist { a: String, b: String },
    /// Pairwise distance matrix over the inputs
    Matrix {
        #[arg(required = true)]
        inputs: Vec<String>,
        /// Output file; stdout when omitted
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
        /// Also write "row col value" triples for gnuplot
        #[arg(long, value_name = "PATH")]
        heatmap: Option<PathBuf>,
    },
    /// Write a generated graph as an edge list
    Gen {
        spec: String,
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
    /// Time all pairwise distances over seeded random graphs of each size
    Bench {
        #[arg(value_enum)]
        model: Model,
        /// Vertex counts, comma or space separated
        #[arg(value_delimiter = ',')]
        sizes: Vec<usize>,
        /// Edge probability for er
        #[arg(long, default_value_t = 0.03)]
        prob: f64,
        /// Edges per new vertex for ba
        #[arg(short = 'm', default_value_t = 3)]
        m: usize,
        /// Graphs per size
        #[arg(long, default_value_t = 10)]
        graphs: usize,
    },
    /// Compute one embedding and store it in the binary cache format
    Embed {
        input: String,
        /// Output file; the cache directory when omitted
        #[arg(short = 'o', long)]
        output: Option<PathBuf>,
    },
}

impl Opts {
    fn config(&self) -> RunConfig {
        RunConfig {
            k: self.k,
            p: self.p,
            mode: match self.mode {
                Mode::Comb => LaplacianKind::Combinatorial,
                Mode::Norm => LaplacianKind::Normalized,
            },
            skip_first: self.skip_first,
            sparse_threshold: self.sparse_threshold,
            seed: self.seed,
            format: match self.format {
                Format::Csv => MatrixFormat::Csv,
                Format::Json => MatrixFormat::Json,
            },
            threads: self.threads,
        }
    }
}

/// Reads `input` as an edge-list file if one exists at that path, otherwise
/// parses it as a generator spec.
fn load_graph(input: &str, seed: Option<u64>) -> Result<Graph, Failure> {
    let path = Path::new(input);
    if path.is_file() {
        return read_edge_list(path).map_err(|e| Failure::Input(format!("{input}: {e}")));
    }
    let spec: GeneratorSpec = input.parse().map_err(|e| {
        Failure::Input(format!(
            "{input}: no such file, and not a generator spec ({e})"
        ))
    })?;
    let spec = match seed {
        Some(s) if !input.contains("seed=") => spec.with_seed(s),
        _ => spec,
    };
    spec.generate()
        .map_err(|e| Failure::Input(format!("{input}: {e}")))
}

fn open_cache(dir: Option<&Path>) -> Result<Option<CacheDir>, Failure> {
    dir.map(|d| CacheDir::new(d).map_err(|e| Failure::Input(format!("{}: {e}", d.display()))))
        .transpose()
}

fn emit(text: &str, output: Option<&Path>) -> Result<(), Failure> {
    match output {
        Some(path) => {
            fs::write(path, text).map_err(|e| Failure::Input(format!("{}: {e}", path.display())))
        }
        None => std::io::stdout()
            .write_all(text.as_bytes())
            .map_err(|e| Failure::Input(format!("stdout: {e}"))),
    }
}

fn matrix(
    inputs: &[String],
    cfg: &RunConfig,
    cache: Option<&CacheDir>,
) -> Result<eld::DistanceMatrix, Failure> {
    let graphs = inputs
        .iter()
        .map(|s| load_graph(s, cfg.seed))
        .collect::<Result<Vec<_>, _>>()?;
    let store = cache.map(|c| c as &dyn EmbeddingStore);
    Ok(distance_matrix_labeled(
        inputs.to_vec(),
        &graphs,
        &cfg.params(),
        store,
        true,
    )?)
}

fn bench(
    model: Model,
    sizes: &[usize],
    prob: f64,
    m: usize,
    count: usize,
    cfg: &RunConfig,
) -> Result<(), Failure> {
    if sizes.is_empty() {
        return Err(Failure::Usage("bench needs at least one size".into()));
    }
    if count == 0 {
        return Err(Failure::Usage("--graphs must be at least 1".into()));
    }
    let base = cfg.seed.unwrap_or(0);
    let params = cfg.params();
    println!("size,seconds");
    for &n in sizes {
        let graphs = (0..count as u64)
            .map(|i| match model {
                Model::Er => eld::generators::erdos_renyi(n, prob, base + i, WeightDist::Unit),
                Model::Ba => eld::generators::barabasi_albert(n, m, base + i),
            })
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| Failure::Usage(format!("size {n}: {e}")))?;
        let labels = (1..=count).map(|i| format!("G{i}")).collect();
        let start = Instant::now();
        distance_matrix_labeled(labels, &graphs, &params, None, true)?;
        println!("{n},{:.6}", start.elapsed().as_secs_f64());
    }
    Ok(())
}

fn run(cli: Cli) -> Result<(), Failure> {
    let cfg = cli.opts.config();
    cfg.validate()?;
    let cache = open_cache(cli.opts.cache.as_deref())?;
    match cli.command {
        Command::Dist { a, b } => {
            let dm = matrix(&[a, b], &cfg, cache.as_ref())?;
            println!("{}", format_number(dm.get(0, 1)));
        }
        Command::Matrix {
            inputs,
            output,
            heatmap,
        } => {
            let dm = matrix(&inputs, &cfg, cache.as_ref())?;
            match output {
                Some(path) => write_distance_matrix(&dm, cfg.format, &path)
                    .map_err(|e| Failure::Input(e.to_string()))?,
                None => emit(
                    &format_distance_matrix(&dm, cfg.format)
                        .map_err(|e| Failure::Input(e.to_string()))?,
                    None,
                )?,
            }
            if let Some(path) = heatmap {
                write_heatmap(&dm, &path).map_err(|e| Failure::Input(e.to_string()))?;
            }
        }
        Command::Gen { spec, output } => {
            let mut parsed: GeneratorSpec = spec
                .parse()
                .map_err(|e: eld::generators::GeneratorError| Failure::Usage(e.to_string()))?;
            if let Some(s) = cfg.seed {
                parsed = parsed.with_seed(s);
            }
            let g = parsed
                .generate()
                .map_err(|e| Failure::Usage(format!("{spec}: {e}")))?;
            match output {
                Some(path) => {
                    write_edge_list(&g, &path).map_err(|e| Failure::Input(e.to_string()))?
                }
                None => emit(&format_edge_list(&g), None)?,
            }
        }
        Command::Bench {
            model,
            sizes,
            prob,
            m,
            graphs,
        } => bench(model, &sizes, prob, m, graphs, &cfg)?,
        Command::Embed { input, output } => {
            let g = load_graph(&input, cfg.seed)?;
            let params = cfg.params();
            if params.embedding_dim() > g.n() {
                return Err(eld::EldError::KTooLarge {
                    k: params.embedding_dim(),
                    n: g.n(),
                    graph: Some(input),
                }
                .into());
            }
            let emb = embed_with(&g, params.embedding_dim(), params.mode, &params.solver)
                .map_err(|e| Failure::from(eld::EldError::from(e)))?;
            match (output, &cache) {
                (Some(path), _) => save_embedding(&emb, &path)
                    .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?,
                (None, Some(dir)) => {
                    let key = params.embedding_key(&g);
                    let path = dir.path_for(&key);
                    save_embedding(&emb, &path)
                        .map_err(|e| Failure::Input(format!("{}: {e}", path.display())))?;
                    println!("{}", path.display());
                }
                (None, None) => {
                    return Err(Failure::Usage(
                        "embed needs -o PATH, --cache DIR or ELD_CACHE_DIR".into(),
                    ))
                }
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let threads = cli.opts.threads;
    let result = match threads {
        Some(t) if t > 0 => match rayon::ThreadPoolBuilder::new().num_threads(t).build() {
            Ok(pool) => pool.install(|| run(cli)),
            Err(e) => Err(Failure::Usage(format!("cannot start {t} threads: {e}"))),
        },
        _ => run(cli),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            eprintln!("eld: {f}");
            ExitCode::from(f.exit_code())
        }
    }
}
