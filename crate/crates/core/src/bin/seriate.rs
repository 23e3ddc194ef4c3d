use std::fs::{self, File};
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use spectral_seriation::clustering::spectral_cluster;
use spectral_seriation::experiment::{
    run_bethe_sweep, run_real, run_sweep, summarize, write_records_csv, write_summary_csv, Model, SweepConfig,
};
use spectral_seriation::graph::{load_edge_list, LoadedGraph};
use spectral_seriation::io::{
    join_on_ids, join_partitions, read_ordering_csv, read_partition_csv, write_ordering_csv, write_partition_csv,
    write_reordered_matrix_csv,
};
use spectral_seriation::matrices::{MatrixKind, MatrixSpec};
use spectral_seriation::metrics::{lce_stats, nmi};
use spectral_seriation::models::{orgm_generate, sbm_generate, OrgmParams, SbmParams};
use spectral_seriation::ordering::{default_bethe_grid, log_space, spectral_order_with, OrderOptions, RegLaplacianEnd};
use spectral_seriation::{Error, Result};

/// Spectral ordering and clustering of networks.
#[derive(Parser)]
#[command(version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Sample a planted-partition SBM graph.
    GenSbm {
        #[arg(long)]
        n: usize,
        #[arg(long, default_value_t = 2)]
        k: usize,
        #[arg(long)]
        c: f64,
        #[arg(long)]
        epsilon: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Edge list output (stdout if omitted).
        #[arg(long)]
        out: Option<PathBuf>,
        /// Planted partition CSV.
        #[arg(long)]
        labels: Option<PathBuf>,
    },
    /// Sample an ordered random graph; the planted sequence is the vertex order.
    GenOrgm {
        #[arg(long)]
        n: usize,
        #[arg(long)]
        c: f64,
        #[arg(long)]
        epsilon: f64,
        /// Bandwidth as a fraction of n.
        #[arg(long)]
        band_ratio: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Spectral ordering of an edge list, written as position,vertex.
    Order {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        matrix: MatrixArgs,
        /// Use the second-smallest eigenvector of the regularized Laplacian.
        #[arg(long)]
        reg_second_smallest: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Spectral clustering of an edge list, written as vertex,label.
    Cluster {
        #[command(flatten)]
        graph: GraphArgs,
        #[command(flatten)]
        matrix: MatrixArgs,
        #[arg(long)]
        k: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Label continuity statistics of an ordering against a partition.
    Lce {
        #[arg(long)]
        ordering: PathBuf,
        #[arg(long)]
        partition: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Normalized mutual information of two partitions.
    Nmi {
        #[arg(long)]
        a: PathBuf,
        #[arg(long)]
        b: PathBuf,
    },
    /// SBM detectability sweep from a JSON config.
    SweepSbm(SweepArgs),
    /// ORGM sweep from a JSON config.
    SweepOrgm(SweepArgs),
    /// H2 of the k smallest Bethe Hessian eigenvectors over a grid of r.
    SweepBethe {
        #[command(flatten)]
        graph: GraphArgs,
        /// Largest eigenvector index.
        #[arg(long, default_value_t = 4)]
        k: usize,
        #[arg(long, default_value_t = 30)]
        points: usize,
        #[arg(long)]
        r_min: Option<f64>,
        #[arg(long)]
        r_max: Option<f64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Order and cluster a network with several matrices and group counts.
    Real {
        #[command(flatten)]
        graph: GraphArgs,
        /// Matrix kinds (repeatable; all kinds if omitted).
        #[arg(long = "matrix")]
        matrices: Vec<MatrixKind>,
        /// Group counts (repeatable).
        #[arg(long = "k", default_values_t = [2usize, 3])]
        ks: Vec<usize>,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Records CSV.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Directory for reordered-matrix CSVs, one per matrix and k.
        #[arg(long)]
        export_dir: Option<PathBuf>,
    },
}

#[derive(Args)]
struct GraphArgs {
    /// Edge list file.
    #[arg(long)]
    graph: PathBuf,
}

impl GraphArgs {
    fn load(&self) -> Result<LoadedGraph> {
        load_edge_list(&fs::read_to_string(&self.graph)?)
    }
}

#[derive(Args)]
struct MatrixArgs {
    #[arg(long, default_value = "norm-laplacian")]
    matrix: MatrixKind,
    /// Bethe Hessian parameter.
    #[arg(long)]
    r: Option<f64>,
    /// Regularization strength.
    #[arg(long)]
    tau: Option<f64>,
}

impl MatrixArgs {
    fn spec(&self) -> MatrixSpec {
        MatrixSpec {
            kind: self.matrix,
            r: self.r,
            tau: self.tau,
        }
    }
}

#[derive(Args)]
struct SweepArgs {
    /// JSON sweep config.
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's master seed.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    workers: Option<usize>,
    /// Overrides the config's output path.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-cell means and standard errors.
    #[arg(long)]
    summary: Option<PathBuf>,
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn sweep(args: &SweepArgs, model: Model) -> Result<()> {
    let mut cfg = SweepConfig::from_json(&fs::read_to_string(&args.config)?)?;
    if cfg.model != model {
        return Err(Error::Config(format!("config describes a {} sweep", cfg.model)));
    }
    cfg.master_seed = args.seed.unwrap_or(cfg.master_seed);
    cfg.trials = args.trials.unwrap_or(cfg.trials);
    cfg.workers = args.workers.or(cfg.workers);
    let records = run_sweep(&cfg)?;
    let out = args.out.as_deref().or(cfg.output.as_deref());
    write_records_csv(&records, sink(out)?)?;
    if let Some(path) = &args.summary {
        write_summary_csv(&summarize(&records), sink(Some(path))?)?;
    }
    Ok(())
}

fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::GenSbm { n, k, c, epsilon, seed, out, labels } => {
            let (g, planted) = sbm_generate(&SbmParams::new(n, k, c, epsilon)?, seed)?;
            sink(out.as_deref())?.write_all(g.to_edge_list().as_bytes())?;
            if let Some(path) = labels {
                write_partition_csv(&planted, None, sink(Some(&path))?)?;
            }
        }
        Command::GenOrgm { n, c, epsilon, band_ratio, seed, out } => {
            let band = spectral_seriation::models::band_from_ratio(n, band_ratio);
            let g = orgm_generate(&OrgmParams::new(n, c, epsilon, band)?, seed)?;
            sink(out.as_deref())?.write_all(g.to_edge_list().as_bytes())?;
        }
        Command::Order { graph, matrix, reg_second_smallest, out } => {
            let loaded = graph.load()?;
            let opts = OrderOptions {
                reg_laplacian_end: if reg_second_smallest {
                    RegLaplacianEnd::SecondSmallest
                } else {
                    RegLaplacianEnd::SecondLargest
                },
            };
            let pi = spectral_order_with(&loaded.graph, &matrix.spec(), opts)?;
            write_ordering_csv(&pi, Some(&loaded.original_ids), sink(out.as_deref())?)?;
        }
        Command::Cluster { graph, matrix, k, seed, out } => {
            let loaded = graph.load()?;
            let sigma = spectral_cluster(&loaded.graph, &matrix.spec(), k, seed)?;
            write_partition_csv(&sigma, Some(&loaded.original_ids), sink(out.as_deref())?)?;
        }
        Command::Lce { ordering, partition, out } => {
            let seq = read_ordering_csv(&fs::read_to_string(ordering)?)?;
            let labels = read_partition_csv(&fs::read_to_string(partition)?)?;
            let (_, pi, sigma) = join_on_ids(&seq, &labels)?;
            let stats = lce_stats(&pi, &sigma)?;
            writeln!(sink(out.as_deref())?, "{stats}")?;
        }
        Command::Nmi { a, b } => {
            let a = read_partition_csv(&fs::read_to_string(a)?)?;
            let b = read_partition_csv(&fs::read_to_string(b)?)?;
            let (a, b) = join_partitions(&a, &b)?;
            println!("{}", nmi(&a, &b)?);
        }
        Command::SweepSbm(args) => sweep(&args, Model::Sbm)?,
        Command::SweepOrgm(args) => sweep(&args, Model::Orgm)?,
        Command::SweepBethe { graph, k, points, r_min, r_max, out } => {
            let g = graph.load()?.graph;
            let grid = match (r_min, r_max) {
                (None, None) => default_bethe_grid(&g, points)?,
                (lo, hi) => {
                    let default = default_bethe_grid(&g, 2)?;
                    log_space(lo.unwrap_or(default[0]), hi.unwrap_or(default[1]), points)
                }
            };
            run_bethe_sweep(&g, &grid, k, sink(out.as_deref())?)?;
        }
        Command::Real { graph, matrices, ks, seed, out, export_dir } => {
            let loaded = graph.load()?;
            let kinds = if matrices.is_empty() { MatrixKind::ALL.to_vec() } else { matrices };
            let (records, results) = run_real(&loaded, &kinds, &ks, seed)?;
            write_records_csv(&records, sink(out.as_deref())?)?;
            if let Some(dir) = export_dir {
                fs::create_dir_all(&dir)?;
                for r in &results {
                    let path = dir.join(format!("{}_k{}.csv", r.matrix, r.k));
                    write_reordered_matrix_csv(&loaded.graph, &r.ordering, &r.partition, sink(Some(&path))?)?;
                }
            }
        }
    }
    Ok(())
}

fn main() {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    if let Err(e) = run(Cli::parse()) {
        eprintln!("error: {e}");
        std::process::exit(1);
    }
}
