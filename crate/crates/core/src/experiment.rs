//! Seeded experiment sweeps over the SBM and ORGM, and the analysis of a
//! single real network.
//!
//! Each trial draws a graph, shuffles its vertex ids so the planted order
//! cannot leak through the input, drops isolated vertices, runs every
//! requested matrix kind on the result and scores the outputs against the
//! planted structure in the original vertex ids. One matrix decomposition is
//! shared between ordering and clustering.
//!
//! Trial seeds are `mix_seed(master_seed, cell, trial)`, so records do not
//! depend on scheduling; the harness collects them in cell and trial order.

use std::fmt;
use std::io::Write;
use std::path::PathBuf;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::clustering::{cluster_from_spectrum, Partition};
use crate::eigen::Spectrum;
use crate::error::{Error, Result};
use crate::graph::{Graph, LoadedGraph};
use crate::matrices::{build_matrix, MatrixKind, MatrixSpec};
use crate::metrics::{kendall_tau, max_group_fraction, nmi, normalized_lce};
use crate::models::{band_from_ratio, orgm_generate, sbm_generate, OrgmParams, SbmParams};
use crate::ordering::{bethe_sweep, h2, rank_discretize, relaxed_vector, write_sweep_csv, OrderOptions, Ordering};
use crate::seed::mix_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Model {
    Sbm,
    Orgm,
    Real,
}

impl fmt::Display for Model {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Model::Sbm => "sbm",
            Model::Orgm => "orgm",
            Model::Real => "real",
        })
    }
}

fn all_kinds() -> Vec<MatrixKind> {
    MatrixKind::ALL.to_vec()
}

fn default_ks() -> Vec<usize> {
    vec![2]
}

/// Sweep description, read from JSON.
///
/// For the SBM, `ks` are planted group counts (clustering uses the same
/// `K`). For the ORGM, `ks` are the numbers of clusters requested and
/// `band_ratios` set the bandwidth as a fraction of `n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    pub model: Model,
    pub n: usize,
    pub c: f64,
    pub epsilons: Vec<f64>,
    #[serde(default = "default_ks")]
    pub ks: Vec<usize>,
    #[serde(default)]
    pub band_ratios: Vec<f64>,
    #[serde(default = "all_kinds")]
    pub matrices: Vec<MatrixKind>,
    pub trials: usize,
    pub master_seed: u64,
    /// ORGM only: also order the vertices and record Kendall's tau against
    /// the planted sequence.
    #[serde(default)]
    pub kendall: bool,
    #[serde(default)]
    pub output: Option<PathBuf>,
    /// Worker threads; `None` uses the global pool.
    #[serde(default)]
    pub workers: Option<usize>,
}

impl SweepConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: SweepConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let fail = |m: &str| Err(Error::Config(m.to_string()));
        if self.trials == 0 {
            return fail("trials must be at least 1");
        }
        if self.n < 2 {
            return fail("n must be at least 2");
        }
        if self.epsilons.is_empty() || self.ks.is_empty() || self.matrices.is_empty() {
            return fail("epsilons, ks and matrices must be non-empty");
        }
        if self.ks.iter().any(|&k| k == 0 || k > self.n) {
            return fail("every k must lie in 1..=n");
        }
        match self.model {
            Model::Orgm if self.band_ratios.is_empty() => fail("ORGM sweeps need band_ratios"),
            Model::Orgm if self.band_ratios.iter().any(|&b| !(b > 0.0 && b < 1.0)) => {
                fail("band ratios must lie in (0, 1)")
            }
            Model::Sbm if !self.band_ratios.is_empty() => fail("band_ratios apply to ORGM sweeps only"),
            Model::Real => fail("real networks are analysed with run_real, not a sweep"),
            _ => Ok(()),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Metric {
    Nmi,
    Lce,
    NormalizedLce,
    MaxGroupFraction,
    KendallTau,
    H2,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    Failed,
}

/// One metric value from one trial. Failed records carry no value and a
/// short reason in `note`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRecord {
    pub model: Model,
    pub n: usize,
    pub c: f64,
    pub epsilon: Option<f64>,
    pub k: usize,
    pub band_ratio: Option<f64>,
    pub matrix: MatrixKind,
    pub trial: usize,
    pub seed: u64,
    pub metric: Metric,
    pub value: Option<f64>,
    pub status: Status,
    pub note: String,
}

/// Coordinates shared by the records of one trial.
#[derive(Debug, Clone, Copy)]
struct Cell {
    model: Model,
    n: usize,
    c: f64,
    epsilon: Option<f64>,
    band_ratio: Option<f64>,
    trial: usize,
    seed: u64,
}

impl Cell {
    fn record(&self, k: usize, matrix: MatrixKind, metric: Metric, value: Result<f64>) -> ResultRecord {
        let (value, status, note) = match value {
            Ok(v) if v.is_finite() => (Some(v), Status::Ok, String::new()),
            Ok(v) => (None, Status::Failed, format!("non-finite value {v}")),
            Err(e) => (None, Status::Failed, e.to_string()),
        };
        ResultRecord {
            model: self.model,
            n: self.n,
            c: self.c,
            epsilon: self.epsilon,
            k,
            band_ratio: self.band_ratio,
            matrix,
            trial: self.trial,
            seed: self.seed,
            metric,
            value,
            status,
            note,
        }
    }
}

pub fn write_records_csv<W: Write>(records: &[ResultRecord], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in records {
        w.serialize(r).map_err(csv_to_io)?;
    }
    if records.is_empty() {
        w.write_record([
            "model", "n", "c", "epsilon", "k", "band_ratio", "matrix", "trial", "seed", "metric", "value",
            "status", "note",
        ])
        .map_err(csv_to_io)?;
    }
    w.flush()?;
    Ok(())
}

fn csv_to_io(e: csv::Error) -> Error {
    Error::Io(std::io::Error::other(e))
}

/// A sampled graph with its planted structure, relabeled for the
/// algorithms.
struct Prepared {
    /// Shuffled graph without isolated vertices.
    graph: Graph,
    /// `to_compact[v]` indexes `graph` vertex `v` among the surviving
    /// original vertices in ascending id order.
    to_compact: Vec<usize>,
    /// Surviving original vertices, ascending.
    survivors: Vec<usize>,
}

impl Prepared {
    fn new(g: &Graph, shuffle_seed: u64) -> Result<Self> {
        let n = g.n();
        let mut perm: Vec<usize> = (0..n).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(shuffle_seed));
        let shuffled = g.permute(&perm)?;
        let mut original = vec![0; n];
        for (v, &p) in perm.iter().enumerate() {
            original[p] = v;
        }
        let keep = shuffled.non_isolated();
        if keep.len() < 2 {
            return Err(Error::NoEdges);
        }
        let survivors = g.non_isolated();
        let mut rank = vec![usize::MAX; n];
        for (i, &v) in survivors.iter().enumerate() {
            rank[v] = i;
        }
        Ok(Prepared {
            graph: shuffled.induced_subgraph(&keep)?,
            to_compact: keep.iter().map(|&s| rank[original[s]]).collect(),
            survivors,
        })
    }

    fn ordering(&self, pi: &Ordering) -> Result<Ordering> {
        Ordering::from_sequence(pi.sequence().iter().map(|&v| self.to_compact[v]).collect())
    }

    fn partition(&self, sigma: &Partition) -> Partition {
        let mut labels = vec![0; sigma.len()];
        for (v, &l) in sigma.labels().iter().enumerate() {
            labels[self.to_compact[v]] = l;
        }
        Partition::from_labels(labels)
    }
}

/// Resolved spec and spectrum of one matrix kind on one graph.
fn decompose(g: &Graph, kind: MatrixKind) -> Result<(MatrixSpec, Spectrum)> {
    let spec = MatrixSpec::new(kind).resolve(g)?;
    let spectrum = Spectrum::decompose(&build_matrix(g, &spec)?)?;
    Ok((spec, spectrum))
}

fn order_from(g: &Graph, spec: &MatrixSpec, spectrum: &Spectrum) -> Result<Ordering> {
    rank_discretize(&relaxed_vector(g, spec, spectrum, OrderOptions::default())?.values)
}

fn trial_seeds(seed: u64) -> (u64, u64, u64) {
    (mix_seed(&[seed, 0]), mix_seed(&[seed, 1]), mix_seed(&[seed, 2]))
}

/// Records for one SBM trial. Reproduces a stored record given its
/// `epsilon`, `k`, `trial` and `seed`.
pub fn run_sbm_trial(cfg: &SweepConfig, epsilon: f64, k: usize, trial: usize, seed: u64) -> Vec<ResultRecord> {
    let cell = Cell {
        model: Model::Sbm,
        n: cfg.n,
        c: cfg.c,
        epsilon: Some(epsilon),
        band_ratio: None,
        trial,
        seed,
    };
    let (graph_seed, shuffle_seed, kmeans_seed) = trial_seeds(seed);
    let sampled = SbmParams::new(cfg.n, k, cfg.c, epsilon)
        .and_then(|p| sbm_generate(&p, graph_seed))
        .and_then(|(g, planted)| Ok((Prepared::new(&g, shuffle_seed)?, planted)));
    let mut records = Vec::with_capacity(2 * cfg.matrices.len());
    for &kind in &cfg.matrices {
        let (prep, planted) = match &sampled {
            Ok(s) => s,
            Err(e) => {
                let err = || Err(Error::Config(e.to_string()));
                records.push(cell.record(k, kind, Metric::NormalizedLce, err()));
                records.push(cell.record(k, kind, Metric::Nmi, err()));
                continue;
            }
        };
        let planted = planted.restrict(&prep.survivors);
        let (lce, nmi_value) = match decompose(&prep.graph, kind) {
            Ok((spec, spectrum)) => (
                order_from(&prep.graph, &spec, &spectrum)
                    .and_then(|pi| prep.ordering(&pi))
                    .and_then(|pi| normalized_lce(&pi, &planted)),
                cluster_from_spectrum(&prep.graph, &spec, &spectrum, k, kmeans_seed)
                    .and_then(|s| nmi(&prep.partition(&s), &planted)),
            ),
            Err(e) => {
                let msg = e.to_string();
                (Err(e), Err(Error::Config(msg)))
            }
        };
        records.push(cell.record(k, kind, Metric::NormalizedLce, lce));
        records.push(cell.record(k, kind, Metric::Nmi, nmi_value));
    }
    records
}

/// Records for one ORGM trial.
pub fn run_orgm_trial(
    cfg: &SweepConfig,
    epsilon: f64,
    band_ratio: f64,
    trial: usize,
    seed: u64,
) -> Vec<ResultRecord> {
    let cell = Cell {
        model: Model::Orgm,
        n: cfg.n,
        c: cfg.c,
        epsilon: Some(epsilon),
        band_ratio: Some(band_ratio),
        trial,
        seed,
    };
    let (graph_seed, shuffle_seed, kmeans_seed) = trial_seeds(seed);
    let band = band_from_ratio(cfg.n, band_ratio);
    let prep = OrgmParams::new(cfg.n, cfg.c, epsilon, band)
        .and_then(|p| orgm_generate(&p, graph_seed))
        .and_then(|g| Prepared::new(&g, shuffle_seed));
    let mut records = Vec::new();
    for &kind in &cfg.matrices {
        let decomposed = prep
            .as_ref()
            .map_err(|e| Error::Config(e.to_string()))
            .and_then(|prep| Ok((prep, decompose(&prep.graph, kind)?)));
        let (prep, (spec, spectrum)) = match decomposed {
            Ok(d) => d,
            Err(e) => {
                for &k in &cfg.ks {
                    records.push(cell.record(k, kind, Metric::NormalizedLce, Err(Error::Config(e.to_string()))));
                    records.push(cell.record(k, kind, Metric::MaxGroupFraction, Err(Error::Config(e.to_string()))));
                }
                if cfg.kendall {
                    records.push(cell.record(0, kind, Metric::KendallTau, Err(e)));
                }
                continue;
            }
        };
        // Survivors are in ascending original order, which is the planted sequence.
        let planted = Ordering::identity(prep.survivors.len());
        for &k in &cfg.ks {
            let sigma = cluster_from_spectrum(&prep.graph, &spec, &spectrum, k, kmeans_seed).map(|s| prep.partition(&s));
            let (lce, frac) = match sigma {
                Ok(s) => (normalized_lce(&planted, &s), Ok(max_group_fraction(&s))),
                Err(e) => {
                    let msg = e.to_string();
                    (Err(e), Err(Error::Config(msg)))
                }
            };
            records.push(cell.record(k, kind, Metric::NormalizedLce, lce));
            records.push(cell.record(k, kind, Metric::MaxGroupFraction, frac));
        }
        if cfg.kendall {
            // |tau| is the same against the planted sequence and its reversal.
            let tau = order_from(&prep.graph, &spec, &spectrum)
                .and_then(|pi| prep.ordering(&pi))
                .and_then(|pi| kendall_tau(&pi, &planted))
                .map(f64::abs);
            records.push(cell.record(0, kind, Metric::KendallTau, tau));
        }
    }
    records
}

fn in_pool<T: Send>(workers: Option<usize>, job: impl FnOnce() -> T + Send) -> Result<T> {
    match workers {
        None => Ok(job()),
        Some(w) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(w.max(1))
                .build()
                .map_err(|e| Error::Config(format!("cannot start {w} workers: {e}")))?;
            Ok(pool.install(job))
        }
    }
}

/// Runs every `(epsilon, K)` cell of an SBM sweep.
pub fn run_sbm_sweep(cfg: &SweepConfig) -> Result<Vec<ResultRecord>> {
    cfg.validate()?;
    if cfg.model != Model::Sbm {
        return Err(Error::Config(format!("expected an sbm config, got {}", cfg.model)));
    }
    let jobs: Vec<(f64, usize, usize, u64)> = cfg
        .epsilons
        .iter()
        .flat_map(|&eps| cfg.ks.iter().map(move |&k| (eps, k)))
        .enumerate()
        .flat_map(|(cell, (eps, k))| {
            (0..cfg.trials).map(move |t| (eps, k, t, mix_seed(&[cfg.master_seed, cell as u64, t as u64])))
        })
        .collect();
    in_pool(cfg.workers, || {
        jobs.par_iter()
            .map(|&(eps, k, t, seed)| run_sbm_trial(cfg, eps, k, t, seed))
            .collect::<Vec<_>>()
            .concat()
    })
}

/// Runs every `(epsilon, band ratio)` cell of an ORGM sweep.
pub fn run_orgm_sweep(cfg: &SweepConfig) -> Result<Vec<ResultRecord>> {
    cfg.validate()?;
    if cfg.model != Model::Orgm {
        return Err(Error::Config(format!("expected an orgm config, got {}", cfg.model)));
    }
    let jobs: Vec<(f64, f64, usize, u64)> = cfg
        .epsilons
        .iter()
        .flat_map(|&eps| cfg.band_ratios.iter().map(move |&b| (eps, b)))
        .enumerate()
        .flat_map(|(cell, (eps, b))| {
            (0..cfg.trials).map(move |t| (eps, b, t, mix_seed(&[cfg.master_seed, cell as u64, t as u64])))
        })
        .collect();
    in_pool(cfg.workers, || {
        jobs.par_iter()
            .map(|&(eps, b, t, seed)| run_orgm_trial(cfg, eps, b, t, seed))
            .collect::<Vec<_>>()
            .concat()
    })
}

/// Dispatches on `cfg.model`.
pub fn run_sweep(cfg: &SweepConfig) -> Result<Vec<ResultRecord>> {
    match cfg.model {
        Model::Sbm => run_sbm_sweep(cfg),
        Model::Orgm => run_orgm_sweep(cfg),
        Model::Real => Err(Error::Config("real networks are analysed with run_real".into())),
    }
}

/// Mean and standard error of one metric over the trials of a cell.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CellSummary {
    pub epsilon: Option<f64>,
    pub k: usize,
    pub band_ratio: Option<f64>,
    pub matrix: MatrixKind,
    pub metric: Metric,
    pub mean: f64,
    pub std_error: f64,
    pub ok: usize,
    pub failed: usize,
}

/// Aggregates records over trials, in order of first appearance.
pub fn summarize(records: &[ResultRecord]) -> Vec<CellSummary> {
    type Key = (Option<u64>, usize, Option<u64>, MatrixKind, Metric);
    let mut keys: Vec<Key> = Vec::new();
    let mut groups: Vec<(Vec<f64>, usize)> = Vec::new();
    for r in records {
        let key = (r.epsilon.map(f64::to_bits), r.k, r.band_ratio.map(f64::to_bits), r.matrix, r.metric);
        let idx = keys.iter().position(|k| *k == key).unwrap_or_else(|| {
            keys.push(key);
            groups.push((Vec::new(), 0));
            keys.len() - 1
        });
        match r.value {
            Some(v) => groups[idx].0.push(v),
            None => groups[idx].1 += 1,
        }
    }
    keys.into_iter()
        .zip(groups)
        .map(|((eps, k, band, matrix, metric), (values, failed))| {
            let count = values.len();
            let mean = if count > 0 { values.iter().sum::<f64>() / count as f64 } else { f64::NAN };
            let std_error = if count > 1 {
                let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (count - 1) as f64;
                (var / count as f64).sqrt()
            } else {
                0.0
            };
            CellSummary {
                epsilon: eps.map(f64::from_bits),
                k,
                band_ratio: band.map(f64::from_bits),
                matrix,
                metric,
                mean,
                std_error,
                ok: count,
                failed,
            }
        })
        .collect()
}

pub fn write_summary_csv<W: Write>(rows: &[CellSummary], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r).map_err(csv_to_io)?;
    }
    w.flush()?;
    Ok(())
}

/// Ordering and clustering of a real network for one `(matrix, K)` pair.
#[derive(Debug, Clone)]
pub struct RealResult {
    pub matrix: MatrixKind,
    pub k: usize,
    pub ordering: Ordering,
    pub partition: Partition,
}

/// Orders and clusters `loaded` with every kind and `K`, recording the
/// normalized LCE between the two outputs and the ordering's objective.
/// Kinds that fail (for example normalized kinds on graphs with isolated
/// vertices) produce failed records; the others proceed.
pub fn run_real(
    loaded: &LoadedGraph,
    kinds: &[MatrixKind],
    ks: &[usize],
    seed: u64,
) -> Result<(Vec<ResultRecord>, Vec<RealResult>)> {
    if kinds.is_empty() || ks.is_empty() {
        return Err(Error::Config("need at least one matrix kind and one k".into()));
    }
    let g = &loaded.graph;
    let cell = Cell {
        model: Model::Real,
        n: g.n(),
        c: g.mean_degree(),
        epsilon: None,
        band_ratio: None,
        trial: 0,
        seed,
    };
    if !g.is_connected() {
        log::warn!("graph has {} components", g.component_count());
    }
    let per_kind: Vec<(Vec<ResultRecord>, Vec<RealResult>)> = kinds
        .par_iter()
        .map(|&kind| {
            let mut records = Vec::new();
            let mut results = Vec::new();
            let decomposed =
                decompose(g, kind).and_then(|(spec, sp)| Ok((order_from(g, &spec, &sp)?, spec, sp)));
            let (pi, spec, spectrum) = match decomposed {
                Ok(d) => d,
                Err(e) => {
                    log::warn!("{kind}: {e}");
                    for &k in ks {
                        records.push(cell.record(k, kind, Metric::H2, Err(Error::Config(e.to_string()))));
                        records.push(cell.record(k, kind, Metric::NormalizedLce, Err(Error::Config(e.to_string()))));
                    }
                    return (records, results);
                }
            };
            let h = h2(&pi, g).map(|v| v as f64);
            for &k in ks {
                records.push(cell.record(k, kind, Metric::H2, h.as_ref().map(|v| *v).map_err(|e| Error::Config(e.to_string()))));
                match cluster_from_spectrum(g, &spec, &spectrum, k, seed) {
                    Ok(sigma) => {
                        records.push(cell.record(k, kind, Metric::NormalizedLce, normalized_lce(&pi, &sigma)));
                        results.push(RealResult {
                            matrix: kind,
                            k,
                            ordering: pi.clone(),
                            partition: sigma,
                        });
                    }
                    Err(e) => records.push(cell.record(k, kind, Metric::NormalizedLce, Err(e))),
                }
            }
            (records, results)
        })
        .collect();
    let (records, results): (Vec<_>, Vec<_>) = per_kind.into_iter().unzip();
    Ok((records.concat(), results.concat()))
}

/// Bethe Hessian sweep of a loaded graph written as `r,k,h2` CSV.
pub fn run_bethe_sweep<W: Write>(g: &Graph, r_grid: &[f64], k_max: usize, out: W) -> Result<()> {
    let rows = bethe_sweep(g, r_grid, k_max)?;
    write_sweep_csv(&rows, out)
}
