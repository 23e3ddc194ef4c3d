//! Spectral clustering: eigenvector embeddings, seeded K-means, and the
//! two-group split by sign of a sorted vector.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::eigen::{Spectrum, Which};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::matrices::{build_matrix, MatrixKind, MatrixSpec};
use crate::seed::mix_seed;

/// Group label per vertex.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Partition {
    labels: Vec<usize>,
    k: usize,
}

impl Partition {
    /// Labels must lie in `0..k`. Empty groups are allowed here; producers
    /// that forbid them check separately.
    pub fn new(labels: Vec<usize>, k: usize) -> Result<Self> {
        if let Some(&bad) = labels.iter().find(|&&l| l >= k) {
            return Err(Error::Config(format!("label {bad} out of range for k = {k}")));
        }
        Ok(Partition { labels, k })
    }

    /// Uses `max(label) + 1` groups.
    pub fn from_labels(labels: Vec<usize>) -> Self {
        let k = labels.iter().max().map_or(0, |m| m + 1);
        Partition { labels, k }
    }

    /// Contiguous blocks: the first `sizes[0]` vertices form group 0, etc.
    pub fn blocks(sizes: &[usize]) -> Self {
        let labels = sizes
            .iter()
            .enumerate()
            .flat_map(|(g, &s)| std::iter::repeat_n(g, s))
            .collect();
        Partition {
            labels,
            k: sizes.len(),
        }
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn label(&self, v: usize) -> usize {
        self.labels[v]
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    /// Group sizes, including empty groups.
    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &l in &self.labels {
            sizes[l] += 1;
        }
        sizes
    }

    /// Sizes of non-empty groups.
    pub fn occupied_sizes(&self) -> Vec<usize> {
        self.sizes().into_iter().filter(|&s| s > 0).collect()
    }

    /// Relabels groups in order of first appearance along vertex index.
    pub fn canonicalize(&self) -> Self {
        let mut map = vec![usize::MAX; self.k];
        let mut next = 0;
        let labels = self
            .labels
            .iter()
            .map(|&l| {
                if map[l] == usize::MAX {
                    map[l] = next;
                    next += 1;
                }
                map[l]
            })
            .collect();
        Partition { labels, k: next }
    }

    pub fn restrict(&self, keep: &[usize]) -> Self {
        Partition {
            labels: keep.iter().map(|&v| self.labels[v]).collect(),
            k: self.k,
        }
    }
}

/// Row-major `n x k` feature matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    n: usize,
    k: usize,
    data: Vec<f64>,
}

impl Embedding {
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let k = rows.first().map_or(0, Vec::len);
        let mut data = Vec::with_capacity(n * k);
        for row in rows {
            if row.len() != k {
                return Err(Error::SizeMismatch {
                    expected: k,
                    found: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        if let Some(i) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(i));
        }
        Ok(Embedding { n, k, data })
    }

    pub fn from_columns(columns: &[Vec<f64>]) -> Result<Self> {
        let n = columns.first().map_or(0, Vec::len);
        let rows: Vec<Vec<f64>> = (0..n).map(|i| columns.iter().map(|c| c[i]).collect()).collect();
        Self::from_rows(&rows)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.k
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.k..(i + 1) * self.k]
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        (0..self.n).map(|i| self.data[i * self.k + j]).collect()
    }

    /// Copy with column `j` negated.
    pub fn with_negated_column(&self, j: usize) -> Self {
        let mut out = self.clone();
        for i in 0..self.n {
            out.data[i * self.k + j] = -out.data[i * self.k + j];
        }
        out
    }
}

/// End of the spectrum carrying group structure for each kind.
pub fn informative_end(kind: MatrixKind) -> Which {
    match kind {
        MatrixKind::Modularity | MatrixKind::RegLaplacian => Which::Largest,
        _ => Which::Smallest,
    }
}

/// Embedding from a precomputed spectrum of the matrix built with the
/// resolved `spec`.
pub fn embed_from_spectrum(
    g: &Graph,
    spec: &MatrixSpec,
    spectrum: &Spectrum,
    k: usize,
) -> Result<Embedding> {
    let sel = spectrum.select(k, informative_end(spec.kind))?;
    let mut columns = sel.eigenvectors;
    if spec.kind.is_degree_rescaled() {
        let tau = spec.tau.unwrap_or(0.0);
        let scale: Vec<f64> = g
            .degrees()
            .into_iter()
            .map(|d| 1.0 / (d as f64 + tau).sqrt())
            .collect();
        for col in &mut columns {
            for (x, s) in col.iter_mut().zip(&scale) {
                *x *= s;
            }
        }
    }
    Embedding::from_columns(&columns)
}

/// `k` eigenvectors from the informative end, degree-rescaled where the
/// ordering discretization is.
pub fn spectral_embed(g: &Graph, spec: &MatrixSpec, k: usize) -> Result<Embedding> {
    if k == 0 || k > g.n() {
        return Err(Error::EigenCount { k, n: g.n() });
    }
    let spec = spec.resolve(g)?;
    let spectrum = Spectrum::decompose(&build_matrix(g, &spec)?)?;
    embed_from_spectrum(g, &spec, &spectrum, k)
}

pub const KMEANS_RESTARTS: usize = 50;
pub const KMEANS_MAX_ITER: usize = 300;
pub const KMEANS_TOL: f64 = 1e-8;

/// Outcome of the best K-means restart.
#[derive(Debug, Clone)]
pub struct KMeansFit {
    pub partition: Partition,
    pub centroids: Vec<Vec<f64>>,
    pub objective: f64,
    /// Objective after each assignment step of the winning restart.
    pub history: Vec<f64>,
    pub restart: usize,
}

/// Lloyd's algorithm with k-means++ seeding and restarts. Deterministic in
/// `(e, k, seed)`.
pub fn kmeans(e: &Embedding, k: usize, seed: u64) -> Result<Partition> {
    kmeans_fit(e, k, seed).map(|fit| fit.partition)
}

pub fn kmeans_fit(e: &Embedding, k: usize, seed: u64) -> Result<KMeansFit> {
    if k == 0 || k > e.n() {
        return Err(Error::Config(format!("k = {k} invalid for {} points", e.n())));
    }
    let fits: Vec<KMeansFit> = (0..KMEANS_RESTARTS)
        .into_par_iter()
        .map(|restart| lloyd(e, k, mix_seed(&[seed, restart as u64]), restart))
        .collect();
    // Lowest objective; ties resolved by restart index.
    let best = fits
        .into_iter()
        .reduce(|a, b| if b.objective < a.objective { b } else { a })
        .expect("at least one restart");
    Ok(best)
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn plus_plus_init(e: &Embedding, k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = e.n();
    let mut centroids = vec![e.row(rng.gen_range(0..n)).to_vec()];
    let mut d2: Vec<f64> = (0..n).map(|i| sq_dist(e.row(i), &centroids[0])).collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut target = rng.gen::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                if target < w {
                    chosen = i;
                    break;
                }
                target -= w;
            }
            // Guard against landing on a zero-weight tail through rounding.
            if d2[chosen] == 0.0 {
                chosen = d2.iter().rposition(|&w| w > 0.0).unwrap_or(chosen);
            }
            chosen
        } else {
            rng.gen_range(0..n)
        };
        let c = e.row(pick).to_vec();
        for (i, d) in d2.iter_mut().enumerate() {
            *d = d.min(sq_dist(e.row(i), &c));
        }
        centroids.push(c);
    }
    centroids
}

fn lloyd(e: &Embedding, k: usize, seed: u64, restart: usize) -> KMeansFit {
    let n = e.n();
    let dim = e.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut centroids = plus_plus_init(e, k, &mut rng);
    let mut labels = vec![0usize; n];
    let mut dist = vec![0.0f64; n];
    let mut history: Vec<f64> = Vec::new();

    for _ in 0..KMEANS_MAX_ITER {
        for i in 0..n {
            let (best, d) = centroids
                .iter()
                .enumerate()
                .map(|(j, c)| (j, sq_dist(e.row(i), c)))
                .fold((0, f64::INFINITY), |acc, cur| if cur.1 < acc.1 { cur } else { acc });
            labels[i] = best;
            dist[i] = d;
        }
        reseed_empty(&mut labels, &mut dist, &mut centroids, e);
        let objective: f64 = dist.iter().sum();
        if let Some(&prev) = history.last() {
            debug_assert!(
                objective <= prev + 1e-9 * prev.abs().max(1.0),
                "k-means objective increased: {prev} -> {objective}"
            );
        }
        history.push(objective);

        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for i in 0..n {
            counts[labels[i]] += 1;
            for (s, x) in sums[labels[i]].iter_mut().zip(e.row(i)) {
                *s += x;
            }
        }
        let mut movement = 0.0f64;
        for j in 0..k {
            let updated: Vec<f64> = sums[j].iter().map(|s| s / counts[j] as f64).collect();
            movement = movement.max(sq_dist(&updated, &centroids[j]).sqrt());
            centroids[j] = updated;
        }
        if movement <= KMEANS_TOL {
            break;
        }
    }
    // Final assignment against the converged centroids.
    for i in 0..n {
        let (best, d) = centroids
            .iter()
            .enumerate()
            .map(|(j, c)| (j, sq_dist(e.row(i), c)))
            .fold((0, f64::INFINITY), |acc, cur| if cur.1 < acc.1 { cur } else { acc });
        labels[i] = best;
        dist[i] = d;
    }
    reseed_empty(&mut labels, &mut dist, &mut centroids, e);
    let objective: f64 = dist.iter().sum();
    if history.last().is_none_or(|&h| objective < h) {
        history.push(objective);
    }
    KMeansFit {
        partition: Partition { labels, k },
        centroids,
        objective,
        history,
        restart,
    }
}

/// Moves the farthest point of a multi-member cluster into each empty one.
fn reseed_empty(labels: &mut [usize], dist: &mut [f64], centroids: &mut [Vec<f64>], e: &Embedding) {
    let k = centroids.len();
    let mut counts = vec![0usize; k];
    for &l in labels.iter() {
        counts[l] += 1;
    }
    for j in 0..k {
        if counts[j] > 0 {
            continue;
        }
        let far = (0..labels.len())
            .filter(|&i| counts[labels[i]] > 1)
            .fold(None, |acc: Option<usize>, i| match acc {
                Some(a) if dist[a] >= dist[i] => Some(a),
                _ => Some(i),
            });
        let Some(p) = far else { break };
        counts[labels[p]] -= 1;
        labels[p] = j;
        counts[j] = 1;
        dist[p] = 0.0;
        centroids[j] = e.row(p).to_vec();
    }
}

/// Two groups by sign, falling back to a median split by rank when every
/// entry has the same sign.
pub fn bipartition_by_sign(x: &[f64]) -> Result<Partition> {
    if let Some(i) = x.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    if x.windows(2).all(|w| w[0] == w[1]) {
        return Err(Error::Undefined("constant vector has no informative split".into()));
    }
    let negatives = x.iter().filter(|&&v| v < 0.0).count();
    if negatives > 0 && negatives < x.len() {
        let labels = x.iter().map(|&v| usize::from(v >= 0.0)).collect();
        return Ok(Partition { labels, k: 2 });
    }
    let n = x.len();
    let cut = n.div_ceil(2);
    let mut seq: Vec<usize> = (0..n).collect();
    seq.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    let mut labels = vec![0; n];
    for &v in &seq[cut..] {
        labels[v] = 1;
    }
    Ok(Partition { labels, k: 2 })
}

/// K-means on the spectral embedding, labels canonicalized.
pub fn spectral_cluster(g: &Graph, spec: &MatrixSpec, k: usize, seed: u64) -> Result<Partition> {
    let e = spectral_embed(g, spec, k)?;
    Ok(kmeans(&e, k, seed)?.canonicalize())
}

/// Same as [`spectral_cluster`] with a precomputed spectrum.
pub fn cluster_from_spectrum(
    g: &Graph,
    spec: &MatrixSpec,
    spectrum: &Spectrum,
    k: usize,
    seed: u64,
) -> Result<Partition> {
    let e = embed_from_spectrum(g, spec, spectrum, k)?;
    Ok(kmeans(&e, k, seed)?.canonicalize())
}
