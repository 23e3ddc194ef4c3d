//! Spectral ordering: the squared-distance objective, rank discretization of
//! relaxed vectors, per-matrix eigenvector selection, and the Bethe Hessian
//! hyperparameter sweep.

use std::io::Write;

use rayon::prelude::*;

use crate::eigen::Spectrum;
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::matrices::{build_matrix, default_bethe_r, MatrixKind, MatrixSpec};

/// A vertex sequence: `perm[v]` is the position of vertex `v`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Ordering {
    perm: Vec<usize>,
    inv: Vec<usize>,
}

impl Ordering {
    /// Wraps a position array, checking that it is a bijection on `0..n`.
    pub fn new(perm: Vec<usize>) -> Result<Self> {
        let n = perm.len();
        let mut inv = vec![usize::MAX; n];
        for (v, &p) in perm.iter().enumerate() {
            if p >= n {
                return Err(Error::InvalidOrdering(format!("position {p} out of range")));
            }
            if inv[p] != usize::MAX {
                return Err(Error::InvalidOrdering(format!("position {p} used twice")));
            }
            inv[p] = v;
        }
        Ok(Ordering { perm, inv })
    }

    /// Builds from the vertex sequence, `seq[position] = vertex`.
    pub fn from_sequence(seq: Vec<usize>) -> Result<Self> {
        let inv = Ordering::new(seq)?;
        Ok(Ordering {
            perm: inv.inv,
            inv: inv.perm,
        })
    }

    pub fn identity(n: usize) -> Self {
        Ordering {
            perm: (0..n).collect(),
            inv: (0..n).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.perm.len()
    }

    pub fn is_empty(&self) -> bool {
        self.perm.is_empty()
    }

    /// Position of each vertex.
    pub fn positions(&self) -> &[usize] {
        &self.perm
    }

    /// Vertices in sequence order.
    pub fn sequence(&self) -> &[usize] {
        &self.inv
    }

    pub fn position(&self, v: usize) -> usize {
        self.perm[v]
    }

    pub fn vertex_at(&self, position: usize) -> usize {
        self.inv[position]
    }

    /// The same sequence read backwards.
    pub fn reversed(&self) -> Self {
        let n = self.len();
        Ordering {
            perm: self.perm.iter().map(|&p| n - 1 - p).collect(),
            inv: self.inv.iter().rev().copied().collect(),
        }
    }

    /// Restricts to the vertices in `keep` (renumbered `0..keep.len()`),
    /// preserving their relative order.
    pub fn restrict(&self, keep: &[usize]) -> Result<Self> {
        let mut idx: Vec<usize> = (0..keep.len()).collect();
        idx.sort_by_key(|&i| self.perm[keep[i]]);
        Ordering::from_sequence(idx)
    }
}

/// Squared-distance objective: the sum over edges of `(pi_u - pi_v)^2`.
pub fn h2(pi: &Ordering, g: &Graph) -> Result<u64> {
    if pi.len() != g.n() {
        return Err(Error::SizeMismatch {
            expected: g.n(),
            found: pi.len(),
        });
    }
    Ok(g.edges()
        .iter()
        .map(|&(u, v)| {
            let d = pi.position(u).abs_diff(pi.position(v)) as u64;
            d * d
        })
        .sum())
}

/// Ascending ranks of `x`; ties go to the smaller index first.
pub fn rank_discretize(x: &[f64]) -> Result<Ordering> {
    if let Some(i) = x.iter().position(|v| !v.is_finite()) {
        return Err(Error::NonFinite(i));
    }
    let mut seq: Vec<usize> = (0..x.len()).collect();
    // sort_by is stable, so equal values keep index order.
    seq.sort_by(|&a, &b| x[a].total_cmp(&x[b]));
    Ordering::from_sequence(seq)
}

/// Which eigenvector of the degree-regularized Laplacian drives ordering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegLaplacianEnd {
    /// Second-largest eigenvalue: the analogue of the normalized Laplacian's
    /// Fiedler vector, since the matrix tends to `I - L_norm` as tau -> 0.
    #[default]
    SecondLargest,
    /// Second-smallest eigenvalue.
    SecondSmallest,
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OrderOptions {
    pub reg_laplacian_end: RegLaplacianEnd,
}

/// The relaxed continuous sequence from which an ordering is discretized.
#[derive(Debug, Clone)]
pub struct RelaxedVector {
    pub values: Vec<f64>,
    pub eigenvalue: f64,
    /// Ascending index of the eigenpair used.
    pub eigen_index: usize,
    /// The eigenvalue is numerically repeated, so the vector is one arbitrary
    /// member of its eigenspace.
    pub degenerate: bool,
}

/// Cosine distance below which a modularity eigenvector counts as constant.
const CONSTANT_VECTOR_TOL: f64 = 1e-8;

/// Extracts the relaxed ordering vector from a precomputed spectrum of the
/// matrix built with `spec` (already resolved).
pub fn relaxed_vector(
    g: &Graph,
    spec: &MatrixSpec,
    spectrum: &Spectrum,
    opts: OrderOptions,
) -> Result<RelaxedVector> {
    let n = g.n();
    if n < 2 {
        return Err(Error::Config("ordering needs at least two vertices".into()));
    }
    let index = match spec.kind {
        MatrixKind::UnnormLaplacian
        | MatrixKind::NormLaplacian
        | MatrixKind::BetheHessian
        | MatrixKind::RegLaplacianTau => 1,
        MatrixKind::RegLaplacian => match opts.reg_laplacian_end {
            RegLaplacianEnd::SecondLargest => n - 2,
            RegLaplacianEnd::SecondSmallest => 1,
        },
        MatrixKind::Modularity => {
            let top = n - 1;
            if is_nearly_constant(spectrum.eigenvector(top)) {
                top - 1
            } else {
                top
            }
        }
    };
    let mut values = spectrum.eigenvector(index).to_vec();
    if spec.kind.is_degree_rescaled() {
        let tau = spec.tau.unwrap_or(0.0);
        for (x, d) in values.iter_mut().zip(g.degrees()) {
            *x /= (d as f64 + tau).sqrt();
        }
    }
    Ok(RelaxedVector {
        values,
        eigenvalue: spectrum.eigenvalues()[index],
        eigen_index: index,
        degenerate: spectrum.is_degenerate(index),
    })
}

fn is_nearly_constant(v: &[f64]) -> bool {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm == 0.0 {
        return true;
    }
    let cosine = v.iter().sum::<f64>().abs() / (norm * (v.len() as f64).sqrt());
    1.0 - cosine <= CONSTANT_VECTOR_TOL
}

/// Computes the relaxed ordering vector, building and decomposing the matrix.
pub fn ordering_vector(g: &Graph, spec: &MatrixSpec, opts: OrderOptions) -> Result<RelaxedVector> {
    let spec = spec.resolve(g)?;
    if !g.is_connected() {
        log::warn!(
            "graph has {} components; {} ordering is ill-posed",
            g.component_count(),
            spec.kind
        );
    }
    let spectrum = Spectrum::decompose(&build_matrix(g, &spec)?)?;
    let rv = relaxed_vector(g, &spec, &spectrum, opts)?;
    if rv.degenerate {
        log::warn!(
            "{} ordering eigenvalue {} is degenerate; the eigenvector is not unique",
            spec.kind,
            rv.eigenvalue
        );
    }
    Ok(rv)
}

/// Spectral ordering with the default options.
pub fn spectral_order(g: &Graph, spec: &MatrixSpec) -> Result<Ordering> {
    spectral_order_with(g, spec, OrderOptions::default())
}

pub fn spectral_order_with(g: &Graph, spec: &MatrixSpec, opts: OrderOptions) -> Result<Ordering> {
    rank_discretize(&ordering_vector(g, spec, opts)?.values)
}

/// One row of a Bethe Hessian sweep.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SweepRow {
    pub r: f64,
    /// 1-based eigenvector index from the smallest end.
    pub k: usize,
    pub h2: u64,
}

/// For each `r`, orders by each of the `k_max` smallest eigenvectors of
/// `D - rA` and records the achieved objective. Rows are sorted by `(r, k)`.
pub fn bethe_sweep(g: &Graph, r_grid: &[f64], k_max: usize) -> Result<Vec<SweepRow>> {
    if k_max == 0 || k_max > g.n() {
        return Err(Error::EigenCount { k: k_max, n: g.n() });
    }
    let per_r: Vec<Vec<SweepRow>> = r_grid
        .par_iter()
        .map(|&r| {
            let spec = MatrixSpec::bethe(r);
            let spectrum = Spectrum::decompose(&build_matrix(g, &spec)?)?;
            (0..k_max)
                .map(|i| {
                    let pi = rank_discretize(spectrum.eigenvector(i))?;
                    Ok(SweepRow {
                        r,
                        k: i + 1,
                        h2: h2(&pi, g)?,
                    })
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<_>>()?;
    let mut rows: Vec<SweepRow> = per_r.into_iter().flatten().collect();
    rows.sort_by(|a, b| a.r.total_cmp(&b.r).then(a.k.cmp(&b.k)));
    Ok(rows)
}

/// `points` log-spaced values in `[0.1, 2 * default_bethe_r(g)]`.
pub fn default_bethe_grid(g: &Graph, points: usize) -> Result<Vec<f64>> {
    let hi = 2.0 * default_bethe_r(g)?;
    Ok(log_space(0.1, hi, points))
}

pub const DEFAULT_BETHE_GRID_POINTS: usize = 30;

pub fn log_space(lo: f64, hi: f64, points: usize) -> Vec<f64> {
    match points {
        0 => vec![],
        1 => vec![lo],
        _ => {
            let (a, b) = (lo.ln(), hi.ln());
            (0..points)
                .map(|i| (a + (b - a) * i as f64 / (points - 1) as f64).exp())
                .collect()
        }
    }
}

/// Writes sweep rows as CSV with header `r,k,h2`.
pub fn write_sweep_csv<W: Write>(rows: &[SweepRow], mut out: W) -> Result<()> {
    writeln!(out, "r,k,h2")?;
    for row in rows {
        writeln!(out, "{},{},{}", row.r, row.k, row.h2)?;
    }
    Ok(())
}
