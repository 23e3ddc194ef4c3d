//! The six symmetric matrix representations of a graph used for spectral
//! ordering and clustering.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MatrixKind {
    /// `L = D - A`
    UnnormLaplacian,
    /// `D^{-1/2} L D^{-1/2}`
    NormLaplacian,
    /// `Q_ij = A_ij - d_i d_j / 2M`
    Modularity,
    /// `B = D - r A`
    BetheHessian,
    /// `I - (D + tau I)^{-1/2} (A + tau/N) (D + tau I)^{-1/2}`
    RegLaplacianTau,
    /// `(D + tau I)^{-1/2} A (D + tau I)^{-1/2}`
    RegLaplacian,
}

impl MatrixKind {
    pub const ALL: [MatrixKind; 6] = [
        MatrixKind::UnnormLaplacian,
        MatrixKind::NormLaplacian,
        MatrixKind::Modularity,
        MatrixKind::BetheHessian,
        MatrixKind::RegLaplacianTau,
        MatrixKind::RegLaplacian,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MatrixKind::UnnormLaplacian => "unnorm-laplacian",
            MatrixKind::NormLaplacian => "norm-laplacian",
            MatrixKind::Modularity => "modularity",
            MatrixKind::BetheHessian => "bethe-hessian",
            MatrixKind::RegLaplacianTau => "reg-laplacian-tau",
            MatrixKind::RegLaplacian => "reg-laplacian",
        }
    }

    /// Kinds whose relaxed variable is read after a `(d_i + tau)^{-1/2}` rescale.
    pub fn is_degree_rescaled(self) -> bool {
        matches!(
            self,
            MatrixKind::NormLaplacian | MatrixKind::RegLaplacianTau | MatrixKind::RegLaplacian
        )
    }
}

impl fmt::Display for MatrixKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MatrixKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let normalized = s.trim().to_ascii_lowercase().replace('_', "-");
        let kind = match normalized.as_str() {
            "unnorm-laplacian" | "laplacian" | "l" => MatrixKind::UnnormLaplacian,
            "norm-laplacian" | "normalized-laplacian" => MatrixKind::NormLaplacian,
            "modularity" | "q" => MatrixKind::Modularity,
            "bethe-hessian" | "bethe" | "b" => MatrixKind::BetheHessian,
            "reg-laplacian-tau" => MatrixKind::RegLaplacianTau,
            "reg-laplacian" | "regularized-laplacian" => MatrixKind::RegLaplacian,
            _ => return Err(Error::Config(format!("unknown matrix kind {s:?}"))),
        };
        Ok(kind)
    }
}

/// Matrix kind plus its hyperparameters.
///
/// `r` belongs to the Bethe Hessian and `tau` to the two regularized
/// Laplacians. Absent values are filled with graph-dependent defaults by
/// [`MatrixSpec::resolve`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MatrixSpec {
    pub kind: MatrixKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tau: Option<f64>,
}

impl MatrixSpec {
    pub fn new(kind: MatrixKind) -> Self {
        MatrixSpec {
            kind,
            r: None,
            tau: None,
        }
    }

    pub fn bethe(r: f64) -> Self {
        MatrixSpec {
            kind: MatrixKind::BetheHessian,
            r: Some(r),
            tau: None,
        }
    }

    pub fn regularized(kind: MatrixKind, tau: f64) -> Self {
        MatrixSpec {
            kind,
            r: None,
            tau: Some(tau),
        }
    }

    /// Fills missing hyperparameters from the graph and checks them.
    pub fn resolve(&self, g: &Graph) -> Result<Self> {
        let mut out = *self;
        match self.kind {
            MatrixKind::BetheHessian => {
                if out.r.is_none() {
                    out.r = Some(default_bethe_r(g)?);
                }
            }
            MatrixKind::RegLaplacianTau | MatrixKind::RegLaplacian
                if out.tau.is_none() => {
                    out.tau = Some(default_reg_tau(g));
                }
            _ => {}
        }
        out.validate()?;
        Ok(out)
    }

    /// Checks that exactly the required hyperparameters are present and usable.
    pub fn validate(&self) -> Result<()> {
        let needs_r = self.kind == MatrixKind::BetheHessian;
        let needs_tau = matches!(
            self.kind,
            MatrixKind::RegLaplacianTau | MatrixKind::RegLaplacian
        );
        match (needs_r, self.r) {
            (true, None) => {
                return Err(Error::Config("bethe-hessian requires r".into()));
            }
            (true, Some(r)) if !r.is_finite() || r == 0.0 => {
                return Err(Error::Config(format!("bethe-hessian r must be finite and nonzero, got {r}")));
            }
            (false, Some(_)) => {
                return Err(Error::Config(format!("{} takes no r", self.kind)));
            }
            _ => {}
        }
        match (needs_tau, self.tau) {
            (true, None) => Err(Error::Config(format!("{} requires tau", self.kind))),
            (true, Some(t)) if !t.is_finite() || t <= 0.0 => Err(Error::Config(format!(
                "{} requires tau > 0, got {t}",
                self.kind
            ))),
            (false, Some(_)) => Err(Error::Config(format!("{} takes no tau", self.kind))),
            _ => Ok(()),
        }
    }
}

impl From<MatrixKind> for MatrixSpec {
    fn from(kind: MatrixKind) -> Self {
        MatrixSpec::new(kind)
    }
}

/// Dense real symmetric matrix, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct SymmetricMatrix {
    n: usize,
    data: Vec<f64>,
}

impl SymmetricMatrix {
    pub fn zeros(n: usize) -> Self {
        SymmetricMatrix {
            n,
            data: vec![0.0; n * n],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Builds from a closure evaluated once per unordered pair `i <= j`.
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(n);
        for i in 0..n {
            for j in i..n {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    /// Sets `(i, j)` and `(j, i)` together.
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.n + j] = value;
        self.data[j * self.n + i] = value;
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.n + j]
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.n..(i + 1) * self.n]
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn max_abs_diff(&self, other: &SymmetricMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }
}

/// Builds the matrix representation named by `spec`.
///
/// Hyperparameters must already be present; see [`MatrixSpec::resolve`].
pub fn build_matrix(g: &Graph, spec: &MatrixSpec) -> Result<SymmetricMatrix> {
    spec.validate()?;
    let n = g.n();
    let deg: Vec<f64> = g.degrees().into_iter().map(|d| d as f64).collect();
    let mut m = SymmetricMatrix::zeros(n);
    match spec.kind {
        MatrixKind::UnnormLaplacian | MatrixKind::BetheHessian => {
            let r = spec.r.unwrap_or(1.0);
            for i in 0..n {
                m.set(i, i, deg[i]);
            }
            for &(u, v) in g.edges() {
                m.set(u, v, -r);
            }
        }
        MatrixKind::NormLaplacian => {
            if let Some(v) = deg.iter().position(|&d| d == 0.0) {
                return Err(Error::ZeroDegree(v));
            }
            for i in 0..n {
                m.set(i, i, 1.0);
            }
            for &(u, v) in g.edges() {
                m.set(u, v, -1.0 / (deg[u] * deg[v]).sqrt());
            }
        }
        MatrixKind::Modularity => {
            if g.m() == 0 {
                return Err(Error::NoEdges);
            }
            let two_m = 2.0 * g.m() as f64;
            m = SymmetricMatrix::from_fn(n, |i, j| {
                let a = if g.has_edge(i, j) { 1.0 } else { 0.0 };
                a - deg[i] * deg[j] / two_m
            });
        }
        MatrixKind::RegLaplacianTau => {
            let tau = spec.tau.expect("validated");
            let scale: Vec<f64> = deg.iter().map(|d| 1.0 / (d + tau).sqrt()).collect();
            let shift = tau / n as f64;
            m = SymmetricMatrix::from_fn(n, |i, j| {
                let a = if g.has_edge(i, j) { 1.0 } else { 0.0 };
                let id = if i == j { 1.0 } else { 0.0 };
                id - scale[i] * (a + shift) * scale[j]
            });
        }
        MatrixKind::RegLaplacian => {
            let tau = spec.tau.expect("validated");
            let scale: Vec<f64> = deg.iter().map(|d| 1.0 / (d + tau).sqrt()).collect();
            for &(u, v) in g.edges() {
                m.set(u, v, scale[u] * scale[v]);
            }
        }
    }
    Ok(m)
}

/// `sqrt(sum d_i^2 / sum d_i - 1)`, the customary Bethe Hessian scale.
pub fn default_bethe_r(g: &Graph) -> Result<f64> {
    if g.m() == 0 {
        return Err(Error::NoEdges);
    }
    let (s1, s2) = g.degrees().iter().fold((0.0, 0.0), |(a, b), &d| {
        let d = d as f64;
        (a + d, b + d * d)
    });
    let r = (s2 / s1 - 1.0).sqrt();
    if r > 0.0 {
        Ok(r)
    } else {
        Err(Error::Config(
            "default bethe-hessian r is zero for a graph of isolated edges; supply r".into(),
        ))
    }
}

/// Average degree `2m/n`, the customary regularization strength.
pub fn default_reg_tau(g: &Graph) -> f64 {
    g.mean_degree()
}
