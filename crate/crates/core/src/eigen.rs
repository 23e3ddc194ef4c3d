//! Dense symmetric eigendecomposition.
//!
//! The whole spectrum is computed once and the requested end is sliced out
//! of it. Eigenvectors are sign-normalized so that their first component
//! with magnitude above [`SIGN_THRESHOLD`] is positive, which makes repeated
//! calls on identical input bit-identical.

use faer::dyn_stack::{MemBuffer, MemStack};
use faer::linalg::evd::{self, ComputeEigenvectors};
use faer::diag::Diag;
use faer::{Mat, Par};

use crate::error::{Error, Result};
use crate::matrices::SymmetricMatrix;

pub const SIGN_THRESHOLD: f64 = 1e-10;

/// Relative gap (in units of the Frobenius norm) below which neighbouring
/// eigenvalues are reported as degenerate.
pub const DEGENERACY_TOL: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Which {
    Smallest,
    Largest,
}

/// Full eigendecomposition, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct Spectrum {
    n: usize,
    values: Vec<f64>,
    // Column-major: vector `i` occupies `vectors[i*n..(i+1)*n]`.
    vectors: Vec<f64>,
    frobenius: f64,
}

impl Spectrum {
    pub fn decompose(m: &SymmetricMatrix) -> Result<Self> {
        let n = m.n();
        if let Some(idx) = m.as_slice().iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite(idx));
        }
        let a = Mat::<f64>::from_fn(n, n, |i, j| m.get(i, j));
        let mut s = Diag::<f64>::zeros(n);
        let mut u = Mat::<f64>::zeros(n, n);
        // Sequential so results do not depend on the thread pool size.
        let par = Par::Seq;
        let scratch =
            evd::self_adjoint_evd_scratch::<f64>(n, ComputeEigenvectors::Yes, par, Default::default());
        evd::self_adjoint_evd(
            a.as_ref(),
            s.as_mut(),
            Some(u.as_mut()),
            par,
            MemStack::new(&mut MemBuffer::new(scratch)),
            Default::default(),
        )
        .map_err(|_| Error::EigenFailed)?;

        let mut values: Vec<f64> = (0..n).map(|i| s.column_vector()[i]).collect();
        let mut vectors = Vec::with_capacity(n * n);
        for j in 0..n {
            let col = u.col(j);
            let start = vectors.len();
            vectors.extend((0..n).map(|i| col[i]));
            normalize_sign(&mut vectors[start..]);
        }
        // faer already returns nondecreasing order; keep the contract explicit.
        if values.windows(2).any(|w| w[0] > w[1]) {
            let mut idx: Vec<usize> = (0..n).collect();
            idx.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
            let old_vectors = std::mem::take(&mut vectors);
            vectors = idx
                .iter()
                .flat_map(|&i| old_vectors[i * n..(i + 1) * n].iter().copied())
                .collect();
            values = idx.iter().map(|&i| values[i]).collect();
        }
        Ok(Spectrum {
            n,
            values,
            vectors,
            frobenius: m.frobenius_norm(),
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> &[f64] {
        &self.values
    }

    /// Unit eigenvector paired with the `i`-th smallest eigenvalue.
    pub fn eigenvector(&self, i: usize) -> &[f64] {
        &self.vectors[i * self.n..(i + 1) * self.n]
    }

    /// Ascending index of the `rank`-th eigenpair counted from `which` end
    /// (rank 0 is the extreme one).
    pub fn index_from(&self, which: Which, rank: usize) -> usize {
        match which {
            Which::Smallest => rank,
            Which::Largest => self.n - 1 - rank,
        }
    }

    /// True if eigenvalue `i` lies within the degeneracy tolerance of a neighbour.
    pub fn is_degenerate(&self, i: usize) -> bool {
        let tol = DEGENERACY_TOL * self.frobenius.max(f64::MIN_POSITIVE);
        let close = |j: usize| (self.values[i] - self.values[j]).abs() <= tol;
        (i > 0 && close(i - 1)) || (i + 1 < self.n && close(i + 1))
    }

    /// The `k` eigenpairs at one end of the spectrum, ascending.
    pub fn select(&self, k: usize, which: Which) -> Result<SpectrumResult> {
        if k == 0 || k > self.n {
            return Err(Error::EigenCount { k, n: self.n });
        }
        let range = match which {
            Which::Smallest => 0..k,
            Which::Largest => self.n - k..self.n,
        };
        Ok(SpectrumResult {
            eigenvalues: range.clone().map(|i| self.values[i]).collect(),
            eigenvectors: range.clone().map(|i| self.eigenvector(i).to_vec()).collect(),
            degenerate: range.map(|i| self.is_degenerate(i)).collect(),
        })
    }
}

/// A slice of eigenpairs, eigenvalues ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumResult {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<f64>>,
    /// Whether each pair sits in a (numerically) degenerate eigenspace, in
    /// which case its particular basis vector is not meaningful.
    pub degenerate: Vec<bool>,
}

/// Eigenpairs at the requested end of the spectrum of `m`.
pub fn eig_symmetric(m: &SymmetricMatrix, k: usize, which: Which) -> Result<SpectrumResult> {
    if k == 0 || k > m.n() {
        return Err(Error::EigenCount { k, n: m.n() });
    }
    Spectrum::decompose(m)?.select(k, which)
}

fn normalize_sign(v: &mut [f64]) {
    if let Some(first) = v.iter().find(|x| x.abs() > SIGN_THRESHOLD) {
        if *first < 0.0 {
            v.iter_mut().for_each(|x| *x = -*x);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::matrices::{build_matrix, MatrixKind};

    fn laplacian_p3() -> SymmetricMatrix {
        let g = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        build_matrix(&g, &MatrixKind::UnnormLaplacian.into()).unwrap()
    }

    #[test]
    fn identity_spectrum() {
        let res = eig_symmetric(&SymmetricMatrix::identity(3), 3, Which::Smallest).unwrap();
        assert_eq!(res.eigenvalues.len(), 3);
        for v in res.eigenvalues {
            assert!((v - 1.0).abs() < 1e-14);
        }
        assert!(res.degenerate.iter().all(|&d| d));
    }

    #[test]
    fn path_laplacian_spectrum() {
        // det(L - x I) = -x (x - 1) (x - 3)
        let res = eig_symmetric(&laplacian_p3(), 3, Which::Smallest).unwrap();
        for (got, want) in res.eigenvalues.iter().zip([0.0, 1.0, 3.0]) {
            assert!((got - want).abs() < 1e-12, "{got} vs {want}");
        }
        let c = 1.0 / 3f64.sqrt();
        for x in &res.eigenvectors[0] {
            assert!((x - c).abs() < 1e-12);
        }
        assert!(!res.degenerate.iter().any(|&d| d));
    }

    #[test]
    fn largest_end_is_ascending() {
        let res = eig_symmetric(&laplacian_p3(), 2, Which::Largest).unwrap();
        assert!((res.eigenvalues[0] - 1.0).abs() < 1e-12);
        assert!((res.eigenvalues[1] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_k_and_non_finite() {
        let m = laplacian_p3();
        assert!(matches!(eig_symmetric(&m, 0, Which::Smallest), Err(Error::EigenCount { .. })));
        assert!(matches!(eig_symmetric(&m, 4, Which::Largest), Err(Error::EigenCount { .. })));
        let mut bad = SymmetricMatrix::zeros(2);
        bad.set(0, 1, f64::NAN);
        assert!(matches!(eig_symmetric(&bad, 1, Which::Smallest), Err(Error::NonFinite(_))));
    }

    #[test]
    fn sign_convention_makes_first_component_positive() {
        let res = eig_symmetric(&laplacian_p3(), 3, Which::Smallest).unwrap();
        for v in &res.eigenvectors {
            let first = v.iter().find(|x| x.abs() > SIGN_THRESHOLD).unwrap();
            assert!(*first > 0.0);
        }
    }
}
