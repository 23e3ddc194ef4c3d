//! Consistency between a vertex sequence and a partition.
//!
//! The label continuity `C` of a sequence is the fraction of adjacent pairs
//! that share a group label. The label continuity error (LCE)
//!
//! ```text
//! Delta = 1 - (K - 1)/(N - 1) - C
//! ```
//!
//! is zero when each group occupies one contiguous run. Its maximum over
//! sequences, and its mean and variance under random relabeling, depend only
//! on the group sizes; they are used to normalize it.
//!
//! Group counts `K` always refer to non-empty groups.

use std::collections::HashMap;
use std::fmt;

use crate::clustering::Partition;
use crate::error::{Error, Result};
use crate::ordering::Ordering;

fn check_sizes(pi: &Ordering, sigma: &Partition) -> Result<usize> {
    if pi.len() != sigma.len() {
        return Err(Error::SizeMismatch {
            expected: pi.len(),
            found: sigma.len(),
        });
    }
    let n = pi.len();
    if n < 2 {
        return Err(Error::Undefined(format!("label continuity needs N >= 2, got {n}")));
    }
    Ok(n)
}

/// Number of adjacent pairs along `pi` with equal labels, `m = (N-1) C`.
pub fn same_label_pairs(pi: &Ordering, sigma: &Partition) -> Result<usize> {
    check_sizes(pi, sigma)?;
    Ok(pi
        .sequence()
        .windows(2)
        .filter(|w| sigma.label(w[0]) == sigma.label(w[1]))
        .count())
}

/// Fraction of adjacent pairs along `pi` sharing a label.
pub fn label_continuity(pi: &Ordering, sigma: &Partition) -> Result<f64> {
    let n = check_sizes(pi, sigma)?;
    Ok(same_label_pairs(pi, sigma)? as f64 / (n - 1) as f64)
}

/// Label continuity error of `pi` against `sigma`.
pub fn lce(pi: &Ordering, sigma: &Partition) -> Result<f64> {
    let n = check_sizes(pi, sigma)?;
    let k = sigma.occupied_sizes().len();
    let m = same_label_pairs(pi, sigma)?;
    Ok(lce_from_counts(n, k, m))
}

/// `1 - (K-1)/(N-1) - m/(N-1)`, written over a common denominator so that
/// exact integer cases (for example block-sorted labels) give exactly zero.
pub fn lce_from_counts(n: usize, k: usize, same_pairs: usize) -> f64 {
    let num = (n as i64 - 1) - (k as i64 - 1) - same_pairs as i64;
    num as f64 / (n - 1) as f64
}

fn occupied(sizes: &[usize]) -> Vec<usize> {
    sizes.iter().copied().filter(|&s| s > 0).collect()
}

fn shares(sizes: &[usize]) -> (usize, Vec<f64>) {
    let sizes = occupied(sizes);
    let n: usize = sizes.iter().sum();
    (n, sizes.iter().map(|&s| s as f64 / n as f64).collect())
}

/// Largest achievable LCE for the given group sizes.
pub fn max_lce(sizes: &[usize]) -> f64 {
    let sizes = occupied(sizes);
    let n: usize = sizes.iter().sum();
    let k = sizes.len();
    if n < 2 || k < 2 {
        return 0.0;
    }
    let largest = *sizes.iter().max().expect("non-empty");
    let num = if largest > n.div_ceil(2) {
        2 * (n - largest) as i64 - (k as i64 - 1)
    } else {
        (n - 1) as i64 - (k as i64 - 1)
    };
    num as f64 / (n - 1) as f64
}

/// [`max_lce`] for real-valued group shares summing to one (e.g. an
/// equipartition of `n` into `K` not dividing `n`).
pub fn max_lce_from_shares(n: usize, shares: &[f64]) -> f64 {
    let k = shares.len() as f64;
    let nf = n as f64;
    let largest = shares.iter().cloned().fold(0.0, f64::max) * nf;
    if largest > n.div_ceil(2) as f64 {
        (2.0 * (nf - largest) - (k - 1.0)) / (nf - 1.0)
    } else {
        1.0 - (k - 1.0) / (nf - 1.0)
    }
}

/// Mean LCE when labels are resampled independently from the empirical
/// group frequencies.
pub fn mean_lce(sizes: &[usize]) -> f64 {
    let (n, s) = shares(sizes);
    mean_lce_from_shares(n, &s)
}

pub fn mean_lce_from_shares(n: usize, shares: &[f64]) -> f64 {
    let nf = n as f64;
    let k = shares.len() as f64;
    let s2: f64 = shares.iter().map(|q| q * q).sum();
    (nf - k) / (nf - 1.0) - s2
}

/// Variance of the LCE under the same resampling as [`mean_lce`].
pub fn var_lce(sizes: &[usize]) -> f64 {
    let (n, s) = shares(sizes);
    var_lce_from_shares(n, &s)
}

pub fn var_lce_from_shares(n: usize, shares: &[f64]) -> f64 {
    let nf = n as f64;
    let s2: f64 = shares.iter().map(|q| q * q).sum();
    let s3: f64 = shares.iter().map(|q| q * q * q).sum();
    let d = nf - 1.0;
    let v = s2 / d + 2.0 * (nf - 2.0) / (d * d) * s3 - (3.0 * nf - 5.0) / (d * d) * s2 * s2;
    // Cancellation can leave a tiny negative residue in degenerate cases.
    v.max(0.0)
}

/// Distribution of the same-label pair count `m` for `n` positions labeled
/// independently and uniformly from `k` equally sized groups:
/// `Binomial(n - 1, 1/k)`. Index `m` holds `P[m]`.
pub fn null_pmf(n: usize, k: usize) -> Result<Vec<f64>> {
    if n < 2 {
        return Err(Error::Config(format!("null distribution needs n >= 2, got {n}")));
    }
    if k == 0 || !n.is_multiple_of(k) {
        return Err(Error::Config(format!(
            "closed-form null distribution requires equal group sizes; {k} does not divide {n}"
        )));
    }
    let trials = n - 1;
    if k == 1 {
        let mut pmf = vec![0.0; n];
        pmf[trials] = 1.0;
        return Ok(pmf);
    }
    let ln_p = (1.0 / k as f64).ln();
    let ln_q = (1.0 - 1.0 / k as f64).ln();
    let mut ln_choose = 0.0f64;
    let mut pmf = Vec::with_capacity(n);
    for m in 0..=trials {
        if m > 0 {
            ln_choose += ((trials - m + 1) as f64).ln() - (m as f64).ln();
        }
        pmf.push((ln_choose + m as f64 * ln_p + (trials - m) as f64 * ln_q).exp());
    }
    Ok(pmf)
}

/// LCE divided by its random-sequence mean. Values near one mean no better
/// than chance.
pub fn normalized_lce(pi: &Ordering, sigma: &Partition) -> Result<f64> {
    let mean = mean_lce(&sigma.sizes());
    if mean <= 0.0 {
        return Err(Error::Undefined(format!(
            "mean LCE is {mean} for group sizes {:?}; normalization is meaningless",
            sigma.occupied_sizes()
        )));
    }
    Ok(lce(pi, sigma)? / mean)
}

/// Summary of a sequence/partition comparison.
#[derive(Debug, Clone, PartialEq)]
pub struct LceStats {
    pub n: usize,
    pub k: usize,
    pub same_label_pairs: usize,
    pub continuity: f64,
    pub lce: f64,
    pub max_lce: f64,
    pub mean_lce: f64,
    pub var_lce: f64,
    /// `None` when the mean LCE is not positive.
    pub normalized_lce: Option<f64>,
}

impl LceStats {
    pub const CSV_HEADER: &'static str =
        "n,k,same_label_pairs,continuity,lce,max_lce,mean_lce,var_lce,normalized_lce";

    pub fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{},{}",
            self.n,
            self.k,
            self.same_label_pairs,
            self.continuity,
            self.lce,
            self.max_lce,
            self.mean_lce,
            self.var_lce,
            self.normalized_lce.map(|v| v.to_string()).unwrap_or_default()
        )
    }
}

impl fmt::Display for LceStats {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", Self::CSV_HEADER)?;
        write!(f, "{}", self.csv_row())
    }
}

pub fn lce_stats(pi: &Ordering, sigma: &Partition) -> Result<LceStats> {
    let n = check_sizes(pi, sigma)?;
    let sizes = sigma.occupied_sizes();
    let m = same_label_pairs(pi, sigma)?;
    let lce = lce_from_counts(n, sizes.len(), m);
    let mean = mean_lce(&sizes);
    Ok(LceStats {
        n,
        k: sizes.len(),
        same_label_pairs: m,
        continuity: m as f64 / (n - 1) as f64,
        lce,
        max_lce: max_lce(&sizes),
        mean_lce: mean,
        var_lce: var_lce(&sizes),
        normalized_lce: (mean > 0.0).then(|| lce / mean),
    })
}

/// Label sequence (one label per position) that attains [`max_lce`]:
/// repeatedly place the group with the most remaining members that differs
/// from the previous label.
pub fn max_lce_sequence(sizes: &[usize]) -> Vec<usize> {
    let mut remaining = sizes.to_vec();
    let n: usize = sizes.iter().sum();
    let mut seq = Vec::with_capacity(n);
    let mut prev = usize::MAX;
    for _ in 0..n {
        let pick = (0..remaining.len())
            .filter(|&g| remaining[g] > 0 && g != prev)
            .max_by(|&a, &b| remaining[a].cmp(&remaining[b]).then(b.cmp(&a)))
            .unwrap_or(prev);
        remaining[pick] -= 1;
        seq.push(pick);
        prev = pick;
    }
    seq
}

/// A partition refined by splitting one group in two.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NestedSplit {
    pub parent_sizes: Vec<usize>,
    pub split_group: usize,
    pub child_sizes: (usize, usize),
}

impl NestedSplit {
    pub fn new(parent_sizes: Vec<usize>, split_group: usize, child_sizes: (usize, usize)) -> Result<Self> {
        let Some(&size) = parent_sizes.get(split_group) else {
            return Err(Error::Config(format!("no group {split_group} to split")));
        };
        if child_sizes.0 == 0 || child_sizes.1 == 0 || child_sizes.0 + child_sizes.1 != size {
            return Err(Error::Config(format!(
                "children {child_sizes:?} do not split a group of size {size}"
            )));
        }
        Ok(NestedSplit {
            parent_sizes,
            split_group,
            child_sizes,
        })
    }

    pub fn n(&self) -> usize {
        self.parent_sizes.iter().sum()
    }

    /// Labels for the parent and refined partitions along a sequence in
    /// which the refinement raises the LCE as much as possible: all groups
    /// are contiguous and the split group's children alternate, larger
    /// child first.
    pub fn worst_case(&self) -> (Partition, Partition) {
        let k = self.parent_sizes.len();
        let mut parent = Vec::with_capacity(self.n());
        let mut child = Vec::with_capacity(self.n());
        for (g, &s) in self.parent_sizes.iter().enumerate() {
            if g == self.split_group {
                continue;
            }
            parent.extend(std::iter::repeat_n(g, s));
            child.extend(std::iter::repeat_n(g, s));
        }
        let (a, b) = self.child_sizes;
        let (big, small, big_label, small_label) = if a >= b {
            (a, b, self.split_group, k)
        } else {
            (b, a, k, self.split_group)
        };
        let mut rest_big = big;
        for i in 0..small {
            child.push(big_label);
            child.push(small_label);
            rest_big -= 1;
            let _ = i;
        }
        child.extend(std::iter::repeat_n(big_label, rest_big));
        parent.extend(std::iter::repeat_n(self.split_group, a + b));
        (
            Partition::new(parent, k).expect("labels in range"),
            Partition::new(child, k + 1).expect("labels in range"),
        )
    }
}

/// Bounds on `lce(pi, refined) - lce(pi, parent)` over all sequences.
pub fn nested_lce_bounds(split: &NestedSplit, n: usize) -> (f64, f64) {
    let d = (n - 1) as f64;
    let (a, b) = split.child_sizes;
    let delta = i64::from(a == b);
    let upper = 2 * a.min(b) as i64 - delta - 1;
    (-1.0 / d, upper as f64 / d)
}

/// Normalized mutual information `2 I(a; b) / (H(a) + H(b))`, natural log.
///
/// When both partitions have a single group the entropies vanish; the value
/// is then 1 if both declare the same number of groups and an error
/// otherwise.
pub fn nmi(a: &Partition, b: &Partition) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::SizeMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    let n = a.len();
    if n == 0 {
        return Err(Error::Undefined("NMI of empty partitions".into()));
    }
    let nf = n as f64;
    let entropy = |sizes: Vec<usize>| -> f64 {
        sizes
            .into_iter()
            .filter(|&s| s > 0)
            .map(|s| {
                let q = s as f64 / nf;
                -q * q.ln()
            })
            .sum()
    };
    let ha = entropy(a.sizes());
    let hb = entropy(b.sizes());
    if ha + hb == 0.0 {
        return if a.k() == b.k() {
            Ok(1.0)
        } else {
            Err(Error::Undefined(format!(
                "NMI of single-group partitions with {} and {} declared groups",
                a.k(),
                b.k()
            )))
        };
    }
    let mut joint: HashMap<(usize, usize), usize> = HashMap::new();
    for (&x, &y) in a.labels().iter().zip(b.labels()) {
        *joint.entry((x, y)).or_insert(0) += 1;
    }
    let (sa, sb) = (a.sizes(), b.sizes());
    // Sum in a fixed order so the result is reproducible bit for bit.
    let mut cells: Vec<_> = joint.into_iter().collect();
    cells.sort_unstable();
    let mi: f64 = cells
        .into_iter()
        .map(|((x, y), c)| {
            let q = c as f64 / nf;
            q * (q * nf * nf / (sa[x] as f64 * sb[y] as f64)).ln()
        })
        .sum();
    Ok((2.0 * mi / (ha + hb)).clamp(0.0, 1.0))
}

/// Fraction of vertices in the largest group.
pub fn max_group_fraction(sigma: &Partition) -> f64 {
    let largest = sigma.sizes().into_iter().max().unwrap_or(0);
    largest as f64 / sigma.len() as f64
}

/// Kendall rank correlation between two orderings of the same vertices.
pub fn kendall_tau(a: &Ordering, b: &Ordering) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::SizeMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    let n = a.len();
    if n < 2 {
        return Err(Error::Undefined("Kendall tau needs at least two items".into()));
    }
    // b-positions read in a-order; discordant pairs are its inversions.
    let mut seq: Vec<usize> = a.sequence().iter().map(|&v| b.position(v)).collect();
    let mut buf = vec![0; n];
    let inversions = count_inversions(&mut seq, &mut buf);
    let pairs = (n as u64) * (n as u64 - 1) / 2;
    Ok(1.0 - 2.0 * inversions as f64 / pairs as f64)
}

fn count_inversions(v: &mut [usize], buf: &mut [usize]) -> u64 {
    let n = v.len();
    if n < 2 {
        return 0;
    }
    let mid = n / 2;
    let mut count = {
        let (left, right) = v.split_at_mut(mid);
        let (bl, br) = buf.split_at_mut(mid);
        count_inversions(left, bl) + count_inversions(right, br)
    };
    let (mut i, mut j, mut k) = (0, mid, 0);
    while i < mid && j < n {
        if v[i] <= v[j] {
            buf[k] = v[i];
            i += 1;
        } else {
            buf[k] = v[j];
            count += (mid - i) as u64;
            j += 1;
        }
        k += 1;
    }
    buf[k..k + mid - i].copy_from_slice(&v[i..mid]);
    k += mid - i;
    buf[k..k + n - j].copy_from_slice(&v[j..n]);
    v.copy_from_slice(&buf[..n]);
    count
}
