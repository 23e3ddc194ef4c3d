//! Random graph generators with planted structure.
//!
//! Both models draw every vertex pair as an independent Bernoulli trial, in
//! the fixed order `(0,1), (0,2), ..., (n-2,n-1)`, from a ChaCha stream
//! seeded by the caller. Output is therefore a pure function of
//! `(params, seed)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::clustering::Partition;
use crate::error::{Error, Result};
use crate::graph::Graph;

fn check_c_eps(c: f64, epsilon: f64) -> Result<()> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::Config(format!("average degree must be positive, got {c}")));
    }
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::Config(format!("epsilon must lie in [0, 1], got {epsilon}")));
    }
    Ok(())
}

fn check_p_in(p_in: f64) -> Result<()> {
    if p_in > 1.0 {
        return Err(Error::Infeasible(format!("p_in = {p_in} exceeds 1")));
    }
    Ok(())
}

/// `(p_in, p_out)` giving mean degree `c` and `p_out / p_in = epsilon` for
/// `k` equal groups.
pub fn sbm_planted_params(n: usize, k: usize, c: f64, epsilon: f64) -> Result<(f64, f64)> {
    check_c_eps(c, epsilon)?;
    if k == 0 || !n.is_multiple_of(k) {
        return Err(Error::Config(format!("{n} vertices cannot form {k} equal groups")));
    }
    let p_in = c * k as f64 / (n as f64 * (1.0 + (k as f64 - 1.0) * epsilon));
    check_p_in(p_in)?;
    Ok((p_in, epsilon * p_in))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SbmParams {
    pub n: usize,
    pub k: usize,
    pub c: f64,
    pub epsilon: f64,
    pub sizes: Vec<usize>,
    pub p_in: f64,
    pub p_out: f64,
}

impl SbmParams {
    /// Equal-size planted partition model.
    pub fn new(n: usize, k: usize, c: f64, epsilon: f64) -> Result<Self> {
        let (p_in, p_out) = sbm_planted_params(n, k, c, epsilon)?;
        Ok(SbmParams {
            n,
            k,
            c,
            epsilon,
            sizes: vec![n / k; k],
            p_in,
            p_out,
        })
    }

    /// Arbitrary group sizes with explicit rates. `c` is set to the
    /// expected mean degree.
    pub fn with_rates(sizes: Vec<usize>, p_in: f64, p_out: f64) -> Result<Self> {
        if sizes.is_empty() || sizes.contains(&0) {
            return Err(Error::Config(format!("group sizes must be positive, got {sizes:?}")));
        }
        if !(0.0..=1.0).contains(&p_out) || !(p_out <= p_in) || p_in <= 0.0 {
            return Err(Error::Config(format!("need 0 <= p_out <= p_in, got {p_in}, {p_out}")));
        }
        check_p_in(p_in)?;
        let n: usize = sizes.iter().sum();
        let in_pairs: f64 = sizes.iter().map(|&s| (s * (s - 1) / 2) as f64).sum();
        let all_pairs = (n * (n - 1) / 2) as f64;
        let c = 2.0 * (p_in * in_pairs + p_out * (all_pairs - in_pairs)) / n as f64;
        Ok(SbmParams {
            n,
            k: sizes.len(),
            c,
            epsilon: p_out / p_in,
            sizes,
            p_in,
            p_out,
        })
    }

    pub fn planted(&self) -> Partition {
        Partition::blocks(&self.sizes)
    }
}

/// Sample an SBM graph and return it with its planted partition.
pub fn sbm_generate(params: &SbmParams, seed: u64) -> Result<(Graph, Partition)> {
    let planted = params.planted();
    if planted.len() != params.n {
        return Err(Error::SizeMismatch {
            expected: params.n,
            found: planted.len(),
        });
    }
    let labels = planted.labels();
    let g = sample_pairs(params.n, seed, |i, j| {
        if labels[i] == labels[j] {
            params.p_in
        } else {
            params.p_out
        }
    })?;
    Ok((g, planted))
}

/// Pairs `(i, j)`, `i < j`, with `j - i <= band`.
pub fn band_pairs(n: usize, band: usize) -> usize {
    n * band - band * (band + 1) / 2
}

/// Bandwidth for a band ratio `band / n`, rounded and at least one.
pub fn band_from_ratio(n: usize, ratio: f64) -> usize {
    ((ratio * n as f64).round() as usize).max(1)
}

/// `(p_in, p_out)` for the ordered random graph model with mean degree `c`.
pub fn orgm_params(n: usize, c: f64, epsilon: f64, band: usize) -> Result<(f64, f64)> {
    check_c_eps(c, epsilon)?;
    if band == 0 || band >= n {
        return Err(Error::Config(format!("band must lie in 1..{n}, got {band}")));
    }
    let inside = band_pairs(n, band) as f64;
    let outside = (n * (n - 1) / 2) as f64 - inside;
    let p_in = (c * n as f64 / 2.0) / (inside + epsilon * outside);
    check_p_in(p_in)?;
    Ok((p_in, epsilon * p_in))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OrgmParams {
    pub n: usize,
    pub c: f64,
    pub epsilon: f64,
    pub band: usize,
    pub p_in: f64,
    pub p_out: f64,
}

impl OrgmParams {
    pub fn new(n: usize, c: f64, epsilon: f64, band: usize) -> Result<Self> {
        let (p_in, p_out) = orgm_params(n, c, epsilon, band)?;
        Ok(OrgmParams {
            n,
            c,
            epsilon,
            band,
            p_in,
            p_out,
        })
    }
}

/// Sample an ORGM graph. The planted sequence is the identity.
pub fn orgm_generate(params: &OrgmParams, seed: u64) -> Result<Graph> {
    sample_pairs(params.n, seed, |i, j| {
        if j - i <= params.band {
            params.p_in
        } else {
            params.p_out
        }
    })
}

fn sample_pairs(n: usize, seed: u64, rate: impl Fn(usize, usize) -> f64) -> Result<Graph> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen::<f64>() < rate(i, j) {
                edges.push((i, j));
            }
        }
    }
    Graph::from_edges(n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sbm_rates() {
        let (p_in, p_out) = sbm_planted_params(1000, 2, 8.0, 0.5).unwrap();
        assert!((p_in - 16.0 / 1500.0).abs() < 1e-15);
        assert!((p_out - 8.0 / 1500.0).abs() < 1e-15);
        // Plugging back: c = N (p_in + (K-1) p_out) / K.
        assert!((1000.0 * (p_in + p_out) / 2.0 - 8.0).abs() < 1e-12);
        let (p_in, p_out) = sbm_planted_params(100, 4, 5.0, 1.0).unwrap();
        assert!((p_in - 0.05).abs() < 1e-15 && p_in == p_out);
        let (p_in, p_out) = sbm_planted_params(100, 4, 5.0, 0.0).unwrap();
        assert!((p_in - 0.2).abs() < 1e-15 && p_out == 0.0);
    }

    #[test]
    fn sbm_rejects_bad_params() {
        assert!(matches!(sbm_planted_params(10, 2, 20.0, 0.0), Err(Error::Infeasible(_))));
        assert!(matches!(sbm_planted_params(10, 3, 2.0, 0.1), Err(Error::Config(_))));
        assert!(sbm_planted_params(10, 2, 2.0, 1.5).is_err());
        assert!(sbm_planted_params(10, 2, 0.0, 0.5).is_err());
    }

    #[test]
    fn sbm_without_mixing_has_no_cross_edges() {
        let p = SbmParams::new(200, 2, 8.0, 0.0).unwrap();
        let (g, sigma) = sbm_generate(&p, 3).unwrap();
        assert!(g.m() > 0);
        for &(u, v) in g.edges() {
            assert_eq!(sigma.label(u), sigma.label(v));
        }
        assert_eq!(sigma.labels()[..100], [0; 100]);
    }

    #[test]
    fn sbm_mean_degree() {
        let p = SbmParams::new(1000, 2, 8.0, 0.3).unwrap();
        let means: Vec<f64> = (0..20).map(|s| sbm_generate(&p, s).unwrap().0.mean_degree()).collect();
        let avg = means.iter().sum::<f64>() / 20.0;
        // 2M ~ 2 Binomial(pairs, p): per-instance sd of the mean degree.
        let in_pairs = 2.0 * (500.0 * 499.0 / 2.0);
        let var_m = in_pairs * p.p_in * (1.0 - p.p_in) + 250000.0 * p.p_out * (1.0 - p.p_out);
        let se = 2.0 * var_m.sqrt() / 1000.0 / 20f64.sqrt();
        // The exact expectation is 499 p_in + 500 p_out, slightly below c.
        assert!((avg - 8.0).abs() <= 3.0 * se, "{avg} (se {se})");
    }

    #[test]
    fn sbm_is_deterministic() {
        let p = SbmParams::new(100, 2, 6.0, 0.2).unwrap();
        assert_eq!(sbm_generate(&p, 9).unwrap(), sbm_generate(&p, 9).unwrap());
        assert_ne!(sbm_generate(&p, 9).unwrap().0, sbm_generate(&p, 10).unwrap().0);
    }

    #[test]
    fn sbm_with_rates_reports_mean_degree() {
        let p = SbmParams::with_rates(vec![500, 500], 16.0 / 1500.0, 8.0 / 1500.0).unwrap();
        let q = SbmParams::new(1000, 2, 8.0, 0.5).unwrap();
        assert!((p.c - 2.0 * (2.0 * 124750.0 * q.p_in + 250000.0 * q.p_out) / 1000.0).abs() < 1e-12);
        assert!(SbmParams::with_rates(vec![3, 0], 0.5, 0.1).is_err());
    }

    #[test]
    fn orgm_rates() {
        assert_eq!(band_pairs(50, 8), 364);
        let (p_in, p_out) = orgm_params(50, 10.0, 0.2, 8).unwrap();
        let expected = 250.0 / (364.0 + 0.2 * 861.0);
        assert!((p_in - expected).abs() < 1e-15);
        assert!((p_in - 0.46625).abs() < 5e-5);
        assert!((p_out - 0.2 * expected).abs() < 1e-15);
        let (p_in, p_out) = orgm_params(50, 10.0, 1.0, 8).unwrap();
        assert!((p_in - 10.0 / 49.0).abs() < 1e-15 && p_in == p_out);
        let (p_in, p_out) = orgm_params(50, 10.0, 0.0, 8).unwrap();
        assert!((p_in - 250.0 / 364.0).abs() < 1e-15 && p_out == 0.0);
    }

    #[test]
    fn orgm_rejects_bad_params() {
        assert!(orgm_params(50, 10.0, 0.2, 50).is_err());
        assert!(orgm_params(50, 10.0, 0.2, 0).is_err());
        assert!(matches!(orgm_params(50, 40.0, 0.0, 2), Err(Error::Infeasible(_))));
    }

    #[test]
    fn orgm_edges_respect_band() {
        let p = OrgmParams::new(200, 6.0, 0.0, 10).unwrap();
        let g = orgm_generate(&p, 5).unwrap();
        assert!(g.m() > 0);
        assert!(g.edges().iter().all(|&(u, v)| u.abs_diff(v) <= 10));
    }

    #[test]
    fn orgm_mean_degree() {
        let p = OrgmParams::new(1000, 6.0, 0.1, 100).unwrap();
        let avg = (0..20).map(|s| orgm_generate(&p, s).unwrap().mean_degree()).sum::<f64>() / 20.0;
        let inside = band_pairs(1000, 100) as f64;
        let outside = 499500.0 - inside;
        let var_m = inside * p.p_in * (1.0 - p.p_in) + outside * p.p_out * (1.0 - p.p_out);
        let se = 2.0 * var_m.sqrt() / 1000.0 / 20f64.sqrt();
        assert!((avg - 6.0).abs() <= 3.0 * se, "{avg} (se {se})");
    }

    #[test]
    fn orgm_is_deterministic() {
        let p = OrgmParams::new(80, 6.0, 0.3, 8).unwrap();
        assert_eq!(orgm_generate(&p, 1).unwrap(), orgm_generate(&p, 1).unwrap());
    }

    #[test]
    fn band_from_ratio_rounds() {
        assert_eq!(band_from_ratio(1000, 0.15), 150);
        assert_eq!(band_from_ratio(100, 0.1), 10);
        assert_eq!(band_from_ratio(10, 0.01), 1);
    }
}
