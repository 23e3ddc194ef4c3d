//! Statistical checks of the random graph models and of spectral ordering
//! quality on random graphs.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spectral_seriation::graph::Graph;
use spectral_seriation::matrices::{MatrixKind, MatrixSpec};
use spectral_seriation::models::{orgm_generate, sbm_generate, OrgmParams, SbmParams};
use spectral_seriation::ordering::{h2, spectral_order, Ordering};
use spectral_seriation::seed::mix_seed;

const INSTANCES: usize = 10_000;

/// Fraction of pairs whose empirical frequency lies within 4 binomial
/// standard errors of `rate(i, j)`.
fn pair_frequency_agreement(n: usize, mut sample: impl FnMut(u64) -> Graph, rate: impl Fn(usize, usize) -> f64) -> f64 {
    let mut counts = vec![0u32; n * n];
    for t in 0..INSTANCES {
        for &(u, v) in sample(mix_seed(&[t as u64])).edges() {
            counts[u.min(v) * n + u.max(v)] += 1;
        }
    }
    let (mut ok, mut total) = (0, 0);
    for i in 0..n {
        for j in i + 1..n {
            let p = rate(i, j);
            let freq = counts[i * n + j] as f64 / INSTANCES as f64;
            let se = (p * (1.0 - p) / INSTANCES as f64).sqrt();
            total += 1;
            if (freq - p).abs() <= 4.0 * se {
                ok += 1;
            }
        }
    }
    ok as f64 / total as f64
}

#[test]
fn sbm_pair_rates_are_honored() {
    let params = SbmParams::new(30, 3, 6.0, 0.3).unwrap();
    let labels = params.planted().labels().to_vec();
    let share = pair_frequency_agreement(
        30,
        |seed| sbm_generate(&params, seed).unwrap().0,
        |i, j| if labels[i] == labels[j] { params.p_in } else { params.p_out },
    );
    assert!(share >= 0.99, "{share}");
}

#[test]
fn orgm_pair_rates_are_honored() {
    let params = OrgmParams::new(30, 6.0, 0.3, 5).unwrap();
    let share = pair_frequency_agreement(
        30,
        |seed| orgm_generate(&params, seed).unwrap(),
        |i, j| if j - i <= params.band { params.p_in } else { params.p_out },
    );
    assert!(share >= 0.99, "{share}");
}

/// Kolmogorov survival function `Q(lambda) = 2 sum (-1)^{j-1} exp(-2 j^2 lambda^2)`.
fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=200 {
        let term = (-2.0 * (j * j) as f64 * lambda * lambda).exp();
        sum += if j % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Two-sample Kolmogorov-Smirnov statistic and asymptotic p-value.
fn ks_two_sample(a: &[usize], b: &[usize]) -> (f64, f64) {
    let (mut a, mut b) = (a.to_vec(), b.to_vec());
    a.sort_unstable();
    b.sort_unstable();
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0, 0, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] == x {
            i += 1;
        }
        while j < b.len() && b[j] == x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    let ne = (na * nb / (na + nb)).sqrt();
    (d, kolmogorov_q((ne + 0.12 + 0.11 / ne) * d))
}

#[test]
fn ks_oracle_on_identical_and_shifted_samples() {
    let a: Vec<usize> = (0..500).map(|i| i % 13).collect();
    assert_eq!(ks_two_sample(&a, &a), (0.0, 1.0));
    let shifted: Vec<usize> = a.iter().map(|x| x + 6).collect();
    assert!(ks_two_sample(&a, &shifted).1 < 1e-10);
}

#[test]
fn unstructured_models_share_degree_law() {
    let (n, c) = (500, 6.0);
    let sbm = SbmParams::new(n, 2, c, 1.0).unwrap();
    let orgm = OrgmParams::new(n, c, 1.0, 50).unwrap();
    let mut a = Vec::new();
    let mut b = Vec::new();
    for t in 0..10u64 {
        a.extend(sbm_generate(&sbm, mix_seed(&[1, t])).unwrap().0.degrees());
        b.extend(orgm_generate(&orgm, mix_seed(&[2, t])).unwrap().degrees());
    }
    let (d, p) = ks_two_sample(&a, &b);
    assert!(p > 0.01, "D = {d}, p = {p}");
}

#[test]
fn spectral_orderings_beat_random_median() {
    let (n, instances, shuffles) = (50, 50, 100);
    let p = 6.0 / (n - 1) as f64;
    let params = SbmParams::with_rates(vec![n], p, p).unwrap();
    let mut wins = [0usize; MatrixKind::ALL.len()];
    for t in 0..instances {
        let g = sbm_generate(&params, mix_seed(&[3, t as u64])).unwrap().0;
        // Degree-normalized matrices are undefined on isolated vertices.
        let g = g.induced_subgraph(&g.non_isolated()).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(mix_seed(&[4, t as u64]));
        let mut random: Vec<u64> = (0..shuffles)
            .map(|_| {
                let mut seq: Vec<usize> = (0..g.n()).collect();
                seq.shuffle(&mut rng);
                h2(&Ordering::from_sequence(seq).unwrap(), &g).unwrap()
            })
            .collect();
        random.sort_unstable();
        let median = (random[shuffles / 2 - 1] + random[shuffles / 2]) as f64 / 2.0;
        for (w, kind) in wins.iter_mut().zip(MatrixKind::ALL) {
            let pi = spectral_order(&g, &MatrixSpec::new(kind)).unwrap();
            if h2(&pi, &g).unwrap() as f64 <= median {
                *w += 1;
            }
        }
    }
    for (w, kind) in wins.iter().zip(MatrixKind::ALL) {
        assert!(*w as f64 >= 0.95 * instances as f64, "{kind}: {w}/{instances}");
    }
}
