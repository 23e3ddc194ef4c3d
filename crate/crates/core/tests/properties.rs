//! Property tests over randomly generated graphs, partitions and matrices.

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use spectral_seriation::clustering::{kmeans, spectral_embed, spectral_cluster, Partition};
use spectral_seriation::eigen::{eig_symmetric, Which};
use spectral_seriation::graph::{load_edge_list, Graph};
use spectral_seriation::matrices::{build_matrix, MatrixKind, MatrixSpec, SymmetricMatrix};
use spectral_seriation::metrics::{kendall_tau, lce, nmi};
use spectral_seriation::ordering::{h2, ordering_vector, spectral_order, OrderOptions, Ordering};

fn arb_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (2..=max_n).prop_flat_map(|n| {
        proptest::collection::vec((0..n, 0..n), 0..3 * n)
            .prop_map(move |edges| Graph::from_edges(n, edges).unwrap())
    })
}

/// Graphs with every vertex of degree at least one: a random spanning path
/// plus extra edges.
fn arb_covered_graph(max_n: usize) -> impl Strategy<Value = Graph> {
    (3..=max_n).prop_flat_map(|n| {
        (
            arb_permutation(n),
            proptest::collection::vec((0..n, 0..n), 0..2 * n),
        )
            .prop_map(move |(order, extra)| {
                let path = order.windows(2).map(|w| (w[0], w[1]));
                Graph::from_edges(n, path.chain(extra)).unwrap()
            })
    })
}

fn arb_permutation(n: usize) -> impl Strategy<Value = Vec<usize>> {
    any::<u64>().prop_map(move |seed| {
        let mut p: Vec<usize> = (0..n).collect();
        p.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        p
    })
}

fn arb_labels(max_n: usize, max_k: usize) -> impl Strategy<Value = Vec<usize>> {
    (2..=max_n).prop_flat_map(move |n| proptest::collection::vec(0..max_k, n))
}

fn residual(m: &SymmetricMatrix, value: f64, vector: &[f64]) -> f64 {
    m.mul_vec(vector)
        .iter()
        .zip(vector)
        .map(|(mv, v)| (mv - value * v).powi(2))
        .sum::<f64>()
        .sqrt()
}

fn random_symmetric(n: usize, seed: u64) -> SymmetricMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    SymmetricMatrix::from_fn(n, |_, _| rng.gen_range(-1.0..1.0))
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn edge_list_round_trip(
        edges in proptest::collection::vec((0u64..40, 0u64..40).prop_filter("loop", |(u, v)| u != v), 1..80),
    ) {
        let text: String = edges.iter().map(|(u, v)| format!("{} {}\n", u * 3 + 1, v * 3 + 1)).collect();
        let loaded = load_edge_list(&text).unwrap();
        let ids = loaded.original_ids.clone();
        let again = load_edge_list(&loaded.graph.to_edge_list_with_ids(|v| ids[v])).unwrap();
        prop_assert_eq!(&again.graph, &loaded.graph);
        prop_assert_eq!(again.original_ids, loaded.original_ids);
        prop_assert_eq!(again.dropped.duplicates + again.dropped.self_loops, 0);
    }

    #[test]
    fn degrees_match_recount(g in arb_graph(30)) {
        let mut count = vec![0; g.n()];
        for &(u, v) in g.edges() {
            prop_assert_ne!(u, v);
            count[u] += 1;
            count[v] += 1;
        }
        prop_assert_eq!(g.degrees(), count);
        prop_assert_eq!(g.degrees().iter().sum::<usize>(), 2 * g.m());
        for u in 0..g.n() {
            for &v in g.neighbors(u) {
                prop_assert!(g.has_edge(v, u));
            }
        }
    }

    #[test]
    fn matrices_are_exactly_symmetric(g in arb_covered_graph(25)) {
        for kind in MatrixKind::ALL {
            let m = build_matrix(&g, &MatrixSpec::new(kind).resolve(&g).unwrap()).unwrap();
            for i in 0..g.n() {
                for j in 0..g.n() {
                    prop_assert_eq!(m.get(i, j).to_bits(), m.get(j, i).to_bits());
                }
            }
        }
    }

    #[test]
    fn laplacian_and_modularity_annihilate_ones(g in arb_covered_graph(40)) {
        let ones = vec![1.0; g.n()];
        for kind in [MatrixKind::UnnormLaplacian, MatrixKind::Modularity] {
            let m = build_matrix(&g, &kind.into()).unwrap();
            for x in m.mul_vec(&ones) {
                prop_assert!(x.abs() <= 1e-12, "{kind}: {x}");
            }
        }
    }

    #[test]
    fn regularized_laplacian_keeps_trivial_vector(g in arb_graph(30), tau in 0.01f64..10.0) {
        let m = build_matrix(&g, &MatrixSpec::regularized(MatrixKind::RegLaplacianTau, tau)).unwrap();
        let x: Vec<f64> = g.degrees().iter().map(|&d| (d as f64 + tau).sqrt()).collect();
        for y in m.mul_vec(&x) {
            prop_assert!(y.abs() <= 1e-10);
        }
    }

    #[test]
    fn small_tau_approaches_normalized_laplacian(g in arb_covered_graph(30)) {
        let reg = build_matrix(&g, &MatrixSpec::regularized(MatrixKind::RegLaplacian, 1e-8)).unwrap();
        let norm = build_matrix(&g, &MatrixKind::NormLaplacian.into()).unwrap();
        let complement = SymmetricMatrix::from_fn(g.n(), |i, j| f64::from(i == j) - norm.get(i, j));
        prop_assert!(reg.max_abs_diff(&complement) <= 1e-6);
    }

    #[test]
    fn eigenpairs_are_orthonormal_with_small_residual(n in 1usize..60, seed: u64, k_frac in 0.0f64..1.0) {
        let m = random_symmetric(n, seed);
        let k = 1 + ((n - 1) as f64 * k_frac) as usize;
        for which in [Which::Smallest, Which::Largest] {
            let res = eig_symmetric(&m, k, which).unwrap();
            prop_assert!(res.eigenvalues.windows(2).all(|w| w[0] <= w[1]));
            for (i, v) in res.eigenvectors.iter().enumerate() {
                for (j, w) in res.eigenvectors.iter().enumerate() {
                    let dot: f64 = v.iter().zip(w).map(|(a, b)| a * b).sum();
                    if i == j {
                        prop_assert!((dot.sqrt() - 1.0).abs() <= 1e-10);
                    } else {
                        prop_assert!(dot.abs() <= 1e-8);
                    }
                }
                let bound = 1e-8 * m.frobenius_norm().max(1.0);
                prop_assert!(residual(&m, res.eigenvalues[i], v) <= bound);
            }
        }
    }

    #[test]
    fn eigendecomposition_is_bit_identical(n in 1usize..40, seed: u64) {
        let m = random_symmetric(n, seed);
        let a = eig_symmetric(&m, n, Which::Smallest).unwrap();
        let b = eig_symmetric(&m, n, Which::Smallest).unwrap();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn h2_is_reversal_symmetric(g in arb_graph(30), seed: u64) {
        let mut seq: Vec<usize> = (0..g.n()).collect();
        seq.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let pi = Ordering::from_sequence(seq).unwrap();
        prop_assert_eq!(h2(&pi, &g).unwrap(), h2(&pi.reversed(), &g).unwrap());
    }

    #[test]
    fn spectral_order_is_relabeling_invariant(g in arb_covered_graph(30), seed: u64) {
        let mut perm: Vec<usize> = (0..g.n()).collect();
        perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let relabeled = g.permute(&perm).unwrap();
        for kind in MatrixKind::ALL {
            let spec = MatrixSpec::new(kind);
            // A degenerate eigenspace or tied entries leave the ordering basis-dependent.
            let rv = ordering_vector(&g, &spec, OrderOptions::default()).unwrap();
            let mut sorted = rv.values.clone();
            sorted.sort_by(f64::total_cmp);
            if rv.degenerate || sorted.windows(2).any(|w| w[1] - w[0] <= 1e-9) {
                continue;
            }
            let a = h2(&spectral_order(&g, &spec).unwrap(), &g).unwrap();
            let b = h2(&spectral_order(&relabeled, &spec).unwrap(), &relabeled).unwrap();
            prop_assert!((a as f64 - b as f64).abs() <= 1e-9, "{}: {} vs {}", kind, a, b);
        }
    }

    #[test]
    fn clustering_ignores_eigenvector_signs(g in arb_covered_graph(30), k in 2usize..4, seed: u64) {
        let e = spectral_embed(&g, &MatrixKind::NormLaplacian.into(), k).unwrap();
        let base = kmeans(&e, k, seed).unwrap();
        for j in 0..k {
            let flipped = kmeans(&e.with_negated_column(j), k, seed).unwrap();
            if base.occupied_sizes().len() > 1 || flipped.occupied_sizes().len() > 1 {
                prop_assert!((nmi(&base, &flipped).unwrap() - 1.0).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn clustering_labels_are_canonical_and_deterministic(g in arb_covered_graph(30), seed: u64) {
        let spec = MatrixKind::UnnormLaplacian.into();
        let a = spectral_cluster(&g, &spec, 2, seed).unwrap();
        prop_assert_eq!(&a, &spectral_cluster(&g, &spec, 2, seed).unwrap());
        prop_assert_eq!(&a, &a.canonicalize());
    }

    #[test]
    fn lce_is_reversal_invariant(labels in arb_labels(40, 5), seed: u64) {
        let sigma = Partition::from_labels(labels);
        let mut seq: Vec<usize> = (0..sigma.len()).collect();
        seq.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let pi = Ordering::from_sequence(seq).unwrap();
        prop_assert_eq!(lce(&pi, &sigma).unwrap(), lce(&pi.reversed(), &sigma).unwrap());
    }

    #[test]
    fn nmi_is_symmetric_and_relabeling_invariant(
        (a, b) in (2usize..40).prop_flat_map(|n| (
            proptest::collection::vec(0usize..4, n),
            proptest::collection::vec(0usize..4, n),
        )),
        renaming in arb_permutation(4),
    ) {
        let pa = Partition::from_labels(a.clone());
        let pb = Partition::from_labels(b);
        if pa.occupied_sizes().len() > 1 || pb.occupied_sizes().len() > 1 {
            let ab = nmi(&pa, &pb).unwrap();
            prop_assert!((ab - nmi(&pb, &pa).unwrap()).abs() <= 1e-12);
            let renamed = Partition::new(a.iter().map(|&l| renaming[l]).collect(), 4).unwrap();
            prop_assert!((ab - nmi(&renamed, &pb).unwrap()).abs() <= 1e-12);
            prop_assert!((0.0..=1.0).contains(&ab));
        }
    }

    #[test]
    fn kendall_matches_pairwise_count(a in (2usize..60).prop_flat_map(arb_permutation), seed: u64) {
        let n = a.len();
        let mut b: Vec<usize> = (0..n).collect();
        b.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
        let (pa, pb) = (Ordering::new(a).unwrap(), Ordering::new(b).unwrap());
        let mut score = 0i64;
        for u in 0..n {
            for v in u + 1..n {
                let x = pa.position(u) as i64 - pa.position(v) as i64;
                let y = pb.position(u) as i64 - pb.position(v) as i64;
                score += (x * y).signum();
            }
        }
        let expected = score as f64 / (n * (n - 1) / 2) as f64;
        prop_assert!((kendall_tau(&pa, &pb).unwrap() - expected).abs() <= 1e-12);
    }
}

#[test]
fn eigen_residual_at_size_512() {
    let m = random_symmetric(512, 42);
    let res = eig_symmetric(&m, 8, Which::Largest).unwrap();
    let bound = 1e-8 * m.frobenius_norm();
    for (value, vector) in res.eigenvalues.iter().zip(&res.eigenvectors) {
        assert!(residual(&m, *value, vector) <= bound);
    }
}
