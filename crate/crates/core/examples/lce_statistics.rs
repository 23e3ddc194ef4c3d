//! Label continuity error of a few sequences, the size-only statistics used
//! to normalize it, and its exact null distribution.
//!
//!     cargo run --example lce_statistics

use spectral_seriation::clustering::Partition;
use spectral_seriation::metrics::{lce_stats, max_lce, max_lce_sequence, mean_lce, null_pmf, var_lce};
use spectral_seriation::ordering::Ordering;

fn main() -> spectral_seriation::Result<()> {
    let sigma = Partition::blocks(&[4, 4, 2]);
    let n = sigma.len();

    let sorted = Ordering::identity(n);
    // Interleave the groups as much as the sizes allow.
    let worst_labels = max_lce_sequence(&sigma.sizes());
    let mut by_label: Vec<Vec<usize>> = vec![Vec::new(); sigma.k()];
    for v in (0..n).rev() {
        by_label[sigma.label(v)].push(v);
    }
    let worst = Ordering::from_sequence(worst_labels.iter().map(|&l| by_label[l].pop().unwrap()).collect())?;

    for (name, pi) in [("block-sorted", &sorted), ("interleaved", &worst)] {
        let s = lce_stats(pi, &sigma)?;
        println!("{name:>13}: lce {:.4}  normalized {:.4}", s.lce, s.normalized_lce.unwrap());
    }

    println!();
    println!("sizes      max     mean    var");
    for sizes in [vec![5; 5], vec![21, 1, 1, 1, 1], vec![13, 12]] {
        println!(
            "{:<10} {:.4}  {:.4}  {:.6}",
            format!("{sizes:?}").replace(' ', ""),
            max_lce(&sizes),
            mean_lce(&sizes),
            var_lce(&sizes)
        );
    }

    println!();
    println!("P[same-label pairs = m], N = 12, K = 3");
    for (m, p) in null_pmf(12, 3)?.iter().enumerate() {
        println!("{m:>3} {p:.6} {}", "#".repeat((p * 200.0).round() as usize));
    }
    Ok(())
}
