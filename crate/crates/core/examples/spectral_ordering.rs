//! Spectral ordering with each matrix representation on a small banded
//! graph whose vertex ids have been scrambled.
//!
//!     cargo run --example spectral_ordering [seed]

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use spectral_seriation::matrices::{MatrixKind, MatrixSpec};
use spectral_seriation::metrics::kendall_tau;
use spectral_seriation::models::{orgm_generate, OrgmParams};
use spectral_seriation::ordering::{h2, spectral_order, Ordering};

fn main() -> spectral_seriation::Result<()> {
    let seed = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(1);
    let n = 120;
    let g = orgm_generate(&OrgmParams::new(n, 8.0, 0.05, 12)?, seed)?;
    let g = g.induced_subgraph(&g.non_isolated())?;
    let n = g.n();

    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let scrambled = g.permute(&perm)?;
    // Position i of the planted sequence holds original vertex i.
    let planted = Ordering::from_sequence(perm)?;

    println!("n = {n}, m = {}", g.m());
    println!("{:<18} {:>9} {:>7}", "matrix", "H2", "|tau|");
    let baseline = h2(&Ordering::identity(n), &scrambled)?;
    println!("{:<18} {:>9} {:>7}", "input order", baseline, "");
    println!("{:<18} {:>9} {:>7}", "planted", h2(&planted, &scrambled)?, "1");
    for kind in MatrixKind::ALL {
        let pi = spectral_order(&scrambled, &MatrixSpec::new(kind))?;
        let tau = kendall_tau(&pi, &planted)?.abs();
        println!("{:<18} {:>9} {:>7.3}", kind.name(), h2(&pi, &scrambled)?, tau);
    }
    Ok(())
}
