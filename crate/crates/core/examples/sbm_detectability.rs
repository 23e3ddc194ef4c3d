//! A small detectability sweep on the SBM: mean NMI of spectral clustering
//! and normalized LCE of spectral ordering as the groups blur together.
//! Full records go to a CSV if a path is given.
//!
//!     cargo run --release --example sbm_detectability [records.csv]

use std::fs::File;

use spectral_seriation::experiment::{run_sbm_sweep, summarize, write_records_csv, Metric, Model, SweepConfig};
use spectral_seriation::matrices::MatrixKind;

fn main() -> spectral_seriation::Result<()> {
    let cfg = SweepConfig {
        model: Model::Sbm,
        n: 400,
        c: 8.0,
        epsilons: vec![0.05, 0.2, 0.35, 0.5, 0.75, 1.0],
        ks: vec![2],
        band_ratios: vec![],
        matrices: vec![MatrixKind::UnnormLaplacian, MatrixKind::NormLaplacian, MatrixKind::BetheHessian],
        trials: 4,
        master_seed: 2024,
        kendall: false,
        output: None,
        workers: None,
    };
    let records = run_sbm_sweep(&cfg)?;
    if let Some(path) = std::env::args().nth(1) {
        write_records_csv(&records, File::create(&path)?)?;
        println!("wrote {} records to {path}", records.len());
    }
    let summary = summarize(&records);
    for metric in [Metric::Nmi, Metric::NormalizedLce] {
        println!("\n{metric:?} (mean over {} trials)", cfg.trials);
        print!("{:<18}", "eps");
        for e in &cfg.epsilons {
            print!("{e:>7}");
        }
        println!();
        for kind in &cfg.matrices {
            print!("{:<18}", kind.name());
            for &e in &cfg.epsilons {
                let s = summary
                    .iter()
                    .find(|s| s.matrix == *kind && s.metric == metric && s.epsilon == Some(e))
                    .unwrap();
                print!("{:>7.3}", s.mean);
            }
            println!();
        }
    }
    Ok(())
}
