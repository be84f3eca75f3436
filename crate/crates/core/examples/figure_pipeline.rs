//! Runs a small stochastic figure and writes its CSV.
//!
//! Usage: `cargo run --example figure_pipeline -- [OUT_DIR]`

use progbar_sched::experiments::{aggregate, run_figure_to_dir, ExperimentConfig};

fn main() -> progbar_sched::error::Result<()> {
    let out_dir = std::env::args().nth(1).unwrap_or_else(|| "out".into());
    let mut config = ExperimentConfig::preset("stochastic")?;
    config.n = 30;
    config.trials = 5;
    config.sweep = vec![4.0, 16.0, 64.0];
    let written = run_figure_to_dir(&config, out_dir.as_ref(), None)?;
    println!("wrote {}", written.csv.display());
    for s in aggregate(&written.records) {
        println!("{:<12} g={:<4} mean {:.4} std {:.4}", s.algorithm, s.x, s.mean, s.std);
    }
    Ok(())
}
