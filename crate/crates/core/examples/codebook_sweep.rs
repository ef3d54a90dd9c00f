//! Full scenario x codebook x Es/N0 sweep: writes the results CSV and
//! reports the best codebook at each Es/N0.
//!
//! Run with `cargo run --release --example codebook_sweep [out_dir]`.

use std::path::PathBuf;

use mmwave_vr::runner::{
    run_sweep, select_best_codebook, write_results_csv, write_summary_csv, SweepConfig,
};

fn main() -> mmwave_vr::Result<()> {
    let out = PathBuf::from(
        std::env::args()
            .nth(1)
            .unwrap_or_else(|| "sweep_out".into()),
    );
    std::fs::create_dir_all(&out).map_err(|e| mmwave_vr::SimError::Io {
        path: out.clone(),
        source: e,
    })?;

    let config = SweepConfig::default();
    let result = run_sweep(&config)?;
    write_results_csv(&result.records, &out.join("results.csv"))?;
    write_summary_csv(&result.summary, &out.join("summary.csv"))?;
    println!(
        "{} records written to {}",
        result.records.len(),
        out.display()
    );

    for &scenario in &config.scenarios {
        for codebook in config.codebooks()? {
            println!(
                "{scenario:>4} {codebook}: mean utility {:.4e}",
                result.mean_utility(scenario, &codebook)
            );
        }
        for esn0 in config.esn0_grid()?.into_iter().step_by(5) {
            match select_best_codebook(&result.points, scenario, esn0) {
                Some(best) => println!("  best at {esn0:>4} dB: {best}"),
                None => println!("  no feasible codebook at {esn0} dB"),
            }
        }
    }
    Ok(())
}
