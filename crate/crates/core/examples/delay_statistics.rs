//! Minimum and binned mode of the transmission delay of one link over the
//! Es/N0 grid, computed from a fresh sweep.
//!
//! Run with `cargo run --example delay_statistics`.

use mmwave_vr::linkmetrics::GainAggregation;
use mmwave_vr::runner::{min_statistic, mode_statistic, run_sweep, SweepConfig};

fn main() -> mmwave_vr::Result<()> {
    let mut config = SweepConfig::default();
    config.set_codebook_spec("2x1,8x1")?;
    let result = run_sweep(&config)?;

    for scenario in GainAggregation::ALL {
        for n_tx in [2, 8] {
            let delays: Vec<f64> = result
                .records
                .iter()
                .filter(|r| r.scenario == scenario && r.n_tx == n_tx && r.ap == 1 && r.user == 1)
                .map(|r| r.d_trans_s)
                .collect();
            // Delay falls roughly as 1/SINR, so a bin of half the minimum
            // groups the high-Es/N0 tail.
            let min = min_statistic(&delays)?;
            let bin = 0.5 * min;
            println!(
                "{scenario:>4} {n_tx}A1R, AP 1 -> user 1: {} points, min {:.6e} s, mode {:.6e} s (bin {:.2e} s)",
                delays.len(),
                min,
                mode_statistic(&delays, bin)?,
                bin
            );
        }
    }
    Ok(())
}
