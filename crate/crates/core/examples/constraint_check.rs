//! Evaluate one sweep point with a rate floor and list which constraint
//! families fail on which links.
//!
//! Run with `cargo run --example constraint_check`.

use mmwave_vr::beamforming::Codebook;
use mmwave_vr::linkmetrics::GainAggregation;
use mmwave_vr::runner::{evaluate_sweep_point, SweepConfig};

fn main() -> mmwave_vr::Result<()> {
    let mut config = SweepConfig::default();
    let codebook = Codebook::single_stream(4, 2)?;

    let relaxed = evaluate_sweep_point(&config, GainAggregation::Mean, &codebook, 10.0)?;
    println!(
        "r_min = 0: {} violations, objective {:.4e}",
        relaxed.violations.len(),
        relaxed.objective
    );

    // A floor between the weakest and the strongest link's DL rate.
    let mut rates: Vec<f64> = relaxed.records.iter().map(|r| r.rate_dl_bps).collect();
    rates.sort_by(f64::total_cmp);
    config.r_min = rates[rates.len() / 2];
    let strict = evaluate_sweep_point(&config, GainAggregation::Mean, &codebook, 10.0)?;
    println!("r_min = {:.4e} bit/s:", config.r_min);
    for v in &strict.violations {
        println!("  {v} (ratio {:.3})", v.ratio());
    }
    for r in &strict.records {
        println!(
            "  AP {} user {}: feasible {}, violations [{}]",
            r.ap,
            r.user,
            r.feasible,
            r.violations.iter().collect::<String>()
        );
    }
    Ok(())
}
