//! UL and DL SINR with intra- and inter-cell interference, and the
//! resulting Shannon rates across an Es/N0 sweep.
//!
//! Run with `cargo run --example sinr_and_rates`.

use mmwave_vr::linkmetrics::{
    aggregate_gain, noise_power, rate, sinr_dl, sinr_ul, Association, GainAggregation, GainTable,
};

fn main() -> mmwave_vr::Result<()> {
    // Two users, two APs, every user in every cell.
    let assoc = Association::full(2, 2);
    let ul = GainTable::new(2, 2, vec![1e-3, 2e-5, 4e-5, 8e-4])?;
    let user_powers = [0.005, 0.005];
    let ap_powers = [0.01, 0.01];

    // DL gains per subcarrier for link (user 0, AP 0), then aggregated.
    let per_subcarrier = [2.0e-6, 0.5e-6, 1.1e-6, 3.2e-6];
    for mode in GainAggregation::ALL {
        let g00 = aggregate_gain(&per_subcarrier, mode)?;
        let dl = GainTable::new(2, 2, vec![g00, 1e-8, 2e-8, 1.5e-6])?;
        println!("{mode} scenario, aggregated DL gain {g00:.3e}");
        for esn0 in [0.0, 10.0, 20.0] {
            let sigma_sq = noise_power(esn0, ap_powers[0]);
            let s_ul = sinr_ul(0, 0, &user_powers, &ul, &assoc, sigma_sq)?;
            let s_dl = sinr_dl(0, 0, &ap_powers, &dl, &assoc, sigma_sq)?;
            println!(
                "  Es/N0 {esn0:>4} dB: sigma^2 {sigma_sq:.3e} W, UL SINR {s_ul:.4e} -> {:.4e} bit/s, \
                 DL SINR {s_dl:.4e} -> {:.4e} bit/s",
                rate(2.16e9 / 64.0, s_ul),
                rate(2.16e9, s_dl),
            );
        }
    }
    Ok(())
}
