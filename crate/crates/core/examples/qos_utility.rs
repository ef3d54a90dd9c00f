//! Delay chain and two-factor utility of a single link, under both
//! readings of the queue rates.
//!
//! Run with `cargo run --example qos_utility`.

use mmwave_vr::qos::{conditional_utility, link_qos, transmission_delay, TrafficModel};
use mmwave_vr::runner::QueueUnits;

fn main() -> mmwave_vr::Result<()> {
    println!(
        "transmission delay at 1 Gbit/s DL, 1 Mbit/s UL: {:.4e} s",
        transmission_delay(12288.0, 6.0, 1e9, 1e6)?
    );
    println!(
        "conditional utility at gamma, midpoint, d_max: {} {} {}",
        conditional_utility(0.02, 0.05, 0.02)?,
        conditional_utility(0.035, 0.05, 0.02)?,
        conditional_utility(0.05, 0.05, 0.02)?
    );

    let rates_ul = [2.0e5, 3.5e5, 1.2e5, 4.0e5];
    let sinrs_ul = [0.6, 1.4, 0.3, 1.9];
    for units in [QueueUnits::AsPrinted, QueueUnits::Reciprocal] {
        let (mu, lambda) = units.rates();
        let traffic = TrafficModel::new(12288.0, 6.0, 5.0, 1e6, 2.0, mu, lambda)?;
        let q = link_qos(&traffic, 1e-5, 0.01, 5e8, &rates_ul, &sinrs_ul)?;
        println!(
            "{units:?} queue units: queue delay {:.3e} s, D_max {:.6e} s",
            traffic.queue_delay(),
            q.d_max
        );
        for (n, (d, u)) in q.delays.iter().zip(&q.utilities).enumerate() {
            println!(
                "  subcarrier {n}: D = {:.6e} s, U(D|K) = {:.4e}, U(K) = {:.4}, U = {:.4e}",
                d.total, u.conditional_utility, u.tracking_utility, u.total_utility
            );
        }
    }
    Ok(())
}
