//! Place two APs and two users, then build the UL scalars and the rank-1
//! DL matrices of one codebook.
//!
//! Run with `cargo run --example channel_synthesis`.

use mmwave_vr::channel::{
    fspl_db, ArrayConfig, ChannelConfig, DlChannelSet, LinkChannelSet, SmallScaleModel,
    SubcarrierGrid, TapProfile,
};
use mmwave_vr::numerics::svd;
use mmwave_vr::runner::SweepConfig;

fn main() -> mmwave_vr::Result<()> {
    let topology = SweepConfig::default().topology()?;
    let grid = SubcarrierGrid::new(64, 60e9, 2.16e9)?;
    let config = ChannelConfig {
        taps: TapProfile {
            count: 4,
            spacing_s: grid.sampling_period(),
        },
        grid,
        pathloss_exponent: 3.2,
        small_scale: SmallScaleModel::Gaussian,
        seed: 7,
        array: ArrayConfig::default(),
    };
    println!("wavelength {:.6e} m", config.grid.wavelength());

    let links = LinkChannelSet::synthesize(&topology, &config)?;
    let dl = DlChannelSet::build(&links, &config, 4, 1)?;
    for (i, user) in topology.users().iter().enumerate() {
        for (j, ap) in topology.aps().iter().enumerate() {
            let link = links.link(i, j);
            let g = link.geometry;
            let ul_mean: f64 = link.ul_gains().iter().sum::<f64>() / link.ul.len() as f64;
            let h0 = &dl.link(i, j)[0];
            let s = svd(h0)?;
            println!(
                "user {} <- AP {}: d = {:.3} m, AoD {:6.2} deg, AoA {:6.2} deg, FSPL {:.2} dB, \
                 mean |h_UL|^2 {:.3e}, sigma_max(H_1) {:.3e}, sigma_2 {:.1e}",
                user.id,
                ap.id,
                g.distance,
                g.aod_deg,
                g.aoa_deg,
                fspl_db(g.distance, config.grid.wavelength())?,
                ul_mean,
                s.singular_values[0],
                s.singular_values.get(1).copied().unwrap_or(0.0),
            );
        }
    }
    Ok(())
}
