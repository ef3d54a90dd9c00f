//! Compare the hybrid design against the full-digital bound on every
//! subcarrier for each of the six codebooks.
//!
//! Run with `cargo run --example hybrid_beamforming`.

use mmwave_vr::beamforming::{
    design_link, effective_channel, full_digital, standard_codebooks, AnalogStage,
};
use mmwave_vr::numerics::ComplexMatrix;
use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn main() -> mmwave_vr::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for codebook in standard_codebooks() {
        let channels: Vec<ComplexMatrix> = (0..16)
            .map(|_| {
                ComplexMatrix::from_fn(codebook.n_rx, codebook.n_tx, |_, _| {
                    let re: f64 = StandardNormal.sample(&mut rng);
                    let im: f64 = StandardNormal.sample(&mut rng);
                    Complex64::new(re, im) / 2f64.sqrt()
                })
            })
            .collect();
        let sol = design_link(&channels, &codebook, 0.005, AnalogStage::Svd)?;

        let mut ratio_sum = 0.0;
        for (h, eff) in channels.iter().zip(&sol.effective_channels) {
            let (p, g) = full_digital(h, 1)?;
            let bound = effective_channel(&g, h, &p)?[(0, 0)].norm();
            ratio_sum += eff[(0, 0)].norm() / bound;
        }
        println!(
            "{}: mean hybrid/full-digital gain {:.4}, |P_A|^2 error {:.1e}, \
             digital unitarity {:.1e}, radiated power {:.4e} W",
            codebook,
            ratio_sum / channels.len() as f64,
            sol.precoder_modulus_error(),
            sol.digital_unitarity_error(),
            sol.transmit_power(),
        );
    }
    Ok(())
}
