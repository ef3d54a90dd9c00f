//! Decompose a random complex channel, check the factors and project a
//! singular vector onto constant modulus.
//!
//! Run with `cargo run --example svd_decomposition`.

use mmwave_vr::numerics::{svd, unit_modulus_normalize, ComplexMatrix};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> mmwave_vr::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    let h = ComplexMatrix::from_fn(3, 5, |_, _| {
        Complex64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
    });
    println!("H = {h:?}");

    let s = svd(&h)?;
    println!("singular values: {:?}", s.singular_values);
    let err = s.reconstruct().sub(&h)?.frobenius_norm() / h.frobenius_norm();
    println!("relative reconstruction error: {err:.3e}");
    println!("unitarity of U: {:.3e}", s.left.unitarity_error());
    println!("unitarity of V: {:.3e}", s.right.unitarity_error());

    // Same input, same factors: the phase convention makes the result unique.
    let again = svd(&h)?;
    assert_eq!(again.right, s.right);

    let v1 = s.right.leading_columns(1)?;
    let projected = unit_modulus_normalize(&v1, 1.0 / (h.cols() as f64).sqrt());
    println!("dominant right vector  = {v1:?}");
    println!("constant-modulus image = {projected:?}");
    Ok(())
}
