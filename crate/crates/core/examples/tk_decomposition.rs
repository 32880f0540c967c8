//! The quantity `T_k` computed four ways: the signed sum of shifted partial sums, the
//! coefficient form, the kernel integral against the quasimeasure, and the slab
//! decomposition.
//!
//! ```text
//! cargo run --example tk_decomposition
//! ```

use dyadic_walsh::harness::tk_values;
use dyadic_walsh::rational::{format_rational, pow2};
use dyadic_walsh::{DyadicElement, Partition, SeriesSpec, Tail};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> dyadic_walsh::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let part = Partition::new(2, &[1])?;
    let series = SeriesSpec::random_dense(&mut rng, 2, 4);
    for k in 1..=3 {
        for s in 0..k {
            let eta = vec![DyadicElement::random(&mut rng, 8, Tail::Zeros)];
            let xi = vec![DyadicElement::random(&mut rng, k, Tail::Zeros)];
            let v = tk_values(&series, &eta, &xi, k, s, &part)?;
            // the integral forms carry a factor 2^{-(d-m)}
            let scale = pow2(part.constrained().len() as i64);
            assert_eq!(v.signed_sum, v.coefficient_display);
            assert_eq!(v.signed_sum, &v.kernel_integral * &scale);
            assert_eq!(v.kernel_integral, v.decomposition);
            println!(
                "k = {k}, s = {s}: T_k = {}, kernel integral {}",
                format_rational(&v.signed_sum),
                format_rational(&v.kernel_integral)
            );
        }
    }
    Ok(())
}
