//! Integrals of Walsh functions against quasimeasures supported on Dirichlet-type sets,
//! compared with the closed form and a brute-force sum.
//!
//! ```text
//! cargo run --example dirichlet_integrals
//! ```

use dyadic_walsh::harness::{lemma4_check, lemma4_grid, lemma4_instance};
use dyadic_walsh::rational::format_rational;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> dyadic_walsh::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..5 {
        let inst = lemma4_instance(&mut rng, 2, 4)?;
        let (integral, closed, brute) = lemma4_check(&inst)?;
        println!(
            "integral {}, closed form {}, brute force {}",
            format_rational(&integral),
            format_rational(&closed),
            format_rational(&brute)
        );
    }
    println!("{}", lemma4_grid(100, 0)?.summary());
    Ok(())
}
