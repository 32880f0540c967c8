//! Tables of the Rademacher functional along shrinking slabs and of Walsh integrals
//! along an index sequence.
//!
//! ```text
//! cargo run --example functional_trend
//! ```

use dyadic_walsh::harness::{functional_trend, FunctionalMode};
use dyadic_walsh::rational::format_rational;
use dyadic_walsh::{DyadicCube, DyadicElement, Partition, Quasimeasure, SeriesSpec, SetSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> dyadic_walsh::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let series = SeriesSpec::random_dense(&mut rng, 2, 5);
    let tau = Quasimeasure::from_series(&series, 5)?;
    let diagonal = SetSpec::diagonal(Partition::full(2));

    let mode = FunctionalMode::Rademacher {
        star: DyadicCube::new(0, vec![0])?,
        xi: vec![DyadicElement::zero(1)],
        partition: Partition::new(2, &[1])?,
        ks: None,
    };
    let report = functional_trend(&tau, Some(&diagonal), &mode)?;
    for row in &report.rows {
        println!("k = {}: {} (meets set {:?})", row.step, format_rational(&row.value), row.meets_set);
    }

    let mode = FunctionalMode::Walsh {
        indices: vec![1, 2, 4, 8, 16],
        cube: DyadicCube::new(1, vec![0, 0])?,
        max_ones: 1,
    };
    let report = functional_trend(&tau, None, &mode)?;
    for row in &report.rows {
        println!("N = {:?}: {}", row.index, format_rational(&row.value));
    }
    println!("zero from step {:?}", report.zero_from);
    Ok(())
}
