//! The shifted partial-sum identity: the cube partial sum `S_{M_2}` at `g` is recovered
//! from `S_{M_1}` at the digit-flip shifts of `g`.
//!
//! ```text
//! cargo run --example shifted_sums
//! ```

use dyadic_walsh::harness::{lemma1_grid, lemma1_sides, Lemma1Grid};
use dyadic_walsh::rational::format_rational;
use dyadic_walsh::{DyadicPoint, SeriesSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> dyadic_walsh::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let series = SeriesSpec::random_sparse(&mut rng, 2, 5, 40);
    let g = DyadicPoint::random(&mut rng, 2, 6);
    for (m1, m2) in [(4, 4), (4, 5), (8, 11), (12, 13), (16, 31)] {
        let (lhs, rhs) = lemma1_sides(&series, &g, m1, m2)?;
        println!("M1 = {m1:>2}, M2 = {m2:>2}: {} = {}", format_rational(&lhs), format_rational(&rhs));
        assert_eq!(lhs, rhs);
    }

    let grid = Lemma1Grid {
        series: 3,
        points: 5,
        ..Lemma1Grid::default()
    };
    println!("{}", lemma1_grid(&grid)?.summary());
    Ok(())
}
