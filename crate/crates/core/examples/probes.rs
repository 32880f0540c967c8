//! Coefficient probes along indices with few binary ones.
//!
//! ```text
//! cargo run --example probes
//! ```

use dyadic_walsh::counterexample::{build_theorem8_series, cantor_lebesgue_probe};
use dyadic_walsh::rational::{format_rational, ratio};
use dyadic_walsh::{GrowthSchedule, IndexSequence};

fn main() -> dyadic_walsh::Result<()> {
    let series = build_theorem8_series(&IndexSequence::default_instance(4)?, &GrowthSchedule::default_schedule(4))?;
    let powers: Vec<u64> = (0..8).map(|k| 1 << k).collect();
    let report = cantor_lebesgue_probe(&series, &powers, Some(1))?;
    for row in &report.rows {
        println!("n = {:>3}: |c| = {}", row.n, format_rational(&row.abs_coefficient));
    }
    println!("tail below 1/2 from position {:?}", report.tail_below(&ratio(1, 2)));

    let report = cantor_lebesgue_probe(&series, &[3, 15, 63, 255], None)?;
    println!("along n_s: max |c| = {}", format_rational(&report.max_abs));
    Ok(())
}
