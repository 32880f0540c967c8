//! A two-dimensional Walsh series whose cube partial sums vanish at the origin slice and
//! stabilize everywhere else, while its coefficients grow without bound.
//!
//! ```text
//! cargo run --example counterexample
//! ```

use dyadic_walsh::counterexample::{build_theorem8_series, verify_counterexample, VerifyConfig};
use dyadic_walsh::{GrowthSchedule, IndexSequence};

fn main() -> dyadic_walsh::Result<()> {
    let idx = IndexSequence::default_instance(4)?;
    let sched = GrowthSchedule::default_schedule(4);
    println!("n = {:?}, m = {:?}", idx.n(), idx.m());
    let series = build_theorem8_series(&idx, &sched)?;
    println!("{} nonzero coefficients below 2^{}", series.nonzero_count(), series.bound_rank());

    let report = verify_counterexample(&idx, &sched, &VerifyConfig::default())?;
    for w in &report.windows {
        println!(
            "window [{}, {}): origin zero {}, formula {}",
            w.lo, w.hi, w.origin_zero, w.formula_matches
        );
    }
    print!("{}", report.growth_csv());
    println!("{}", report.note);
    assert!(report.passed);
    Ok(())
}
