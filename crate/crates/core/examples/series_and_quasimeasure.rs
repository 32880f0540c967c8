//! A finite Walsh series, its rectangular partial sums, and the quasimeasure it induces
//! on dyadic cubes.
//!
//! ```text
//! cargo run --example series_and_quasimeasure
//! ```

use dyadic_walsh::rational::{format_rational, ratio};
use dyadic_walsh::{DyadicCube, DyadicPoint, MultiIndex, Parallelepiped, Quasimeasure, SeriesSpec};

fn main() -> dyadic_walsh::Result<()> {
    let series = SeriesSpec::new(
        2,
        2,
        [
            (vec![0, 0], ratio(1, 1)),
            (vec![1, 0], ratio(1, 2)),
            (vec![1, 1], ratio(-1, 4)),
            (vec![3, 2], ratio(1, 8)),
        ],
    )?;
    println!("{}", series.to_json_string());

    let g: DyadicPoint = "10|0,01|0".parse()?;
    for n in 1..=4 {
        let s = series.partial_sum_cube(n, &g)?;
        println!("S_{n}(g) = {}", format_rational(&s));
    }

    let tau = Quasimeasure::from_series(&series, 2)?;
    tau.check_additivity().expect("a series quasimeasure is additive");
    for k in 0..=2 {
        let level: Vec<String> = tau.level(k).iter().map(format_rational).collect();
        println!("rank {k}: {}", level.join(" "));
    }

    // ∫_Δ W_n dτ on the whole group recovers each coefficient
    let whole = Parallelepiped::from_cube(&DyadicCube::whole(2));
    for (n, c) in series.terms() {
        let integral = tau.integrate_walsh(&MultiIndex::from_u64s(n), &whole)?;
        assert_eq!(&integral, c);
        println!("∫ W_{n:?} dτ = {}", format_rational(&integral));
    }

    let back = Quasimeasure::from_csv(&tau.to_csv())?;
    assert_eq!(back, tau);
    Ok(())
}
