//! Walsh functions and Dirichlet kernels at a few points of the dyadic group.
//!
//! ```text
//! cargo run --example kernels
//! ```

use dyadic_walsh::walsh::{dirichlet_closed, dirichlet_naive, vanishing_rank, walsh_eval};
use dyadic_walsh::{DyadicElement, WalshIndex};

fn main() -> dyadic_walsh::Result<()> {
    let points: Vec<DyadicElement> = ["000|0", "100|0", "010|0", "110|1", "001|0"]
        .iter()
        .map(|s| s.parse())
        .collect::<Result<_, _>>()?;

    println!("W_n(g) for n = 0..8");
    for g in &points {
        let row: Vec<String> = (0..8).map(|n| walsh_eval(&WalshIndex::new(n), g).to_string()).collect();
        println!("  {g:>8}  {}", row.join(" "));
    }

    println!("D_N(g): naive sum against the closed form");
    for n in [1u64, 5, 8, 13, 64] {
        let n = WalshIndex::new(n);
        for g in &points {
            let (a, b) = (dirichlet_naive(&n, g)?, dirichlet_closed(&n, g)?);
            assert_eq!(a, b);
            print!(" {a:>3}");
        }
        println!("   N = {n}, vanishes off Δ^({})(0)", vanishing_rank(&n)?);
    }
    Ok(())
}
