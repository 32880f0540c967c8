//! Searches a set of cells for a point whose whole digit-flip orbit stays inside it.
//!
//! ```text
//! cargo run --example orbit_search
//! ```

use dyadic_walsh::harness::lemma2_search;
use dyadic_walsh::{DyadicCube, SupportMask};

fn main() -> dyadic_walsh::Result<()> {
    let (d, rank) = (2usize, 6u32);
    let total = 1usize << (d as u32 * rank);
    // remove every 37th cell; the remaining set is dense in every cube
    let cells: Vec<bool> = (0..total).map(|i| i % 37 != 0).collect();
    let e = SupportMask::new(d, rank, cells);
    for ks in [vec![5], vec![5, 3], vec![5, 4, 2]] {
        let out = lemma2_search(&e, &DyadicCube::whole(d), &ks)?;
        println!(
            "k = {ks:?}: k0 = {:?}, guaranteed = {}, found {}",
            out.k0,
            out.hypothesis_holds,
            out.point.map_or("nothing".to_string(), |p| p.to_string())
        );
    }
    Ok(())
}
