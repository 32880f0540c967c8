//! Rasterizes dyadic planes and Dirichlet-type sets in two dimensions and writes PGM
//! images next to the current directory.
//!
//! ```text
//! cargo run --example render_sets -- [out_dir]
//! ```

use std::path::PathBuf;

use dyadic_walsh::sets::{coset, rasterize, IndexRule, Slice};
use dyadic_walsh::{DyadicElement, DyadicPoint, Membership, Partition, SetSpec, Tail};

fn main() -> dyadic_walsh::Result<()> {
    let out = PathBuf::from(std::env::args().nth(1).unwrap_or_else(|| ".".into()));
    let half = DyadicElement::from_interval(1, 1, Tail::Zeros);
    let sets = [
        ("diagonal", SetSpec::diagonal(Partition::full(2))),
        ("anti_diagonal", SetSpec::anti_diagonal()),
        ("shifted_diagonal", SetSpec::shifted_diagonal(Partition::full(2), vec![0, 1])?),
        (
            "plane_coset",
            coset(
                &SetSpec::coordinate_plane(Partition::new(2, &[1])?),
                &DyadicPoint::new(vec![half, DyadicElement::zero(1)])?,
            )?,
        ),
        ("dirichlet", SetSpec::dirichlet(2, IndexRule::DiagonalPowers { first: 0 }, 3)?),
    ];
    for (name, set) in &sets {
        let bm = rasterize(set, 4, &Slice::default_for(2))?;
        println!("{name}: {}", set.describe());
        println!("{}", bm.to_ascii());
        let big = rasterize(set, 7, &Slice::default_for(2))?;
        let path = out.join(format!("{name}.pgm"));
        big.write_pgm(&path, 2)?;
        println!("{} cells in, wrote {}\n", big.count(Membership::In), path.display());
    }
    Ok(())
}
