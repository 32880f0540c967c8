//! The finite-rank falsifier: the dimension of quasimeasures supported on the cells that
//! meet a set, shrinking as vanishing constraints are added.
//!
//! ```text
//! cargo run --example falsifier
//! ```

use dyadic_walsh::harness::{uset_falsify, Constraints};
use dyadic_walsh::sets::IndexRule;
use dyadic_walsh::{Partition, SetSpec};

fn main() -> dyadic_walsh::Result<()> {
    let k = 4;
    let sets = [
        ("diagonal", SetSpec::diagonal(Partition::full(2))),
        ("dirichlet", SetSpec::dirichlet(2, IndexRule::DiagonalPowers { first: 0 }, 5)?),
        ("whole", SetSpec::whole(2)),
    ];
    for (name, set) in &sets {
        let mut dims = Vec::new();
        for top in [None, Some(0), Some(1), Some(2), Some(3)] {
            let c = Constraints {
                rademacher_up_to: top,
                ..Constraints::default()
            };
            let p = uset_falsify(set, k, &c)?;
            assert!(p.verify_basis()?.is_empty());
            dims.push(p.dimension);
        }
        println!("{name:>9}: {dims:?}");
    }
    Ok(())
}
