//! Membership, cosets and inclusions between dyadic planes and Dirichlet-type sets.
//!
//! ```text
//! cargo run --example set_relations
//! ```

use dyadic_walsh::harness::{corollary_equivalence, plane_inclusions};
use dyadic_walsh::sets::{coset, membership, sample_member, IndexRule};
use dyadic_walsh::{DyadicPoint, Partition, SetSpec};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> dyadic_walsh::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let set = SetSpec::dirichlet(2, IndexRule::ShiftedPowers { q: 1 }, 4)?;
    let g = sample_member(&set, &mut rng, 8)?;
    println!("{g} is {:?} in {}", membership(&set, &g, 8)?, set.describe());

    let x = DyadicPoint::random(&mut rng, 2, 4);
    let shifted = coset(&set, &x)?;
    let h = g.add(&x)?;
    println!("{h} is {:?} in the coset by {x}", membership(&shifted, &h, 8)?);

    let d1 = SetSpec::diagonal(Partition::new(2, &[1])?);
    let probe = DyadicPoint::random(&mut rng, 2, 6);
    println!("{probe}: {:?} at rank 2, {:?} exactly", membership(&d1, &probe, 2)?, membership(&d1, &probe, 64)?);

    println!("{}", plane_inclusions(3, 3, 12, 2_000, 0)?.summary());
    println!("{}", corollary_equivalence(&[1, 2], 6)?.summary());
    Ok(())
}
