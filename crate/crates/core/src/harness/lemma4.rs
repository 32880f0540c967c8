//! `∫_P W_N dτ = τ(P)` for quasimeasures carried by `{W_N = 1}`.

use num_traits::Zero;
use rand::Rng;
use rayon::prelude::*;
use serde_json::json;

use super::{cell_rng, Cell, IdentityReport};
use crate::dyadic::DyadicPoint;
use crate::error::{Error, Result};
use crate::quasimeasure::{Parallelepiped, Quasimeasure};
use crate::rational::{int, ratio, Rational};
use crate::sets::{cell_mask, IndexRule, SetSpec};
use crate::walsh::{walsh_eval_multi, MultiIndex};

/// A quasimeasure whose support lies in the Dirichlet set `{W_N = 1}`, and a box.
#[derive(Clone, Debug)]
pub struct Lemma4Instance {
    pub tau: Quasimeasure,
    pub n: Vec<u64>,
    pub p: Parallelepiped,
}

/// Draws `N < 2^K`, random leaf values on a random subset of the rank-`K` cells of
/// `WD^d(N)`, and a random parallelepiped of ranks `<= K`.
pub fn lemma4_instance<R: Rng + ?Sized>(rng: &mut R, d: usize, rank: u32) -> Result<Lemma4Instance> {
    if rank == 0 {
        return Err(Error::RankTooSmall { have: 0, need: 1 });
    }
    let n: Vec<u64> = (0..d).map(|_| rng.gen_range(0..1u64 << rank)).collect();
    let set = SetSpec::dirichlet(d, IndexRule::Explicit { indices: vec![n.clone()] }, 1)?;
    let mask = cell_mask(&set, rank)?;
    let leaves = mask
        .cells()
        .iter()
        .map(|&inside| {
            if inside && rng.gen_bool(0.6) {
                ratio(rng.gen_range(-9..=9), rng.gen_range(1..=4))
            } else {
                Rational::zero()
            }
        })
        .collect();
    let tau = Quasimeasure::from_leaves(d, rank, leaves)?;
    let sides = (0..d)
        .map(|_| {
            let r = rng.gen_range(0..=rank);
            (r, rng.gen_range(0..1u64 << r))
        })
        .collect();
    Ok(Lemma4Instance {
        tau,
        n,
        p: Parallelepiped::new(sides)?,
    })
}

/// `(∫_P W_N dτ, τ(P), Σ W_N(c) τ(c))`, the last summed by hand over the leaves in
/// `P`. Errors when the hypothesis `W_N = 1` on `supp τ ∩ P` fails.
pub fn lemma4_check(inst: &Lemma4Instance) -> Result<(Rational, Rational, Rational)> {
    let tau = &inst.tau;
    let rank = tau.max_rank();
    let idx = MultiIndex::from_u64s(&inst.n);
    let mut brute = Rational::zero();
    for c in inst.p.cubes(rank) {
        let v = tau.value(&c)?;
        if v.is_zero() {
            continue;
        }
        let w = walsh_eval_multi(&idx, &DyadicPoint::corner(&c))?;
        if w.is_minus() {
            return Err(Error::Malformed(format!(
                "W_N = -1 on the support cell {c}, the hypothesis fails"
            )));
        }
        brute += v * int(w.to_i64());
    }
    let integral = tau.integrate_walsh(&idx, &inst.p)?;
    let value = tau.value_on(&inst.p)?;
    Ok((integral, value, brute))
}

/// `instances` random instances with `d ∈ {2, 3}` and ranks up to 5 and 3.
pub fn lemma4_grid(instances: usize, seed: u64) -> Result<IdentityReport> {
    let results: Vec<Result<Cell>> = (0..instances)
        .into_par_iter()
        .map(|i| {
            let mut rng = cell_rng(seed, i as u64);
            let d = if rng.gen_bool(0.5) { 2 } else { 3 };
            let rank = rng.gen_range(1..=if d == 2 { 5 } else { 3 });
            let inst = lemma4_instance(&mut rng, d, rank)?;
            let (integral, value, brute) = lemma4_check(&inst)?;
            let mut cell = Cell::new(json!({
                "d": d,
                "K": rank,
                "N": inst.n,
                "P": inst.p.sides(),
            }));
            cell.compare(&integral, &value, || "integral vs τ(P)".into());
            cell.compare(&integral, &brute, || "integral vs leaf sum".into());
            Ok(cell)
        })
        .collect();
    let cells = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(IdentityReport::new(
        "lemma4",
        json!({ "instances": instances, "seed": seed }),
        cells,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::DyadicCube;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    // the top-rank cells where W_N = -1
    fn negative_cells(rank: u32, d: usize, n: &[u64]) -> Vec<DyadicCube> {
        DyadicCube::all(rank, d)
            .filter(|c| {
                walsh_eval_multi(&MultiIndex::from_u64s(n), &DyadicPoint::corner(c))
                    .unwrap()
                    .is_minus()
            })
            .collect()
    }

    #[test]
    fn random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(51);
        for _ in 0..30 {
            let inst = lemma4_instance(&mut rng, 2, 4).unwrap();
            let (a, b, c) = lemma4_check(&inst).unwrap();
            assert_eq!(a, b);
            assert_eq!(a, c);
        }
        assert!(lemma4_grid(12, 3).unwrap().passed);
    }

    #[test]
    fn hypothesis_matters() {
        // mass on a cell where W_N = -1 breaks the identity
        let n = vec![3u64, 1];
        let bad = negative_cells(2, 2, &n)[0].clone();
        let mut leaves = vec![Rational::zero(); 16];
        leaves[bad.flat_index()] = int(1);
        let inst = Lemma4Instance {
            tau: Quasimeasure::from_leaves(2, 2, leaves).unwrap(),
            n,
            p: Parallelepiped::from_cube(&DyadicCube::whole(2)),
        };
        assert!(lemma4_check(&inst).is_err());
        let idx = MultiIndex::from_u64s(&inst.n);
        assert_eq!(inst.tau.integrate_walsh(&idx, &inst.p).unwrap(), int(-1));
        assert_eq!(inst.tau.value_on(&inst.p).unwrap(), int(1));
    }
}
