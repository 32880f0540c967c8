//! Points whose digit-flip orbits stay inside a set of cells.

use rayon::prelude::*;
use serde::Serialize;

use crate::dyadic::{DyadicCube, DyadicPoint};
use crate::error::{Error, Result};
use crate::quasimeasure::SupportMask;

/// Largest `d · K` accepted by [`lemma2_search`].
pub const MAX_SEARCH_BITS: u32 = 24;

#[derive(Clone, Debug, Serialize)]
pub struct Lemma2Outcome {
    /// The smallest rank `>= s` at which some cube of `Δ` has density of `E` above
    /// `1 − 2^{−ld}`; `None` when no rank up to `K` qualifies.
    pub k0: Option<u32>,
    /// Whether `k0` exists and every `k_i >= k0`, so that a point is guaranteed.
    pub hypothesis_holds: bool,
    /// A rank-`K` cell of `E` whose whole orbit lies in `E`; `None` is NotFound.
    pub cell: Option<DyadicCube>,
    pub point: Option<DyadicPoint>,
    pub cells_examined: usize,
}

/// Searches the cells of `e` (a rank-`K` cell set inside the rank-`s` cube `within`)
/// for `g` with `g ⊕ ⊕_i e_{k_i}^{σ^i} ∈ E` for all `σ^i ∈ Σ^d`, where `e_{k}^{σ}` flips
/// digit `k` of the coordinates selected by `σ`. Requires `K > k_1 > … > k_l`.
pub fn lemma2_search(e: &SupportMask, within: &DyadicCube, ks: &[u32]) -> Result<Lemma2Outcome> {
    let (d, rank) = (e.dim(), e.rank());
    if within.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: within.dim() });
    }
    if d as u32 * rank > MAX_SEARCH_BITS {
        return Err(Error::SizeLimit(format!("2^{} cells", d as u32 * rank)));
    }
    if ks.is_empty() || ks.windows(2).any(|w| w[0] <= w[1]) {
        return Err(Error::Malformed("ks must be nonempty and strictly decreasing".into()));
    }
    if ks[0] >= rank {
        return Err(Error::RankTooSmall { have: rank, need: ks[0] + 1 });
    }
    let s = within.rank();
    if s > rank {
        return Err(Error::RankTooSmall { have: rank, need: s });
    }
    if e.cubes().any(|c| !within.contains(&c)) {
        return Err(Error::Malformed(format!("the cell set is not inside {within}")));
    }
    let l = ks.len() as u32;
    let k0 = density_rank(e, within, l);
    let hypothesis_holds = k0.is_some_and(|k0| ks.iter().all(|&k| k >= k0));
    // each orbit element is a flip pattern: bit (i·d + j) flips digit k_i of coordinate j
    let orbit = 1usize << (l as usize * d);
    let flat_flip = |pattern: usize, j: usize| -> u64 {
        let mut x = 0u64;
        for (i, &k) in ks.iter().enumerate() {
            if pattern >> (i * d + j) & 1 == 1 {
                x ^= 1 << (rank - 1 - k);
            }
        }
        x
    };
    let members: Vec<DyadicCube> = e.cubes().collect();
    let found = members.par_iter().find_first(|c| {
        (0..orbit).all(|pattern| {
            let index = (0..d).map(|j| c.index()[j] ^ flat_flip(pattern, j)).collect();
            e.contains(&DyadicCube::new(rank, index).expect("same rank"))
        })
    });
    let cells_examined = match found {
        Some(c) => members.iter().position(|m| m == c).expect("member") + 1,
        None => members.len(),
    };
    Ok(Lemma2Outcome {
        k0,
        hypothesis_holds,
        point: found.map(DyadicPoint::corner),
        cell: found.cloned(),
        cells_examined,
    })
}

fn density_rank(e: &SupportMask, within: &DyadicCube, l: u32) -> Option<u32> {
    let (d, rank) = (e.dim(), e.rank());
    // counts[r][flat]: cells of E inside each rank-r cube
    let mut counts = vec![Vec::new(); rank as usize + 1];
    counts[rank as usize] = e.cells().iter().map(|&b| b as u64).collect::<Vec<_>>();
    for r in (within.rank()..rank).rev() {
        let mut level = vec![0u64; 1usize << (r as usize * d)];
        for (flat, &n) in counts[r as usize + 1].iter().enumerate() {
            if n > 0 {
                let parent = DyadicCube::from_flat(r + 1, d, flat).parent().expect("rank > 0");
                level[parent.flat_index()] += n;
            }
        }
        counts[r as usize] = level;
    }
    let d = d as u32;
    (within.rank()..=rank).find(|&r| {
        let threshold = ((1u128 << (l * d)) - 1) << ((rank - r) * d);
        within
            .descendants(r)
            .any(|cube| (counts[r as usize][cube.flat_index()] as u128) << (l * d) > threshold)
    })
}
