//! The shifted-sum identity for cubic partial sums between `M1` and `M2`.

use std::collections::BTreeMap;

use num_traits::Zero;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{cell_rng, Cell, IdentityReport};
use crate::dyadic::{DyadicPoint, SignVector};
use crate::error::{Error, Result};
use crate::rational::{pow2, ratio, Rational};
use crate::series::SeriesSpec;
use crate::walsh::{walsh_eval_multi, MultiIndex};

/// The exponents `k_1 > … > k_l` of `M1`, after checking `M2 = M1 + r` with `r < 2^{k_l}`.
fn split(m1: u64, m2: u64) -> Result<Vec<u32>> {
    if m1 == 0 {
        return Err(Error::Malformed("M1 must be positive".into()));
    }
    if m2 < m1 {
        return Err(Error::Malformed(format!("M2 = {m2} below M1 = {m1}")));
    }
    let ks: Vec<u32> = (0..64).rev().filter(|&b| m1 >> b & 1 == 1).collect();
    let kl = *ks.last().expect("m1 > 0");
    if m2 - m1 >= 1u64 << kl {
        return Err(Error::Malformed(format!(
            "M2 - M1 = {} is not below 2^{kl}",
            m2 - m1
        )));
    }
    Ok(ks)
}

/// Both sides at `g`: the sum over `σ^1, …, σ^l ∈ Σ^d_2` of
/// `[S_{M2+1} − S_{M1}](g ⊕ ⊕_j e^{σ^j})`, with `e^{σ^j}` flipping digit `k_j`, and
/// `2^{l(d−1)} Σ_{M1·1 <= n <= M2·1} c_n W_n(g)`.
pub fn lemma1_sides(series: &SeriesSpec, g: &DyadicPoint, m1: u64, m2: u64) -> Result<(Rational, Rational)> {
    let ks = split(m1, m2)?;
    let d = series.dim();
    if g.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: g.dim() });
    }
    let evens: Vec<SignVector> = SignVector::even(d).collect();
    let l = ks.len();
    let mut lhs = Rational::zero();
    let mut choice = vec![0usize; l];
    loop {
        let mut p = g.clone();
        for (j, &k) in ks.iter().enumerate() {
            p = p.shifted(&evens[choice[j]], k);
        }
        lhs += series.partial_sum_cube(m2 + 1, &p)? - series.partial_sum_cube(m1, &p)?;
        // odometer over (Σ^d_2)^l
        let mut j = 0;
        while j < l {
            choice[j] += 1;
            if choice[j] < evens.len() {
                break;
            }
            choice[j] = 0;
            j += 1;
        }
        if j == l {
            break;
        }
    }
    let width = (m2 - m1 + 1) as usize;
    let mut rhs = Rational::zero();
    for flat in 0..width.pow(d as u32) {
        let mut f = flat;
        let n: Vec<u64> = (0..d)
            .map(|_| {
                let v = m1 + (f % width) as u64;
                f /= width;
                v
            })
            .collect();
        let c = series.coefficient(&n);
        if c.is_zero() {
            continue;
        }
        let w = walsh_eval_multi(&MultiIndex::from_u64s(&n), g)?;
        rhs += c * ratio(w.to_i64(), 1);
    }
    rhs *= pow2((l * (d - 1)) as i64);
    Ok((lhs, rhs))
}

/// The identity at one point, as a one-cell report.
pub fn lemma1_check(series: &SeriesSpec, g: &DyadicPoint, m1: u64, m2: u64) -> Result<IdentityReport> {
    let (lhs, rhs) = lemma1_sides(series, g, m1, m2)?;
    let mut cell = Cell::new(json!({ "M1": m1, "M2": m2, "g": g.to_string() }));
    cell.compare(&lhs, &rhs, || format!("g = {g}"));
    Ok(IdentityReport::new(
        "lemma1",
        json!({ "d": series.dim(), "M1": m1, "M2": m2 }),
        vec![cell],
    ))
}

/// Parameters of the full Lemma 1 sweep.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Lemma1Grid {
    pub dims: Vec<usize>,
    pub max_l: u32,
    pub max_k1: u32,
    pub rs: Vec<u64>,
    pub series: usize,
    pub points: usize,
    pub point_rank: u32,
    pub seed: u64,
}

impl Default for Lemma1Grid {
    fn default() -> Self {
        Lemma1Grid {
            dims: vec![2, 3],
            max_l: 3,
            max_k1: 5,
            rs: vec![0, 1],
            series: 50,
            points: 20,
            point_rank: 8,
            seed: 0,
        }
    }
}

impl Lemma1Grid {
    /// Every `(d, M1, M2)` of the sweep, skipping `r >= 2^{k_l}`.
    pub fn cells(&self) -> Vec<(usize, u64, u64)> {
        let mut out = Vec::new();
        for &d in &self.dims {
            for m1 in 1u64..1 << (self.max_k1 + 1) {
                if m1.count_ones() > self.max_l {
                    continue;
                }
                for &r in &self.rs {
                    if r < 1u64 << m1.trailing_zeros() {
                        out.push((d, m1, m1 + r));
                    }
                }
            }
        }
        out
    }
}

/// A random series whose coefficients crowd the box `[M1, M2]^d` and its neighbours,
/// plus a few anywhere below `2^bound_rank`.
pub(crate) fn series_near_box<R: Rng + ?Sized>(
    rng: &mut R,
    d: usize,
    bound_rank: u32,
    lo: u64,
    hi: u64,
) -> Result<SeriesSpec> {
    let bound = 1u64 << bound_rank;
    let mut map = BTreeMap::new();
    let value = |rng: &mut R| ratio(rng.gen_range(-9..=9), rng.gen_range(1..=6));
    for _ in 0..8 {
        let n: Vec<u64> = (0..d).map(|_| rng.gen_range(0..bound)).collect();
        map.insert(n, value(rng));
    }
    let (a, b) = (lo.saturating_sub(2), (hi + 2).min(bound - 1));
    for _ in 0..24 {
        let n: Vec<u64> = (0..d).map(|_| rng.gen_range(a..=b)).collect();
        map.insert(n, value(rng));
    }
    for _ in 0..6 {
        let n: Vec<u64> = (0..d).map(|_| rng.gen_range(lo..=hi)).collect();
        map.insert(n, value(rng));
    }
    SeriesSpec::new(d, bound_rank, map)
}

/// Runs the sweep: for each cell, `series` random series and `points` random points.
pub fn lemma1_grid(grid: &Lemma1Grid) -> Result<IdentityReport> {
    let cells = grid.cells();
    let results: Vec<Result<Cell>> = cells
        .par_iter()
        .enumerate()
        .map(|(i, &(d, m1, m2))| {
            let mut rng = cell_rng(grid.seed, i as u64);
            let bound_rank = 64 - (m2 + 1).leading_zeros();
            let mut cell = Cell::new(json!({ "d": d, "M1": m1, "M2": m2 }));
            for t in 0..grid.series {
                let series = series_near_box(&mut rng, d, bound_rank, m1, m2)?;
                for _ in 0..grid.points {
                    let g = DyadicPoint::random(&mut rng, d, grid.point_rank);
                    let (lhs, rhs) = lemma1_sides(&series, &g, m1, m2)?;
                    cell.compare(&lhs, &rhs, || format!("series {t}, g = {g}"));
                }
            }
            Ok(cell)
        })
        .collect();
    let cells = results.into_iter().collect::<Result<Vec<_>>>()?;
    Ok(IdentityReport::new("lemma1", serde_json::to_value(grid)?, cells))
}
