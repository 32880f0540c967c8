//! Exhaustive kernel checks and the series ↔ quasimeasure round trip.

use num_bigint::BigInt;
use num_traits::Zero;
use rayon::prelude::*;
use serde_json::json;

use super::{cell_rng, Cell, IdentityReport};
use crate::dyadic::{DyadicCube, DyadicElement, Tail};
use crate::error::Result;
use crate::quasimeasure::{Parallelepiped, Quasimeasure};
use crate::series::SeriesSpec;
use crate::walsh::{dirichlet_closed, dirichlet_naive, rademacher, vanishing_rank, MultiIndex, WalshIndex};

fn elements(rank: u32) -> Vec<DyadicElement> {
    (0..1u64 << rank)
        .map(|m| DyadicElement::from_interval(rank, m, Tail::Zeros))
        .collect()
}

fn compare_ints(cell: &mut Cell, a: &BigInt, b: &BigInt, detail: impl FnOnce() -> String) {
    if a == b {
        cell.pass();
    } else {
        cell.fail(detail(), a.to_string(), b.to_string());
    }
}

/// `dirichlet_closed = dirichlet_naive` for `1 <= N <= max_n` at every rank-`rank` element.
pub fn kernel_equivalence(max_n: u64, rank: u32) -> Result<IdentityReport> {
    let gs = elements(rank);
    let cells: Vec<Result<Cell>> = (1..=max_n)
        .into_par_iter()
        .map(|n| {
            let idx = WalshIndex::new(n);
            let mut cell = Cell::new(json!({ "N": n }));
            for g in &gs {
                let a = dirichlet_closed(&idx, g)?;
                let b = dirichlet_naive(&idx, g)?;
                compare_ints(&mut cell, &a, &b, || format!("g = {g}"));
            }
            Ok(cell)
        })
        .collect();
    Ok(IdentityReport::new(
        "kernels",
        json!({ "max_N": max_n, "rank": rank }),
        cells.into_iter().collect::<Result<_>>()?,
    ))
}

/// `D_{2^k + m} = D_{2^k} + R_k D_m` for `k <= max_k`, `1 <= m <= 2^k`, at every
/// rank-`rank` element; the left side is summed directly.
pub fn recursion_check(max_k: u32, rank: u32) -> Result<IdentityReport> {
    let gs = elements(rank);
    let cells: Vec<Result<Cell>> = (0..=max_k)
        .into_par_iter()
        .map(|k| {
            let mut cell = Cell::new(json!({ "k": k }));
            let p = WalshIndex::pow2(k);
            for m in 1..=1u64 << k {
                let n = WalshIndex::new((1u64 << k) + m);
                let mi = WalshIndex::new(m);
                for g in &gs {
                    let lhs = dirichlet_naive(&n, g)?;
                    let rhs = dirichlet_closed(&p, g)?
                        + dirichlet_closed(&mi, g)? * rademacher(k as u64, g).to_i64();
                    compare_ints(&mut cell, &lhs, &rhs, || format!("m = {m}, g = {g}"));
                }
            }
            Ok(cell)
        })
        .collect();
    Ok(IdentityReport::new(
        "recursion",
        json!({ "max_k": max_k, "rank": rank }),
        cells.into_iter().collect::<Result<_>>()?,
    ))
}

/// `D_N(g) = 0` whenever `g ∉ Δ_0^{(k_s)}`, `k_s` the lowest binary exponent of `N`, for
/// `1 <= N <= max_n` at every rank-`rank` element. The note counts the points where
/// the one-rank-finer region `g ∉ Δ_0^{(k_s + 1)}` would wrongly predict a zero.
pub fn vanishing_check(max_n: u64, rank: u32) -> Result<IdentityReport> {
    let gs = elements(rank);
    let results: Vec<Result<(Cell, u64)>> = (1..=max_n)
        .into_par_iter()
        .map(|n| {
            let idx = WalshIndex::new(n);
            let ks = vanishing_rank(&idx)?;
            let mut cell = Cell::new(json!({ "N": n, "k_s": ks }));
            let mut finer_fails = 0;
            for g in &gs {
                let v = dirichlet_naive(&idx, g)?;
                if !g.in_zero_interval(ks) {
                    compare_ints(&mut cell, &v, &BigInt::zero(), || format!("g = {g}"));
                } else if !g.in_zero_interval(ks + 1) && !v.is_zero() {
                    finer_fails += 1;
                }
            }
            Ok((cell, finer_fails))
        })
        .collect();
    let mut cells = Vec::new();
    let mut finer = 0;
    for r in results {
        let (c, f) = r?;
        cells.push(c);
        finer += f;
    }
    let report = IdentityReport::new("vanishing", json!({ "max_N": max_n, "rank": rank }), cells);
    let d5 = dirichlet_closed(&WalshIndex::new(5), &DyadicElement::basis(0))?;
    Ok(report.with_note(format!(
        "vanishing outside the rank-(k_s + 1) zero interval fails at {finer} points; D_5(e_0) = {d5}"
    )))
}

/// Additivity of `τ` generated by `series` random series in dimension `d` at rank
/// `rank`, and recovery of every coefficient `c_n = ∫ W_n dτ` for dense series of
/// ranks `1..=roundtrip_rank`.
pub fn quasimeasure_suite(series: usize, d: usize, rank: u32, roundtrip_rank: u32, seed: u64) -> Result<IdentityReport> {
    let additivity: Vec<Result<Cell>> = (0..series)
        .into_par_iter()
        .map(|i| {
            let mut rng = cell_rng(seed, i as u64);
            let s = SeriesSpec::random_sparse(&mut rng, d, rank, 48);
            let tau = Quasimeasure::from_series(&s, rank)?;
            let mut cell = Cell::new(json!({ "check": "additivity", "series": i }));
            match tau.check_additivity() {
                Ok(()) => cell.pass(),
                Err(v) => cell.fail(format!("{v:?}"), "parent".into(), "sum of children".into()),
            }
            Ok(cell)
        })
        .collect();
    let mut cells = additivity.into_iter().collect::<Result<Vec<_>>>()?;
    for k in 1..=roundtrip_rank {
        let mut rng = cell_rng(seed, (series as u64) + k as u64);
        let s = SeriesSpec::random_dense(&mut rng, d, k);
        let tau = Quasimeasure::from_series(&s, k)?;
        let whole = Parallelepiped::from_cube(&DyadicCube::whole(d));
        let mut cell = Cell::new(json!({ "check": "round trip", "K": k }));
        for n in DyadicCube::all(k, d) {
            let back = tau.integrate_walsh(&MultiIndex::from_u64s(n.index()), &whole)?;
            cell.compare(&back, &s.coefficient(n.index()), || format!("n = {:?}", n.index()));
        }
        cells.push(cell);
    }
    Ok(IdentityReport::new(
        "quasimeasure",
        json!({ "series": series, "d": d, "K": rank, "round_trip_K": roundtrip_rank, "seed": seed }),
        cells,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_sweeps() {
        assert!(kernel_equivalence(40, 6).unwrap().passed);
        assert!(recursion_check(4, 6).unwrap().passed);
        let v = vanishing_check(40, 6).unwrap();
        assert!(v.passed);
        assert!(v.notes[0].contains("D_5(e_0) = 1"));
        assert!(!v.notes[0].starts_with("vanishing outside the rank-(k_s + 1) zero interval fails at 0 "));
        assert!(quasimeasure_suite(4, 2, 4, 2, 0).unwrap().passed);
    }
}
