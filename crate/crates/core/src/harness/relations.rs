//! Inclusions between diagonal planes and power Dirichlet sets, and the equivalence
//! of shifted Dirichlet sets with shifted diagonals.

use rayon::prelude::*;
use serde_json::json;

use super::{cell_rng, Cell, IdentityReport};
use crate::dyadic::{DyadicElement, DyadicPoint, Tail};
use crate::error::Result;
use crate::partition::Partition;
use crate::sets::{membership, subset_check, IndexRule, SetSpec};

fn record(cell: &mut Cell, report: &crate::sets::SubsetReport) {
    cell.checks += report.checked as u64;
    if !report.holds {
        let g = report.counterexample.as_ref().map(|g| g.to_string()).unwrap_or_default();
        cell.fail(format!("counterexample {g}"), "in".into(), "out".into());
    }
    if report.undetermined > 0 {
        cell.fail(
            format!("{} undecided points", report.undetermined),
            "decided".into(),
            "undetermined".into(),
        );
    }
}

/// In dimension `d`: `D_m ⊆ D_{d−2}` for `m <= d − 2` and `D_{d−2} ⊆ WD²(2^ℕ 1) × 𝔾^{d−2}`,
/// with the free coordinates trailing. Each inclusion is tested exhaustively at
/// `exhaustive_rank` and on `samples` random points and members at `random_rank`.
pub fn plane_inclusions(d: usize, exhaustive_rank: u32, random_rank: u32, samples: usize, seed: u64) -> Result<IdentityReport> {
    let top = Partition::trailing(d, d - 2)?;
    let mut pairs = Vec::new();
    for m in 0..d - 2 {
        pairs.push((
            format!("D_{m} in D_{}", d - 2),
            SetSpec::diagonal(Partition::trailing(d, m)?),
            SetSpec::diagonal(top.clone()),
        ));
    }
    let mut jobs = Vec::new();
    for (name, a, b) in pairs {
        jobs.push((name.clone(), a.clone(), b.clone(), exhaustive_rank));
        jobs.push((name, a, b, random_rank));
    }
    for rank in [exhaustive_rank, random_rank] {
        let wd = SetSpec::PowerDirichletProduct {
            partition: top.clone(),
            ks: (0..rank).collect(),
        };
        jobs.push((format!("D_{} in WD x G^{}", d - 2, d - 2), SetSpec::diagonal(top.clone()), wd, rank));
    }
    let cells: Vec<Result<Cell>> = jobs
        .par_iter()
        .enumerate()
        .map(|(i, (name, a, b, rank))| {
            let mut rng = cell_rng(seed, i as u64);
            let report = subset_check(a, b, *rank, samples, &mut rng)?;
            let mut cell = Cell::new(json!({
                "inclusion": name,
                "rank": rank,
                "exhaustive": report.exhaustive,
            }));
            record(&mut cell, &report);
            Ok(cell)
        })
        .collect();
    Ok(IdentityReport::new(
        "plane_inclusions",
        json!({ "d": d, "exhaustive_rank": exhaustive_rank, "random_rank": random_rank, "samples": samples, "seed": seed }),
        cells.into_iter().collect::<Result<_>>()?,
    ))
}

/// For each `q`: at every zero-tail point of `𝔾²` of rank `rank`, membership in
/// `WD²(N)` with `N_i = (2^{i−1}, 2^{i−1+q})`, `i <= rank`, equals membership in the
/// shifted diagonal `{g^1_t = g^2_{t+q}}`.
pub fn corollary_equivalence(qs: &[u32], rank: u32) -> Result<IdentityReport> {
    let cells: Vec<Result<Cell>> = qs
        .par_iter()
        .map(|&q| {
            let wd = SetSpec::dirichlet(2, IndexRule::ShiftedPowers { q }, rank as usize)?;
            let plane = SetSpec::shifted_diagonal(Partition::full(2), vec![q, 0])?;
            let mut cell = Cell::new(json!({ "q": q, "rank": rank }));
            let mut members = 0u64;
            for code in 0..1u64 << (2 * rank) {
                let g = DyadicPoint::new(vec![
                    DyadicElement::from_interval(rank, code >> rank, Tail::Zeros),
                    DyadicElement::from_interval(rank, code & ((1 << rank) - 1), Tail::Zeros),
                ])?;
                let a = membership(&wd, &g, 64)?;
                let b = membership(&plane, &g, 64)?;
                if a == b {
                    cell.pass();
                    members += (a == crate::sets::Membership::In) as u64;
                } else {
                    cell.fail(format!("g = {g}"), format!("{a:?}"), format!("{b:?}"));
                }
            }
            cell.params["members"] = json!(members);
            Ok(cell)
        })
        .collect();
    Ok(IdentityReport::new(
        "corollary_equivalence",
        json!({ "qs": qs, "rank": rank }),
        cells.into_iter().collect::<Result<_>>()?,
    ))
}
