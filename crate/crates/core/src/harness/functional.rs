//! Finite tables of the functionals whose limits the uniqueness theorems control.

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::dyadic::{DyadicCube, DyadicElement};
use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::quasimeasure::{Parallelepiped, Quasimeasure};
use crate::rational::{serde_str, Rational};
use crate::sets::{meets, SetSpec};

#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "snake_case")]
pub enum FunctionalMode {
    /// `2^{mk} ∫_{Δ* × Δ^{(k)}(ξ)} R_{k1}(g*) dτ` for `k` in `ks`, or every `k` with
    /// `k + 1 <= K` when `ks` is absent.
    Rademacher {
        star: DyadicCube,
        xi: Vec<DyadicElement>,
        partition: Partition,
        ks: Option<Vec<u32>>,
    },
    /// `∫_Δ W_{N_i 1} dτ` for the listed `N_i` below `2^K`.
    Walsh {
        indices: Vec<u64>,
        cube: DyadicCube,
        /// The bound on the number of binary ones of every `N_i`.
        max_ones: u32,
    },
}

#[derive(Clone, Debug, Serialize)]
pub struct TrendRow {
    /// `k` in Rademacher mode, `i` in Walsh mode.
    pub step: u64,
    /// `N_i` in Walsh mode.
    pub index: Option<u64>,
    #[serde(with = "serde_str")]
    pub value: Rational,
    /// Whether the domain of integration meets the given set.
    pub meets_set: Option<bool>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TrendReport {
    pub mode: String,
    pub rows: Vec<TrendRow>,
    /// `|value|` never increases from one row to the next.
    pub magnitude_nonincreasing: bool,
    /// The first step from which every value is zero.
    pub zero_from: Option<u64>,
    pub notes: Vec<String>,
}

/// Checks the finite stand-ins for the Walsh-mode hypotheses: no `N_i` is zero, every
/// `N_i` has at most `max_ones` binary ones, and the smallest position of a binary one,
/// minimized over each tail `N_i, N_{i+1}, …`, ends strictly above where it starts.
pub fn check_index_sequence(indices: &[u64], max_ones: u32) -> Result<()> {
    if indices.is_empty() {
        return Err(Error::Malformed("empty index sequence".into()));
    }
    if let Some(i) = indices.iter().position(|&n| n == 0) {
        return Err(Error::Malformed(format!("N_{} is zero", i + 1)));
    }
    if let Some(i) = indices.iter().position(|&n| n.count_ones() > max_ones) {
        return Err(Error::Malformed(format!(
            "#-bound fails: N_{} = {} has {} binary ones, above {max_ones}",
            i + 1,
            indices[i],
            indices[i].count_ones()
        )));
    }
    if indices.len() > 1 {
        let low = |n: &u64| n.trailing_zeros();
        let first = indices.iter().map(low).min().expect("nonempty");
        let last = low(indices.last().expect("nonempty"));
        if last <= first {
            return Err(Error::Malformed(format!(
                "property P fails: the lowest binary one stays at position {first}"
            )));
        }
    }
    Ok(())
}

/// Tabulates the functional of `mode` for `tau`. With `set`, each row also records
/// whether the integration domain meets it.
pub fn functional_trend(tau: &Quasimeasure, set: Option<&SetSpec>, mode: &FunctionalMode) -> Result<TrendReport> {
    let top = tau.max_rank();
    let mut notes = Vec::new();
    let rows = match mode {
        FunctionalMode::Rademacher { star, xi, partition, ks } => {
            let ks: Vec<u32> = match ks {
                Some(ks) => {
                    if ks.windows(2).any(|w| w[0] >= w[1]) {
                        return Err(Error::Malformed("ks must increase".into()));
                    }
                    ks.clone()
                }
                None => (0..top).collect(),
            };
            let mut rows = Vec::new();
            for k in ks {
                let value = tau.rademacher_functional(k, star, xi, partition)?;
                let meets_set = match set {
                    Some(a) => Some(meets(a, &Parallelepiped::slab(partition, star, k, xi)?)?),
                    None => None,
                };
                rows.push(TrendRow { step: k as u64, index: None, value, meets_set });
            }
            rows
        }
        FunctionalMode::Walsh { indices, cube, max_ones } => {
            check_index_sequence(indices, *max_ones)?;
            let meets_set = match set {
                Some(a) => Some(meets(a, &Parallelepiped::from_cube(cube))?),
                None => None,
            };
            let mut rows = Vec::new();
            for (i, &n) in indices.iter().enumerate() {
                if 64 - n.leading_zeros() > top {
                    notes.push(format!("stopped at N_{} = {n}, beyond rank {top}", i + 1));
                    break;
                }
                rows.push(TrendRow {
                    step: i as u64 + 1,
                    index: Some(n),
                    value: tau.walsh_functional(n, cube)?,
                    meets_set,
                });
            }
            rows
        }
    };
    let magnitude_nonincreasing = rows.windows(2).all(|w| w[1].value.abs() <= w[0].value.abs());
    let zero_from = rows
        .iter()
        .rposition(|r| !r.value.is_zero())
        .map_or(rows.first().map(|r| r.step), |i| rows.get(i + 1).map(|r| r.step));
    notes.push("finite table only; no limit is claimed".into());
    Ok(TrendReport {
        mode: match mode {
            FunctionalMode::Rademacher { .. } => "rademacher".into(),
            FunctionalMode::Walsh { .. } => "walsh".into(),
        },
        rows,
        magnitude_nonincreasing,
        zero_from,
        notes,
    })
}
