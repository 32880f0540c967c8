//! The finite-rank shadow of the uniqueness question: which quasimeasures of rank `K`
//! live on the cells of `E` and annihilate the selected functionals?
//!
//! The unknowns are the leaf values `τ(Δ^{(K)})`; every coarser value is a sum of
//! leaves, so additivity holds by construction. Support containment keeps only the
//! leaves on cells meeting `E`.

use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::linalg::{normalize, rref, SparseRow};
use crate::dyadic::{DyadicCube, DyadicElement, DyadicPoint, Tail};
use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::quasimeasure::Quasimeasure;
use crate::rational::{format_rational, int, Rational};
use crate::sets::{cell_mask, SetSpec};
use crate::walsh::{walsh_eval_multi, MultiIndex};

/// Largest `d · K` accepted by [`uset_falsify`].
pub const MAX_FALSIFIER_BITS: u32 = 12;

pub const EXPLORATORY_NOTE: &str =
    "exploratory: a zero dimension at rank K is evidence, not proof, of U-set behavior";

/// The constraint families to impose.
#[derive(Clone, Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Constraints {
    /// Leaves off the cells of `E` vanish.
    pub support: bool,
    /// For every `k <= rademacher_up_to`, every nonempty set of constrained coordinates
    /// and every rank-`k` cube `Δ* × Δ^{(k)}(ξ)`: `∫ R_{k1}(g*) dτ = 0` over it.
    pub rademacher_up_to: Option<u32>,
    /// For every listed `N` and every cube of rank `walsh_cube_rank`: `∫_Δ W_{N1} dτ = 0`.
    pub walsh: Vec<u64>,
    pub walsh_cube_rank: u32,
    /// How many basis quasimeasures to return.
    pub basis_limit: usize,
}

impl Default for Constraints {
    fn default() -> Self {
        Constraints {
            support: true,
            rademacher_up_to: None,
            walsh: Vec::new(),
            walsh_cube_rank: 0,
            basis_limit: 4,
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct FalsifierProblem {
    pub set: SetSpec,
    pub rank: u32,
    pub constraints: Constraints,
    pub variables: usize,
    pub equations: usize,
    pub system_rank: usize,
    /// The dimension of the solution space; 0 iff only `τ = 0` survives at rank `K`.
    pub dimension: usize,
    /// Nonzero leaves `(flat index, p/q)` of each returned basis element.
    pub basis_leaves: Vec<Vec<(usize, String)>>,
    #[serde(skip)]
    pub basis: Vec<Quasimeasure>,
    pub note: String,
}

/// One functional-vanishing equation, before restriction to the variables.
enum Functional {
    Rademacher { k: u32, constrained: Vec<usize>, cube: DyadicCube },
    Walsh { n: u64, cube: DyadicCube },
}

fn functionals(d: usize, rank: u32, c: &Constraints) -> Result<Vec<Functional>> {
    let mut out = Vec::new();
    if let Some(top) = c.rademacher_up_to {
        if top + 1 > rank {
            return Err(Error::RankTooSmall { have: rank, need: top + 1 });
        }
        for k in 0..=top {
            for bits in 1usize..1 << d {
                let constrained: Vec<usize> = (0..d).filter(|j| bits >> j & 1 == 1).collect();
                for cube in DyadicCube::all(k, d) {
                    out.push(Functional::Rademacher { k, constrained: constrained.clone(), cube });
                }
            }
        }
    }
    for &n in &c.walsh {
        let need = (64 - n.leading_zeros()).max(c.walsh_cube_rank);
        if need > rank {
            return Err(Error::RankTooSmall { have: rank, need });
        }
        for cube in DyadicCube::all(c.walsh_cube_rank, d) {
            out.push(Functional::Walsh { n, cube });
        }
    }
    Ok(out)
}

impl Functional {
    /// The coefficient of leaf `c` (a rank-`K` cube), or 0 outside the domain.
    fn weight(&self, leaf: &DyadicCube, d: usize) -> i64 {
        let rank = leaf.rank();
        match self {
            Functional::Rademacher { k, constrained, cube } => {
                if !cube.contains(leaf) {
                    return 0;
                }
                let odd = constrained
                    .iter()
                    .fold(0u64, |acc, &j| acc ^ (leaf.index()[j] >> (rank - 1 - k) & 1));
                if odd == 1 {
                    -1
                } else {
                    1
                }
            }
            Functional::Walsh { n, cube } => {
                if !cube.contains(leaf) {
                    return 0;
                }
                walsh_eval_multi(&MultiIndex::diagonal(d, *n), &DyadicPoint::corner(leaf))
                    .expect("same dimension")
                    .to_i64()
            }
        }
    }

    /// The same functional evaluated through the quasimeasure API.
    fn evaluate(&self, tau: &Quasimeasure) -> Result<Rational> {
        let d = tau.dim();
        match self {
            Functional::Rademacher { k, constrained, cube } => {
                let free: Vec<usize> = (0..d).filter(|j| !constrained.contains(j)).collect();
                let part = Partition::new(d, &free)?;
                let star = DyadicCube::new(*k, constrained.iter().map(|&j| cube.index()[j]).collect())?;
                let xi: Vec<DyadicElement> = free
                    .iter()
                    .map(|&j| DyadicElement::from_interval(*k, cube.index()[j], Tail::Zeros))
                    .collect();
                tau.rademacher_functional(*k, &star, &xi, &part)
            }
            Functional::Walsh { n, cube } => tau.walsh_functional(*n, cube),
        }
    }
}

/// Builds and solves the system for `set` at rank `K`.
pub fn uset_falsify(set: &SetSpec, rank: u32, constraints: &Constraints) -> Result<FalsifierProblem> {
    let d = set.dim();
    if d as u32 * rank > MAX_FALSIFIER_BITS {
        return Err(Error::SizeLimit(format!(
            "2^{} leaves; the falsifier accepts at most 2^{MAX_FALSIFIER_BITS}",
            d as u32 * rank
        )));
    }
    let leaves = 1usize << (d as u32 * rank);
    let vars: Vec<usize> = if constraints.support {
        let mask = cell_mask(set, rank)?;
        (0..leaves).filter(|&f| mask.contains_flat(f)).collect()
    } else {
        (0..leaves).collect()
    };
    let cubes: Vec<DyadicCube> = vars.iter().map(|&f| DyadicCube::from_flat(rank, d, f)).collect();
    let funcs = functionals(d, rank, constraints)?;
    let rows: Vec<SparseRow> = funcs
        .iter()
        .map(|f| {
            normalize(
                cubes
                    .iter()
                    .enumerate()
                    .filter_map(|(v, c)| match f.weight(c, d) {
                        0 => None,
                        w => Some((v, int(w))),
                    })
                    .collect(),
            )
        })
        .collect();
    let reduced = rref(rows, vars.len());
    let mut basis = Vec::new();
    let mut basis_leaves = Vec::new();
    for v in reduced.null_basis(constraints.basis_limit) {
        let mut full = vec![Rational::zero(); leaves];
        let mut listed = Vec::new();
        for (i, x) in v.into_iter().enumerate() {
            if !x.is_zero() {
                listed.push((vars[i], format_rational(&x)));
                full[vars[i]] = x;
            }
        }
        basis.push(Quasimeasure::from_leaves(d, rank, full)?);
        basis_leaves.push(listed);
    }
    Ok(FalsifierProblem {
        set: set.clone(),
        rank,
        constraints: constraints.clone(),
        variables: vars.len(),
        equations: funcs.len(),
        system_rank: reduced.rank(),
        dimension: reduced.nullity(),
        basis_leaves,
        basis,
        note: EXPLORATORY_NOTE.into(),
    })
}

impl FalsifierProblem {
    /// Rechecks every basis element through the quasimeasure API: additivity, support
    /// inside the cells of `E` (when requested), and every imposed functional at zero.
    /// Returns the failures found.
    pub fn verify_basis(&self) -> Result<Vec<String>> {
        let d = self.set.dim();
        let mask = cell_mask(&self.set, self.rank)?;
        let funcs = functionals(d, self.rank, &self.constraints)?;
        let mut failures = Vec::new();
        for (b, tau) in self.basis.iter().enumerate() {
            if let Err(v) = tau.check_additivity() {
                failures.push(format!("basis {b}: additivity fails: {v:?}"));
            }
            if self.constraints.support {
                let support = tau.support_mask();
                if support.cubes().any(|c| !mask.contains(&c)) {
                    failures.push(format!("basis {b}: support leaves the set"));
                }
            }
            for (i, f) in funcs.iter().enumerate() {
                let v = f.evaluate(tau)?;
                if !v.is_zero() {
                    failures.push(format!("basis {b}: functional {i} = {}", format_rational(&v)));
                    break;
                }
            }
        }
        Ok(failures)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::partition::Partition;
    use crate::sets::IndexRule;

    #[test]
    fn empty_and_whole() {
        let c = Constraints::default();
        let p = uset_falsify(&SetSpec::empty(2), 3, &c).unwrap();
        assert_eq!((p.variables, p.dimension), (0, 0));
        assert!(p.basis.is_empty());
        let p = uset_falsify(&SetSpec::whole(2), 3, &c).unwrap();
        assert_eq!(p.dimension, 64);
        assert_eq!(p.basis.len(), 4);
        assert!(p.verify_basis().unwrap().is_empty());
        assert_eq!(p.note, EXPLORATORY_NOTE);
    }

    #[test]
    fn diagonal_with_rademacher_constraints() {
        let d0 = SetSpec::diagonal(Partition::full(2));
        let mut dims = Vec::new();
        for top in [None, Some(0), Some(1), Some(2)] {
            let c = Constraints {
                rademacher_up_to: top,
                basis_limit: 64,
                ..Constraints::default()
            };
            let p = uset_falsify(&d0, 3, &c).unwrap();
            assert!(p.verify_basis().unwrap().is_empty());
            dims.push(p.dimension);
        }
        assert_eq!(dims[0], 8);
        assert!(dims.windows(2).all(|w| w[1] <= w[0]), "{dims:?}");
        // regression value of the exact solver
        assert_eq!(dims[3], 0);
    }

    #[test]
    fn walsh_constraints_and_limits() {
        let wd = SetSpec::dirichlet(2, IndexRule::DiagonalPowers { first: 0 }, 3).unwrap();
        let base = uset_falsify(&wd, 4, &Constraints::default()).unwrap();
        let c = Constraints {
            walsh: vec![1, 2, 4],
            walsh_cube_rank: 1,
            ..Constraints::default()
        };
        let p = uset_falsify(&wd, 4, &c).unwrap();
        assert!(p.dimension <= base.dimension);
        assert!(p.verify_basis().unwrap().is_empty());
        assert!(uset_falsify(&SetSpec::whole(2), 7, &Constraints::default()).is_err());
        let c = Constraints {
            rademacher_up_to: Some(3),
            ..Constraints::default()
        };
        assert!(uset_falsify(&SetSpec::whole(2), 3, &c).is_err());
    }
}
