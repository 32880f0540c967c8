//! Structured subsets of `G^d`: Dirichlet sets, dyadic planes, their cosets and
//! finite unions, and the two-dimensional Lukomskii layers.
//!
//! Coordinates are 0-based. Points are exact digit streams, so plane conditions
//! (stream equalities) are always decided. Dirichlet-type conditions `W_N(g) = 1`
//! are checked only for indices `N` with every component below `2^rank`; when some
//! condition of the truncated sequence lies beyond that, and none failed, the answer
//! is [`Membership::Undetermined`].

mod affine;
mod raster;
mod relations;

use serde::{Deserialize, Serialize};

use crate::dyadic::{contract_eq, DyadicCube, DyadicPoint};
use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::walsh::parity_u64;

pub use affine::{affine_pieces, required_horizon, AffinePiece, Gf2System, Row};
pub use raster::{cell_mask, meets, rasterize, Bitmap, Slice, MAX_MASK_BITS, MAX_RASTER_RANK};
pub use relations::{pairwise_disjoint, sample_member, subset_check, DisjointReport, SubsetReport};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Membership {
    In,
    Out,
    Undetermined,
}

/// Generator rules for the index sequence `N_1, N_2, ...` of a Dirichlet set.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum IndexRule {
    /// The listed multi-indices, in order.
    Explicit { indices: Vec<Vec<u64>> },
    /// `N_i = 2^{first + i - 1}·1`.
    DiagonalPowers { first: u32 },
    /// Two-dimensional `N_i = (2^{i-1}, 2^{i-1+q})`.
    ShiftedPowers { q: u32 },
    /// `N_i = values[i]·1`.
    Diagonal { values: Vec<u64> },
}

/// How the `N_i` of a Lukomskii layer are matched with rectangles `(j, k)`.
pub trait LukomskiiPairing {
    /// Triples `(N, j, k)` for layer `i` with parameter `m_i`.
    fn pairs(&self, i: u32, m_i: u32) -> Vec<(u64, u64, u64)>;
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "strategy", rename_all = "snake_case", deny_unknown_fields)]
pub enum Pairing {
    /// The `t`-th admissible `N` (ascending from `2^{m_i - i}`) goes to the `t`-th
    /// rectangle in lexicographic `(j, k)` order, for as many as both lists allow.
    /// This is a labeled guess: the matching is not determined by the construction.
    Lexicographic,
    /// Explicit `(N, j, k)` triples.
    Explicit { pairs: Vec<(u64, u64, u64)> },
}

impl LukomskiiPairing for Pairing {
    fn pairs(&self, i: u32, m_i: u32) -> Vec<(u64, u64, u64)> {
        match self {
            Pairing::Explicit { pairs } => pairs.clone(),
            Pairing::Lexicographic => {
                let lo = 1u64 << (m_i - i);
                let hi = 1u64 << (2 * m_i - i);
                let rows = 1u64 << (i - 1);
                let cols = 1u64 << (m_i - i + 1);
                (lo..hi)
                    .zip((0..rows).flat_map(|j| (0..cols).map(move |k| (j, k))))
                    .map(|(n, (j, k))| (n, j, k))
                    .collect()
            }
        }
    }
}

impl Pairing {
    /// Freezes any strategy into explicit triples.
    pub fn from_strategy<P: LukomskiiPairing + ?Sized>(p: &P, i: u32, m_i: u32) -> Pairing {
        Pairing::Explicit {
            pairs: p.pairs(i, m_i),
        }
    }
}

/// An algebraic description of a subset of `G^d`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum SetSpec {
    Whole {
        d: usize,
    },
    Empty {
        d: usize,
    },
    /// `WD^d(N) = {g : W_{N_i}(g) = 1 for i <= depth}`.
    DirichletSet { d: usize, rule: IndexRule, depth: usize },
    /// `WD^{d-m}(2^K·1) × G^m`: `Π_{j constrained} (-1)^{g^j_{k_i}} = 1` for each listed `k_i`.
    PowerDirichletProduct { partition: Partition, ks: Vec<u32> },
    /// `D_m`: all constrained coordinates equal.
    DiagonalPlane { partition: Partition },
    /// `Q_{m,q}`: `C_{q_a}(g^{j_a}) = C_{q_{a+1}}(g^{j_{a+1}})` for consecutive
    /// constrained coordinates; `shifts[a]` belongs to the `a`-th constrained coordinate.
    ShiftedDiagonal { partition: Partition, shifts: Vec<u32> },
    /// `P_m`: all constrained coordinates vanish.
    CoordinatePlane { partition: Partition },
    /// `{g : g ⊕ shift ∈ inner}`.
    Coset { inner: Box<SetSpec>, shift: DyadicPoint },
    /// A finite union. `disjoint_at_rank` records a checked pairwise-disjointness claim.
    FiniteUnion {
        d: usize,
        members: Vec<SetSpec>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        disjoint_at_rank: Option<u32>,
    },
    /// Layer `i` of a two-dimensional Lukomskii set: the union over pairs `(N, j, k)`
    /// of `WD²((2^{i-1}, N))` intersected with the rectangle
    /// `Δ^{(i-1)}_j × Δ^{(m_i-i+1)}_k`.
    LukomskiiLayer { i: u32, m_i: u32, pairing: Pairing },
    /// Placeholder for a set that this crate does not construct.
    External { d: usize, name: String },
}

impl SetSpec {
    pub fn whole(d: usize) -> Self {
        SetSpec::Whole { d }
    }

    pub fn empty(d: usize) -> Self {
        SetSpec::Empty { d }
    }

    pub fn diagonal(partition: Partition) -> Self {
        SetSpec::DiagonalPlane { partition }
    }

    pub fn shifted_diagonal(partition: Partition, shifts: Vec<u32>) -> Result<Self> {
        let s = SetSpec::ShiftedDiagonal { partition, shifts };
        s.validate()?;
        Ok(s)
    }

    pub fn coordinate_plane(partition: Partition) -> Self {
        SetSpec::CoordinatePlane { partition }
    }

    pub fn dirichlet(d: usize, rule: IndexRule, depth: usize) -> Result<Self> {
        let s = SetSpec::DirichletSet { d, rule, depth };
        s.validate()?;
        Ok(s)
    }

    /// A finite union; pass `Some(rank)` to claim pairwise disjointness, which is
    /// checked at that rank.
    pub fn union(d: usize, members: Vec<SetSpec>, disjoint_at_rank: Option<u32>) -> Result<Self> {
        let s = SetSpec::FiniteUnion {
            d,
            members,
            disjoint_at_rank,
        };
        s.validate()?;
        Ok(s)
    }

    /// The anti-diagonal `{g : g^1 ⊕ g^2 = 1}` in `G^2`: the diagonal shifted by
    /// `(0, all ones)`.
    pub fn anti_diagonal() -> Self {
        let shift = DyadicPoint::new(vec![
            crate::dyadic::DyadicElement::zero(1),
            crate::dyadic::DyadicElement::all_ones(1),
        ])
        .expect("two coordinates");
        coset(&SetSpec::diagonal(Partition::full(2)), &shift).expect("same dimension")
    }

    /// The "cross" `{g^1 = η} ∪ {g^2 = ξ}` in `G^2`.
    pub fn cross(eta: &crate::dyadic::DyadicElement, xi: &crate::dyadic::DyadicElement) -> Self {
        use crate::dyadic::DyadicElement;
        let line = |free: usize, shift: Vec<DyadicElement>| {
            coset(
                &SetSpec::coordinate_plane(Partition::new(2, &[free]).expect("valid")),
                &DyadicPoint::new(shift).expect("two coordinates"),
            )
            .expect("same dimension")
        };
        SetSpec::FiniteUnion {
            d: 2,
            members: vec![
                line(1, vec![eta.clone(), DyadicElement::zero(1)]),
                line(0, vec![DyadicElement::zero(1), xi.clone()]),
            ],
            disjoint_at_rank: None,
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            SetSpec::Whole { d }
            | SetSpec::Empty { d }
            | SetSpec::DirichletSet { d, .. }
            | SetSpec::FiniteUnion { d, .. }
            | SetSpec::External { d, .. } => *d,
            SetSpec::PowerDirichletProduct { partition, .. }
            | SetSpec::DiagonalPlane { partition }
            | SetSpec::ShiftedDiagonal { partition, .. }
            | SetSpec::CoordinatePlane { partition } => partition.dim(),
            SetSpec::Coset { inner, .. } => inner.dim(),
            SetSpec::LukomskiiLayer { .. } => 2,
        }
    }

    /// Checks the structural invariants, including any disjointness claim.
    pub fn validate(&self) -> Result<()> {
        match self {
            SetSpec::Whole { d } | SetSpec::Empty { d } | SetSpec::External { d, .. } => {
                if *d == 0 {
                    return Err(Error::Malformed("dimension must be at least 1".into()));
                }
            }
            SetSpec::DirichletSet { d, rule, depth } => {
                if *d == 0 {
                    return Err(Error::Malformed("dimension must be at least 1".into()));
                }
                if matches!(rule, IndexRule::ShiftedPowers { .. }) && *d != 2 {
                    return Err(Error::Malformed("shifted powers need d = 2".into()));
                }
                for n in dirichlet_indices(*d, rule, *depth)? {
                    if n.len() != *d {
                        return Err(Error::DimensionMismatch {
                            expected: *d,
                            got: n.len(),
                        });
                    }
                }
            }
            SetSpec::PowerDirichletProduct { ks, .. } => {
                if ks.iter().any(|&k| k >= 63) {
                    return Err(Error::SizeLimit("k_i must be below 63".into()));
                }
            }
            SetSpec::DiagonalPlane { partition } => check_diagonal_m(partition)?,
            SetSpec::ShiftedDiagonal { partition, shifts } => {
                check_diagonal_m(partition)?;
                if shifts.len() != partition.constrained().len() {
                    return Err(Error::Malformed(format!(
                        "{} shifts for {} constrained coordinates",
                        shifts.len(),
                        partition.constrained().len()
                    )));
                }
            }
            SetSpec::CoordinatePlane { .. } => {}
            SetSpec::Coset { inner, shift } => {
                inner.validate()?;
                if shift.dim() != inner.dim() {
                    return Err(Error::DimensionMismatch {
                        expected: inner.dim(),
                        got: shift.dim(),
                    });
                }
            }
            SetSpec::FiniteUnion {
                d,
                members,
                disjoint_at_rank,
            } => {
                for m in members {
                    m.validate()?;
                    if m.dim() != *d {
                        return Err(Error::DimensionMismatch {
                            expected: *d,
                            got: m.dim(),
                        });
                    }
                }
                if let Some(rank) = disjoint_at_rank {
                    let report = pairwise_disjoint(members, *rank)?;
                    if !report.disjoint {
                        return Err(Error::Malformed(format!(
                            "union members {:?} intersect at rank {rank}",
                            report.pair
                        )));
                    }
                }
            }
            SetSpec::LukomskiiLayer { i, m_i, pairing } => {
                if *i == 0 || *m_i < *i || 2 * m_i - i >= 63 {
                    return Err(Error::Malformed(format!(
                        "Lukomskii layer needs 1 <= i <= m_i, got i = {i}, m_i = {m_i}"
                    )));
                }
                for (n, j, k) in pairing.pairs(*i, *m_i) {
                    DyadicCube::new(i - 1, vec![j])?;
                    DyadicCube::new(m_i - i + 1, vec![k])?;
                    if n == 0 {
                        return Err(Error::ZeroIndex);
                    }
                }
            }
        }
        Ok(())
    }

    /// The Dirichlet indices of a `DirichletSet`, after truncation.
    pub fn indices(&self) -> Result<Vec<Vec<u64>>> {
        match self {
            SetSpec::DirichletSet { d, rule, depth } => dirichlet_indices(*d, rule, *depth),
            _ => Err(Error::Malformed("not a Dirichlet set".into())),
        }
    }

    /// A short human-readable description including truncations.
    pub fn describe(&self) -> String {
        match self {
            SetSpec::Whole { d } => format!("G^{d}"),
            SetSpec::Empty { .. } => "empty set".into(),
            SetSpec::DirichletSet { d, rule, depth } => {
                format!("WD^{d} ({rule:?}, truncated at I = {depth})")
            }
            SetSpec::PowerDirichletProduct { partition, ks } => format!(
                "WD^{}(2^K 1) x G^{} with K = {ks:?}",
                partition.constrained().len(),
                partition.m()
            ),
            SetSpec::DiagonalPlane { partition } => format!("D_{}", partition.m()),
            SetSpec::ShiftedDiagonal { partition, shifts } => {
                format!("Q_{{{},{shifts:?}}}", partition.m())
            }
            SetSpec::CoordinatePlane { partition } => format!("P_{}", partition.m()),
            SetSpec::Coset { inner, shift } => format!("({}) + ({shift})", inner.describe()),
            SetSpec::FiniteUnion { members, .. } => {
                let parts: Vec<String> = members.iter().map(|m| m.describe()).collect();
                format!("union[{}]", parts.join(", "))
            }
            SetSpec::LukomskiiLayer { i, m_i, pairing } => {
                let label = match pairing {
                    Pairing::Lexicographic => "lexicographic pairing, illustrative",
                    Pairing::Explicit { .. } => "explicit pairing",
                };
                format!("Lukomskii layer i = {i}, m_i = {m_i} ({label})")
            }
            SetSpec::External { name, .. } => format!("external set {name}"),
        }
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(self).expect("serializable")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        let spec: SetSpec = serde_json::from_str(s)?;
        spec.validate()?;
        Ok(spec)
    }
}

fn check_diagonal_m(partition: &Partition) -> Result<()> {
    if partition.m() + 2 > partition.dim() {
        return Err(Error::Malformed(format!(
            "diagonal planes need m <= d - 2, got m = {} in d = {}",
            partition.m(),
            partition.dim()
        )));
    }
    Ok(())
}

fn dirichlet_indices(d: usize, rule: &IndexRule, depth: usize) -> Result<Vec<Vec<u64>>> {
    let pow = |e: u64| -> Result<u64> {
        if e >= 63 {
            Err(Error::SizeLimit(format!("index 2^{e} beyond 2^62")))
        } else {
            Ok(1u64 << e)
        }
    };
    match rule {
        IndexRule::Explicit { indices } => Ok(indices.iter().take(depth).cloned().collect()),
        IndexRule::Diagonal { values } => {
            Ok(values.iter().take(depth).map(|&v| vec![v; d]).collect())
        }
        IndexRule::DiagonalPowers { first } => (0..depth as u64)
            .map(|i| Ok(vec![pow(*first as u64 + i)?; d]))
            .collect(),
        IndexRule::ShiftedPowers { q } => (0..depth as u64)
            .map(|i| Ok(vec![pow(i)?, pow(i + *q as u64)?]))
            .collect(),
    }
}

/// The coset `{g : g ⊕ x ∈ set}`.
pub fn coset(set: &SetSpec, x: &DyadicPoint) -> Result<SetSpec> {
    if x.dim() != set.dim() {
        return Err(Error::DimensionMismatch {
            expected: set.dim(),
            got: x.dim(),
        });
    }
    Ok(match set {
        SetSpec::Coset { inner, shift } => SetSpec::Coset {
            inner: inner.clone(),
            shift: shift.add(x)?,
        },
        other => SetSpec::Coset {
            inner: Box::new(other.clone()),
            shift: x.clone(),
        },
    })
}

fn below(n: u64, rank: u32) -> bool {
    rank >= 64 || n >> rank == 0
}

fn walsh_is_one(n: &[u64], g: &DyadicPoint) -> bool {
    !n.iter()
        .zip(g.coords())
        .fold(false, |acc, (&nl, gl)| acc ^ parity_u64(nl, gl.word(0)))
}

fn combine_all(results: impl Iterator<Item = Membership>) -> Membership {
    // every condition must hold
    let mut out = Membership::In;
    for r in results {
        match r {
            Membership::Out => return Membership::Out,
            Membership::Undetermined => out = Membership::Undetermined,
            Membership::In => {}
        }
    }
    out
}

fn combine_any(results: impl Iterator<Item = Membership>) -> Membership {
    let mut out = Membership::Out;
    for r in results {
        match r {
            Membership::In => return Membership::In,
            Membership::Undetermined => out = Membership::Undetermined,
            Membership::Out => {}
        }
    }
    out
}

/// Decides whether `g` lies in `set`, checking Dirichlet-type conditions with
/// indices below `2^rank`.
pub fn membership(set: &SetSpec, g: &DyadicPoint, rank: u32) -> Result<Membership> {
    if g.dim() != set.dim() {
        return Err(Error::DimensionMismatch {
            expected: set.dim(),
            got: g.dim(),
        });
    }
    Ok(match set {
        SetSpec::Whole { .. } => Membership::In,
        SetSpec::Empty { .. } => Membership::Out,
        SetSpec::DirichletSet { d, rule, depth } => {
            let indices = dirichlet_indices(*d, rule, *depth)?;
            combine_all(indices.iter().map(|n| {
                if !n.iter().all(|&x| below(x, rank)) {
                    Membership::Undetermined
                } else if walsh_is_one(n, g) {
                    Membership::In
                } else {
                    Membership::Out
                }
            }))
        }
        SetSpec::PowerDirichletProduct { partition, ks } => combine_all(ks.iter().map(|&k| {
            if k >= rank {
                return Membership::Undetermined;
            }
            let odd = partition
                .constrained()
                .iter()
                .fold(0u8, |acc, &j| acc ^ g.coord(j).digit(k as u64));
            if odd == 0 {
                Membership::In
            } else {
                Membership::Out
            }
        })),
        SetSpec::DiagonalPlane { partition } => {
            let c = partition.constrained();
            to_membership(c.windows(2).all(|w| g.coord(w[0]) == g.coord(w[1])))
        }
        SetSpec::ShiftedDiagonal { partition, shifts } => {
            let c = partition.constrained();
            to_membership((0..c.len().saturating_sub(1)).all(|a| {
                contract_eq(g.coord(c[a]), shifts[a], g.coord(c[a + 1]), shifts[a + 1])
            }))
        }
        SetSpec::CoordinatePlane { partition } => to_membership(
            partition
                .constrained()
                .iter()
                .all(|&j| g.coord(j).first_nonzero_digit().is_none()),
        ),
        SetSpec::Coset { inner, shift } => membership(inner, &g.add(shift)?, rank)?,
        SetSpec::FiniteUnion { members, .. } => {
            let results = members
                .iter()
                .map(|m| membership(m, g, rank))
                .collect::<Result<Vec<_>>>()?;
            combine_any(results.into_iter())
        }
        SetSpec::LukomskiiLayer { i, m_i, pairing } => {
            let r1 = i - 1;
            let r2 = m_i - i + 1;
            let row = g.coord(0).interval_index(r1);
            let col = g.coord(1).interval_index(r2);
            let n1 = 1u64 << r1;
            combine_any(pairing.pairs(*i, *m_i).into_iter().map(|(n, j, k)| {
                if j != row || k != col {
                    Membership::Out
                } else if !below(n1, rank) || !below(n, rank) {
                    Membership::Undetermined
                } else {
                    to_membership(walsh_is_one(&[n1, n], g))
                }
            }))
        }
        SetSpec::External { name, .. } => {
            return Err(Error::Unsupported(format!(
                "membership in the external set `{name}` is not implemented"
            )))
        }
    })
}

fn to_membership(b: bool) -> Membership {
    if b {
        Membership::In
    } else {
        Membership::Out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::{DyadicElement, Tail};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn el(s: &str) -> DyadicElement {
        s.parse().unwrap()
    }

    fn pt(s: &str) -> DyadicPoint {
        s.parse().unwrap()
    }

    fn d0() -> SetSpec {
        SetSpec::diagonal(Partition::full(2))
    }

    #[test]
    fn diagonal_membership() {
        let e0 = DyadicElement::basis(0);
        let e1 = DyadicElement::basis(1);
        let g = DyadicPoint::new(vec![e0.clone(), e0.clone()]).unwrap();
        assert_eq!(membership(&d0(), &g, 8).unwrap(), Membership::In);
        let g = DyadicPoint::new(vec![e0, e1]).unwrap();
        assert_eq!(membership(&d0(), &g, 8).unwrap(), Membership::Out);
        // equal digits but different tails
        assert_eq!(membership(&d0(), &pt("01|0,01|1"), 2).unwrap(), Membership::Out);
    }

    #[test]
    fn coordinate_plane_membership() {
        let p1 = SetSpec::coordinate_plane(Partition::new(2, &[1]).unwrap());
        assert_eq!(membership(&p1, &pt("000|0,101|1"), 3).unwrap(), Membership::In);
        assert_eq!(membership(&p1, &pt("001|0,101|1"), 3).unwrap(), Membership::Out);
        assert_eq!(membership(&p1, &pt("000|1,101|1"), 3).unwrap(), Membership::Out);
    }

    #[test]
    fn shifted_diagonal_membership() {
        // Q_{0,(0,1)}: C_0(g^1) = C_1(g^2), i.e. g^1_{t+1} = g^2_t
        let q = SetSpec::shifted_diagonal(Partition::full(2), vec![0, 1]).unwrap();
        assert_eq!(membership(&q, &pt("10110|0,0110|0"), 8).unwrap(), Membership::In);
        assert_eq!(membership(&q, &pt("00110|0,0110|0"), 8).unwrap(), Membership::In);
        assert_eq!(membership(&q, &pt("10110|0,1110|0"), 8).unwrap(), Membership::Out);
        // exhaustive agreement with the digit rule at rank 8, zero tails
        for a in 0..256u64 {
            for b in 0..256u64 {
                let g1 = DyadicElement::from_words(8, vec![a], Tail::Zeros);
                let g2 = DyadicElement::from_words(8, vec![b], Tail::Zeros);
                let digit_rule = (0..8u64).all(|t| g1.digit(t + 1) == g2.digit(t));
                let g = DyadicPoint::new(vec![g1, g2]).unwrap();
                assert_eq!(membership(&q, &g, 8).unwrap() == Membership::In, digit_rule);
            }
        }
    }

    #[test]
    fn dirichlet_membership_and_truncation() {
        let wd = SetSpec::dirichlet(2, IndexRule::DiagonalPowers { first: 0 }, 4).unwrap();
        let g = pt("1011|0,1011|0");
        assert_eq!(membership(&wd, &g, 4).unwrap(), Membership::In);
        // conditions with 2^3 are not checked at rank 3
        assert_eq!(membership(&wd, &g, 3).unwrap(), Membership::Undetermined);
        let g = pt("1011|0,1001|0");
        assert_eq!(membership(&wd, &g, 3).unwrap(), Membership::Out);
        assert_eq!(membership(&wd, &g, 4).unwrap(), Membership::Out);
    }

    #[test]
    fn coset_examples() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let zero = DyadicPoint::zero(2, 1);
        let shifted = coset(&d0(), &zero).unwrap();
        let anti = SetSpec::anti_diagonal();
        for _ in 0..50 {
            let g = DyadicPoint::random(&mut rng, 2, 6);
            assert_eq!(membership(&shifted, &g, 6).unwrap(), membership(&d0(), &g, 6).unwrap());
            let x = DyadicPoint::random(&mut rng, 2, 6);
            let twice = coset(&coset(&d0(), &x).unwrap(), &x).unwrap();
            assert_eq!(membership(&twice, &g, 6).unwrap(), membership(&d0(), &g, 6).unwrap());
        }
        // the anti-diagonal pairs each g with its complement
        let g = el("0110|0");
        let comp = g.add(&DyadicElement::all_ones(1));
        let p = DyadicPoint::new(vec![g.clone(), comp]).unwrap();
        assert_eq!(membership(&anti, &p, 4).unwrap(), Membership::In);
        let p = DyadicPoint::new(vec![g.clone(), g]).unwrap();
        assert_eq!(membership(&anti, &p, 4).unwrap(), Membership::Out);
    }

    #[test]
    fn unions() {
        let eta = el("101|0");
        let xi = el("011|0");
        let cross = SetSpec::cross(&eta, &xi);
        let on_first = DyadicPoint::new(vec![eta.clone(), el("111|1")]).unwrap();
        let on_second = DyadicPoint::new(vec![el("1|0"), xi.clone()]).unwrap();
        let off = DyadicPoint::new(vec![el("1|0"), el("1|0")]).unwrap();
        assert_eq!(membership(&cross, &on_first, 4).unwrap(), Membership::In);
        assert_eq!(membership(&cross, &on_second, 4).unwrap(), Membership::In);
        assert_eq!(membership(&cross, &off, 4).unwrap(), Membership::Out);
    }

    #[test]
    fn lukomskii_layer() {
        let layer = SetSpec::LukomskiiLayer {
            i: 1,
            m_i: 2,
            pairing: Pairing::Lexicographic,
        };
        layer.validate().unwrap();
        let pairs = Pairing::Lexicographic.pairs(1, 2);
        // N ranges over [2, 8), rectangles over j = 0 and k in 0..4
        assert_eq!(pairs, vec![(2, 0, 0), (3, 0, 1), (4, 0, 2), (5, 0, 3)]);
        let g = pt("0|0,00|0");
        assert_eq!(membership(&layer, &g, 4).unwrap(), Membership::In);
        assert_eq!(membership(&layer, &g, 1).unwrap(), Membership::Undetermined);
        // g^2 = 10... lies in rectangle k = 2, paired with N = 4, and W_{(1,4)} = 1
        let g = pt("0|0,10|0");
        assert_eq!(membership(&layer, &g, 4).unwrap(), Membership::In);
        // g^2 = 01... lies in rectangle k = 1, paired with N = 3, and W_{(1,3)} = -1
        let g = pt("0|0,011|0");
        assert_eq!(membership(&layer, &g, 4).unwrap(), Membership::Out);
    }

    #[test]
    fn json_round_trip() {
        let specs = vec![
            d0(),
            SetSpec::anti_diagonal(),
            SetSpec::shifted_diagonal(Partition::new(3, &[2]).unwrap(), vec![0, 2]).unwrap(),
            SetSpec::dirichlet(2, IndexRule::ShiftedPowers { q: 2 }, 5).unwrap(),
            SetSpec::cross(&el("1|0"), &el("01|1")),
            SetSpec::LukomskiiLayer {
                i: 2,
                m_i: 3,
                pairing: Pairing::Lexicographic,
            },
        ];
        for s in specs {
            let text = s.to_json_string();
            assert_eq!(SetSpec::from_json_str(&text).unwrap(), s);
        }
        let text = r#"{"kind":"diagonal_plane","partition":{"d":2,"free":[]}}"#;
        assert_eq!(SetSpec::from_json_str(text).unwrap(), d0());
        assert!(SetSpec::from_json_str(r#"{"kind":"diagonal_plane","partition":{"d":2,"free":[]},"x":1}"#).is_err());
        assert!(SetSpec::from_json_str(r#"{"kind":"diagonal_plane","partition":{"d":2,"free":[1]}}"#).is_err());
    }

    #[test]
    fn invariants_rejected() {
        assert!(SetSpec::shifted_diagonal(Partition::full(2), vec![1]).is_err());
        let bad = SetSpec::union(2, vec![d0(), d0()], Some(3));
        assert!(bad.is_err());
        let ok = SetSpec::union(2, vec![d0(), SetSpec::anti_diagonal()], Some(6));
        assert!(ok.is_ok());
        let ext = SetSpec::External {
            d: 2,
            name: "F^2".into(),
        };
        assert!(matches!(
            membership(&ext, &DyadicPoint::zero(2, 1), 3),
            Err(Error::Unsupported(_))
        ));
    }
}
