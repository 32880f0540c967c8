//! Inclusion and disjointness checks, and sampling of members.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::Serialize;

use super::affine::{affine_pieces, required_horizon, AffinePiece, Gf2System};
use super::{membership, Membership, SetSpec};
use crate::dyadic::{DyadicElement, DyadicPoint, Tail};
use crate::error::{Error, Result};

/// Exhaustive enumeration is used when `d · rank` is at most this.
pub const EXHAUSTIVE_BITS: u32 = 20;

#[derive(Clone, Debug, Serialize)]
pub struct SubsetReport {
    pub holds: bool,
    /// True when every rank-`rank` point with zero tails was tested.
    pub exhaustive: bool,
    pub checked: usize,
    /// Points of the first set whose membership in the second was undecided.
    pub undetermined: usize,
    pub counterexample: Option<DyadicPoint>,
}

#[derive(Clone, Debug, Serialize)]
pub struct DisjointReport {
    pub disjoint: bool,
    /// The first pair of indices found to intersect.
    pub pair: Option<(usize, usize)>,
    /// A point satisfying both digit systems through the tested rank.
    pub witness: Option<DyadicPoint>,
    /// Whether the witness is an exact member of both sets.
    pub witness_verified: bool,
}

/// Draws a member of `set` with zero tails beyond its working rank (cosets carry
/// the tails of their shift).
pub fn sample_member<R: Rng + ?Sized>(set: &SetSpec, rng: &mut R, rank: u32) -> Result<DyadicPoint> {
    match set {
        SetSpec::Coset { inner, shift } => sample_member(inner, rng, rank)?.add(shift),
        SetSpec::FiniteUnion { members, .. } => {
            let mut order: Vec<&SetSpec> = members.iter().collect();
            order.shuffle(rng);
            for m in order {
                if let Ok(p) = sample_member(m, rng, rank) {
                    return Ok(p);
                }
            }
            Err(Error::Malformed("union has no samplable member".into()))
        }
        _ => {
            let d = set.dim();
            let horizon = rank as u64 + required_horizon(set) + 2;
            let mut pieces = affine_pieces(set, horizon)?;
            pieces.shuffle(rng);
            for piece in &pieces {
                let fixed = |_: usize, t: u64| (t >= horizon).then_some(0);
                let sys = Gf2System::from_piece(piece, fixed);
                let Some(values) = sys.solve(Some(&mut *rng)) else {
                    continue;
                };
                let mut digits = vec![vec![0u8; horizon as usize]; d];
                for (&(j, t), &v) in sys.unknowns().iter().zip(&values) {
                    digits[j][t as usize] = v;
                }
                let g = point_from_digits(&digits)?;
                if membership(set, &g, 64)? == Membership::In {
                    return Ok(g);
                }
            }
            Err(Error::Malformed(format!("no member found for {}", set.describe())))
        }
    }
}

fn point_from_digits(digits: &[Vec<u8>]) -> Result<DyadicPoint> {
    DyadicPoint::new(
        digits
            .iter()
            .map(|d| DyadicElement::new(d, Tail::Zeros))
            .collect::<Result<Vec<_>>>()?,
    )
}

/// Tests `a ⊆ b` on rank-`rank` points with zero tails (all of them when
/// `d · rank <= 20`, otherwise `samples` random ones) and on `samples` members of `a`.
/// Dirichlet conditions are decided at `rank`.
pub fn subset_check<R: Rng + ?Sized>(
    a: &SetSpec,
    b: &SetSpec,
    rank: u32,
    samples: usize,
    rng: &mut R,
) -> Result<SubsetReport> {
    let d = a.dim();
    if b.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: b.dim(),
        });
    }
    let exhaustive = (d as u32) * rank <= EXHAUSTIVE_BITS;
    let mut report = SubsetReport {
        holds: true,
        exhaustive,
        checked: 0,
        undetermined: 0,
        counterexample: None,
    };
    let test = |g: &DyadicPoint, report: &mut SubsetReport| -> Result<bool> {
        if membership(a, g, rank)? != Membership::In {
            return Ok(true);
        }
        report.checked += 1;
        match membership(b, g, rank)? {
            Membership::In => Ok(true),
            Membership::Undetermined => {
                report.undetermined += 1;
                Ok(true)
            }
            Membership::Out => {
                report.holds = false;
                report.counterexample = Some(g.clone());
                Ok(false)
            }
        }
    };
    if exhaustive {
        let bits = d as u32 * rank;
        for code in 0..(1u64 << bits) {
            let g = DyadicPoint::new(
                (0..d)
                    .map(|j| {
                        let w = (code >> (j as u32 * rank)) & ((1u64 << rank) - 1);
                        DyadicElement::from_words(rank.max(1), vec![w], Tail::Zeros)
                    })
                    .collect(),
            )?;
            if !test(&g, &mut report)? {
                return Ok(report);
            }
        }
    } else {
        for _ in 0..samples {
            let g = DyadicPoint::random(rng, d, rank);
            if !test(&g, &mut report)? {
                return Ok(report);
            }
        }
    }
    for _ in 0..samples {
        let g = match sample_member(a, rng, rank) {
            Ok(g) => g,
            Err(Error::Malformed(_)) => break,
            Err(e) => return Err(e),
        };
        if !test(&g, &mut report)? {
            return Ok(report);
        }
    }
    Ok(report)
}

/// Tests pairwise disjointness through rank `rank`: two sets are reported as
/// intersecting when some pair of their affine pieces admits a common solution of all
/// conditions listed up to that rank.
pub fn pairwise_disjoint(sets: &[SetSpec], rank: u32) -> Result<DisjointReport> {
    let horizon = rank as u64;
    let pieces: Vec<Vec<AffinePiece>> = sets
        .iter()
        .map(|s| affine_pieces(s, horizon))
        .collect::<Result<_>>()?;
    for i in 0..sets.len() {
        for j in i + 1..sets.len() {
            for p in &pieces[i] {
                for q in &pieces[j] {
                    let mut both = p.clone();
                    both.rows.extend(q.rows.iter().cloned());
                    let sys = Gf2System::from_piece(&both, |_, _| None);
                    let Some(values) = sys.solve::<rand_chacha::ChaCha8Rng>(None) else {
                        continue;
                    };
                    let d = sets[i].dim();
                    let len = sys
                        .unknowns()
                        .iter()
                        .map(|&(_, t)| t as usize + 1)
                        .max()
                        .unwrap_or(1)
                        .max(rank as usize);
                    let mut digits = vec![vec![0u8; len]; d];
                    for (&(c, t), &v) in sys.unknowns().iter().zip(&values) {
                        digits[c][t as usize] = v;
                    }
                    let g = point_from_digits(&digits)?;
                    let verified = membership(&sets[i], &g, 64)? == Membership::In
                        && membership(&sets[j], &g, 64)? == Membership::In;
                    return Ok(DisjointReport {
                        disjoint: false,
                        pair: Some((i, j)),
                        witness: Some(g),
                        witness_verified: verified,
                    });
                }
            }
        }
    }
    Ok(DisjointReport {
        disjoint: true,
        pair: None,
        witness: None,
        witness_verified: false,
    })
}
