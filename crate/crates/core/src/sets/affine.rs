//! Sets as finite unions of affine GF(2) systems over the digits `g^j_t`.
//!
//! Every structured set is cut out by linear conditions on digits: a Walsh
//! condition `W_N(g) = 1` says `Σ N^j_t g^j_t = 0`, plane conditions equate digits.
//! Plane conditions are infinite families; [`affine_pieces`] lists those with
//! smallest position below a horizon.

use std::collections::HashMap;

use rand::Rng;

use super::{LukomskiiPairing, SetSpec};
use crate::dyadic::{DyadicElement, Tail};
use crate::error::{Error, Result};

/// One linear condition `Σ g^{j}_{t} = rhs` over the listed `(j, t)` terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub terms: Vec<(usize, u64)>,
    pub rhs: bool,
}

/// A conjunction of rows.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct AffinePiece {
    pub rows: Vec<Row>,
}

/// Decomposes `set` into affine pieces whose union is the set, listing plane
/// conditions up to `horizon`.
pub fn affine_pieces(set: &SetSpec, horizon: u64) -> Result<Vec<AffinePiece>> {
    let walsh_row = |n: &[u64]| Row {
        terms: n
            .iter()
            .enumerate()
            .flat_map(|(j, &nj)| (0..64u64).filter(move |b| nj >> b & 1 == 1).map(move |b| (j, b)))
            .collect(),
        rhs: false,
    };
    Ok(match set {
        SetSpec::Whole { .. } => vec![AffinePiece::default()],
        SetSpec::Empty { .. } => vec![],
        SetSpec::DirichletSet { .. } => vec![AffinePiece {
            rows: set.indices()?.iter().map(|n| walsh_row(n)).collect(),
        }],
        SetSpec::PowerDirichletProduct { partition, ks } => vec![AffinePiece {
            rows: ks
                .iter()
                .map(|&k| Row {
                    terms: partition.constrained().iter().map(|&j| (j, k as u64)).collect(),
                    rhs: false,
                })
                .collect(),
        }],
        SetSpec::DiagonalPlane { partition } => {
            let c = partition.constrained();
            vec![AffinePiece {
                rows: c
                    .windows(2)
                    .flat_map(|w| {
                        (0..horizon).map(move |t| Row {
                            terms: vec![(w[0], t), (w[1], t)],
                            rhs: false,
                        })
                    })
                    .collect(),
            }]
        }
        SetSpec::ShiftedDiagonal { partition, shifts } => {
            let c = partition.constrained();
            let mut rows = Vec::new();
            for a in 0..c.len().saturating_sub(1) {
                let low = shifts[a].min(shifts[a + 1]) as u64;
                let (sa, sb) = (shifts[a + 1] as u64 - low, shifts[a] as u64 - low);
                for t in 0..horizon {
                    rows.push(Row {
                        terms: vec![(c[a], t + sa), (c[a + 1], t + sb)],
                        rhs: false,
                    });
                }
            }
            vec![AffinePiece { rows }]
        }
        SetSpec::CoordinatePlane { partition } => vec![AffinePiece {
            rows: partition
                .constrained()
                .iter()
                .flat_map(|&j| {
                    (0..horizon).map(move |t| Row {
                        terms: vec![(j, t)],
                        rhs: false,
                    })
                })
                .collect(),
        }],
        SetSpec::Coset { inner, shift } => affine_pieces(inner, horizon)?
            .into_iter()
            .map(|mut piece| {
                for row in &mut piece.rows {
                    for &(j, t) in &row.terms {
                        row.rhs ^= shift.coord(j).digit(t) == 1;
                    }
                }
                piece
            })
            .collect(),
        SetSpec::FiniteUnion { members, .. } => {
            let mut out = Vec::new();
            for m in members {
                out.extend(affine_pieces(m, horizon)?);
            }
            out
        }
        SetSpec::LukomskiiLayer { i, m_i, pairing } => {
            let r1 = i - 1;
            let r2 = m_i - i + 1;
            pairing
                .pairs(*i, *m_i)
                .into_iter()
                .map(|(n, j, k)| {
                    let mut rows = interval_rows(0, r1, j);
                    rows.extend(interval_rows(1, r2, k));
                    rows.push(walsh_row(&[1u64 << r1, n]));
                    AffinePiece { rows }
                })
                .collect()
        }
        SetSpec::External { name, .. } => {
            return Err(Error::Unsupported(format!(
                "the external set `{name}` has no digit description"
            )))
        }
    })
}

fn interval_rows(coord: usize, rank: u32, m: u64) -> Vec<Row> {
    let e = DyadicElement::from_interval(rank, m, Tail::Zeros);
    (0..rank as u64)
        .map(|t| Row {
            terms: vec![(coord, t)],
            rhs: e.digit(t) == 1,
        })
        .collect()
}

/// Largest digit position that any finite condition of `set` refers to, plus one.
pub fn required_horizon(set: &SetSpec) -> u64 {
    let bits = |n: u64| 64 - n.leading_zeros() as u64;
    match set {
        SetSpec::Whole { .. }
        | SetSpec::Empty { .. }
        | SetSpec::External { .. }
        | SetSpec::DiagonalPlane { .. }
        | SetSpec::CoordinatePlane { .. } => 1,
        SetSpec::DirichletSet { .. } => set
            .indices()
            .map(|v| v.iter().flatten().map(|&n| bits(n)).max().unwrap_or(1))
            .unwrap_or(1),
        SetSpec::PowerDirichletProduct { ks, .. } => {
            ks.iter().map(|&k| k as u64 + 1).max().unwrap_or(1)
        }
        SetSpec::ShiftedDiagonal { shifts, .. } => {
            shifts.iter().map(|&q| q as u64 + 1).max().unwrap_or(1)
        }
        SetSpec::Coset { inner, shift } => required_horizon(inner).max(shift.rank() as u64 + 1),
        SetSpec::FiniteUnion { members, .. } => {
            members.iter().map(required_horizon).max().unwrap_or(1)
        }
        SetSpec::LukomskiiLayer { i, m_i, pairing } => pairing
            .pairs(*i, *m_i)
            .iter()
            .map(|&(n, _, _)| bits(n))
            .max()
            .unwrap_or(1)
            .max(*m_i as u64 + 1),
    }
}

/// A linear system over GF(2) in dense bitset form.
#[derive(Clone, Debug)]
pub struct Gf2System {
    vars: Vec<(usize, u64)>,
    rows: Vec<(Vec<u64>, bool)>,
}

impl Gf2System {
    /// Builds the system of `piece` after substituting every digit for which
    /// `fixed` returns a value. The remaining digits become unknowns.
    pub fn from_piece(piece: &AffinePiece, fixed: impl Fn(usize, u64) -> Option<u8>) -> Self {
        let mut index: HashMap<(usize, u64), usize> = HashMap::new();
        let mut vars = Vec::new();
        let mut sparse = Vec::with_capacity(piece.rows.len());
        for row in &piece.rows {
            let mut rhs = row.rhs;
            let mut unknowns = Vec::new();
            for &(j, t) in &row.terms {
                match fixed(j, t) {
                    Some(b) => rhs ^= b == 1,
                    None => {
                        let v = *index.entry((j, t)).or_insert_with(|| {
                            vars.push((j, t));
                            vars.len() - 1
                        });
                        unknowns.push(v);
                    }
                }
            }
            sparse.push((unknowns, rhs));
        }
        let words = vars.len().div_ceil(64).max(1);
        let rows = sparse
            .into_iter()
            .map(|(unknowns, rhs)| {
                let mut bits = vec![0u64; words];
                for v in unknowns {
                    bits[v / 64] ^= 1 << (v % 64);
                }
                (bits, rhs)
            })
            .collect();
        Gf2System { vars, rows }
    }

    /// The unknown digits, in variable order.
    pub fn unknowns(&self) -> &[(usize, u64)] {
        &self.vars
    }

    /// True iff some assignment of the unknowns satisfies every row.
    pub fn is_consistent(&self) -> bool {
        self.reduce().is_some()
    }

    /// A solution, with free unknowns drawn from `rng` (or set to 0 without one).
    pub fn solve<R: Rng + ?Sized>(&self, rng: Option<&mut R>) -> Option<Vec<u8>> {
        let (rows, pivots) = self.reduce()?;
        let n = self.vars.len();
        let mut value = vec![0u8; n];
        let pivot_set: Vec<bool> = {
            let mut p = vec![false; n];
            for &c in &pivots {
                p[c] = true;
            }
            p
        };
        if let Some(rng) = rng {
            for (v, slot) in value.iter_mut().enumerate() {
                if !pivot_set[v] {
                    *slot = rng.gen_range(0..2);
                }
            }
        }
        // rows are in reduced echelon form, so each pivot is determined by free unknowns
        for (r, &c) in pivots.iter().enumerate() {
            let (bits, rhs) = &rows[r];
            let mut acc = *rhs as u8;
            for v in 0..n {
                if v != c && !pivot_set[v] && bits[v / 64] >> (v % 64) & 1 == 1 {
                    acc ^= value[v];
                }
            }
            value[c] = acc;
        }
        Some(value)
    }

    // Gauss-Jordan elimination; None when some row reduces to 0 = 1.
    fn reduce(&self) -> Option<(Vec<(Vec<u64>, bool)>, Vec<usize>)> {
        let mut rows = self.rows.clone();
        let n = self.vars.len();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..n {
            let (w, b) = (c / 64, c % 64);
            let Some(p) = (r..rows.len()).find(|&i| rows[i].0[w] >> b & 1 == 1) else {
                continue;
            };
            rows.swap(r, p);
            let (pivot_bits, pivot_rhs) = rows[r].clone();
            for (i, row) in rows.iter_mut().enumerate() {
                if i != r && row.0[w] >> b & 1 == 1 {
                    for (x, y) in row.0.iter_mut().zip(&pivot_bits) {
                        *x ^= y;
                    }
                    row.1 ^= pivot_rhs;
                }
            }
            pivots.push(c);
            r += 1;
        }
        if rows[r..].iter().any(|(_, rhs)| *rhs) {
            return None;
        }
        rows.truncate(r);
        Some((rows, pivots))
    }
}
