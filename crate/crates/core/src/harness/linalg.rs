//! Exact Gauss–Jordan elimination over the rationals on sparse rows.
//!
//! Pivots are chosen column by column; among the rows still available, the entry
//! with the fewest bits in numerator plus denominator wins, ties going to the
//! lowest row index. The result is independent of thread count and input hashing.

use num_traits::{One, Signed, Zero};

use crate::rational::Rational;

/// A sparse row: `(column, value)` pairs sorted by column, no zero values.
pub type SparseRow = Vec<(usize, Rational)>;

/// A reduced row echelon form.
#[derive(Clone, Debug)]
pub struct Rref {
    cols: usize,
    /// Pivot columns, increasing; row `r` has a leading 1 at `pivots[r]`.
    pivots: Vec<usize>,
    rows: Vec<SparseRow>,
}

fn size(v: &Rational) -> u64 {
    v.numer().abs().bits() + v.denom().bits()
}

fn entry(row: &SparseRow, col: usize) -> Option<&Rational> {
    row.binary_search_by_key(&col, |e| e.0).ok().map(|i| &row[i].1)
}

// row - factor * pivot
fn subtract(row: &SparseRow, factor: &Rational, pivot: &SparseRow) -> SparseRow {
    let mut out = Vec::with_capacity(row.len() + pivot.len());
    let (mut a, mut b) = (row.iter().peekable(), pivot.iter().peekable());
    loop {
        match (a.peek(), b.peek()) {
            (Some(x), Some(y)) if x.0 == y.0 => {
                let v = &x.1 - factor * &y.1;
                if !v.is_zero() {
                    out.push((x.0, v));
                }
                a.next();
                b.next();
            }
            (Some(x), Some(y)) if x.0 < y.0 => {
                out.push((*x).clone());
                a.next();
            }
            (Some(_), Some(y)) | (None, Some(y)) => {
                out.push((y.0, -(factor * &y.1)));
                b.next();
            }
            (Some(x), None) => {
                out.push((*x).clone());
                a.next();
            }
            (None, None) => break,
        }
    }
    out
}

/// Normalizes a row given as arbitrary `(column, value)` pairs: sorted, merged, zeros dropped.
pub fn normalize(mut row: Vec<(usize, Rational)>) -> SparseRow {
    row.sort_by_key(|e| e.0);
    let mut out: SparseRow = Vec::with_capacity(row.len());
    for (c, v) in row {
        match out.last_mut() {
            Some(last) if last.0 == c => last.1 += v,
            _ => out.push((c, v)),
        }
    }
    out.retain(|e| !e.1.is_zero());
    out
}

/// Reduces `rows` over `cols` columns.
pub fn rref(rows: Vec<SparseRow>, cols: usize) -> Rref {
    let mut rows: Vec<SparseRow> = rows.into_iter().filter(|r| !r.is_empty()).collect();
    let mut used = vec![false; rows.len()];
    let mut pivot_rows = Vec::new();
    let mut pivots = Vec::new();
    for c in 0..cols {
        let mut best: Option<(u64, usize)> = None;
        for (i, row) in rows.iter().enumerate() {
            if used[i] {
                continue;
            }
            if let Some(v) = entry(row, c) {
                let key = (size(v), i);
                if best.is_none_or(|b| key < b) {
                    best = Some(key);
                }
            }
        }
        let Some((_, p)) = best else { continue };
        used[p] = true;
        let inv = Rational::one() / entry(&rows[p], c).expect("pivot entry");
        for e in rows[p].iter_mut() {
            e.1 *= &inv;
        }
        let pivot = rows[p].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == p {
                continue;
            }
            if let Some(f) = entry(row, c).cloned() {
                *row = subtract(row, &f, &pivot);
            }
        }
        pivot_rows.push(p);
        pivots.push(c);
    }
    let reduced = pivot_rows.iter().map(|&p| rows[p].clone()).collect();
    Rref {
        cols,
        pivots,
        rows: reduced,
    }
}

impl Rref {
    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn nullity(&self) -> usize {
        self.cols - self.pivots.len()
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    /// Up to `limit` null-space vectors, one per free column in increasing order:
    /// 1 at the free column, minus the reduced entries at the pivot columns.
    pub fn null_basis(&self, limit: usize) -> Vec<Vec<Rational>> {
        let mut is_pivot = vec![false; self.cols];
        for &c in &self.pivots {
            is_pivot[c] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .take(limit)
            .map(|f| {
                let mut v = vec![Rational::zero(); self.cols];
                v[f] = Rational::one();
                for (r, &c) in self.pivots.iter().enumerate() {
                    if let Some(x) = entry(&self.rows[r], f) {
                        v[c] = -x.clone();
                    }
                }
                v
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    fn row(vals: &[i64]) -> SparseRow {
        normalize(vals.iter().enumerate().map(|(c, &v)| (c, int(v))).collect())
    }

    fn apply(rows: &[SparseRow], v: &[Rational]) -> Vec<Rational> {
        rows.iter()
            .map(|r| r.iter().map(|(c, x)| x * &v[*c]).sum())
            .collect()
    }

    #[test]
    fn ranks_and_null_spaces() {
        let rows = vec![row(&[1, 2, 3, 4]), row(&[2, 4, 6, 8]), row(&[0, 1, -1, 0])];
        let r = rref(rows.clone(), 4);
        assert_eq!(r.rank(), 2);
        assert_eq!(r.nullity(), 2);
        for v in r.null_basis(10) {
            assert!(apply(&rows, &v).iter().all(|x| x.is_zero()));
        }
        assert_eq!(rref(vec![], 3).nullity(), 3);
        assert_eq!(rref(vec![row(&[0, 0])], 2).rank(), 0);
    }

    #[test]
    fn fractions_and_pivot_choice() {
        let rows = vec![
            normalize(vec![(0, ratio(7, 3)), (1, int(1))]),
            normalize(vec![(0, int(1)), (1, ratio(1, 2))]),
        ];
        let r = rref(rows.clone(), 2);
        assert_eq!(r.rank(), 2);
        let rows = vec![
            normalize(vec![(0, ratio(7, 3)), (1, int(1))]),
            normalize(vec![(0, ratio(14, 3)), (1, int(2))]),
        ];
        let r = rref(rows.clone(), 2);
        assert_eq!(r.rank(), 1);
        let v = &r.null_basis(1)[0];
        assert!(apply(&rows, v).iter().all(|x| x.is_zero()));
    }

    #[test]
    fn normalize_merges() {
        let r = normalize(vec![(2, int(1)), (0, int(3)), (2, int(-1))]);
        assert_eq!(r, vec![(0, int(3))]);
    }
}
