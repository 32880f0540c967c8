//! Rasterizing two-dimensional slices of structured sets on the dyadic grid.

use std::io::Write;
use std::path::Path;

use rayon::prelude::*;

use super::affine::{affine_pieces, required_horizon, Gf2System};
use super::{Membership, SetSpec};
use crate::dyadic::{DyadicCube, DyadicPoint};
use crate::error::{Error, Result};
use crate::quasimeasure::{Parallelepiped, SupportMask};

/// Largest supported raster rank: images are at most `2^12 × 2^12`.
pub const MAX_RASTER_RANK: u32 = 12;

/// Which two coordinates are drawn, and the values of all the others.
#[derive(Clone, Debug, PartialEq)]
pub struct Slice {
    pub axes: [usize; 2],
    /// Supplies every coordinate outside `axes`; entries on `axes` are ignored.
    pub point: DyadicPoint,
}

impl Slice {
    /// Coordinates 0 and 1 drawn, the rest fixed to 0.
    pub fn default_for(d: usize) -> Self {
        Slice {
            axes: [0, 1],
            point: DyadicPoint::zero(d, 1),
        }
    }
}

/// A square grid of cell verdicts. Row 0 is the top of the picture.
#[derive(Clone, Debug, PartialEq)]
pub struct Bitmap {
    size: usize,
    cells: Vec<Membership>,
}

impl Bitmap {
    pub fn size(&self) -> usize {
        self.size
    }

    pub fn get(&self, row: usize, col: usize) -> Membership {
        self.cells[row * self.size + col]
    }

    /// The verdict for the cell `Δ_{m1} × Δ_{m2}` (horizontal, vertical index).
    pub fn cell(&self, m1: usize, m2: usize) -> Membership {
        self.get(self.size - 1 - m2, m1)
    }

    pub fn count(&self, m: Membership) -> usize {
        self.cells.iter().filter(|&&c| c == m).count()
    }

    /// Binary PGM (P5): 255 for cells meeting the set, 0 otherwise, 128 when undecided.
    /// Each cell becomes a `scale × scale` block.
    pub fn to_pgm(&self, scale: usize) -> Vec<u8> {
        let scale = scale.max(1);
        let side = self.size * scale;
        let mut out = format!("P5\n{side} {side}\n255\n").into_bytes();
        for row in 0..self.size {
            let line: Vec<u8> = (0..self.size)
                .flat_map(|col| {
                    let v = match self.get(row, col) {
                        Membership::In => 255,
                        Membership::Out => 0,
                        Membership::Undetermined => 128,
                    };
                    std::iter::repeat_n(v, scale)
                })
                .collect();
            for _ in 0..scale {
                out.extend_from_slice(&line);
            }
        }
        out
    }

    pub fn write_pgm(&self, path: &Path, scale: usize) -> Result<()> {
        let mut f = std::fs::File::create(path)?;
        f.write_all(&self.to_pgm(scale))?;
        Ok(())
    }

    /// A text rendering with `#` for cells meeting the set.
    pub fn to_ascii(&self) -> String {
        let mut s = String::with_capacity(self.size * (self.size + 1));
        for row in 0..self.size {
            for col in 0..self.size {
                s.push(match self.get(row, col) {
                    Membership::In => '#',
                    Membership::Out => '.',
                    Membership::Undetermined => '?',
                });
            }
            s.push('\n');
        }
        s
    }
}

/// Marks each rank-`k` cell of the slice plane that meets `set`.
///
/// Horizontal position is the interval index of coordinate `axes[0]`, vertical
/// position that of `axes[1]` with larger indices drawn higher.
pub fn rasterize(set: &SetSpec, k: u32, slice: &Slice) -> Result<Bitmap> {
    let d = set.dim();
    if slice.point.dim() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: slice.point.dim(),
        });
    }
    let [a, b] = slice.axes;
    if a == b || a >= d || b >= d {
        return Err(Error::Malformed(format!("bad slice axes {:?} for d = {d}", slice.axes)));
    }
    if k > MAX_RASTER_RANK {
        return Err(Error::SizeLimit(format!(
            "raster rank {k} above {MAX_RASTER_RANK}"
        )));
    }
    set.validate()?;
    let horizon = k as u64 + required_horizon(set) + slice.point.rank() as u64 + 2;
    let pieces = affine_pieces(set, horizon)?;
    let size = 1usize << k;
    let digit = |m: usize, t: u64| ((m >> (k as u64 - 1 - t)) & 1) as u8;
    let cells = (0..size * size)
        .into_par_iter()
        .map(|pos| {
            let (row, col) = (pos / size, pos % size);
            let (m1, m2) = (col, size - 1 - row);
            let fixed = |j: usize, t: u64| {
                if j == a {
                    (t < k as u64).then(|| digit(m1, t))
                } else if j == b {
                    (t < k as u64).then(|| digit(m2, t))
                } else {
                    Some(slice.point.coord(j).digit(t))
                }
            };
            let meets = pieces
                .iter()
                .any(|p| Gf2System::from_piece(p, fixed).is_consistent());
            if meets {
                Membership::In
            } else {
                Membership::Out
            }
        })
        .collect();
    Ok(Bitmap { size, cells })
}

/// Whether `set` meets the parallelepiped `p`.
pub fn meets(set: &SetSpec, p: &Parallelepiped) -> Result<bool> {
    if p.dim() != set.dim() {
        return Err(Error::DimensionMismatch {
            expected: set.dim(),
            got: p.dim(),
        });
    }
    set.validate()?;
    let horizon = p.max_rank() as u64 + required_horizon(set) + 2;
    let sides = p.sides();
    let fixed = |j: usize, t: u64| {
        let (r, m) = sides[j];
        (t < r as u64).then(|| ((m >> (r as u64 - 1 - t)) & 1) as u8)
    };
    Ok(affine_pieces(set, horizon)?
        .iter()
        .any(|piece| Gf2System::from_piece(piece, fixed).is_consistent()))
}

/// Largest `d · rank` accepted by [`cell_mask`].
pub const MAX_MASK_BITS: u32 = 24;

/// The rank-`rank` cubes of `𝔾^d` that meet `set`.
pub fn cell_mask(set: &SetSpec, rank: u32) -> Result<SupportMask> {
    let d = set.dim();
    if d as u32 * rank > MAX_MASK_BITS {
        return Err(Error::SizeLimit(format!(
            "2^{} cells of rank {rank} in dimension {d}",
            d as u32 * rank
        )));
    }
    set.validate()?;
    let horizon = rank as u64 + required_horizon(set) + 2;
    let pieces = affine_pieces(set, horizon)?;
    let cells = (0..1usize << (d as u32 * rank))
        .into_par_iter()
        .map(|flat| {
            let c = DyadicCube::from_flat(rank, d, flat);
            let fixed = |j: usize, t: u64| {
                (t < rank as u64).then(|| ((c.index()[j] >> (rank as u64 - 1 - t)) & 1) as u8)
            };
            pieces
                .iter()
                .any(|p| Gf2System::from_piece(p, fixed).is_consistent())
        })
        .collect();
    Ok(SupportMask::new(d, rank, cells))
}
