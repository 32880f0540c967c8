//! Quasimeasures: finitely additive set functions on dyadic cubes of rank `<= K`,
//! and the series ↔ quasimeasure correspondence `τ(Δ^{(k)}) = 2^{-kd} S_{2^k}(Δ^{(k)})`.

use std::fmt::Write as _;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use rayon::prelude::*;

use crate::dyadic::{DyadicCube, DyadicElement, DyadicPoint, Tail};
use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::rational::{format_rational, parse_rational, pow2, Rational};
use crate::series::{SeriesSpec, MAX_TABLE_BITS};
use crate::walsh::{parity_u64, MultiIndex};

/// Values of `τ` on every cube of rank `0..=K`.
#[derive(Clone, Debug, PartialEq)]
pub struct Quasimeasure {
    d: usize,
    levels: Vec<Vec<Rational>>,
}

/// A product of dyadic intervals, one per coordinate, each with its own rank.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Parallelepiped {
    sides: Vec<(u32, u64)>,
}

impl Parallelepiped {
    /// `sides[l] = (rank, index)` of the interval in coordinate `l`.
    pub fn new(sides: Vec<(u32, u64)>) -> Result<Self> {
        if sides.is_empty() {
            return Err(Error::Malformed("empty parallelepiped".into()));
        }
        for &(r, m) in &sides {
            DyadicCube::new(r, vec![m])?;
        }
        Ok(Parallelepiped { sides })
    }

    pub fn from_cube(c: &DyadicCube) -> Self {
        Parallelepiped {
            sides: c.index().iter().map(|&m| (c.rank(), m)).collect(),
        }
    }

    /// `Δ* × Δ^{(k)}(ξ)`: the cube `star` on the constrained coordinates and the
    /// rank-`k` cube around `xi` on the free ones.
    pub fn slab(part: &Partition, star: &DyadicCube, k: u32, xi: &[DyadicElement]) -> Result<Self> {
        if star.dim() != part.constrained().len() {
            return Err(Error::DimensionMismatch {
                expected: part.constrained().len(),
                got: star.dim(),
            });
        }
        if xi.len() != part.m() {
            return Err(Error::DimensionMismatch {
                expected: part.m(),
                got: xi.len(),
            });
        }
        let mut sides = vec![(0, 0); part.dim()];
        for (i, &j) in part.constrained().iter().enumerate() {
            sides[j] = (star.rank(), star.index()[i]);
        }
        for (i, &j) in part.free().iter().enumerate() {
            sides[j] = (k, xi[i].interval_index(k));
        }
        Ok(Parallelepiped { sides })
    }

    pub fn dim(&self) -> usize {
        self.sides.len()
    }

    pub fn sides(&self) -> &[(u32, u64)] {
        &self.sides
    }

    pub fn max_rank(&self) -> u32 {
        self.sides.iter().map(|s| s.0).max().unwrap_or(0)
    }

    /// The rank-`rank` cubes inside, in flat order.
    pub fn cubes(&self, rank: u32) -> Vec<DyadicCube> {
        assert!(rank >= self.max_rank());
        let ranges: Vec<(u64, u64)> = self
            .sides
            .iter()
            .map(|&(r, m)| {
                let s = rank - r;
                (m << s, 1u64 << s)
            })
            .collect();
        let total: u64 = ranges.iter().map(|r| r.1).product();
        (0..total)
            .map(|mut f| {
                let mut index = vec![0u64; ranges.len()];
                for l in (0..ranges.len()).rev() {
                    index[l] = ranges[l].0 + f % ranges[l].1;
                    f /= ranges[l].1;
                }
                DyadicCube::new(rank, index).expect("inside range")
            })
            .collect()
    }
}

/// The first violation found by [`Quasimeasure::check_additivity`].
#[derive(Clone, Debug, PartialEq)]
pub struct AdditivityViolation {
    pub parent: DyadicCube,
    pub parent_value: Rational,
    pub children_sum: Rational,
}

/// Rank-`K` outer approximation of `supp τ`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SupportMask {
    d: usize,
    rank: u32,
    cells: Vec<bool>,
}

impl SupportMask {
    pub fn new(d: usize, rank: u32, cells: Vec<bool>) -> Self {
        assert_eq!(cells.len(), 1usize << (rank as usize * d));
        SupportMask { d, rank, cells }
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn contains(&self, cube: &DyadicCube) -> bool {
        cube.rank() == self.rank && self.cells[cube.flat_index()]
    }

    pub fn contains_flat(&self, flat: usize) -> bool {
        self.cells[flat]
    }

    pub fn len(&self) -> usize {
        self.cells.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn cubes(&self) -> impl Iterator<Item = DyadicCube> + '_ {
        self.cells
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(move |(f, _)| DyadicCube::from_flat(self.rank, self.d, f))
    }

    pub fn cells(&self) -> &[bool] {
        &self.cells
    }
}

/// Result of [`Quasimeasure::localize_mass`].
#[derive(Clone, Debug, PartialEq)]
pub struct Localization {
    /// The free-coordinate point `ξ`, as rank-`k` prefixes with zero tails.
    pub xi: Vec<DyadicElement>,
    /// `τ(Δ* × Δ^{(k)}(ξ))`.
    pub value: Rational,
    /// `|C| / 2^{m(k - k_0)}`, guaranteed not to exceed `|value|`.
    pub bound: Rational,
}

fn table_len(d: usize, k: u32) -> Result<usize> {
    let bits = k as u64 * d as u64;
    if bits > MAX_TABLE_BITS as u64 {
        return Err(Error::SizeLimit(format!("rank-{k} table in dimension {d}")));
    }
    Ok(1usize << bits)
}

impl Quasimeasure {
    /// The quasimeasure generated by a series, one Walsh–Hadamard transform per rank.
    pub fn from_series(series: &SeriesSpec, max_rank: u32) -> Result<Self> {
        let d = series.dim();
        table_len(d, max_rank)?;
        let levels = (0..=max_rank)
            .map(|k| {
                let den = series.denominator() * (BigInt::one() << (k as usize * d));
                Ok(series
                    .fwht_table_scaled(k)?
                    .into_iter()
                    .map(|v| BigRational::new(v, den.clone()))
                    .collect())
            })
            .collect::<Result<Vec<Vec<Rational>>>>()?;
        Ok(Quasimeasure { d, levels })
    }

    /// Same as [`Quasimeasure::from_series`] but evaluating `S_{2^k}` at a corner of
    /// every cube by direct summation.
    pub fn from_series_naive(series: &SeriesSpec, max_rank: u32) -> Result<Self> {
        let d = series.dim();
        table_len(d, max_rank)?;
        if max_rank > series.bound_rank() {
            return Err(Error::InsufficientCoefficients {
                index: format!("2^{max_rank}"),
                bound_rank: series.bound_rank(),
            });
        }
        let levels = (0..=max_rank)
            .map(|k| {
                let scale = pow2(-(k as i64) * d as i64);
                let cubes: Vec<DyadicCube> = DyadicCube::all(k, d).collect();
                cubes
                    .par_iter()
                    .map(|c| {
                        let g = DyadicPoint::corner(c);
                        series
                            .partial_sum_cube(1 << k, &g)
                            .map(|s| s * &scale)
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Quasimeasure { d, levels })
    }

    /// The additive table determined by its rank-`K` values.
    pub fn from_leaves(d: usize, max_rank: u32, leaves: Vec<Rational>) -> Result<Self> {
        if leaves.len() != table_len(d, max_rank)? {
            return Err(Error::Malformed(format!(
                "expected {} leaf values, got {}",
                1usize << (max_rank as usize * d),
                leaves.len()
            )));
        }
        let mut levels = vec![leaves];
        for k in (0..max_rank).rev() {
            let finer = levels.last().expect("nonempty");
            let mut coarse = vec![Rational::zero(); 1usize << (k as usize * d)];
            for (f, v) in finer.iter().enumerate() {
                if v.is_zero() {
                    continue;
                }
                let parent = DyadicCube::from_flat(k + 1, d, f)
                    .parent()
                    .expect("rank >= 1")
                    .flat_index();
                coarse[parent] += v;
            }
            levels.push(coarse);
        }
        levels.reverse();
        Ok(Quasimeasure { d, levels })
    }

    /// A table given rank by rank. Additivity is not enforced here; see
    /// [`Quasimeasure::check_additivity`].
    pub fn from_levels(d: usize, levels: Vec<Vec<Rational>>) -> Result<Self> {
        if levels.is_empty() {
            return Err(Error::Malformed("no levels".into()));
        }
        for (k, level) in levels.iter().enumerate() {
            if level.len() != table_len(d, k as u32)? {
                return Err(Error::Malformed(format!("level {k} has {} entries", level.len())));
            }
        }
        Ok(Quasimeasure { d, levels })
    }

    pub fn zero(d: usize, max_rank: u32) -> Result<Self> {
        Self::from_leaves(d, max_rank, vec![Rational::zero(); table_len(d, max_rank)?])
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn max_rank(&self) -> u32 {
        self.levels.len() as u32 - 1
    }

    pub fn level(&self, k: u32) -> &[Rational] {
        &self.levels[k as usize]
    }

    pub fn leaves(&self) -> &[Rational] {
        self.levels.last().expect("nonempty")
    }

    fn check_cube(&self, c: &DyadicCube) -> Result<()> {
        if c.dim() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: c.dim(),
            });
        }
        if c.rank() > self.max_rank() {
            return Err(Error::RankTooSmall {
                have: self.max_rank(),
                need: c.rank(),
            });
        }
        Ok(())
    }

    /// `τ(Δ)`.
    pub fn value(&self, c: &DyadicCube) -> Result<&Rational> {
        self.check_cube(c)?;
        Ok(&self.levels[c.rank() as usize][c.flat_index()])
    }

    /// `τ(P)`, as the sum over the finest cubes inside `P`.
    pub fn value_on(&self, p: &Parallelepiped) -> Result<Rational> {
        self.integrate_signed(p, p.max_rank(), |_| false)
    }

    fn integrate_signed<F>(&self, p: &Parallelepiped, rank: u32, negative: F) -> Result<Rational>
    where
        F: Fn(&DyadicCube) -> bool,
    {
        if p.dim() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: p.dim(),
            });
        }
        if rank > self.max_rank() {
            return Err(Error::RankTooSmall {
                have: self.max_rank(),
                need: rank,
            });
        }
        let level = &self.levels[rank as usize];
        let mut acc = Rational::zero();
        for c in p.cubes(rank) {
            let v = &level[c.flat_index()];
            if negative(&c) {
                acc -= v;
            } else {
                acc += v;
            }
        }
        Ok(acc)
    }

    /// Checks that every parent value is the sum of its `2^d` children.
    pub fn check_additivity(&self) -> std::result::Result<(), AdditivityViolation> {
        for k in 0..self.max_rank() {
            let finer = &self.levels[k as usize + 1];
            for (f, v) in self.levels[k as usize].iter().enumerate() {
                let parent = DyadicCube::from_flat(k, self.d, f);
                let sum = parent
                    .subdivide()
                    .iter()
                    .fold(Rational::zero(), |acc, c| acc + &finer[c.flat_index()]);
                if &sum != v {
                    return Err(AdditivityViolation {
                        parent,
                        parent_value: v.clone(),
                        children_sum: sum,
                    });
                }
            }
        }
        Ok(())
    }

    /// Rank-`K` cubes on which `τ` does not vanish.
    pub fn support_mask(&self) -> SupportMask {
        SupportMask::new(
            self.d,
            self.max_rank(),
            self.leaves().iter().map(|v| !v.is_zero()).collect(),
        )
    }

    /// `∫_P W_N dτ`, summed over the cubes of rank `max(k + 1, rank of P)` inside `P`,
    /// where `k = max_l ⌊log₂ N^l⌋`; `W_N` is constant on those cubes.
    pub fn integrate_walsh(&self, n: &MultiIndex, p: &Parallelepiped) -> Result<Rational> {
        if n.dim() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: n.dim(),
            });
        }
        let ns = n
            .to_u64s()
            .ok_or_else(|| Error::SizeLimit("index beyond 2^64".into()))?;
        let need = ns
            .iter()
            .map(|&x| if x == 0 { 0 } else { 64 - x.leading_zeros() })
            .max()
            .unwrap_or(0);
        let rank = need.max(p.max_rank());
        if rank > self.max_rank() {
            return Err(Error::RankTooSmall {
                have: self.max_rank(),
                need: rank,
            });
        }
        self.integrate_signed(p, rank, |c| {
            let g = DyadicPoint::corner(c);
            ns.iter()
                .zip(g.coords())
                .fold(false, |acc, (&nl, gl)| acc ^ parity_u64(nl, gl.word(0)))
        })
    }

    /// Greedy descent over the free coordinates of `Δ = Δ* × Δ_*`: at each rank it
    /// moves to the child slab maximizing `sign(C)·τ`, ties going to the
    /// lexicographically smallest child. The returned slab satisfies
    /// `|τ(Δ* × Δ^{(k)}(ξ))| >= |C| / 2^{m(k - k_0)}` with `C = τ(Δ)`.
    pub fn localize_mass(&self, cube: &DyadicCube, part: &Partition, k: u32) -> Result<Localization> {
        self.check_cube(cube)?;
        if part.dim() != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: part.dim(),
            });
        }
        let k0 = cube.rank();
        if k < k0 || k > self.max_rank() {
            return Err(Error::RankTooSmall {
                have: self.max_rank(),
                need: k.max(k0),
            });
        }
        let c = self.value(cube)?.clone();
        if c.is_zero() {
            return Err(Error::ZeroMass);
        }
        let positive = c.is_positive();
        let star = DyadicCube::new(
            k0,
            part.constrained().iter().map(|&j| cube.index()[j]).collect(),
        )?;
        let m = part.m();
        let mut free_idx: Vec<u64> = part.free().iter().map(|&j| cube.index()[j]).collect();
        let mut value = c.clone();
        for j in k0..k {
            // (score, value, child); strict comparison keeps the earliest child on ties
            let mut best: Option<(Rational, Rational, Vec<u64>)> = None;
            for bits in 0..1usize << m {
                let child: Vec<u64> = (0..m)
                    .map(|i| 2 * free_idx[i] + ((bits >> (m - 1 - i)) & 1) as u64)
                    .collect();
                let xi: Vec<DyadicElement> = child
                    .iter()
                    .map(|&x| DyadicElement::from_interval(j + 1, x, Tail::Zeros))
                    .collect();
                let v = self.value_on(&Parallelepiped::slab(part, &star, j + 1, &xi)?)?;
                let score = if positive { v.clone() } else { -v.clone() };
                if best.as_ref().is_none_or(|b| score > b.0) {
                    best = Some((score, v, child));
                }
            }
            let (_, v, child) = best.expect("at least one child");
            value = v;
            free_idx = child;
        }
        let xi = free_idx
            .iter()
            .map(|&x| DyadicElement::from_interval(k, x, Tail::Zeros))
            .collect();
        let bound = c.abs() * pow2(-(m as i64) * (k - k0) as i64);
        Ok(Localization { xi, value, bound })
    }

    /// `2^{mk} ∫_{Δ* × Δ^{(k)}(ξ)} R_{k·1}(g*) dτ`, where `R_{k·1}(g*)` is the product of
    /// `(-1)^{g^j_k}` over the constrained coordinates.
    pub fn rademacher_functional(
        &self,
        k: u32,
        star: &DyadicCube,
        xi: &[DyadicElement],
        part: &Partition,
    ) -> Result<Rational> {
        let p = Parallelepiped::slab(part, star, k, xi)?;
        let rank = (k + 1).max(p.max_rank());
        let constrained = part.constrained().to_vec();
        let sum = self.integrate_signed(&p, rank, |c| {
            constrained
                .iter()
                .fold(false, |acc, &j| acc ^ ((c.index()[j] >> (rank - 1 - k)) & 1 == 1))
        })?;
        Ok(sum * pow2(part.m() as i64 * k as i64))
    }

    /// `∫_Δ W_{N·1} dτ`.
    pub fn walsh_functional(&self, n: u64, cube: &DyadicCube) -> Result<Rational> {
        self.integrate_walsh(&MultiIndex::diagonal(self.d, n), &Parallelepiped::from_cube(cube))
    }

    /// CSV with one row `k,m1,...,md,p/q` per cube, ranks ascending, flat order within a rank.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, level) in self.levels.iter().enumerate() {
            for (f, v) in level.iter().enumerate() {
                let c = DyadicCube::from_flat(k as u32, self.d, f);
                let _ = write!(out, "{k}");
                for m in c.index() {
                    let _ = write!(out, ",{m}");
                }
                let _ = writeln!(out, ",{}", format_rational(v));
            }
        }
        out
    }

    /// Parses the CSV written by [`Quasimeasure::to_csv`]. Every cube up to the
    /// largest rank present must appear exactly once.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut rows: Vec<(DyadicCube, Rational)> = Vec::new();
        let mut d = None;
        for (line_no, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() < 3 {
                return Err(Error::Parse(format!("line {}: too few fields", line_no + 1)));
            }
            let dim = fields.len() - 2;
            if *d.get_or_insert(dim) != dim {
                return Err(Error::Parse(format!("line {}: dimension changes", line_no + 1)));
            }
            let bad = |_| Error::Parse(format!("line {}: bad integer", line_no + 1));
            let k: u32 = fields[0].parse().map_err(bad)?;
            let index = fields[1..=dim]
                .iter()
                .map(|s| s.parse::<u64>().map_err(bad))
                .collect::<Result<Vec<_>>>()?;
            rows.push((DyadicCube::new(k, index)?, parse_rational(fields[dim + 1])?));
        }
        let d = d.ok_or_else(|| Error::Parse("empty quasimeasure table".into()))?;
        let max_rank = rows.iter().map(|r| r.0.rank()).max().unwrap_or(0);
        let mut levels: Vec<Vec<Option<Rational>>> = (0..=max_rank)
            .map(|k| Ok(vec![None; table_len(d, k)?]))
            .collect::<Result<_>>()?;
        for (c, v) in rows {
            let slot = &mut levels[c.rank() as usize][c.flat_index()];
            if slot.is_some() {
                return Err(Error::Parse(format!("cube {c} listed twice")));
            }
            *slot = Some(v);
        }
        let levels = levels
            .into_iter()
            .enumerate()
            .map(|(k, level)| {
                level
                    .into_iter()
                    .enumerate()
                    .map(|(f, v)| {
                        v.ok_or_else(|| {
                            Error::Parse(format!("cube {} missing", DyadicCube::from_flat(k as u32, d, f)))
                        })
                    })
                    .collect::<Result<Vec<_>>>()
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_levels(d, levels)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};
    use crate::walsh::walsh_eval_multi;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn haar(d: usize, k: u32) -> Quasimeasure {
        let s = SeriesSpec::new(d, k, [(vec![0; d], int(1))]).unwrap();
        Quasimeasure::from_series(&s, k).unwrap()
    }

    fn single(d: usize, n: &[u64], k: u32) -> SeriesSpec {
        SeriesSpec::new(d, k, [(n.to_vec(), int(1))]).unwrap()
    }

    #[test]
    fn constant_series_gives_haar_measure() {
        let t = haar(2, 3);
        for k in 0..=3 {
            for c in DyadicCube::all(k, 2) {
                assert_eq!(t.value(&c).unwrap(), &pow2(-2 * k as i64));
            }
        }
    }

    #[test]
    fn one_walsh_term() {
        let s = single(2, &[1, 0], 1);
        let t = Quasimeasure::from_series(&s, 1).unwrap();
        assert_eq!(t.value(&"1:0,0".parse().unwrap()).unwrap(), &ratio(1, 4));
        assert_eq!(t.value(&"1:1,0".parse().unwrap()).unwrap(), &ratio(-1, 4));
        assert_eq!(t.value(&DyadicCube::whole(2)).unwrap(), &int(0));
        // W_{(1,0)} ignores the second coordinate, so all four cells carry mass
        let mask = t.support_mask();
        let cells: Vec<String> = mask.cubes().map(|c| c.to_string()).collect();
        assert_eq!(cells, vec!["1:0,0", "1:0,1", "1:1,0", "1:1,1"]);
    }

    #[test]
    fn fast_and_naive_constructions_agree() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for d in 1..=3 {
            let s = SeriesSpec::random_sparse(&mut rng, d, 3, 12);
            let a = Quasimeasure::from_series(&s, 3).unwrap();
            let b = Quasimeasure::from_series_naive(&s, 3).unwrap();
            assert_eq!(a, b);
            assert!(a.check_additivity().is_ok());
        }
    }

    #[test]
    fn partial_sums_at_powers_of_two_are_cube_averages() {
        let mut rng = ChaCha8Rng::seed_from_u64(12);
        let s = SeriesSpec::random_dense(&mut rng, 2, 3);
        let t = Quasimeasure::from_series(&s, 3).unwrap();
        for _ in 0..20 {
            let g = DyadicPoint::random(&mut rng, 2, 6);
            for k in 0..=3u32 {
                let v = t.value(&g.cube_of(k)).unwrap() * pow2(2 * k as i64);
                assert_eq!(s.partial_sum_cube(1 << k, &g).unwrap(), v);
            }
        }
    }

    #[test]
    fn perturbed_table_fails_additivity() {
        let t = haar(2, 2);
        let mut levels: Vec<Vec<Rational>> = (0..=2).map(|k| t.level(k).to_vec()).collect();
        let victim = DyadicCube::new(2, vec![3, 1]).unwrap();
        levels[2][victim.flat_index()] += ratio(1, 1000);
        let bad = Quasimeasure::from_levels(2, levels).unwrap();
        let v = bad.check_additivity().unwrap_err();
        assert_eq!(v.parent, victim.parent().unwrap());
        assert!(Quasimeasure::zero(2, 3).unwrap().check_additivity().is_ok());
    }

    #[test]
    fn masks() {
        assert!(Quasimeasure::zero(2, 2).unwrap().support_mask().is_empty());
        assert_eq!(haar(2, 2).support_mask().len(), 16);
    }

    #[test]
    fn coefficient_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(13);
        let s = SeriesSpec::random_dense(&mut rng, 2, 3);
        let t = Quasimeasure::from_series(&s, 3).unwrap();
        for n in DyadicCube::all(3, 2) {
            let idx = MultiIndex::from_u64s(n.index());
            let mut acc = Rational::zero();
            for c in DyadicCube::all(3, 2) {
                let w = walsh_eval_multi(&idx, &DyadicPoint::corner(&c)).unwrap();
                acc += t.value(&c).unwrap() * int(w.to_i64());
            }
            assert_eq!(acc, s.coefficient(n.index()));
        }
    }

    #[test]
    fn integrate_walsh_examples() {
        let t = haar(1, 1);
        let whole = Parallelepiped::from_cube(&DyadicCube::whole(1));
        assert_eq!(t.integrate_walsh(&MultiIndex::from_u64s(&[1]), &whole).unwrap(), int(0));
        assert_eq!(t.integrate_walsh(&MultiIndex::from_u64s(&[0]), &whole).unwrap(), int(1));
        assert!(matches!(
            t.integrate_walsh(&MultiIndex::from_u64s(&[2]), &whole),
            Err(Error::RankTooSmall { .. })
        ));
    }

    #[test]
    fn integral_over_group_recovers_coefficients() {
        let mut rng = ChaCha8Rng::seed_from_u64(14);
        let s = SeriesSpec::random_dense(&mut rng, 2, 2);
        let t = Quasimeasure::from_series(&s, 2).unwrap();
        assert_eq!(t.walsh_functional(3, &DyadicCube::whole(2)).unwrap(), s.coefficient(&[3, 3]));
    }

    #[test]
    fn rademacher_functional_matches_brute_force() {
        let mut rng = ChaCha8Rng::seed_from_u64(15);
        let part = Partition::new(2, &[1]).unwrap();
        for _ in 0..5 {
            let s = SeriesSpec::random_dense(&mut rng, 2, 3);
            let t = Quasimeasure::from_series(&s, 3).unwrap();
            let star = DyadicCube::new(0, vec![0]).unwrap();
            let xi = vec![DyadicElement::random(&mut rng, 4, Tail::Zeros)];
            let k = 2;
            let mut acc = Rational::zero();
            for c in DyadicCube::all(3, 2) {
                let g = DyadicPoint::corner(&c);
                if g.coord(1).interval_index(k) != xi[0].interval_index(k) {
                    continue;
                }
                let sign = if g.coord(0).digit(k as u64) == 1 { -1 } else { 1 };
                acc += t.value(&c).unwrap() * int(sign);
            }
            assert_eq!(t.rademacher_functional(k, &star, &xi, &part).unwrap(), acc * int(4));
        }
        let h = haar(2, 4);
        for k in 0..=3 {
            let star = DyadicCube::new(0, vec![0]).unwrap();
            let xi = vec![DyadicElement::zero(1)];
            assert_eq!(h.rademacher_functional(k, &star, &xi, &part).unwrap(), int(0));
        }
    }

    #[test]
    fn localization_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(16);
        let part = Partition::new(2, &[1]).unwrap();
        let h = haar(2, 3);
        let loc = h.localize_mass(&DyadicCube::whole(2), &part, 3).unwrap();
        assert_eq!(loc.value, loc.bound);
        for _ in 0..20 {
            let s = SeriesSpec::random_dense(&mut rng, 2, 3);
            let t = Quasimeasure::from_series(&s, 3).unwrap();
            let whole = DyadicCube::whole(2);
            if t.value(&whole).unwrap().is_zero() {
                assert_eq!(t.localize_mass(&whole, &part, 3), Err(Error::ZeroMass));
                continue;
            }
            let loc = t.localize_mass(&whole, &part, 3).unwrap();
            assert!(loc.value.abs() >= loc.bound);
            // some slab meets the bound, and the chosen one is among them
            let star = DyadicCube::new(0, vec![0]).unwrap();
            let best = (0..8u64)
                .map(|x| {
                    let xi = vec![DyadicElement::from_interval(3, x, Tail::Zeros)];
                    t.value_on(&Parallelepiped::slab(&part, &star, 3, &xi).unwrap()).unwrap().abs()
                })
                .max()
                .unwrap();
            assert!(best >= loc.bound);
        }
    }

    #[test]
    fn localization_follows_a_point_mass() {
        let d = 2;
        let mut leaves = vec![Rational::zero(); 64];
        let target = DyadicCube::new(3, vec![5, 6]).unwrap();
        leaves[target.flat_index()] = ratio(3, 2);
        let t = Quasimeasure::from_leaves(d, 3, leaves).unwrap();
        let part = Partition::new(2, &[1]).unwrap();
        let loc = t.localize_mass(&DyadicCube::whole(2), &part, 3).unwrap();
        assert_eq!(loc.xi[0].interval_index(3), 6);
        assert_eq!(loc.value, ratio(3, 2));
        assert!(loc.value > loc.bound);
    }

    #[test]
    fn csv_round_trip() {
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let s = SeriesSpec::random_sparse(&mut rng, 2, 2, 5);
        let t = Quasimeasure::from_series(&s, 2).unwrap();
        let csv = t.to_csv();
        assert!(csv.starts_with("0,0,0,"));
        assert_eq!(Quasimeasure::from_csv(&csv).unwrap(), t);
        let missing: String = csv.lines().skip(1).map(|l| format!("{l}\n")).collect();
        assert!(Quasimeasure::from_csv(&missing).is_err());
    }

    #[test]
    fn leaves_build_additive_tables() {
        let mut rng = ChaCha8Rng::seed_from_u64(18);
        let leaves: Vec<Rational> = (0..64).map(|_| ratio(rng.gen_range(-5..5), 3)).collect();
        let t = Quasimeasure::from_leaves(2, 3, leaves).unwrap();
        assert!(t.check_additivity().is_ok());
    }
}
