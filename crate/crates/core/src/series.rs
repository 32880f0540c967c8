//! Multiple Walsh series with exact rational coefficients and their partial sums.

use std::collections::BTreeMap;

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dyadic::{DyadicPoint, MAX_CUBE_RANK};
use crate::error::{Error, Result};
use crate::rational::{format_rational, parse_rational, Rational};
use crate::walsh::{hadamard_in_place, parity_u64, reverse_chunks, MultiIndex, WalshIndex};

/// Largest `k·d` for which a full rank-`k` table is built.
pub const MAX_TABLE_BITS: u32 = 26;

/// A `d`-dimensional Walsh series `Σ c_n W_n` with finitely many nonzero
/// coefficients, all with components below `2^bound_rank`.
///
/// Coefficients are queried as zero anywhere below the bound unless set. Asking
/// for partial sums that need indices at or beyond the bound is an error.
#[derive(Clone, Debug)]
pub struct SeriesSpec {
    d: usize,
    bound_rank: u32,
    coeffs: BTreeMap<Vec<u64>, Rational>,
    // coefficients over a common denominator, for the summation loops
    den: BigInt,
    idx: Vec<u64>,
    nums: Vec<BigInt>,
    small: Option<Vec<i128>>,
}

impl PartialEq for SeriesSpec {
    fn eq(&self, other: &Self) -> bool {
        self.d == other.d && self.bound_rank == other.bound_rank && self.coeffs == other.coeffs
    }
}

impl SeriesSpec {
    pub fn new<I>(d: usize, bound_rank: u32, coeffs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Vec<u64>, Rational)>,
    {
        if d == 0 {
            return Err(Error::Malformed("dimension must be at least 1".into()));
        }
        if bound_rank > MAX_CUBE_RANK {
            return Err(Error::SizeLimit(format!(
                "bound rank {bound_rank} above {MAX_CUBE_RANK}"
            )));
        }
        let mut map = BTreeMap::new();
        for (n, c) in coeffs {
            if n.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: n.len(),
                });
            }
            if n.iter().any(|&x| x >> bound_rank != 0) {
                return Err(Error::Malformed(format!(
                    "index {n:?} is beyond the bound 2^{bound_rank}"
                )));
            }
            if map.contains_key(&n) {
                return Err(Error::Malformed(format!("index {n:?} given twice")));
            }
            if !c.is_zero() {
                map.insert(n, c);
            }
        }
        Ok(Self::from_map(d, bound_rank, map))
    }

    fn from_map(d: usize, bound_rank: u32, coeffs: BTreeMap<Vec<u64>, Rational>) -> Self {
        let den = coeffs
            .values()
            .fold(BigInt::one(), |acc, c| acc.lcm(c.denom()));
        let mut idx = Vec::with_capacity(coeffs.len() * d);
        let mut nums = Vec::with_capacity(coeffs.len());
        for (n, c) in &coeffs {
            idx.extend_from_slice(n);
            nums.push(c.numer() * (&den / c.denom()));
        }
        let abs_total = nums.iter().fold(BigInt::zero(), |acc, x| acc + x.abs());
        let small = (abs_total.bits() < 120).then(|| {
            nums.iter()
                .map(|x| x.to_i128().expect("bounded"))
                .collect()
        });
        SeriesSpec {
            d,
            bound_rank,
            coeffs,
            den,
            idx,
            nums,
            small,
        }
    }

    pub fn zero(d: usize, bound_rank: u32) -> Self {
        Self::from_map(d.max(1), bound_rank, BTreeMap::new())
    }

    /// The series with `c_0 = c` and nothing else, declared up to `2^bound_rank`.
    pub fn constant(d: usize, bound_rank: u32, c: Rational) -> Self {
        Self::new(d, bound_rank, [(vec![0; d], c)]).expect("valid")
    }

    /// Evaluates a coefficient rule at every index below `2^bound_rank`.
    pub fn from_fn<F>(d: usize, bound_rank: u32, f: F) -> Result<Self>
    where
        F: Fn(&[u64]) -> Rational,
    {
        let bits = bound_rank as u64 * d as u64;
        if bits > MAX_TABLE_BITS as u64 {
            return Err(Error::SizeLimit(format!(
                "{d}-dimensional rule up to 2^{bound_rank} is too large to enumerate"
            )));
        }
        let k = bound_rank;
        let coeffs = (0..1usize << bits).filter_map(|flat| {
            let n: Vec<u64> = (0..d)
                .map(|j| ((flat >> (k as usize * (d - 1 - j))) & ((1usize << k) - 1)) as u64)
                .collect();
            let c = f(&n);
            (!c.is_zero()).then_some((n, c))
        });
        Self::new(d, bound_rank, coeffs.collect::<Vec<_>>())
    }

    /// A random series with `nnz` nonzero coefficients drawn uniformly below the bound,
    /// values `p/q` with `|p| <= 9`, `1 <= q <= 8`.
    pub fn random_sparse<R: Rng + ?Sized>(rng: &mut R, d: usize, bound_rank: u32, nnz: usize) -> Self {
        let bound = 1u64 << bound_rank;
        let mut map = BTreeMap::new();
        for _ in 0..nnz {
            let n: Vec<u64> = (0..d).map(|_| rng.gen_range(0..bound)).collect();
            map.insert(n, random_rational(rng));
        }
        map.retain(|_, c| !c.is_zero());
        Self::from_map(d, bound_rank, map)
    }

    /// A random series with every coefficient below the bound drawn independently.
    pub fn random_dense<R: Rng + ?Sized>(rng: &mut R, d: usize, bound_rank: u32) -> Self {
        let k = bound_rank as usize;
        let mut map = BTreeMap::new();
        for flat in 0..1usize << (k * d) {
            let n: Vec<u64> = (0..d)
                .map(|j| ((flat >> (k * (d - 1 - j))) & ((1usize << k) - 1)) as u64)
                .collect();
            let c = random_rational(rng);
            if !c.is_zero() {
                map.insert(n, c);
            }
        }
        Self::from_map(d, bound_rank, map)
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn bound_rank(&self) -> u32 {
        self.bound_rank
    }

    pub fn nonzero_count(&self) -> usize {
        self.coeffs.len()
    }

    /// Nonzero coefficients in index order.
    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u64>, &Rational)> {
        self.coeffs.iter()
    }

    /// `c_n`; zero for indices that were not set or lie beyond the bound.
    pub fn coefficient(&self, n: &[u64]) -> Rational {
        self.coeffs.get(n).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn coefficient_multi(&self, n: &MultiIndex) -> Result<Rational> {
        self.check_dim(n.dim())?;
        match n.to_u64s() {
            Some(v) => Ok(self.coefficient(&v)),
            None => Ok(Rational::zero()),
        }
    }

    /// Common denominator of all coefficients.
    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    fn check_dim(&self, got: usize) -> Result<()> {
        if got != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got,
            });
        }
        Ok(())
    }

    fn check_bounds(&self, n: &[WalshIndex]) -> Result<Vec<u64>> {
        let bound = BigUint::one() << self.bound_rank as usize;
        let mut out = Vec::with_capacity(n.len());
        for c in n {
            if c.is_zero() {
                return Err(Error::ZeroIndex);
            }
            if c.0 > bound {
                return Err(Error::InsufficientCoefficients {
                    index: c.to_string(),
                    bound_rank: self.bound_rank,
                });
            }
            out.push(c.to_u64().expect("below 2^63"));
        }
        Ok(out)
    }

    /// `S_N(g) = Σ_{n<N} c_n W_n(g)` over the rectangle `n^l < N^l`.
    pub fn partial_sum_rect(&self, n: &MultiIndex, g: &DyadicPoint) -> Result<Rational> {
        self.check_dim(n.dim())?;
        self.check_dim(g.dim())?;
        let bounds = self.check_bounds(n.components())?;
        let num = self.scaled_partial_sum(&bounds, &g.low_words());
        Ok(BigRational::new(num, self.den.clone()))
    }

    /// The cubic partial sum `S_{N·1}(g)`.
    pub fn partial_sum_cube(&self, n: u64, g: &DyadicPoint) -> Result<Rational> {
        self.partial_sum_rect(&MultiIndex::diagonal(self.d, n), g)
    }

    /// The partial sum over `n^l < bounds[l]` times the common denominator, at the
    /// point whose first 64 digits per coordinate are `words`. Bounds are not
    /// checked against the declared coefficient range.
    pub fn scaled_partial_sum(&self, bounds: &[u64], words: &[u64]) -> BigInt {
        let d = self.d;
        if let Some(small) = &self.small {
            let mut acc: i128 = 0;
            for (t, v) in small.iter().enumerate() {
                let n = &self.idx[t * d..(t + 1) * d];
                if let Some(odd) = term_sign(n, bounds, words) {
                    if odd {
                        acc -= v;
                    } else {
                        acc += v;
                    }
                }
            }
            return BigInt::from(acc);
        }
        let mut acc = BigInt::zero();
        for (t, v) in self.nums.iter().enumerate() {
            let n = &self.idx[t * d..(t + 1) * d];
            if let Some(odd) = term_sign(n, bounds, words) {
                if odd {
                    acc -= v;
                } else {
                    acc += v;
                }
            }
        }
        acc
    }

    /// Floating-point cubic partial sum, for trend plots only.
    pub fn partial_sum_cube_approx(&self, n: u64, g: &DyadicPoint) -> Result<f64> {
        self.check_dim(g.dim())?;
        self.check_bounds(&vec![WalshIndex::new(n); self.d])?;
        let words = g.low_words();
        let bounds = vec![n; self.d];
        let mut acc = 0.0;
        for (t, (_, c)) in self.coeffs.iter().enumerate() {
            let idx = &self.idx[t * self.d..(t + 1) * self.d];
            if let Some(odd) = term_sign(idx, &bounds, &words) {
                let v = c.to_f64().unwrap_or(f64::NAN);
                acc += if odd { -v } else { v };
            }
        }
        Ok(acc)
    }

    /// `S_{2^k}` on every rank-`k` cube, indexed by [`DyadicCube::flat_index`],
    /// computed with a Walsh–Hadamard transform. The result is scaled by the
    /// common denominator.
    ///
    /// [`DyadicCube::flat_index`]: crate::dyadic::DyadicCube::flat_index
    pub fn fwht_table_scaled(&self, k: u32) -> Result<Vec<BigInt>> {
        if k > self.bound_rank {
            return Err(Error::InsufficientCoefficients {
                index: format!("2^{k}"),
                bound_rank: self.bound_rank,
            });
        }
        let bits = k * self.d as u32;
        if bits > MAX_TABLE_BITS {
            return Err(Error::SizeLimit(format!("rank-{k} table in dimension {}", self.d)));
        }
        let d = self.d;
        let positions: Vec<(usize, usize)> = (0..self.nums.len())
            .filter_map(|t| {
                let n = &self.idx[t * d..(t + 1) * d];
                n.iter()
                    .all(|&x| x >> k == 0)
                    .then(|| (t, n.iter().fold(0usize, |acc, &x| (acc << k) | x as usize)))
            })
            .collect();
        let len = 1usize << bits;
        let raw: Vec<BigInt> = match &self.small {
            Some(small) => {
                let mut a = vec![0i128; len];
                for &(t, p) in &positions {
                    a[p] += small[t];
                }
                hadamard_in_place(&mut a, bits);
                a.into_iter().map(BigInt::from).collect()
            }
            None => {
                let mut a = vec![BigInt::zero(); len];
                for &(t, p) in &positions {
                    a[p] += &self.nums[t];
                }
                hadamard_in_place(&mut a, bits);
                a
            }
        };
        Ok((0..len)
            .map(|cube| raw[reverse_chunks(cube, k, d)].clone())
            .collect())
    }

    /// `S_{2^k}(Δ)` on every rank-`k` cube, in flat cube order.
    pub fn fwht_table(&self, k: u32) -> Result<Vec<Rational>> {
        Ok(self
            .fwht_table_scaled(k)?
            .into_iter()
            .map(|v| BigRational::new(v, self.den.clone()))
            .collect())
    }

    pub fn to_json(&self) -> SeriesJson {
        SeriesJson {
            d: self.d,
            coeffs: self
                .coeffs
                .iter()
                .map(|(n, c)| CoeffJson {
                    n: n.clone(),
                    c: format_rational(c),
                })
                .collect(),
            bound_rank: self.bound_rank,
            seed: None,
        }
    }

    pub fn from_json(j: &SeriesJson) -> Result<Self> {
        let coeffs = j
            .coeffs
            .iter()
            .map(|t| Ok((t.n.clone(), parse_rational(&t.c)?)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(j.d, j.bound_rank, coeffs)
    }

    pub fn to_json_string(&self) -> String {
        serde_json::to_string_pretty(&self.to_json()).expect("serializable")
    }

    pub fn from_json_str(s: &str) -> Result<Self> {
        Self::from_json(&serde_json::from_str(s)?)
    }
}

// `Some(odd)` when the index lies inside the box, with the parity of the sign
#[inline]
fn term_sign(n: &[u64], bounds: &[u64], words: &[u64]) -> Option<bool> {
    let mut odd = false;
    for l in 0..n.len() {
        if n[l] >= bounds[l] {
            return None;
        }
        odd ^= parity_u64(n[l], words[l]);
    }
    Some(odd)
}

fn random_rational<R: Rng + ?Sized>(rng: &mut R) -> Rational {
    let p: i64 = rng.gen_range(-9..=9);
    let q: i64 = rng.gen_range(1..=8);
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// JSON form: `{ "d": 2, "coeffs": [ { "n": [1, 0], "c": "1/1" } ], "bound_rank": 1 }`.
#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct SeriesJson {
    pub d: usize,
    pub coeffs: Vec<CoeffJson>,
    pub bound_rank: u32,
    /// The seed a random series was drawn with, when it was.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
#[serde(deny_unknown_fields)]
pub struct CoeffJson {
    pub n: Vec<u64>,
    pub c: String,
}
