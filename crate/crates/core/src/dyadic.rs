//! The dyadic group, its finite powers and dyadic cubes.
//!
//! An element is a digit stream `g_0 g_1 g_2 ...` with `g_t` in {0, 1}. We keep the
//! first `K` digits explicitly and describe everything from index `K` on by a constant
//! tail. Digit 0 is the coarsest one: the rank-`k` interval containing `g` has index
//! `m` whose binary digits satisfy `m_t = g_{k-1-t}`, so the index is the bit reversal
//! of the first `k` digits.
//!
//! Group addition is digitwise XOR, tails included.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rational::Rational;

/// Largest rank accepted for cube indices, which are stored in `u64`.
pub const MAX_CUBE_RANK: u32 = 63;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Tail {
    /// All digits from the rank on are 0 (houses `t_+`).
    Zeros,
    /// All digits from the rank on are 1 (houses `t_-`).
    Ones,
}

impl Tail {
    pub fn bit(self) -> u8 {
        match self {
            Tail::Zeros => 0,
            Tail::Ones => 1,
        }
    }

    pub fn from_bit(b: u8) -> Tail {
        if b & 1 == 1 {
            Tail::Ones
        } else {
            Tail::Zeros
        }
    }

    fn word(self) -> u64 {
        match self {
            Tail::Zeros => 0,
            Tail::Ones => u64::MAX,
        }
    }

    fn xor(self, other: Tail) -> Tail {
        Tail::from_bit(self.bit() ^ other.bit())
    }
}

/// A point of the dyadic group at working rank `K >= 1`.
#[derive(Clone, Debug)]
pub struct DyadicElement {
    rank: u32,
    // bit t of the packed words is g_t; bits at and beyond `rank` are kept zero
    words: Vec<u64>,
    tail: Tail,
}

fn words_for(rank: u32) -> usize {
    (rank as usize).div_ceil(64)
}

fn low_mask(bits: u32) -> u64 {
    if bits >= 64 {
        u64::MAX
    } else {
        (1u64 << bits) - 1
    }
}

impl DyadicElement {
    /// Builds an element from explicit digits. An empty digit list is read as
    /// rank 1 with the first digit taken from the tail.
    pub fn new(digits: &[u8], tail: Tail) -> Result<Self> {
        if digits.iter().any(|&b| b > 1) {
            return Err(Error::Parse("digits must be 0 or 1".into()));
        }
        if digits.is_empty() {
            return Ok(Self::from_words(1, vec![tail.bit() as u64], tail));
        }
        let rank = digits.len() as u32;
        let mut words = vec![0u64; words_for(rank)];
        for (t, &b) in digits.iter().enumerate() {
            if b == 1 {
                words[t / 64] |= 1 << (t % 64);
            }
        }
        Ok(Self::from_words(rank, words, tail))
    }

    /// Builds an element from packed digits (bit `t` of the stream is bit `t % 64`
    /// of word `t / 64`). Bits beyond `rank` are ignored.
    pub fn from_words(rank: u32, mut words: Vec<u64>, tail: Tail) -> Self {
        let rank = rank.max(1);
        words.resize(words_for(rank), 0);
        let rem = rank % 64;
        if rem != 0 {
            let last = words.len() - 1;
            words[last] &= low_mask(rem);
        }
        DyadicElement { rank, words, tail }
    }

    pub fn zero(rank: u32) -> Self {
        Self::from_words(rank, Vec::new(), Tail::Zeros)
    }

    /// The element with all digits equal to 1.
    pub fn all_ones(rank: u32) -> Self {
        Self::from_words(rank, vec![u64::MAX; words_for(rank.max(1))], Tail::Ones)
    }

    /// `e_k`: digit `k` is 1, all others 0. The rank is `k + 1`.
    pub fn basis(k: u32) -> Self {
        Self::zero(k + 1).flip_digit(k)
    }

    /// The element whose first `k` digits give the rank-`k` interval with index `m`.
    pub fn from_interval(k: u32, m: u64, tail: Tail) -> Self {
        assert!(k <= MAX_CUBE_RANK, "interval rank above {MAX_CUBE_RANK}");
        let w = if k == 0 { 0 } else { m.reverse_bits() >> (64 - k) };
        Self::from_words(k.max(1), vec![w], tail).with_tail_digits_from(k)
    }

    // for k = 0 the single materialized digit must come from the tail
    fn with_tail_digits_from(mut self, k: u32) -> Self {
        if k == 0 && self.tail == Tail::Ones {
            self.words[0] |= 1;
        }
        self
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, rank: u32, tail: Tail) -> Self {
        let rank = rank.max(1);
        let words = (0..words_for(rank)).map(|_| rng.gen::<u64>()).collect();
        Self::from_words(rank, words, tail)
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn tail(&self) -> Tail {
        self.tail
    }

    /// Digit `g_t`, read from the tail when `t >= K`.
    pub fn digit(&self, t: u64) -> u8 {
        if t < self.rank as u64 {
            ((self.words[(t / 64) as usize] >> (t % 64)) & 1) as u8
        } else {
            self.tail.bit()
        }
    }

    pub fn digits(&self) -> Vec<u8> {
        (0..self.rank as u64).map(|t| self.digit(t)).collect()
    }

    /// Digits `64w .. 64w+63` packed into a word, tail digits materialized.
    pub fn word(&self, w: usize) -> u64 {
        let start = w as u64 * 64;
        let rank = self.rank as u64;
        if start >= rank {
            return self.tail.word();
        }
        let stored = self.words[w];
        let valid = rank - start;
        if valid >= 64 {
            stored
        } else {
            stored | (self.tail.word() & !low_mask(valid as u32))
        }
    }

    /// The same stream at a larger working rank.
    pub fn extended(&self, rank: u32) -> Self {
        if rank <= self.rank {
            return self.clone();
        }
        let words = (0..words_for(rank)).map(|w| self.word(w)).collect();
        Self::from_words(rank, words, self.tail)
    }

    /// Rank-`rank` approximation: keeps the first `rank` digits and uses the given tail.
    pub fn truncated(&self, rank: u32, tail: Tail) -> Self {
        let rank = rank.max(1);
        let words = (0..words_for(rank)).map(|w| self.word(w)).collect();
        Self::from_words(rank, words, tail)
    }

    /// `g ⊕ e_k`.
    pub fn flip_digit(&self, k: u32) -> Self {
        let mut out = self.extended(k + 1);
        out.words[(k / 64) as usize] ^= 1 << (k % 64);
        out
    }

    pub fn add(&self, other: &DyadicElement) -> DyadicElement {
        let rank = self.rank.max(other.rank);
        let words = (0..words_for(rank))
            .map(|w| self.word(w) ^ other.word(w))
            .collect();
        Self::from_words(rank, words, self.tail.xor(other.tail))
    }

    /// The value `F(g) = Σ g_k / 2^{k+1}` as an exact rational.
    pub fn to_unit_interval(&self) -> Rational {
        let rank = self.rank as usize;
        let mut num = BigInt::from(0);
        for t in 0..rank {
            num <<= 1;
            if self.digit(t as u64) == 1 {
                num += 1;
            }
        }
        num += self.tail.bit();
        BigRational::new(num, BigInt::from(1) << rank)
    }

    /// Index of the rank-`k` interval containing the element.
    pub fn interval_index(&self, k: u32) -> u64 {
        assert!(k <= MAX_CUBE_RANK, "interval rank above {MAX_CUBE_RANK}");
        if k == 0 {
            0
        } else {
            self.word(0).reverse_bits() >> (64 - k)
        }
    }

    /// True iff the first `k` digits vanish, i.e. the element lies in `Δ_0^{(k)}`.
    pub fn in_zero_interval(&self, k: u64) -> bool {
        let full = (k / 64) as usize;
        for w in 0..full {
            if self.word(w) != 0 {
                return false;
            }
        }
        let rem = (k % 64) as u32;
        rem == 0 || self.word(full) & low_mask(rem) == 0
    }

    /// Index of the first nonzero digit, `None` for the zero element.
    pub fn first_nonzero_digit(&self) -> Option<u64> {
        for w in 0..words_for(self.rank) {
            let v = self.word(w);
            if v != 0 {
                return Some(w as u64 * 64 + v.trailing_zeros() as u64);
            }
        }
        match self.tail {
            Tail::Ones => Some(self.rank as u64),
            Tail::Zeros => None,
        }
    }

    // shortest representation of the same stream
    fn canonical(&self) -> (u32, Vec<u64>, Tail) {
        let mut rank = self.rank;
        while rank > 1 && self.digit(rank as u64 - 1) == self.tail.bit() {
            rank -= 1;
        }
        let e = self.truncated(rank, self.tail);
        (e.rank, e.words, e.tail)
    }
}

impl PartialEq for DyadicElement {
    fn eq(&self, other: &Self) -> bool {
        if self.tail != other.tail {
            return false;
        }
        let rank = self.rank.max(other.rank);
        (0..words_for(rank)).all(|w| self.word(w) == other.word(w))
    }
}

impl Eq for DyadicElement {}

impl Hash for DyadicElement {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.canonical().hash(state);
    }
}

impl fmt::Display for DyadicElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for t in 0..self.rank as u64 {
            write!(f, "{}", self.digit(t))?;
        }
        write!(f, "|{}", self.tail.bit())
    }
}

impl FromStr for DyadicElement {
    type Err = Error;

    /// Parses `digits|tail`, e.g. `0110|0`. A missing tail marker means `|0`.
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (digits, tail) = match s.split_once('|') {
            Some((d, t)) => (d, t),
            None => (s, "0"),
        };
        let tail = match tail {
            "0" => Tail::Zeros,
            "1" => Tail::Ones,
            _ => return Err(Error::Parse(format!("bad tail marker in `{s}`"))),
        };
        let digits: Vec<u8> = digits
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                _ => Err(Error::Parse(format!("bad digit `{c}` in `{s}`"))),
            })
            .collect::<Result<_>>()?;
        DyadicElement::new(&digits, tail)
    }
}

impl Serialize for DyadicElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for DyadicElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Membership test for the contraction relation `C_q(g) = C_p(h)`.
///
/// For `q <= p` this holds iff `g ∈ C_{p-q}(h)`, i.e. `g_{t+(p-q)} = h_t` for every
/// `t >= 0`: the stream of `g` from index `p-q` on reproduces `h`. For `q > p` the
/// roles are swapped. Tails take part in the comparison.
pub fn contract_eq(g: &DyadicElement, q: u32, h: &DyadicElement, p: u32) -> bool {
    if q > p {
        return contract_eq(h, p, g, q);
    }
    let shift = (p - q) as u64;
    // past this index both sides read tails, so one more comparison settles the rest
    let horizon = (g.rank() as u64).saturating_sub(shift).max(h.rank() as u64) + 1;
    (0..horizon).all(|t| g.digit(t + shift) == h.digit(t))
}

/// An element of `C_q(g)`: the given low digits followed by the digits of `g`.
pub fn contract(g: &DyadicElement, q: u32, low: &[u8]) -> DyadicElement {
    let mut digits: Vec<u8> = (0..q as usize).map(|t| low.get(t).copied().unwrap_or(0)).collect();
    digits.extend(g.digits());
    DyadicElement::new(&digits, g.tail()).expect("digits are bits")
}

/// A point of `G^d`; all coordinates share one working rank.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DyadicPoint {
    coords: Vec<DyadicElement>,
}

impl DyadicPoint {
    pub fn new(coords: Vec<DyadicElement>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::Malformed("a point needs at least one coordinate".into()));
        }
        let rank = coords.iter().map(|c| c.rank()).max().unwrap_or(1);
        Ok(DyadicPoint {
            coords: coords.iter().map(|c| c.extended(rank)).collect(),
        })
    }

    pub fn zero(d: usize, rank: u32) -> Self {
        DyadicPoint {
            coords: vec![DyadicElement::zero(rank); d.max(1)],
        }
    }

    /// The point whose coordinates all equal `g`.
    pub fn diagonal(d: usize, g: &DyadicElement) -> Self {
        DyadicPoint {
            coords: vec![g.clone(); d.max(1)],
        }
    }

    pub fn random<R: Rng + ?Sized>(rng: &mut R, d: usize, rank: u32) -> Self {
        let coords = (0..d.max(1))
            .map(|_| DyadicElement::random(rng, rank, Tail::Zeros))
            .collect();
        DyadicPoint { coords }
    }

    /// The lower-left point of a cube: its digits below the cube rank, zero tail.
    pub fn corner(cube: &DyadicCube) -> Self {
        DyadicPoint {
            coords: cube
                .index()
                .iter()
                .map(|&m| DyadicElement::from_interval(cube.rank(), m, Tail::Zeros))
                .collect(),
        }
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn rank(&self) -> u32 {
        self.coords[0].rank()
    }

    pub fn coord(&self, j: usize) -> &DyadicElement {
        &self.coords[j]
    }

    pub fn coords(&self) -> &[DyadicElement] {
        &self.coords
    }

    pub fn into_coords(self) -> Vec<DyadicElement> {
        self.coords
    }

    pub fn add(&self, other: &DyadicPoint) -> Result<DyadicPoint> {
        if self.dim() != other.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(DyadicPoint {
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a.add(b))
                .collect(),
        })
    }

    /// `g ⊕ e_k^σ`: flips digit `k` in every coordinate where `σ_j = 1`.
    pub fn shifted(&self, sigma: &SignVector, k: u32) -> DyadicPoint {
        let coords = self
            .coords
            .iter()
            .zip(sigma.entries())
            .map(|(c, &s)| if s == 1 { c.flip_digit(k) } else { c.extended(k + 1) })
            .collect();
        DyadicPoint::new(coords).expect("nonempty")
    }

    pub fn extended(&self, rank: u32) -> DyadicPoint {
        DyadicPoint {
            coords: self.coords.iter().map(|c| c.extended(rank)).collect(),
        }
    }

    pub fn cube_of(&self, k: u32) -> DyadicCube {
        DyadicCube {
            rank: k,
            index: self.coords.iter().map(|c| c.interval_index(k)).collect(),
        }
    }

    /// The first 64 digits of each coordinate, packed.
    pub fn low_words(&self) -> Vec<u64> {
        self.coords.iter().map(|c| c.word(0)).collect()
    }
}

impl fmt::Display for DyadicPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (j, c) in self.coords.iter().enumerate() {
            if j > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        Ok(())
    }
}

impl FromStr for DyadicPoint {
    type Err = Error;

    /// Comma-separated element literals, e.g. `01|0,1|1`.
    fn from_str(s: &str) -> Result<Self> {
        let coords = s
            .split(',')
            .map(|c| c.parse())
            .collect::<Result<Vec<DyadicElement>>>()?;
        DyadicPoint::new(coords)
    }
}

impl Serialize for DyadicPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.coords.serialize(s)
    }
}

impl<'de> Deserialize<'de> for DyadicPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let coords = Vec::<DyadicElement>::deserialize(d)?;
        DyadicPoint::new(coords).map_err(serde::de::Error::custom)
    }
}

/// The rank-`k` cube `Δ^{(k)}_m`, a product of rank-`k` intervals.
/// Serialized as `{"rank": k, "index": [m1, ..., md]}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct DyadicCube {
    rank: u32,
    index: Vec<u64>,
}

impl<'de> Deserialize<'de> for DyadicCube {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(deny_unknown_fields)]
        struct Raw {
            rank: u32,
            index: Vec<u64>,
        }
        let raw = Raw::deserialize(d)?;
        DyadicCube::new(raw.rank, raw.index).map_err(serde::de::Error::custom)
    }
}

impl DyadicCube {
    pub fn new(rank: u32, index: Vec<u64>) -> Result<Self> {
        if index.is_empty() {
            return Err(Error::Malformed("a cube needs at least one coordinate".into()));
        }
        if rank > MAX_CUBE_RANK {
            return Err(Error::SizeLimit(format!("cube rank {rank} above {MAX_CUBE_RANK}")));
        }
        if let Some(&m) = index.iter().find(|&&m| m >> rank != 0) {
            return Err(Error::Malformed(format!("index {m} out of range at rank {rank}")));
        }
        Ok(DyadicCube { rank, index })
    }

    pub fn whole(d: usize) -> Self {
        DyadicCube {
            rank: 0,
            index: vec![0; d.max(1)],
        }
    }

    /// Row-major position among the `2^{kd}` cubes of rank `k`, coordinate 0 slowest.
    pub fn flat_index(&self) -> usize {
        let k = self.rank;
        self.index.iter().fold(0usize, |acc, &m| (acc << k) | m as usize)
    }

    pub fn from_flat(rank: u32, d: usize, mut flat: usize) -> Self {
        let mask = low_mask(rank) as usize;
        let mut index = vec![0u64; d];
        for j in (0..d).rev() {
            index[j] = (flat & mask) as u64;
            flat >>= rank;
        }
        DyadicCube { rank, index }
    }

    /// All cubes of the given rank in flat order.
    pub fn all(rank: u32, d: usize) -> impl Iterator<Item = DyadicCube> {
        let count = 1usize << (rank as usize * d);
        (0..count).map(move |f| DyadicCube::from_flat(rank, d, f))
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    pub fn index(&self) -> &[u64] {
        &self.index
    }

    pub fn dim(&self) -> usize {
        self.index.len()
    }

    /// Haar measure `2^{-kd}`.
    pub fn measure(&self) -> Rational {
        crate::rational::pow2(-(self.rank as i64) * self.dim() as i64)
    }

    /// The `2^d` children with indices `2m + σ`, in flat order.
    pub fn subdivide(&self) -> Vec<DyadicCube> {
        let d = self.dim();
        (0..1usize << d)
            .map(|bits| DyadicCube {
                rank: self.rank + 1,
                index: (0..d)
                    .map(|j| 2 * self.index[j] + ((bits >> (d - 1 - j)) & 1) as u64)
                    .collect(),
            })
            .collect()
    }

    pub fn parent(&self) -> Option<DyadicCube> {
        (self.rank > 0).then(|| DyadicCube {
            rank: self.rank - 1,
            index: self.index.iter().map(|m| m >> 1).collect(),
        })
    }

    /// The ancestor (or self) at a lower rank.
    pub fn ancestor(&self, rank: u32) -> DyadicCube {
        assert!(rank <= self.rank);
        DyadicCube {
            rank,
            index: self.index.iter().map(|m| m >> (self.rank - rank)).collect(),
        }
    }

    pub fn contains(&self, other: &DyadicCube) -> bool {
        other.dim() == self.dim() && other.rank >= self.rank && other.ancestor(self.rank) == *self
    }

    pub fn contains_point(&self, g: &DyadicPoint) -> bool {
        g.dim() == self.dim() && g.cube_of(self.rank) == *self
    }

    /// All descendants at rank `rank >= self.rank`, in flat order of the subgrid.
    pub fn descendants(&self, rank: u32) -> impl Iterator<Item = DyadicCube> + '_ {
        let extra = rank - self.rank;
        let d = self.dim();
        (0..1usize << (extra as usize * d)).map(move |f| {
            let sub = DyadicCube::from_flat(extra, d, f);
            DyadicCube {
                rank,
                index: (0..d)
                    .map(|j| (self.index[j] << extra) | sub.index[j])
                    .collect(),
            }
        })
    }
}

impl fmt::Display for DyadicCube {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:", self.rank)?;
        for (j, m) in self.index.iter().enumerate() {
            if j > 0 {
                write!(f, ",")?;
            }
            write!(f, "{m}")?;
        }
        Ok(())
    }
}

impl FromStr for DyadicCube {
    type Err = Error;

    /// Parses `k:m1,...,md`.
    fn from_str(s: &str) -> Result<Self> {
        let (k, ms) = s
            .trim()
            .split_once(':')
            .ok_or_else(|| Error::Parse(format!("cube literal `{s}` lacks `:`")))?;
        let rank: u32 = k
            .trim()
            .parse()
            .map_err(|_| Error::Parse(format!("bad rank in `{s}`")))?;
        let index = ms
            .split(',')
            .map(|m| {
                m.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::Parse(format!("bad index in `{s}`")))
            })
            .collect::<Result<Vec<_>>>()?;
        DyadicCube::new(rank, index)
    }
}

/// A vector `σ ∈ {0,1}^d`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SignVector {
    entries: Vec<u8>,
}

impl SignVector {
    pub fn new(entries: Vec<u8>) -> Self {
        assert!(entries.iter().all(|&b| b <= 1));
        SignVector { entries }
    }

    pub fn from_bits(d: usize, bits: usize) -> Self {
        SignVector {
            entries: (0..d).map(|j| ((bits >> (d - 1 - j)) & 1) as u8).collect(),
        }
    }

    pub fn entries(&self) -> &[u8] {
        &self.entries
    }

    pub fn weight(&self) -> usize {
        self.entries.iter().filter(|&&b| b == 1).count()
    }

    pub fn is_even(&self) -> bool {
        self.weight().is_multiple_of(2)
    }

    /// All of `Σ^d`.
    pub fn all(d: usize) -> impl Iterator<Item = SignVector> {
        (0..1usize << d).map(move |b| SignVector::from_bits(d, b))
    }

    /// `Σ^d_2`, the vectors with even weight.
    pub fn even(d: usize) -> impl Iterator<Item = SignVector> {
        SignVector::all(d).filter(|s| s.is_even())
    }

    /// The shift vector `e_k^σ`.
    pub fn shift_vector(&self, k: u32) -> DyadicPoint {
        let coords = self
            .entries
            .iter()
            .map(|&s| {
                if s == 1 {
                    DyadicElement::basis(k)
                } else {
                    DyadicElement::zero(k + 1)
                }
            })
            .collect();
        DyadicPoint::new(coords).expect("nonempty")
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn el(s: &str) -> DyadicElement {
        s.parse().unwrap()
    }

    #[test]
    fn text_round_trip() {
        for s in ["0110|0", "1|1", "000|0", "10101010101|1"] {
            assert_eq!(el(s).to_string(), s);
        }
        assert!("012|0".parse::<DyadicElement>().is_err());
        assert!("01|2".parse::<DyadicElement>().is_err());
    }

    #[test]
    fn equality_is_stream_based() {
        assert_eq!(el("1|0"), el("1000|0"));
        assert_eq!(el("01|1"), el("0111111|1"));
        assert_ne!(el("01|1"), el("01|0"));
        assert_ne!(el("01|0"), el("011|0"));
    }

    #[test]
    fn self_inverse() {
        let g = el("1011|1");
        let z = g.add(&g);
        assert_eq!(z, DyadicElement::zero(1));
    }

    #[test]
    fn disjoint_basis_sum() {
        let s = DyadicElement::basis(0).add(&DyadicElement::basis(1));
        assert_eq!(s.digits(), vec![1, 1]);
        assert_eq!(s.tail(), Tail::Zeros);
    }

    #[test]
    fn tail_is_materialized_in_sums() {
        // t_- of 1/2 is 0111...; adding e_0 gives the all-ones stream
        let t_minus = el("01111111|1");
        let s = t_minus.add(&DyadicElement::basis(0));
        assert_eq!(s, DyadicElement::all_ones(8));
        assert_eq!(s.digits(), vec![1; 8]);
    }

    #[test]
    fn cube_of_examples() {
        let g = DyadicPoint::zero(2, 4);
        assert_eq!(g.cube_of(3), DyadicCube::new(3, vec![0, 0]).unwrap());
        let e0 = DyadicPoint::new(vec![DyadicElement::basis(0)]).unwrap();
        assert_eq!(e0.cube_of(1).index(), &[1]);
        let g = DyadicPoint::new(vec![el("010|0")]).unwrap();
        assert_eq!(g.cube_of(3).index(), &[2]);
    }

    #[test]
    fn cube_of_matches_interval_enumeration() {
        // an element lies in the rank-k interval m iff F(g) is in [m/2^k, (m+1)/2^k]
        // and its first k digits agree with those of the interval's corner
        for k in 1..=4u32 {
            for bits in 0..(1u64 << k) {
                let digits: Vec<u8> = (0..k).map(|t| ((bits >> t) & 1) as u8).collect();
                let g = DyadicElement::new(&digits, Tail::Zeros).unwrap();
                let hits: Vec<u64> = (0..1u64 << k)
                    .filter(|&m| {
                        let c = DyadicElement::from_interval(k, m, Tail::Zeros);
                        (0..k as u64).all(|t| c.digit(t) == g.digit(t))
                    })
                    .collect();
                assert_eq!(hits, vec![g.interval_index(k)]);
            }
        }
    }

    #[test]
    fn unit_interval_values() {
        assert_eq!(DyadicElement::zero(3).to_unit_interval(), ratio(0, 1));
        assert_eq!(DyadicElement::basis(0).to_unit_interval(), ratio(1, 2));
        assert_eq!(el("01|1").to_unit_interval(), ratio(1, 2));
        assert_eq!(el("1|1").to_unit_interval(), ratio(1, 1));
    }

    #[test]
    fn unit_interval_respects_intervals() {
        for k in 0..=6u32 {
            for m in 0..(1u64 << k) {
                for tail in [Tail::Zeros, Tail::Ones] {
                    let g = DyadicElement::from_interval(k, m, tail).extended(k + 3);
                    let x = g.to_unit_interval();
                    assert!(x >= ratio(m as i64, 1 << k));
                    assert!(x <= ratio(m as i64 + 1, 1 << k));
                }
            }
        }
    }

    #[test]
    fn measures() {
        assert_eq!(DyadicCube::whole(2).measure(), ratio(1, 1));
        assert_eq!(DyadicCube::new(3, vec![1, 5]).unwrap().measure(), ratio(1, 64));
    }

    #[test]
    fn subdivision() {
        let kids = DyadicCube::whole(2).subdivide();
        let idx: Vec<Vec<u64>> = kids.iter().map(|c| c.index().to_vec()).collect();
        assert_eq!(idx, vec![vec![0, 0], vec![0, 1], vec![1, 0], vec![1, 1]]);
        let parent = DyadicCube::new(2, vec![3, 1]).unwrap();
        let total = parent
            .subdivide()
            .iter()
            .map(|c| c.measure())
            .fold(ratio(0, 1), |a, b| a + b);
        assert_eq!(total, parent.measure());
        assert!(parent.subdivide().iter().all(|c| parent.contains(c)));
    }

    #[test]
    fn cube_text() {
        let c: DyadicCube = "3:5,2".parse().unwrap();
        assert_eq!(c.to_string(), "3:5,2");
        assert!("2:4,0".parse::<DyadicCube>().is_err());
        assert_eq!(DyadicCube::from_flat(3, 2, c.flat_index()), c);
    }

    #[test]
    fn contraction_examples() {
        let g = el("10110|1");
        assert!(contract_eq(&g, 0, &g, 0));
        assert!(contract_eq(&g, 3, &g, 3));
        let e0 = DyadicElement::basis(0);
        let e1 = DyadicElement::basis(1);
        // e_1 ∈ C_1(e_0): the stream of e_1 from index 1 on is that of e_0
        assert!(contract_eq(&e1, 0, &e0, 1));
        assert!(!contract_eq(&e0, 0, &e1, 1));
        assert!(!contract_eq(&e0, 0, &e0, 1));
        // the swap rule
        assert!(contract_eq(&e0, 1, &e1, 0));
    }

    #[test]
    fn contraction_tails() {
        // 0|1 shifted by one is 00111...; it belongs to C_1(0|1)
        assert!(contract_eq(&el("00|1"), 0, &el("0|1"), 1));
        assert!(!contract_eq(&el("00|1"), 0, &el("0|0"), 1));
    }

    #[test]
    fn contract_builds_members() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for q in 0..5 {
            let h = DyadicElement::random(&mut rng, 9, Tail::Ones);
            let g = contract(&h, q, &[1, 0, 1, 1, 0]);
            assert!(contract_eq(&g, 0, &h, q));
        }
    }

    #[test]
    fn zero_interval_and_first_digit() {
        assert!(el("0001|0").in_zero_interval(3));
        assert!(!el("0001|0").in_zero_interval(4));
        assert!(el("0|1").in_zero_interval(1));
        assert!(!el("0|1").in_zero_interval(2));
        assert_eq!(el("0010|0").first_nonzero_digit(), Some(2));
        assert_eq!(el("00|1").first_nonzero_digit(), Some(2));
        assert_eq!(el("00|0").first_nonzero_digit(), None);
    }

    #[test]
    fn long_elements() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let a = DyadicElement::random(&mut rng, 130, Tail::Ones);
        let b = DyadicElement::random(&mut rng, 70, Tail::Zeros);
        let s = a.add(&b);
        for t in 0..200u64 {
            assert_eq!(s.digit(t), a.digit(t) ^ b.digit(t));
        }
        assert_eq!(s.add(&b), a);
    }

    #[test]
    fn sign_vectors() {
        assert_eq!(SignVector::all(3).count(), 8);
        assert_eq!(SignVector::even(3).count(), 4);
        let s = SignVector::new(vec![1, 0, 1]);
        assert!(s.is_even());
        let v = s.shift_vector(2);
        assert_eq!(v.coord(0), &DyadicElement::basis(2));
        assert_eq!(v.coord(1), &DyadicElement::zero(1));
    }

    #[test]
    fn descendants_in_flat_order() {
        let c = DyadicCube::new(1, vec![1, 0]).unwrap();
        let ds: Vec<DyadicCube> = c.descendants(2).collect();
        assert_eq!(ds, c.subdivide());
        assert!(c.descendants(4).all(|x| c.contains(&x)));
    }
}
