//! Walsh functions in Paley enumeration, Rademacher functions and Dirichlet kernels.

use std::fmt;
use std::ops::{AddAssign, Mul, Neg, SubAssign};
use std::str::FromStr;

use num_bigint::{BigInt, BigUint};
use num_traits::{One, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::dyadic::{DyadicElement, DyadicPoint};
use crate::error::{Error, Result};

/// The value of a Walsh function.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_parity(odd: bool) -> Sign {
        if odd {
            Sign::Minus
        } else {
            Sign::Plus
        }
    }

    pub fn is_minus(self) -> bool {
        self == Sign::Minus
    }

    pub fn to_i64(self) -> i64 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }
}

impl Mul for Sign {
    type Output = Sign;

    fn mul(self, rhs: Sign) -> Sign {
        Sign::from_parity(self.is_minus() != rhs.is_minus())
    }
}

impl Neg for Sign {
    type Output = Sign;

    fn neg(self) -> Sign {
        Sign::from_parity(!self.is_minus())
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_i64())
    }
}

/// A nonnegative Walsh index `n`, with its dyadic coefficients `n_k`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct WalshIndex(pub BigUint);

impl WalshIndex {
    pub fn new(n: u64) -> Self {
        WalshIndex(BigUint::from(n))
    }

    pub fn pow2(k: u32) -> Self {
        WalshIndex(BigUint::one() << k as usize)
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// The dyadic coefficient `n_k`.
    pub fn digit(&self, k: u64) -> u8 {
        self.0.bit(k) as u8
    }

    /// `#n`, the number of nonzero dyadic coefficients.
    pub fn popcount(&self) -> u64 {
        self.0.count_ones()
    }

    /// `k_1 > ... > k_s` with `n = 2^{k_1} + ... + 2^{k_s}`.
    pub fn binary_expansion(&self) -> Vec<u64> {
        (0..self.0.bits()).rev().filter(|&k| self.0.bit(k)).collect()
    }

    /// `⌊log₂ n⌋`, or `None` for zero.
    pub fn floor_log2(&self) -> Option<u64> {
        self.0.bits().checked_sub(1)
    }

    pub fn to_u64(&self) -> Option<u64> {
        self.0.to_u64()
    }

    fn words(&self) -> Vec<u64> {
        self.0.to_u64_digits()
    }
}

impl From<u64> for WalshIndex {
    fn from(n: u64) -> Self {
        WalshIndex::new(n)
    }
}

impl fmt::Display for WalshIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

impl FromStr for WalshIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        s.trim()
            .parse::<BigUint>()
            .map(WalshIndex)
            .map_err(|_| Error::Parse(format!("bad index `{s}`")))
    }
}

/// A multi-index `n = (n^1, ..., n^d)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct MultiIndex(pub Vec<WalshIndex>);

impl MultiIndex {
    pub fn from_u64s(ns: &[u64]) -> Self {
        MultiIndex(ns.iter().map(|&n| WalshIndex::new(n)).collect())
    }

    /// `N·1`.
    pub fn diagonal(d: usize, n: u64) -> Self {
        MultiIndex(vec![WalshIndex::new(n); d])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[WalshIndex] {
        &self.0
    }

    /// Components as `u64`, if all fit.
    pub fn to_u64s(&self) -> Option<Vec<u64>> {
        self.0.iter().map(|n| n.to_u64()).collect()
    }
}

impl fmt::Display for MultiIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (j, n) in self.0.iter().enumerate() {
            if j > 0 {
                write!(f, ",")?;
            }
            write!(f, "{n}")?;
        }
        write!(f, ")")
    }
}

/// Parity of `popcount(n & g)` over the first 64 digits.
#[inline]
pub fn parity_u64(n: u64, g_word: u64) -> bool {
    (n & g_word).count_ones() & 1 == 1
}

/// `W_n(g) = ∏_k (-1)^{g_k n_k}`.
pub fn walsh_eval(n: &WalshIndex, g: &DyadicElement) -> Sign {
    let odd = n
        .words()
        .iter()
        .enumerate()
        .fold(false, |acc, (w, &nw)| acc ^ parity_u64(nw, g.word(w)));
    Sign::from_parity(odd)
}

/// Fast path for `n < 2^64`.
pub fn walsh_eval_u64(n: u64, g: &DyadicElement) -> Sign {
    Sign::from_parity(parity_u64(n, g.word(0)))
}

/// `W_n(g) = ∏_l W_{n^l}(g^l)`.
pub fn walsh_eval_multi(n: &MultiIndex, g: &DyadicPoint) -> Result<Sign> {
    check_dim(n.dim(), g.dim())?;
    Ok(n.0
        .iter()
        .zip(g.coords())
        .fold(Sign::Plus, |acc, (nl, gl)| acc * walsh_eval(nl, gl)))
}

/// `R_k(g) = (-1)^{g_k} = W_{2^k}(g)`.
pub fn rademacher(k: u64, g: &DyadicElement) -> Sign {
    Sign::from_parity(g.digit(k) == 1)
}

fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected != got {
        return Err(Error::DimensionMismatch { expected, got });
    }
    Ok(())
}

/// `D_N(g) = Σ_{n<N} W_n(g)` by direct summation. This is the oracle for
/// [`dirichlet_closed`]; it is only practical for moderate `N`.
pub fn dirichlet_naive(n: &WalshIndex, g: &DyadicElement) -> Result<BigInt> {
    if n.is_zero() {
        return Err(Error::ZeroIndex);
    }
    let count = n
        .to_u64()
        .filter(|&c| c <= 1 << 32)
        .ok_or_else(|| Error::SizeLimit("naive kernel sums are limited to N <= 2^32".into()))?;
    let mut total: i64 = 0;
    for m in 0..count {
        total += walsh_eval_u64(m, g).to_i64();
    }
    Ok(BigInt::from(total))
}

/// `D_N` from the binary expansion `N = 2^{k_1} + ... + 2^{k_s}`:
/// `D_N = Σ_j R_{k_1}...R_{k_{j-1}} D_{2^{k_j}}` with `D_{2^k}(g) = 2^k` on
/// `Δ_0^{(k)}` and 0 elsewhere.
pub fn dirichlet_closed(n: &WalshIndex, g: &DyadicElement) -> Result<BigInt> {
    if n.is_zero() {
        return Err(Error::ZeroIndex);
    }
    let mut total = BigInt::zero();
    let mut sign = Sign::Plus;
    for k in n.binary_expansion() {
        if g.in_zero_interval(k) {
            let term = BigInt::one() << k as usize;
            match sign {
                Sign::Plus => total += term,
                Sign::Minus => total -= term,
            }
        }
        sign = sign * rademacher(k, g);
    }
    Ok(total)
}

/// `D_N(g) = ∏_l D_{N^l}(g^l)`.
pub fn dirichlet_multi(n: &MultiIndex, g: &DyadicPoint) -> Result<BigInt> {
    check_dim(n.dim(), g.dim())?;
    let mut out = BigInt::one();
    for (nl, gl) in n.0.iter().zip(g.coords()) {
        out *= dirichlet_closed(nl, gl)?;
        if out.is_zero() {
            // keep validating the remaining components
            if n.0.iter().any(|c| c.is_zero()) {
                return Err(Error::ZeroIndex);
            }
            break;
        }
    }
    Ok(out)
}

/// The lowest exponent `k_s` in the binary expansion of `N`. The kernel `D_N`
/// vanishes at every `g` outside `Δ_0^{(k_s)}`.
pub fn vanishing_rank(n: &WalshIndex) -> Result<u64> {
    n.0.trailing_zeros().ok_or(Error::ZeroIndex)
}

/// In-place Walsh–Hadamard transform over `bits` index bits:
/// `out[x] = Σ_n in[n] (-1)^{popcount(n & x)}`.
pub fn hadamard_in_place<T>(data: &mut [T], bits: u32)
where
    T: Clone + for<'a> AddAssign<&'a T> + for<'a> SubAssign<&'a T>,
{
    let len = 1usize << bits;
    assert_eq!(data.len(), len);
    let mut half = 1;
    while half < len {
        for block in (0..len).step_by(2 * half) {
            for i in block..block + half {
                let (lo, hi) = data.split_at_mut(i + half);
                let b = hi[0].clone();
                hi[0] = lo[i].clone();
                hi[0] -= &b;
                lo[i] += &b;
            }
        }
        half *= 2;
    }
}

/// Reverses the low `k` bits of each `k`-bit chunk of a flat cube index; maps cube
/// indices to packed digit positions and back.
pub fn reverse_chunks(flat: usize, k: u32, d: usize) -> usize {
    if k == 0 {
        return 0;
    }
    let mask = (1usize << k) - 1;
    let mut out = 0usize;
    for j in 0..d {
        let shift = k as usize * (d - 1 - j);
        let m = (flat >> shift) & mask;
        let r = (m as u64).reverse_bits() >> (64 - k);
        out |= (r as usize) << shift;
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dyadic::{DyadicElement, Tail};

    fn el(s: &str) -> DyadicElement {
        s.parse().unwrap()
    }

    fn w(n: u64) -> WalshIndex {
        WalshIndex::new(n)
    }

    #[test]
    fn walsh_examples() {
        let g = el("1101|1");
        assert_eq!(walsh_eval(&w(0), &g), Sign::Plus);
        assert_eq!(walsh_eval(&w(1), &DyadicElement::basis(0)), Sign::Minus);
        let g = DyadicElement::basis(0).add(&DyadicElement::basis(2));
        assert_eq!(walsh_eval(&w(5), &g), Sign::Plus);
    }

    #[test]
    fn walsh_uses_tail_digits() {
        // digits beyond the rank come from the tail
        assert_eq!(walsh_eval(&w(1 << 10), &el("0|1")), Sign::Minus);
        assert_eq!(walsh_eval(&w(1 << 10), &el("0|0")), Sign::Plus);
        let big = WalshIndex(BigUint::one() << 100usize);
        assert_eq!(walsh_eval(&big, &el("0|1")), Sign::Minus);
    }

    #[test]
    fn multi_examples() {
        let g = DyadicPoint::new(vec![DyadicElement::basis(0), DyadicElement::basis(1)]).unwrap();
        assert_eq!(walsh_eval_multi(&MultiIndex::from_u64s(&[0, 0]), &g).unwrap(), Sign::Plus);
        assert_eq!(walsh_eval_multi(&MultiIndex::from_u64s(&[1, 2]), &g).unwrap(), Sign::Plus);
        assert!(walsh_eval_multi(&MultiIndex::from_u64s(&[1]), &g).is_err());
    }

    #[test]
    fn rademacher_examples() {
        assert_eq!(rademacher(0, &DyadicElement::zero(3)), Sign::Plus);
        assert_eq!(rademacher(2, &DyadicElement::basis(2)), Sign::Minus);
        let g = el("0110101101|0");
        for k in 0..=10 {
            assert_eq!(rademacher(k, &g), walsh_eval(&WalshIndex::pow2(k as u32), &g));
        }
    }

    #[test]
    fn kernel_examples() {
        let zero = DyadicElement::zero(8);
        let e0 = DyadicElement::basis(0);
        assert_eq!(dirichlet_naive(&w(1), &e0).unwrap(), BigInt::from(1));
        assert_eq!(dirichlet_naive(&w(5), &zero).unwrap(), BigInt::from(5));
        assert_eq!(dirichlet_naive(&w(5), &e0).unwrap(), BigInt::from(1));
        assert_eq!(dirichlet_closed(&w(5), &e0).unwrap(), BigInt::from(1));
        assert_eq!(dirichlet_closed(&w(6), &e0).unwrap(), BigInt::from(0));
        assert_eq!(dirichlet_naive(&w(6), &e0).unwrap(), BigInt::from(0));
        assert_eq!(dirichlet_closed(&w(0), &e0), Err(Error::ZeroIndex));
        assert_eq!(dirichlet_naive(&w(0), &e0), Err(Error::ZeroIndex));
    }

    #[test]
    fn power_of_two_kernels() {
        for k in 0..6u32 {
            for bits in 0..256u64 {
                let g = DyadicElement::from_words(8, vec![bits], Tail::Zeros);
                let expect = if g.in_zero_interval(k as u64) { 1i64 << k } else { 0 };
                assert_eq!(dirichlet_closed(&WalshIndex::pow2(k), &g).unwrap(), BigInt::from(expect));
            }
        }
    }

    #[test]
    fn kernel_equals_n_near_zero() {
        for k in 0..5u64 {
            for bits in 0..64u64 {
                let g = DyadicElement::from_words(6, vec![bits << (k + 1)], Tail::Zeros);
                for n in 1..=(1u64 << (k + 1)) {
                    assert_eq!(dirichlet_closed(&w(n), &g).unwrap(), BigInt::from(n));
                }
            }
        }
    }

    #[test]
    fn multi_kernels() {
        let d2 = DyadicPoint::zero(2, 4);
        assert_eq!(dirichlet_multi(&MultiIndex::from_u64s(&[1, 1]), &d2).unwrap(), BigInt::from(1));
        assert_eq!(dirichlet_multi(&MultiIndex::from_u64s(&[2, 2]), &d2).unwrap(), BigInt::from(4));
        let g = DyadicPoint::new(vec![DyadicElement::zero(1), DyadicElement::basis(0)]).unwrap();
        assert_eq!(dirichlet_multi(&MultiIndex::from_u64s(&[5, 6]), &g).unwrap(), BigInt::from(0));
        assert_eq!(
            dirichlet_multi(&MultiIndex::from_u64s(&[3, 0]), &g),
            Err(Error::ZeroIndex)
        );
    }

    #[test]
    fn vanishing_ranks() {
        assert_eq!(vanishing_rank(&w(6)).unwrap(), 1);
        assert_eq!(vanishing_rank(&w(5)).unwrap(), 0);
        assert_eq!(vanishing_rank(&w(64)).unwrap(), 6);
        assert_eq!(vanishing_rank(&w(0)), Err(Error::ZeroIndex));
        // D_6 vanishes wherever g_0 = 1
        for bits in 0..256u64 {
            let g = DyadicElement::from_words(8, vec![bits | 1], Tail::Zeros);
            assert_eq!(dirichlet_naive(&w(6), &g).unwrap(), BigInt::zero());
        }
    }

    #[test]
    fn index_accessors() {
        let n = w(0b101100);
        assert_eq!(n.popcount(), 3);
        assert_eq!(n.binary_expansion(), vec![5, 3, 2]);
        assert_eq!(n.digit(3), 1);
        assert_eq!(n.digit(4), 0);
        assert_eq!(n.floor_log2(), Some(5));
        assert_eq!(w(0).floor_log2(), None);
    }

    #[test]
    fn butterfly() {
        let mut v = vec![BigInt::from(3), BigInt::from(5)];
        hadamard_in_place(&mut v, 1);
        assert_eq!(v, vec![BigInt::from(8), BigInt::from(-2)]);
        let mut v: Vec<i128> = vec![1, 2, 3, 4];
        hadamard_in_place(&mut v, 2);
        assert_eq!(v, vec![10, -2, -4, 0]);
    }

    #[test]
    fn chunk_reversal_is_involutive() {
        for f in 0..64usize {
            assert_eq!(reverse_chunks(reverse_chunks(f, 3, 2), 3, 2), f);
        }
        assert_eq!(reverse_chunks(0b001_110, 3, 2), 0b100_011);
    }
}
