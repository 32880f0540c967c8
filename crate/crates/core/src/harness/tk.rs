//! The `T_k` quantity of the uniqueness argument along coordinate sections, computed
//! four ways.
//!
//! Coordinates split into constrained ones (`η`, the `d − m` coordinates of `g*`) and
//! free ones (`ξ`, the `m` coordinates of `g_*`). With `e_k^σ` flipping digit `k` of
//! the constrained coordinates selected by `σ`:
//!
//! * `signed_sum = Σ_{σ ∈ Σ^{d−m}} (−1)^{|σ|} [S_{2^k+2^s} − S_{2^k}](η ⊕ e_k^σ, ξ)`;
//! * `coefficient_display = 2^{d−m} Σ_{2^k <= n* < 2^k+2^s} Σ_{n_* < 2^k+2^s} c_n W_{n_*}(ξ) W_{n*}(η)`;
//! * `kernel_integral = ∫ Π* (D_{2^k+2^s} − D_{2^k})(η ⊕ g) Π_* D_{2^k+2^s}(ξ ⊕ g) dτ`;
//! * `decomposition = R_{k1}(η) Σ_J 2^{s(d−m+|J|)} R_{k1}(ξ^J) Q^J_k`, with
//!   `Q^J_k = 2^{(m−|J|)k} ∫ R_{k1}(g*, g^J_*) dτ` over
//!   `Δ^{(s)}(η) × Δ^{(s)}(ξ^J) × Δ^{(k)}(ξ^{J̄})`.
//!
//! The first two agree, and equal `2^{d−m}` times each of the last two. The sum over
//! even `σ` without signs is also computed; it does not cancel the `S_{2^k}` terms.

use num_bigint::BigInt;
use num_traits::Zero;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{cell_rng, Cell, IdentityReport};
use crate::dyadic::{DyadicElement, DyadicPoint, SignVector, Tail};
use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::quasimeasure::Parallelepiped;
use crate::rational::{int, pow2, Rational};
use crate::series::SeriesSpec;
use crate::walsh::{dirichlet_closed, walsh_eval_u64, WalshIndex};

#[derive(Clone, Debug, PartialEq)]
pub struct TkValues {
    pub signed_sum: Rational,
    pub coefficient_display: Rational,
    pub kernel_integral: Rational,
    pub decomposition: Rational,
    pub literal_even_sum: Rational,
}

fn assemble(part: &Partition, eta: &[DyadicElement], xi: &[DyadicElement]) -> Result<DyadicPoint> {
    let mut coords = vec![DyadicElement::zero(1); part.dim()];
    for (i, &j) in part.constrained().iter().enumerate() {
        coords[j] = eta[i].clone();
    }
    for (i, &j) in part.free().iter().enumerate() {
        coords[j] = xi[i].clone();
    }
    DyadicPoint::new(coords)
}

fn rademacher_sign(es: &[DyadicElement], k: u32) -> i64 {
    if es.iter().fold(0u8, |acc, e| acc ^ e.digit(k as u64)) == 1 {
        -1
    } else {
        1
    }
}

/// All five quantities. Needs `s < k` and a series with `bound_rank >= k + 1`.
pub fn tk_values(
    series: &SeriesSpec,
    eta: &[DyadicElement],
    xi: &[DyadicElement],
    k: u32,
    s: u32,
    part: &Partition,
) -> Result<TkValues> {
    if series.bound_rank() < k + 1 {
        return Err(Error::RankTooSmall { have: series.bound_rank(), need: k + 1 });
    }
    let tau = Leaves::new(series, k + 1)?;
    values(series, &tau, eta, xi, k, s, part)
}

/// The rank-`K` values `τ(Δ) = num[Δ] / den` of the quasimeasure of a series, over
/// one common denominator.
struct Leaves {
    rank: u32,
    num: Vec<BigInt>,
    den: BigInt,
}

impl Leaves {
    fn new(series: &SeriesSpec, rank: u32) -> Result<Self> {
        Ok(Leaves {
            rank,
            num: series.fwht_table_scaled(rank)?,
            den: series.denominator() << (rank as usize * series.dim()),
        })
    }
}

/// [`tk_values`] with the rank-`(k + 1)` values of `τ` already tabulated.
fn values(
    series: &SeriesSpec,
    tau: &Leaves,
    eta: &[DyadicElement],
    xi: &[DyadicElement],
    k: u32,
    s: u32,
    part: &Partition,
) -> Result<TkValues> {
    let d = series.dim();
    if part.dim() != d {
        return Err(Error::DimensionMismatch { expected: d, got: part.dim() });
    }
    if eta.len() != part.constrained().len() || part.constrained().is_empty() {
        return Err(Error::DimensionMismatch {
            expected: part.constrained().len(),
            got: eta.len(),
        });
    }
    if xi.len() != part.m() {
        return Err(Error::DimensionMismatch { expected: part.m(), got: xi.len() });
    }
    if s >= k {
        return Err(Error::Malformed(format!("s = {s} must be below k = {k}")));
    }
    if series.bound_rank() < k + 1 || tau.rank != k + 1 {
        return Err(Error::RankTooSmall { have: series.bound_rank(), need: k + 1 });
    }
    let (lo, hi) = (1u64 << k, (1u64 << k) + (1u64 << s));
    let c = part.constrained().len();

    // partial sums at shifted points
    let mut signed_sum = Rational::zero();
    let mut literal_even_sum = Rational::zero();
    for sigma in SignVector::all(c) {
        let shifted: Vec<DyadicElement> = eta
            .iter()
            .zip(sigma.entries())
            .map(|(e, &b)| if b == 1 { e.flip_digit(k) } else { e.clone() })
            .collect();
        let p = assemble(part, &shifted, xi)?;
        let diff = series.partial_sum_cube(hi, &p)? - series.partial_sum_cube(lo, &p)?;
        if sigma.is_even() {
            literal_even_sum += &diff;
            signed_sum += diff;
        } else {
            signed_sum -= diff;
        }
    }

    // coefficients over the window
    let mut coefficient_display = Rational::zero();
    for (n, v) in series.terms() {
        let starred = part.constrained().iter().all(|&j| (lo..hi).contains(&n[j]));
        let lower = part.free().iter().all(|&j| n[j] < hi);
        if !(starred && lower) {
            continue;
        }
        let mut sign = 1i64;
        for (i, &j) in part.constrained().iter().enumerate() {
            sign *= walsh_eval_u64(n[j], &eta[i]).to_i64();
        }
        for (i, &j) in part.free().iter().enumerate() {
            sign *= walsh_eval_u64(n[j], &xi[i]).to_i64();
        }
        coefficient_display += v * int(sign);
    }
    coefficient_display *= pow2(c as i64);

    // kernels are constant on rank-(k+1) cells; tabulate each coordinate
    let cells = 1u64 << (k + 1);
    let kernel = |base: &DyadicElement, window: bool| -> Result<Vec<i64>> {
        (0..cells)
            .map(|x| {
                let h = base.add(&DyadicElement::from_interval(k + 1, x, Tail::Zeros));
                let top = dirichlet_closed(&WalshIndex::new(hi), &h)?;
                let v = if window { top - dirichlet_closed(&WalshIndex::new(lo), &h)? } else { top };
                Ok(i64::try_from(v).expect("kernel values are below 2^(k+2)"))
            })
            .collect()
    };
    let mut tables = vec![Vec::new(); d];
    for (i, &j) in part.constrained().iter().enumerate() {
        tables[j] = kernel(&eta[i], true)?;
    }
    for (i, &j) in part.free().iter().enumerate() {
        tables[j] = kernel(&xi[i], false)?;
    }
    let mask = (1usize << (k + 1)) - 1;
    let mut kernel_num = BigInt::zero();
    for (flat, v) in tau.num.iter().enumerate() {
        if v.is_zero() {
            continue;
        }
        let f: i64 = (0..d)
            .map(|j| tables[j][flat >> ((d - 1 - j) * (k as usize + 1)) & mask])
            .product();
        if f != 0 {
            kernel_num += v * f;
        }
    }
    let kernel_integral = Rational::new(kernel_num, tau.den.clone());

    // the decomposition over subsets J of the free coordinates
    let m = part.m();
    let mut decomposition = Rational::zero();
    for mask in 0..1usize << m {
        let q = mask.count_ones() as usize;
        let mut sides = vec![(0u32, 0u64); d];
        for (i, &j) in part.constrained().iter().enumerate() {
            sides[j] = (s, eta[i].interval_index(s));
        }
        let mut xi_j = Vec::new();
        let mut signed_coords: Vec<usize> = part.constrained().to_vec();
        for (i, &j) in part.free().iter().enumerate() {
            if mask >> i & 1 == 1 {
                sides[j] = (s, xi[i].interval_index(s));
                xi_j.push(xi[i].clone());
                signed_coords.push(j);
            } else {
                sides[j] = (k, xi[i].interval_index(k));
            }
        }
        let slab = Parallelepiped::new(sides)?;
        let mut num = BigInt::zero();
        for cube in slab.cubes(k + 1) {
            // digit k of a rank-(k+1) interval index is its lowest bit
            let odd = signed_coords.iter().fold(0u64, |acc, &j| acc ^ (cube.index()[j] & 1));
            let v = &tau.num[cube.flat_index()];
            if odd == 1 {
                num -= v;
            } else {
                num += v;
            }
        }
        let integral = Rational::new(num, tau.den.clone());
        let q_j = integral * pow2(((m - q) as u32 * k) as i64);
        let weight = pow2((s as usize * (c + q)) as i64) * int(rademacher_sign(&xi_j, k));
        decomposition += weight * q_j;
    }
    decomposition *= int(rademacher_sign(eta, k));

    Ok(TkValues {
        signed_sum,
        coefficient_display,
        kernel_integral,
        decomposition,
        literal_even_sum,
    })
}

/// Compares the four forms at one `(η, ξ)`.
fn compare(cell: &mut Cell, v: &TkValues, c: usize, label: impl Fn() -> String) {
    let scale = pow2(c as i64);
    cell.compare(&v.signed_sum, &v.coefficient_display, || format!("signed sum vs display, {}", label()));
    cell.compare(&v.signed_sum, &(&v.kernel_integral * &scale), || {
        format!("signed sum vs kernel integral, {}", label())
    });
    cell.compare(&v.signed_sum, &(&v.decomposition * &scale), || {
        format!("signed sum vs decomposition, {}", label())
    });
}

/// The check at one `(η, ξ)` as a one-cell report.
pub fn tk_decomposition_check(
    series: &SeriesSpec,
    eta: &[DyadicElement],
    xi: &[DyadicElement],
    k: u32,
    s: u32,
    part: &Partition,
) -> Result<IdentityReport> {
    let v = tk_values(series, eta, xi, k, s, part)?;
    let mut cell = Cell::new(json!({ "k": k, "s": s, "free": part.free() }));
    compare(&mut cell, &v, part.constrained().len(), String::new);
    let mut report = IdentityReport::new(
        "tk",
        json!({ "d": series.dim(), "k": k, "s": s, "free": part.free() }),
        vec![cell],
    );
    if v.literal_even_sum != v.coefficient_display {
        report = report.with_note("the unsigned sum over even σ differs from the coefficient display");
    }
    Ok(report)
}

/// Parameters of the `T_k` sweep: every partition with `m ∈ {1, d − 1}`, `1 <= k <= max_k`,
/// `0 <= s <= min(max_s, k − 1)`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct TkGrid {
    pub dims: Vec<usize>,
    pub max_k: u32,
    pub max_s: u32,
    pub series: usize,
    pub points: usize,
    pub seed: u64,
}

impl Default for TkGrid {
    fn default() -> Self {
        TkGrid {
            dims: vec![2, 3],
            max_k: 4,
            max_s: 2,
            series: 20,
            points: 4,
            seed: 0,
        }
    }
}

impl TkGrid {
    pub fn cells(&self) -> Vec<(Partition, u32, u32)> {
        let mut out = Vec::new();
        for &d in &self.dims {
            let mut ms = vec![1, d - 1];
            ms.dedup();
            for m in ms {
                for bits in 0usize..1 << d {
                    if bits.count_ones() as usize != m {
                        continue;
                    }
                    let free: Vec<usize> = (0..d).filter(|j| bits >> j & 1 == 1).collect();
                    let part = Partition::new(d, &free).expect("m < d");
                    for k in 1..=self.max_k {
                        for s in 0..=self.max_s.min(k - 1) {
                            out.push((part.clone(), k, s));
                        }
                    }
                }
            }
        }
        out
    }
}

/// A sparse series with most coefficients in the window `[2^k, 2^k+2^s)` on the
/// constrained coordinates.
fn window_series<R: Rng + ?Sized>(rng: &mut R, part: &Partition, k: u32, s: u32) -> Result<SeriesSpec> {
    let d = part.dim();
    let (lo, hi, bound) = (1u64 << k, (1u64 << k) + (1u64 << s), 1u64 << (k + 1));
    let mut map = std::collections::BTreeMap::new();
    for t in 0..48 {
        let n: Vec<u64> = (0..d)
            .map(|j| {
                if t >= 32 {
                    rng.gen_range(0..bound)
                } else if part.is_free(j) {
                    rng.gen_range(0..hi)
                } else {
                    rng.gen_range(lo..hi)
                }
            })
            .collect();
        map.insert(n, crate::rational::ratio(rng.gen_range(-9..=9), rng.gen_range(1..=6)));
    }
    SeriesSpec::new(d, k + 1, map)
}

/// Runs the sweep. The report notes how often the unsigned even-`σ` sum disagreed.
pub fn tk_grid(grid: &TkGrid) -> Result<IdentityReport> {
    let cells = grid.cells();
    let results: Vec<Result<(Cell, u64, u64)>> = cells
        .par_iter()
        .enumerate()
        .map(|(i, (part, k, s))| {
            let (k, s) = (*k, *s);
            let mut rng = cell_rng(grid.seed, i as u64);
            let mut cell = Cell::new(json!({ "d": part.dim(), "free": part.free(), "k": k, "s": s }));
            let (mut literal_off, mut evaluations) = (0u64, 0u64);
            for t in 0..grid.series {
                let series = window_series(&mut rng, part, k, s)?;
                let tau = Leaves::new(&series, k + 1)?;
                for _ in 0..grid.points {
                    let el = |rng: &mut rand_chacha::ChaCha8Rng| {
                        let tail = if rng.gen_bool(0.5) { Tail::Ones } else { Tail::Zeros };
                        DyadicElement::random(rng, k + 3, tail)
                    };
                    let eta: Vec<DyadicElement> = (0..part.constrained().len()).map(|_| el(&mut rng)).collect();
                    let xi: Vec<DyadicElement> = (0..part.m()).map(|_| el(&mut rng)).collect();
                    let v = values(&series, &tau, &eta, &xi, k, s, part)?;
                    compare(&mut cell, &v, part.constrained().len(), || format!("series {t}"));
                    evaluations += 1;
                    literal_off += (v.literal_even_sum != v.coefficient_display) as u64;
                }
            }
            Ok((cell, literal_off, evaluations))
        })
        .collect();
    let mut out = Vec::new();
    let (mut off, mut total) = (0, 0);
    for r in results {
        let (cell, o, t) = r?;
        out.push(cell);
        off += o;
        total += t;
    }
    Ok(IdentityReport::new("tk", serde_json::to_value(grid)?, out).with_note(format!(
        "unsigned sum over even sigma differed from the coefficient display in {off} of {total} evaluations"
    )))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn els(rng: &mut ChaCha8Rng, n: usize, rank: u32) -> Vec<DyadicElement> {
        (0..n).map(|_| DyadicElement::random(rng, rank, Tail::Zeros)).collect()
    }

    #[test]
    fn zero_series() {
        let part = Partition::new(2, &[1]).unwrap();
        let e = vec![DyadicElement::zero(4)];
        let v = tk_values(&SeriesSpec::zero(2, 4), &e, &e, 3, 1, &part).unwrap();
        assert!(v.signed_sum.is_zero() && v.decomposition.is_zero() && v.kernel_integral.is_zero());
    }

    #[test]
    fn two_and_three_dimensions() {
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        for (d, free, k, s) in [(2, vec![1], 3, 1), (3, vec![2], 2, 1), (3, vec![0, 2], 3, 2), (2, vec![0], 2, 0)] {
            let part = Partition::new(d, &free).unwrap();
            for _ in 0..10 {
                let series = SeriesSpec::random_dense(&mut rng, d, k + 1);
                let eta = els(&mut rng, d - free.len(), k + 2);
                let xi = els(&mut rng, free.len(), k + 2);
                let r = tk_decomposition_check(&series, &eta, &xi, k, s, &part).unwrap();
                assert!(r.passed, "{:?}", r.first_mismatch());
            }
        }
    }

    #[test]
    fn literal_even_sum_keeps_the_lower_block() {
        // c_{(1,5)}: outside the window on the constrained coordinate, so the signed sum
        // cancels it, but the unsigned sum over even σ (here only σ = 0) keeps it
        let part = Partition::new(2, &[1]).unwrap();
        let series = SeriesSpec::new(2, 3, [(vec![1, 5], int(1))]).unwrap();
        let v = tk_values(&series, &[DyadicElement::zero(3)], &[DyadicElement::zero(3)], 2, 1, &part)
            .unwrap();
        assert!(v.signed_sum.is_zero() && v.coefficient_display.is_zero());
        assert_eq!(v.literal_even_sum, int(1));
        // a term inside the window doubles under the signed sum and survives the even one
        let series = SeriesSpec::new(2, 3, [(vec![4, 1], int(1))]).unwrap();
        let v = tk_values(&series, &[DyadicElement::zero(3)], &[DyadicElement::zero(3)], 2, 1, &part)
            .unwrap();
        assert_eq!(v.signed_sum, int(2));
        assert_eq!(v.literal_even_sum, int(1));
    }

    #[test]
    fn preconditions() {
        let part = Partition::new(2, &[1]).unwrap();
        let e = vec![DyadicElement::zero(4)];
        let s = SeriesSpec::zero(2, 4);
        assert!(tk_values(&s, &e, &e, 2, 2, &part).is_err());
        assert!(tk_values(&SeriesSpec::zero(2, 3), &e, &e, 3, 1, &part).is_err());
        assert!(tk_values(&s, &[], &e, 2, 1, &part).is_err());
    }

    #[test]
    fn small_grid() {
        let grid = TkGrid {
            dims: vec![2],
            max_k: 2,
            series: 2,
            points: 2,
            ..TkGrid::default()
        };
        let r = tk_grid(&grid).unwrap();
        assert!(r.passed, "{:?}", r.first_mismatch());
        assert_eq!(r.cells.len(), 2 * 3);
    }
}
