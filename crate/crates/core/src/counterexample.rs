//! An everywhere-convergent double Walsh series with fast-growing diagonal
//! coefficients, and Cantor–Lebesgue probes along index sequences.
//!
//! The series has nonzero coefficients only in the columns `β = n_s`: with
//! `L = ⌊log₂ n_s⌋`, `c_{α,n_s} = d_s` for `α` in the lower half of `[2^L, n_s]` and
//! `-d_s` on the upper half. For `n_s < N <= n_{s+1}` the square partial sums are
//!
//! `S_N(g) = Σ_{j<=s} d_j W_{n_j}(g²) (2 D_{h_j}(g¹) - D_{2^{L_j}}(g¹) - D_{n_j+1}(g¹))`
//!
//! with `h_j = (2^{L_j} + n_j + 1)/2`, which vanishes at `g¹ = 0` and, for fixed
//! `g¹ ≠ 0`, has only finitely many nonzero terms.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::dyadic::{DyadicElement, DyadicPoint, Tail};
use crate::error::{Error, Result};
use crate::rational::{self, Rational};
use crate::series::SeriesSpec;
use crate::walsh::{dirichlet_closed, walsh_eval_u64, WalshIndex};

/// Increasing column indices `n_s` whose first `m_s` binary digits are all 1.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndexSequence {
    n: Vec<u64>,
    m: Vec<u32>,
}

impl IndexSequence {
    pub fn new(n: Vec<u64>, m: Vec<u32>) -> Result<Self> {
        if n.len() != m.len() || n.is_empty() {
            return Err(Error::Malformed(
                "need equally many n_s and m_s, at least one".into(),
            ));
        }
        for s in 0..n.len() {
            let (ns, ms) = (n[s], m[s]);
            if ms == 0 || ms >= 62 || ns >= 1 << 62 {
                return Err(Error::Malformed(format!(
                    "m_{} = {ms} must lie in 1..62 and n_{} below 2^62",
                    s + 1,
                    s + 1
                )));
            }
            let low = (1u64 << ms) - 1;
            if ns & low != low {
                return Err(Error::Malformed(format!(
                    "n_{} = {ns} does not have its first {ms} binary digits equal to 1",
                    s + 1
                )));
            }
            if s > 0 && (ns <= n[s - 1] || ms <= m[s - 1]) {
                return Err(Error::Malformed(
                    "n_s and m_s must be strictly increasing".into(),
                ));
            }
        }
        Ok(IndexSequence { n, m })
    }

    /// `n_s = 2^{2s} - 1`, `m_s = 2s` for `s = 1..=depth`.
    pub fn default_instance(depth: usize) -> Result<Self> {
        if depth == 0 || depth > 30 {
            return Err(Error::SizeLimit(format!("depth {depth} outside 1..=30")));
        }
        let n = (1..=depth as u32).map(|s| (1u64 << (2 * s)) - 1).collect();
        let m = (1..=depth as u32).map(|s| 2 * s).collect();
        IndexSequence::new(n, m)
    }

    /// The truncation depth `S`.
    pub fn depth(&self) -> usize {
        self.n.len()
    }

    pub fn n(&self) -> &[u64] {
        &self.n
    }

    pub fn m(&self) -> &[u32] {
        &self.m
    }

    /// The two closed halves of `[2^L, n_s]` for 0-based `s`.
    pub fn halves(&self, s: usize) -> Result<((u64, u64), (u64, u64))> {
        let n = self.n[s];
        let lo = 1u64 << (63 - n.leading_zeros());
        if (lo + n).is_multiple_of(2) {
            return Err(Error::Malformed(format!("2^L + n = {} is even", lo + n)));
        }
        let lower = (lo, (lo + n - 1) / 2);
        let upper = ((lo + n).div_ceil(2), n);
        if lower.1 - lower.0 != upper.1 - upper.0 || lower.1 + 1 != upper.0 {
            return Err(Error::Malformed(format!(
                "halves {lower:?} and {upper:?} do not split [{lo}, {n}] evenly"
            )));
        }
        Ok((lower, upper))
    }
}

/// Comparison weights `B_s` and column amplitudes `d_s`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct GrowthSchedule {
    #[serde(with = "rational::serde_str_vec")]
    b: Vec<Rational>,
    #[serde(with = "rational::serde_str_vec")]
    d: Vec<Rational>,
}

impl GrowthSchedule {
    pub fn new(b: Vec<Rational>, d: Vec<Rational>) -> Result<Self> {
        if b.len() != d.len() {
            return Err(Error::Malformed("need equally many B_s and d_s".into()));
        }
        if b.iter().chain(&d).any(|x| x.is_zero()) {
            return Err(Error::Malformed("B_s and d_s must be nonzero".into()));
        }
        Ok(GrowthSchedule { b, d })
    }

    /// `B_s = 1`, `d_s = s`.
    pub fn default_schedule(depth: usize) -> Self {
        GrowthSchedule {
            b: vec![rational::int(1); depth],
            d: (1..=depth as i64).map(rational::int).collect(),
        }
    }

    pub fn b(&self) -> &[Rational] {
        &self.b
    }

    pub fn d(&self) -> &[Rational] {
        &self.d
    }
}

fn check_lengths(idx: &IndexSequence, sched: &GrowthSchedule) -> Result<()> {
    if sched.d.len() != idx.depth() {
        return Err(Error::Malformed(format!(
            "{} amplitudes for {} columns",
            sched.d.len(),
            idx.depth()
        )));
    }
    Ok(())
}

/// The truncated series, with coefficients declared below `2^{bitlen(n_S)}`.
pub fn build_theorem8_series(idx: &IndexSequence, sched: &GrowthSchedule) -> Result<SeriesSpec> {
    check_lengths(idx, sched)?;
    let mut coeffs = Vec::new();
    for s in 0..idx.depth() {
        let n = idx.n[s];
        let ((a0, a1), (b0, b1)) = idx.halves(s)?;
        let d = &sched.d[s];
        coeffs.extend((a0..=a1).map(|a| (vec![a, n], d.clone())));
        coeffs.extend((b0..=b1).map(|a| (vec![a, n], -d.clone())));
    }
    let top = *idx.n.last().expect("nonempty");
    SeriesSpec::new(2, 64 - top.leading_zeros(), coeffs)
}

/// `S_N(g)` from the closed window formula, using only kernel closed forms.
pub fn window_formula(idx: &IndexSequence, sched: &GrowthSchedule, n: u64, g: &DyadicPoint) -> Result<Rational> {
    check_lengths(idx, sched)?;
    if g.dim() != 2 {
        return Err(Error::DimensionMismatch {
            expected: 2,
            got: g.dim(),
        });
    }
    let (g1, g2) = (g.coord(0), g.coord(1));
    let mut total = Rational::zero();
    for s in 0..idx.depth() {
        let nj = idx.n[s];
        if nj >= n {
            break;
        }
        let lo = 1u64 << (63 - nj.leading_zeros());
        let h = (lo + nj).div_ceil(2);
        let k = |x: u64| dirichlet_closed(&WalshIndex::new(x), g1);
        let bracket: BigInt = k(h)? * 2 - k(lo)? - k(nj + 1)?;
        if bracket.is_zero() {
            continue;
        }
        let w = walsh_eval_u64(nj, g2).to_i64();
        total += &sched.d[s] * BigRational::from_integer(bracket * w);
    }
    Ok(total)
}

#[derive(Clone, Debug)]
pub struct VerifyConfig {
    /// Working rank of sampled points.
    pub rank: u32,
    /// Largest partial-sum index examined.
    pub n_max: u64,
    /// Number of random points.
    pub samples: usize,
    pub seed: u64,
    /// `g²` ranges over all elements of this rank for the origin identity.
    pub origin_rank: u32,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            rank: 10,
            n_max: 256,
            samples: 1000,
            seed: 0,
            origin_rank: 8,
        }
    }
}

/// Verdicts for the partial sums with index in `[lo, hi]`.
#[derive(Clone, Debug, Serialize)]
pub struct WindowVerdict {
    /// Number of columns already summed in this window.
    pub s: usize,
    pub lo: u64,
    pub hi: u64,
    /// `S_N(0, g²) = 0` for every `N` in the window and every tested `g²`.
    pub origin_zero: bool,
    /// Direct partial sums agree with the window formula at every sampled point.
    pub formula_matches: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilizationSummary {
    pub points: usize,
    pub within_bound: usize,
    /// Points whose predicted onset lies beyond the examined range.
    pub beyond_truncation: usize,
    pub failures: Vec<StabilizationRow>,
    /// Largest measured onset over the sampled `g²` with `g¹ = e_0`.
    pub e0_measured_onset: u64,
    pub e0_predicted_onset: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct StabilizationRow {
    pub point: DyadicPoint,
    /// `g¹ ∉ Δ^{(q)}(0)` with `q` minimal.
    pub q: u64,
    /// `J = min{j : m_j >= q}`, 1-based.
    pub j: usize,
    /// `n_J + 1`.
    pub predicted_onset: u64,
    /// The smallest `N_0` with `S_N` constant on `[N_0, n_max]`.
    pub measured_onset: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct GrowthRow {
    pub s: usize,
    pub n_s: u64,
    #[serde(with = "rational::serde_str")]
    pub d_s: Rational,
    /// `|c_{n_s 1}| / |B_s|`.
    #[serde(with = "rational::serde_str")]
    pub ratio: Rational,
}

#[derive(Clone, Debug, Serialize)]
pub struct Theorem8Report {
    pub index_sequence: IndexSequence,
    pub schedule: GrowthSchedule,
    pub rank: u32,
    pub n_max: u64,
    pub samples: usize,
    pub seed: u64,
    pub origin_rank: u32,
    pub windows: Vec<WindowVerdict>,
    pub stabilization: StabilizationSummary,
    pub growth: Vec<GrowthRow>,
    pub growth_increasing: bool,
    pub passed: bool,
    pub note: String,
}

impl Theorem8Report {
    /// `s,n_s,d_s,ratio` rows.
    pub fn growth_csv(&self) -> String {
        let mut out = String::from("s,n_s,d_s,ratio\n");
        for r in &self.growth {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.s,
                r.n_s,
                rational::format_rational(&r.d_s),
                rational::format_rational(&r.ratio)
            ));
        }
        out
    }
}

fn measured_onset(sums: &[BigInt]) -> u64 {
    // sums[i] = S_{i+1}
    let last = sums.last().expect("nonempty");
    let mut i = sums.len();
    while i > 0 && &sums[i - 1] == last {
        i -= 1;
    }
    i as u64 + 1
}

/// Checks the origin identity, the window formula, eventual constancy and the
/// coefficient growth of the truncated series.
pub fn verify_counterexample(
    idx: &IndexSequence,
    sched: &GrowthSchedule,
    cfg: &VerifyConfig,
) -> Result<Theorem8Report> {
    let series = build_theorem8_series(idx, sched)?;
    let bound = 1u64 << series.bound_rank();
    if cfg.n_max == 0 || cfg.n_max > bound {
        return Err(Error::InsufficientCoefficients {
            index: cfg.n_max.to_string(),
            bound_rank: series.bound_rank(),
        });
    }
    if cfg.origin_rank > 20 || cfg.rank == 0 || cfg.rank > 63 {
        return Err(Error::SizeLimit("origin rank at most 20, rank in 1..=63".into()));
    }
    let n_max = cfg.n_max;
    let sums_at = |g: &DyadicPoint| -> Vec<BigInt> {
        let words = g.low_words();
        (1..=n_max)
            .map(|n| series.scaled_partial_sum(&[n, n], &words))
            .collect()
    };

    // windows [1, n_1], [n_1 + 1, n_2], ..., [n_S + 1, n_max], clipped to n_max
    let mut windows = Vec::new();
    let mut lo = 1;
    for s in 0..=idx.depth() {
        let hi = if s < idx.depth() { idx.n[s].min(n_max) } else { n_max };
        if lo <= hi {
            windows.push((s, lo, hi));
        }
        if s < idx.depth() {
            lo = idx.n[s] + 1;
        }
    }
    let window_of = |n: u64| windows.iter().position(|&(_, a, b)| a <= n && n <= b).expect("covered");

    let origin_bad: Vec<bool> = (0..1u64 << cfg.origin_rank)
        .into_par_iter()
        .map(|code| {
            let g2 = DyadicElement::from_words(cfg.origin_rank.max(1), vec![code], Tail::Zeros);
            let g = DyadicPoint::new(vec![DyadicElement::zero(1), g2]).expect("two coordinates");
            let mut bad = vec![false; windows.len()];
            for (i, v) in sums_at(&g).iter().enumerate() {
                if !v.is_zero() {
                    bad[window_of(i as u64 + 1)] = true;
                }
            }
            bad
        })
        .reduce(
            || vec![false; windows.len()],
            |a, b| a.iter().zip(&b).map(|(x, y)| *x || *y).collect(),
        );

    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let points: Vec<DyadicPoint> = (0..cfg.samples)
        .map(|_| DyadicPoint::random(&mut rng, 2, cfg.rank))
        .collect();
    let den = series.denominator().clone();
    let n_rows = idx.depth();
    let predicted = |g1: &DyadicElement| -> Option<(u64, usize, u64)> {
        let q = g1.first_nonzero_digit()? + 1;
        let j = idx.m.iter().position(|&m| m as u64 >= q)?;
        Some((q, j + 1, idx.n[j] + 1))
    };

    struct PointOutcome {
        mismatch: Vec<bool>,
        row: Option<StabilizationRow>,
        beyond: bool,
        e0_onset: u64,
    }
    let outcomes: Vec<PointOutcome> = points
        .par_iter()
        .map(|g| -> Result<PointOutcome> {
            let sums = sums_at(g);
            let mut mismatch = vec![false; windows.len()];
            for (i, v) in sums.iter().enumerate() {
                let n = i as u64 + 1;
                let direct = BigRational::new(v.clone(), den.clone());
                if direct != window_formula(idx, sched, n, g)? {
                    mismatch[window_of(n)] = true;
                }
            }
            let (row, beyond) = match predicted(g.coord(0)) {
                None if g.coord(0).first_nonzero_digit().is_none() => (None, false),
                None => (None, true),
                Some((_, _, p)) if p > n_max => (None, true),
                Some((q, j, p)) => (
                    Some(StabilizationRow {
                        point: g.clone(),
                        q,
                        j,
                        predicted_onset: p,
                        measured_onset: measured_onset(&sums),
                    }),
                    false,
                ),
            };
            let e0 = DyadicPoint::new(vec![DyadicElement::basis(0), g.coord(1).clone()])?;
            Ok(PointOutcome {
                mismatch,
                row,
                beyond,
                e0_onset: measured_onset(&sums_at(&e0)),
            })
        })
        .collect::<Result<_>>()?;

    let mut verdicts: Vec<WindowVerdict> = windows
        .iter()
        .enumerate()
        .map(|(w, &(s, lo, hi))| WindowVerdict {
            s,
            lo,
            hi,
            origin_zero: !origin_bad[w],
            formula_matches: true,
        })
        .collect();
    let mut summary = StabilizationSummary {
        points: 0,
        within_bound: 0,
        beyond_truncation: 0,
        failures: Vec::new(),
        e0_measured_onset: 0,
        e0_predicted_onset: predicted(&DyadicElement::basis(0)).map_or(0, |p| p.2),
    };
    for o in outcomes {
        for (w, bad) in o.mismatch.iter().enumerate() {
            if *bad {
                verdicts[w].formula_matches = false;
            }
        }
        if o.beyond {
            summary.beyond_truncation += 1;
        }
        if let Some(row) = o.row {
            summary.points += 1;
            if row.measured_onset <= row.predicted_onset {
                summary.within_bound += 1;
            } else {
                summary.failures.push(row);
            }
        }
        summary.e0_measured_onset = summary.e0_measured_onset.max(o.e0_onset);
    }

    let growth: Vec<GrowthRow> = (0..n_rows)
        .map(|s| {
            let n = idx.n[s];
            GrowthRow {
                s: s + 1,
                n_s: n,
                d_s: sched.d[s].clone(),
                ratio: series.coefficient(&[n, n]).abs() / sched.b[s].abs(),
            }
        })
        .collect();
    let growth_increasing = growth.windows(2).all(|w| w[0].ratio < w[1].ratio);
    let e0_ok = cfg.samples == 0
        || (summary.e0_predicted_onset > 0 && summary.e0_measured_onset <= summary.e0_predicted_onset);
    let passed = verdicts.iter().all(|v| v.origin_zero && v.formula_matches)
        && summary.failures.is_empty()
        && e0_ok
        && growth_increasing;
    Ok(Theorem8Report {
        index_sequence: idx.clone(),
        schedule: sched.clone(),
        rank: cfg.rank,
        n_max,
        samples: cfg.samples,
        seed: cfg.seed,
        origin_rank: cfg.origin_rank,
        windows: verdicts,
        stabilization: summary,
        growth,
        growth_increasing,
        passed,
        note: "finite-rank certificate: exact window constancy and the origin identity \
               for the truncated series; not a proof of convergence"
            .into(),
    })
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeRow {
    pub n: u64,
    /// Number of ones in the binary expansion of `n`.
    pub ones: u32,
    #[serde(with = "rational::serde_str")]
    pub abs_coefficient: Rational,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProbeReport {
    pub bound: Option<u32>,
    pub rows: Vec<ProbeRow>,
    pub all_zero: bool,
    #[serde(with = "rational::serde_str")]
    pub max_abs: Rational,
    pub assumption: String,
}

impl ProbeReport {
    /// The first probe position from which every `|c_{n 1}|` is below `eps`.
    pub fn tail_below(&self, eps: &Rational) -> Option<usize> {
        let mut start = self.rows.len();
        while start > 0 && &self.rows[start - 1].abs_coefficient < eps {
            start -= 1;
        }
        (start < self.rows.len()).then_some(start)
    }
}

/// Tabulates the diagonal coefficients `|c_{n 1}|` along `probes`. With a bound,
/// every probe must have at most that many ones in its binary expansion.
pub fn cantor_lebesgue_probe(series: &SeriesSpec, probes: &[u64], bound: Option<u32>) -> Result<ProbeReport> {
    let d = series.dim();
    let mut rows = Vec::with_capacity(probes.len());
    for &n in probes {
        let ones = n.count_ones();
        if let Some(b) = bound {
            if ones > b {
                return Err(Error::Malformed(format!(
                    "probe {n} has {ones} binary ones, above the bound {b}"
                )));
            }
        }
        rows.push(ProbeRow {
            n,
            ones,
            abs_coefficient: series.coefficient(&vec![n; d]).abs(),
        });
    }
    let max_abs = rows
        .iter()
        .map(|r| r.abs_coefficient.clone())
        .max()
        .unwrap_or_else(Rational::zero);
    Ok(ProbeReport {
        bound,
        all_zero: max_abs.is_zero(),
        max_abs,
        rows,
        assumption: "convergence over cubes to a finite sum on a set of positive measure \
                     is assumed for the input series, not certified"
            .into(),
    })
}
