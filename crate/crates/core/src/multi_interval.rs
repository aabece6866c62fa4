//! Random sets whose exponent set `S_X` has several interval components.
//!
//! The distributions are exchangeable (masses depend only on `|A|`) and are
//! built inductively. Level 2 puts `(1 - eps)/n` on each singleton and `eps`
//! on `[n]`. Going from level `l` to `l + 1` spreads mass `eps` evenly over
//! the sets of size `n - l + 1` and takes it evenly from all sets that
//! already carry mass. The masses are exact rationals; the sign conditions
//! are certified numerically on grids, re-searching `eps` at every level.

use num_bigint::BigInt;
use num_traits::{One, Zero};
use serde::Serialize;

use crate::cm::pow0;
use crate::error::{Error, Result};
use crate::randset::RandomSubset;
use crate::scalar::{Rational, Scalar};
use crate::scan::CLASSIFY_MARGIN;
use crate::subsets::popcount;

pub const COARSE_STEP: f64 = 1e-3;
pub const MAX_HALVINGS: u32 = 60;
/// Required size of the negative values witnessing non-existence.
pub const NEGATIVE_MARGIN: f64 = 1e-6;
/// Required size of the positive values near integers.
pub const POSITIVE_MARGIN: f64 = 1e-6;
pub const DELTA_LADDER: [f64; 12] = [
    0.2, 0.1, 0.05, 0.01, 0.005, 0.001, 5e-4, 1e-4, 5e-5, 1e-5, 5e-6, 1e-6,
];
const FINE_POINTS: usize = 200;

fn binom(n: usize, k: usize) -> u64 {
    if k > n {
        return 0;
    }
    (0..k.min(n - k)).fold(1u64, |acc, i| acc * (n - i) as u64 / (i + 1) as u64)
}

/// Exchangeable masses: `sizes[s]` is the mass of each set of size `s`.
#[derive(Debug, Clone, PartialEq)]
struct SizeMasses {
    n: usize,
    sizes: Vec<Rational>,
}

impl SizeMasses {
    fn base(n: usize, eps: &Rational) -> Self {
        let mut sizes = vec![Rational::zero(); n + 1];
        sizes[1] = (Rational::one() - eps.clone()) / Rational::from_usize(n);
        sizes[n] = eps.clone();
        SizeMasses { n, sizes }
    }

    /// Level `l` to `l + 1`; `None` if a positive mass would not stay positive.
    fn step(&self, l: usize, eps: &Rational) -> Option<Self> {
        let n = self.n;
        let new_size = n - l + 1;
        let positive = |s: usize| s == 1 || s > new_size;
        let n1: u64 = n as u64 + (new_size + 1..=n).map(|s| binom(n, s)).sum::<u64>();
        let c1 = Rational::from_ratio(1, n1 as i64);
        let c2 = Rational::from_ratio(1, binom(n, new_size) as i64);
        let mut sizes = vec![Rational::zero(); n + 1];
        for s in 0..=n {
            if positive(s) {
                sizes[s] = self.sizes[s].clone() - eps.clone() * c1.clone();
                if !sizes[s].above_zero() {
                    return None;
                }
            } else if s == new_size {
                sizes[s] = eps.clone() * c2.clone();
            }
        }
        Some(SizeMasses { n, sizes })
    }

    fn total(&self) -> Rational {
        (0..=self.n).fold(Rational::zero(), |acc, s| {
            acc + self.sizes[s].clone() * Rational::from_integer(BigInt::from(binom(self.n, s)))
        })
    }

    fn to_random_subset(&self) -> Result<RandomSubset<Rational>> {
        let probs = (0..1u32 << self.n)
            .map(|a| self.sizes[popcount(a) as usize].clone())
            .collect();
        RandomSubset::new(self.n as u32, probs)
    }

    fn evaluator(&self) -> SizeEvaluator {
        let n = self.n;
        let q: Vec<f64> = self.sizes.iter().map(Scalar::to_f64).collect();
        let w = (0..=n)
            .map(|t| (0..=t).map(|s| binom(t, s) as f64 * q[s]).sum())
            .collect();
        SizeEvaluator { n, w }
    }
}

/// `r_s(alpha) = sum_{t <= s} C(s, t) (-1)^{s-t} W_t^alpha` with
/// `W_t = P{X ⊆ B}` for `|B| = t`.
struct SizeEvaluator {
    n: usize,
    w: Vec<f64>,
}

impl SizeEvaluator {
    fn r(&self, s: usize, alpha: f64) -> f64 {
        (0..=s)
            .map(|t| {
                let sign = if (s - t) % 2 == 0 { 1.0 } else { -1.0 };
                sign * binom(s, t) as f64 * pow0(self.w[t], alpha)
            })
            .sum()
    }

    /// `(min_s r_s(alpha), argmin size)`.
    fn min_r(&self, alpha: f64) -> (f64, usize) {
        (0..=self.n)
            .map(|s| (self.r(s, alpha), s))
            .fold((f64::INFINITY, 0), |best, cur| if cur.0 < best.0 { cur } else { best })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct NegativeWitness {
    pub j: usize,
    pub alpha: f64,
    pub r: f64,
    /// Size of the subset `B` attaining `r`.
    pub subset_size: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LevelReport {
    pub level: usize,
    pub epsilon: f64,
    pub epsilon_exact: String,
    pub halvings: u32,
    /// Masses per subset size, as exact fractions.
    pub size_masses: Vec<String>,
    pub item1_zero_pattern: bool,
    /// Largest `min_B r` at non-integer grid points below `n - level - 1`.
    pub item2_max_min_r: Option<f64>,
    pub item2_midpoints: Vec<(f64, f64)>,
    /// Smallest `min_B r` on `[j, j + delta]`, per required `j`.
    pub item3_min: Vec<(usize, f64)>,
    pub item4_witnesses: Vec<NegativeWitness>,
    /// Smallest `r_B` over `|B| >= n - level + 2` on `[j - delta, j + delta]`.
    pub item5_min: Vec<(usize, f64)>,
    pub delta: Option<f64>,
    pub certified: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MultiIntervalCertificate {
    pub n: usize,
    pub k: usize,
    pub epsilon: f64,
    pub delta: f64,
    pub x: RandomSubset<Rational>,
    /// One report per level `2..=k`; the last one certifies `X`.
    pub levels: Vec<LevelReport>,
}

impl MultiIntervalCertificate {
    pub fn final_level(&self) -> &LevelReport {
        self.levels.last().expect("at least the base level")
    }
}

fn item1_pattern(masses: &SizeMasses, level: usize) -> bool {
    let n = masses.n;
    (0..=n).all(|s| {
        let should_vanish = s == 0 || (s > 1 && s <= n - level + 1);
        masses.sizes[s].is_zero() == should_vanish
    })
}

fn fine_grid(lo: f64, hi: f64) -> impl Iterator<Item = f64> {
    (0..=FINE_POINTS).map(move |i| lo + (hi - lo) * i as f64 / FINE_POINTS as f64)
}

fn certify(masses: &SizeMasses, level: usize, eps: &Rational, halvings: u32) -> LevelReport {
    let n = masses.n;
    let ev = masses.evaluator();
    let item1 = item1_pattern(masses, level);

    let upper = (n - 1) as f64;
    let steps = (upper / COARSE_STEP).round() as usize;
    let coarse: Vec<(f64, f64, usize)> = (0..=steps)
        .map(|i| {
            let a = i as f64 * COARSE_STEP;
            let (r, s) = ev.min_r(a);
            (a, r, s)
        })
        .collect();
    let near_integer = |a: f64| (a - a.round()).abs() < 1e-9;

    let limit2 = n as f64 - level as f64 - 1.0;
    let item2_vals: Vec<f64> = coarse
        .iter()
        .filter(|(a, _, _)| *a > 0.0 && *a < limit2 && !near_integer(*a))
        .map(|&(_, r, _)| r)
        .collect();
    let item2_max = item2_vals.iter().copied().reduce(f64::max);
    let item2_ok = item2_max.is_none_or(|v| v < 0.0);
    let item2_midpoints: Vec<(f64, f64)> = (0..)
        .map(|j| j as f64 + 0.5)
        .take_while(|&a| a < limit2)
        .map(|a| (a, ev.min_r(a).0))
        .collect();
    let item2_ok = item2_ok && item2_midpoints.iter().all(|&(_, r)| r < 0.0);

    let required: Vec<usize> = (n - level..=n - 2).collect();
    let item4: Vec<NegativeWitness> = required
        .iter()
        .filter_map(|&j| {
            coarse
                .iter()
                .filter(|(a, _, _)| *a > j as f64 && *a < (j + 1) as f64)
                .min_by(|x, y| x.1.total_cmp(&y.1))
                .map(|&(alpha, r, s)| NegativeWitness {
                    j,
                    alpha,
                    r,
                    subset_size: s,
                })
        })
        .collect();
    let item4_ok = item4.len() == required.len() && item4.iter().all(|w| w.r < -NEGATIVE_MARGIN);

    let big_sizes: Vec<usize> = (n - level + 2..=n).collect();
    let mut chosen = None;
    for &delta in &DELTA_LADDER {
        let item3: Vec<(usize, f64)> = required
            .iter()
            .map(|&j| {
                let m = fine_grid(j as f64, j as f64 + delta)
                    .map(|a| ev.min_r(a).0)
                    .fold(f64::INFINITY, f64::min);
                (j, m)
            })
            .collect();
        let item5: Vec<(usize, f64)> = (1..=n - 2)
            .map(|j| {
                let m = fine_grid(j as f64 - delta, j as f64 + delta)
                    .flat_map(|a| big_sizes.iter().map(move |&s| (a, s)))
                    .map(|(a, s)| ev.r(s, a))
                    .fold(f64::INFINITY, f64::min);
                (j, m)
            })
            .collect();
        let ok3 = item3.iter().all(|&(_, m)| m >= -CLASSIFY_MARGIN);
        let ok5 = item5.iter().all(|&(_, m)| m > POSITIVE_MARGIN);
        if ok3 && ok5 {
            chosen = Some((delta, item3, item5));
            break;
        }
    }

    let (delta, item3_min, item5_min) = match chosen {
        Some((d, i3, i5)) => (Some(d), i3, i5),
        None => (None, Vec::new(), Vec::new()),
    };
    LevelReport {
        level,
        epsilon: eps.to_f64(),
        epsilon_exact: eps.to_string(),
        halvings,
        size_masses: masses.sizes.iter().map(|q| q.to_string()).collect(),
        item1_zero_pattern: item1,
        item2_max_min_r: item2_max,
        item2_midpoints,
        item3_min,
        item4_witnesses: item4,
        item5_min,
        certified: item1 && item2_ok && item4_ok && delta.is_some(),
        delta,
    }
}

/// Builds and certifies the level-`k` distribution on `[n]`.
pub fn construct_multi_interval(n: usize, k: usize) -> Result<MultiIntervalCertificate> {
    if !(4..=12).contains(&n) {
        return Err(Error::InvalidArgument(format!("n = {n} must lie in 4..=12")));
    }
    if k < 2 || k > n - 2 {
        return Err(Error::InvalidArgument(format!("k = {k} must lie in 2..={}", n - 2)));
    }
    let half = Rational::from_ratio(1, 2);
    let mut levels = Vec::new();

    let mut eps = Rational::from_ratio(1, 4);
    let mut current = None;
    for h in 0..=MAX_HALVINGS {
        let masses = SizeMasses::base(n, &eps);
        let report = certify(&masses, 2, &eps, h);
        if report.certified {
            levels.push(report);
            current = Some(masses);
            break;
        }
        eps = eps * half.clone();
    }
    let mut masses = current.ok_or_else(|| {
        Error::SearchFailed(format!("no epsilon certifies level 2 for n = {n}"))
    })?;

    for l in 2..k {
        let mut eps = Rational::from_ratio(1, 4);
        let mut next = None;
        for h in 0..=MAX_HALVINGS {
            if let Some(candidate) = masses.step(l, &eps) {
                let report = certify(&candidate, l + 1, &eps, h);
                if report.certified {
                    levels.push(report);
                    next = Some(candidate);
                    break;
                }
            }
            eps = eps * half.clone();
        }
        masses = next.ok_or_else(|| {
            Error::SearchFailed(format!(
                "no epsilon certifies level {} for n = {n} after {MAX_HALVINGS} halvings",
                l + 1
            ))
        })?;
    }

    debug_assert!(masses.total().is_one());
    let last = levels.last().expect("levels were pushed");
    Ok(MultiIntervalCertificate {
        n,
        k,
        epsilon: last.epsilon,
        delta: last.delta.expect("certified levels have a delta"),
        x: masses.to_random_subset()?,
        levels,
    })
}
