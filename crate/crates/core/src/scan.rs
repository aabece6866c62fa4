//! The set of exponents `S_X = {alpha >= 0 : X_alpha exists}` and the
//! singleton-distribution functions used to study it.

use rayon::prelude::*;
use serde::Serialize;

use crate::cm::pow0;
use crate::error::{Error, Result};
use crate::expoly::ExponentialPolynomial;
use crate::randset::RandomSubset;
use crate::scalar::Scalar;
use crate::subsets::{self, full_mask, popcount, submasks};

/// `m(alpha) >= -CLASSIFY_MARGIN` counts as "exists" on the grid.
pub const CLASSIFY_MARGIN: f64 = 1e-8;
pub const BISECTION_TOL: f64 = 1e-10;
pub const DEFAULT_STEP: f64 = 0.01;

/// `q(A)` as an exponential polynomial in `alpha`.
pub fn q_poly<S: Scalar>(x: &RandomSubset<S>, a: u32) -> Result<ExponentialPolynomial> {
    if a > full_mask(x.n()) {
        return Err(Error::InvalidArgument(format!("mask {a} is not a subset of [{}]", x.n())));
    }
    let z = x.containment();
    ExponentialPolynomial::new(submasks(a).map(|b| {
        let sign = subsets::parity_sign(popcount(a) - popcount(b)) as f64;
        (sign, z[b as usize].to_f64())
    }))
}

/// `(min_A q(A), argmin)` at `alpha`, from a precomputed containment table.
pub fn min_q_at(z: &[f64], alpha: f64) -> (f64, u32) {
    let mut q: Vec<f64> = z.iter().map(|&v| pow0(v, alpha)).collect();
    subsets::subset_mobius(&mut q);
    q.iter()
        .enumerate()
        .fold((f64::INFINITY, 0u32), |(bv, bi), (i, &v)| {
            if v < bv {
                (v, i as u32)
            } else {
                (bv, bi)
            }
        })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridRow {
    pub alpha: f64,
    pub min_q: f64,
    pub argmin: u32,
    pub inside: bool,
    /// Integer point included regardless of the computed sign.
    pub forced: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ComponentKind {
    Point,
    Interval,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Component {
    pub kind: ComponentKind,
    pub lo: f64,
    pub hi: f64,
    /// Smallest `min_q` over the grid points inside.
    pub inside_min: f64,
    /// Largest `min_q` at the excluded neighbouring grid points, if any.
    pub outside_max: Option<f64>,
}

/// One refined boundary of an interval component.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Boundary {
    pub alpha: f64,
    pub bracket: (f64, f64),
    /// Most negative subset at the excluded end of the final bracket.
    pub subset: u32,
    pub sign_change_bound: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IntervalSet {
    pub components: Vec<Component>,
    pub domain: (f64, f64),
    pub grid_step: f64,
    pub boundaries: Vec<Boundary>,
    pub grid: Vec<GridRow>,
}

impl IntervalSet {
    pub fn contains(&self, alpha: f64) -> bool {
        self.components
            .iter()
            .any(|c| c.lo - 1e-12 <= alpha && alpha <= c.hi + 1e-12)
    }

    pub fn intervals(&self) -> impl Iterator<Item = &Component> {
        self.components
            .iter()
            .filter(|c| c.kind == ComponentKind::Interval)
    }
}

fn snap_integer(a: f64) -> Option<f64> {
    let r = a.round();
    ((a - r).abs() <= 1e-9).then_some(r)
}

/// Grid scan of `S_X ∩ [0, t_max]`.
///
/// Interval endpoints are refined by bisection on the classification
/// `m(alpha) >= -CLASSIFY_MARGIN`; integers are always included.
pub fn scan_s<S: Scalar>(x: &RandomSubset<S>, t_max: f64, step: f64) -> Result<IntervalSet> {
    if !(t_max > 0.0 && t_max.is_finite()) || !(step > 0.0 && step.is_finite()) {
        return Err(Error::InvalidArgument("scan domain and step must be positive".into()));
    }
    let points = ((t_max / step).round() as usize).max(1);
    if points > 50_000_000 {
        return Err(Error::SizeLimitExceeded {
            requested: points,
            limit: 50_000_000,
        });
    }
    let z: Vec<f64> = x.containment().iter().map(Scalar::to_f64).collect();

    let mut alphas: Vec<(f64, bool)> = (0..=points)
        .map(|i| {
            let a = (i as f64 * step).min(t_max);
            match snap_integer(a) {
                Some(r) => (r, true),
                None => (a, false),
            }
        })
        .collect();
    let mut j = 0.0;
    while j <= t_max {
        if !alphas.iter().any(|&(a, _)| a == j) {
            alphas.push((j, true));
        }
        j += 1.0;
    }
    alphas.sort_by(|a, b| a.0.total_cmp(&b.0));
    alphas.dedup_by(|a, b| a.0 == b.0);

    let grid: Vec<GridRow> = alphas
        .par_iter()
        .map(|&(alpha, forced)| {
            let (min_q, argmin) = min_q_at(&z, alpha);
            GridRow {
                alpha,
                min_q,
                argmin,
                inside: forced || min_q >= -CLASSIFY_MARGIN,
                forced,
            }
        })
        .collect();

    let classify = |a: f64| min_q_at(&z, a).0 >= -CLASSIFY_MARGIN;
    let refine = |out: f64, inn: f64| -> Boundary {
        let (mut o, mut i) = (out, inn);
        while (o - i).abs() > BISECTION_TOL {
            let mid = 0.5 * (o + i);
            if classify(mid) {
                i = mid;
            } else {
                o = mid;
            }
        }
        let subset = min_q_at(&z, o).1;
        let bound = q_poly(x, subset).map(|p| p.sign_change_bound()).unwrap_or(0);
        Boundary {
            alpha: i,
            bracket: (o.min(i), o.max(i)),
            subset,
            sign_change_bound: bound,
        }
    };

    let mut components = Vec::new();
    let mut boundaries = Vec::new();
    let mut i = 0;
    while i < grid.len() {
        if !grid[i].inside {
            i += 1;
            continue;
        }
        let start = i;
        while i + 1 < grid.len() && grid[i + 1].inside {
            i += 1;
        }
        let end = i;
        let inside_min = grid[start..=end]
            .iter()
            .map(|r| r.min_q)
            .fold(f64::INFINITY, f64::min);
        let left_out = start.checked_sub(1).map(|k| grid[k]);
        let right_out = grid.get(end + 1).copied();
        let outside_max = [left_out, right_out]
            .iter()
            .flatten()
            .map(|r| r.min_q)
            .reduce(f64::max);
        let (lo, hi, kind) = if start == end {
            (grid[start].alpha, grid[start].alpha, ComponentKind::Point)
        } else {
            let lo = match left_out {
                Some(r) => {
                    let b = refine(r.alpha, grid[start].alpha);
                    let a = b.alpha;
                    boundaries.push(b);
                    a
                }
                None => grid[start].alpha,
            };
            let hi = match right_out {
                Some(r) => {
                    let b = refine(r.alpha, grid[end].alpha);
                    let a = b.alpha;
                    boundaries.push(b);
                    a
                }
                None => grid[end].alpha,
            };
            (lo, hi, ComponentKind::Interval)
        };
        components.push(Component {
            kind,
            lo,
            hi,
            inside_min,
            outside_max,
        });
        i += 1;
    }

    Ok(IntervalSet {
        components,
        domain: (0.0, t_max),
        grid_step: step,
        boundaries,
        grid,
    })
}

fn check_unit_simplex(x: &[f64]) -> Result<f64> {
    if x.iter().any(|v| !(v.is_finite() && *v >= 0.0 && *v <= 1.0)) {
        return Err(Error::DomainViolation("coordinates must lie in [0, 1]".into()));
    }
    let s: f64 = x.iter().sum();
    if s > 1.0 + 1e-12 {
        return Err(Error::DomainViolation(format!("coordinates sum to {s} > 1")));
    }
    Ok(s)
}

/// `f_{n,alpha}(x) = 1 + sum_{∅ ≠ B ⊆ [n]} [(-1)^{n+1-|B|} s_B^alpha + (-1)^{|B|} (1 - s_B)^alpha]`
/// with `s_B = sum_{i in B} x_i`, for `x` in the closed simplex.
pub fn f_n_alpha(x: &[f64], alpha: f64) -> Result<f64> {
    check_unit_simplex(x)?;
    let n = x.len() as u32;
    if n == 0 || n > 20 {
        return Err(Error::DomainViolation(format!("dimension {n} unsupported")));
    }
    let sums = mask_sums(x);
    let mut total = 1.0;
    for b in 1..sums.len() {
        let k = popcount(b as u32);
        let s = sums[b];
        total += subsets::parity_sign(n + 1 - k) as f64 * pow0(s, alpha)
            + subsets::parity_sign(k) as f64 * pow0((1.0 - s).max(0.0), alpha);
    }
    Ok(total)
}

/// `g_n(alpha) = sum_{B ⊆ [n]} (-1)^{n-|B|} (sum_{i in B} p_i)^alpha` for a
/// positive probability vector `p`.
pub fn g_n(p: &[f64], alpha: f64) -> Result<f64> {
    if p.len() < 2 {
        return Err(Error::DomainViolation("need n >= 2".into()));
    }
    if p.iter().any(|v| !(*v > 0.0)) {
        return Err(Error::DomainViolation("probabilities must be positive".into()));
    }
    let s: f64 = p.iter().sum();
    if (s - 1.0).abs() > 1e-12 {
        return Err(Error::DomainViolation(format!("probabilities sum to {s}")));
    }
    let g = alternating_power_sum(p, alpha);
    debug_assert!({
        let f = f_n_alpha(&p[..p.len() - 1], alpha).unwrap_or(f64::NAN);
        (g - f).abs() <= 1e-9 * term_scale(p, alpha)
    });
    Ok(g)
}

/// `sum_{A ⊆ [n]} (-1)^{n-|A|} (sum_{i in A} p_i)^alpha`.
pub fn alternating_power_sum(p: &[f64], alpha: f64) -> f64 {
    let n = p.len() as u32;
    mask_sums(p)
        .iter()
        .enumerate()
        .map(|(a, &s)| subsets::parity_sign(n - popcount(a as u32)) as f64 * pow0(s, alpha))
        .sum()
}

/// `sum_A |(sum_{i in A} p_i)^alpha|`, the scale of the cancellation in
/// [`alternating_power_sum`].
pub fn term_scale(p: &[f64], alpha: f64) -> f64 {
    mask_sums(p).iter().map(|&s| pow0(s, alpha).abs()).sum()
}

fn mask_sums(x: &[f64]) -> Vec<f64> {
    let n = x.len();
    let mut sums = vec![0.0; 1 << n];
    for b in 1usize..(1 << n) {
        let low = b.trailing_zeros() as usize;
        sums[b] = sums[b & (b - 1)] + x[low];
    }
    sums
}

/// `(x_1 - x_2)(∂f/∂x_1 - ∂f/∂x_2)` for `f = f_{n,alpha}` by central differences.
pub fn schur_condition_check(n: usize, alpha: f64, x: &[f64], h: f64) -> Result<f64> {
    if x.len() != n || n < 2 {
        return Err(Error::DomainViolation(format!("need a point in dimension n = {n} >= 2")));
    }
    if !(alpha > (n - 1) as f64 && alpha < n as f64) {
        return Err(Error::DomainViolation(format!("alpha = {alpha} not in (n-1, n)")));
    }
    let s = check_unit_simplex(x)?;
    if x.iter().any(|&v| v <= 0.0) || s >= 1.0 {
        return Err(Error::DomainViolation("point must be interior".into()));
    }
    if x[0] == x[1] {
        return Err(Error::DomainViolation("condition needs x_1 != x_2".into()));
    }
    let room = x[0].min(x[1]).min(1.0 - s);
    if !(h > 0.0 && h < room) {
        return Err(Error::DomainViolation(format!("step {h} leaves the domain")));
    }
    let partial = |i: usize| -> Result<f64> {
        let mut up = x.to_vec();
        let mut down = x.to_vec();
        up[i] += h;
        down[i] -= h;
        Ok((f_n_alpha(&up, alpha)? - f_n_alpha(&down, alpha)?) / (2.0 * h))
    };
    Ok((x[0] - x[1]) * (partial(0)? - partial(1)?))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Prop10Report {
    pub n: usize,
    /// `(j, q(j))` for integers `1 <= j <= n-1`.
    pub integer_values: Vec<(u32, f64)>,
    pub integers_vanish: bool,
    /// Smallest `q` on the grid points above `n - 1`.
    pub min_beyond: f64,
    pub nonnegative_beyond: bool,
    /// Non-integer grid points below `n - 1` with `q < 0`.
    pub negative_points: Vec<(f64, f64)>,
    pub tolerance_rel: f64,
}

/// Evaluates `q(alpha) = sum_{A ⊆ [n]} (-1)^{n-|A|} (sum_{i in A} p_i)^alpha`
/// at the integers up to `n - 1` and on `alpha_grid`.
pub fn prop10_check(p: &[f64], alpha_grid: &[f64]) -> Result<Prop10Report> {
    if p.is_empty() || p.len() > 20 || p.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::InvalidProbabilityVector(
            "need 1..=20 positive entries".into(),
        ));
    }
    const REL: f64 = 1e-10;
    let n = p.len();
    let top = (n - 1) as f64;
    let integer_values: Vec<(u32, f64)> = (1..n as u32)
        .map(|j| (j, alternating_power_sum(p, j as f64)))
        .collect();
    let integers_vanish = integer_values
        .iter()
        .all(|&(j, q)| q.abs() <= REL * term_scale(p, j as f64));
    let mut min_beyond = f64::INFINITY;
    let mut nonnegative_beyond = true;
    let mut negative_points = Vec::new();
    for &a in alpha_grid {
        let q = alternating_power_sum(p, a);
        let tol = REL * term_scale(p, a);
        if a > top {
            min_beyond = min_beyond.min(q);
            nonnegative_beyond &= q >= -tol;
        } else if a.fract() != 0.0 && q < 0.0 {
            negative_points.push((a, q));
        }
    }
    Ok(Prop10Report {
        n,
        integer_values,
        integers_vanish,
        min_beyond,
        nonnegative_beyond,
        negative_points,
        tolerance_rel: REL,
    })
}
