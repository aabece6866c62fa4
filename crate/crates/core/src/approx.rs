//! Distances between `m`-divisible objects and infinitely divisible ones.
//!
//! Upper bounds come from the Poisson accompaniment, whose distance is
//! controlled by `sup_{0<=t<=1} |t^m - e^{m(t-1)}|`. Lower bounds come from
//! the two-point set on `{a, b}` with `P{∅} = 1 - 1/m` and mass `1/(2m)` on
//! each singleton, united `m` times.

use std::f64::consts::E;
use std::sync::Arc;

use rayon::prelude::*;
use serde::Serialize;

use crate::cm::{extend_cm, poisson_accompany, rational_function};
use crate::error::{Error, Result};
use crate::lattice::FiniteLattice;
use crate::randset::{d_v, poisson_union, two_point, RandomSubset};
use crate::scalar::Scalar;

pub const T_M_TOL: f64 = 1e-14;
/// Largest `m` scanned for the separation threshold.
pub const M0_SCAN: u32 = 10_000;

/// `2 / e^2`, the limit of `m * sup_gap(m)`.
pub fn two_over_e_squared() -> f64 {
    2.0 / (E * E)
}

/// `1 / (4 sqrt(e) (2 + sqrt(e)))`, the limit of `m * d_low(m)`.
pub fn lower_constant() -> f64 {
    let s = E.sqrt();
    1.0 / (4.0 * s * (2.0 + s))
}

/// `-log(t) / (1 - t)` written in `u = 1 - t`.
fn phi(u: f64) -> f64 {
    -(-u).ln_1p() / u
}

/// Root `t_m ∈ (0, 1)` of `-log(t)/(1 - t) = m/(m - 1)`.
pub fn t_m_solve(m: u32) -> Result<f64> {
    if m < 2 {
        return Err(Error::DomainViolation(format!("t_m needs m >= 2, got {m}")));
    }
    let target = m as f64 / (m - 1) as f64;
    // phi increases from 1 (u -> 0) to infinity (u -> 1).
    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    for _ in 0..200 {
        if hi - lo <= T_M_TOL * 0.01 {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if mid == lo || mid == hi {
            break;
        }
        if phi(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(1.0 - 0.5 * (lo + hi))
}

/// `|-log(t)/(1 - t) - m/(m - 1)|` at the computed root.
pub fn t_m_residual(m: u32) -> Result<f64> {
    let t = t_m_solve(m)?;
    Ok((phi(1.0 - t) - m as f64 / (m - 1) as f64).abs())
}

/// `sup_{0<=t<=1} |t^m - e^{m(t-1)}|`: `t_m^{m-1} (1 - t_m)` for `m >= 2`,
/// and `1/e` (attained at `t = 0`) for `m = 1`.
pub fn sup_gap(m: u32) -> Result<f64> {
    match m {
        0 => Err(Error::DomainViolation("m must be positive".into())),
        1 => Ok(1.0 / E),
        _ => {
            let t = t_m_solve(m)?;
            Ok(t.powi(m as i32 - 1) * (1.0 - t))
        }
    }
}

/// The same supremum by golden-section search on `e^{m(t-1)} - t^m`.
pub fn sup_gap_golden(m: u32) -> Result<f64> {
    if m == 0 {
        return Err(Error::DomainViolation("m must be positive".into()));
    }
    let mf = m as f64;
    let g = |t: f64| (mf * (t - 1.0)).exp() - t.powi(m as i32);
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (0.0f64, 1.0f64);
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut gc, mut gd) = (g(c), g(d));
    while b - a > 1e-13 {
        if gc >= gd {
            b = d;
            d = c;
            gd = gc;
            c = b - ratio * (b - a);
            gc = g(c);
        } else {
            a = c;
            c = d;
            gc = gd;
            d = a + ratio * (b - a);
            gd = g(d);
        }
    }
    Ok(g(0.5 * (a + b)).max(g(0.0)).max(g(1.0)))
}

/// `max_{m <= m_max} m * sup_gap(m)`, a candidate for the upper constant.
pub fn c1_candidate(m_max: u32) -> Result<(u32, f64)> {
    (1..=m_max)
        .into_par_iter()
        .map(|m| sup_gap(m).map(|g| (m, m as f64 * g)))
        .collect::<Result<Vec<_>>>()
        .map(|v| {
            v.into_iter()
                .fold((0, f64::MIN), |b, c| if c.1 > b.1 { c } else { b })
        })
}

/// `(V_{X_m}({a}), V_{X_m}({a,b})) = ((1 - 1/(2m))^m, (1 - 1/m)^m)`.
pub fn two_point_void(m: u32) -> (f64, f64) {
    let mf = m as f64;
    let v = (mf * (-0.5 / mf).ln_1p()).exp();
    let w = if m == 1 {
        0.0
    } else {
        (mf * (-1.0 / mf).ln_1p()).exp()
    };
    (v, w)
}

/// Smallest `d` compatible with an infinitely divisible `Y` within `d` of
/// `X_m`: the smaller root of `d^2 - (1 + 2v) d + (v^2 - w) = 0`.
pub fn d_low(m: u32) -> f64 {
    let (v, w) = two_point_void(m);
    let b = 1.0 + 2.0 * v;
    let c = v * v - w;
    // stable form of (b - sqrt(b^2 - 4c)) / 2
    2.0 * c / (b + (b * b - 4.0 * c).sqrt())
}

/// `(1 - 1/(2m))^{2m} - (1 - 1/m)^m`; positive for every `m`.
pub fn separation(m: u32) -> f64 {
    let (v, w) = two_point_void(m);
    v * v - w
}

/// Smallest `m0` with `separation(m) >= c / m` for all `m0 <= m <= M0_SCAN`.
pub fn separation_threshold(c: f64) -> Option<u32> {
    let holds: Vec<bool> = (1..=M0_SCAN)
        .into_par_iter()
        .map(|m| separation(m) >= c / m as f64)
        .collect();
    let last_fail = holds.iter().rposition(|h| !h);
    match last_fail {
        None => Some(1),
        Some(i) if i + 1 < holds.len() => Some(i as u32 + 2),
        Some(_) => None,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ApproxReport {
    pub m: u32,
    pub t_m: Option<f64>,
    pub sup_gap: f64,
    pub sup_gap_golden: f64,
    pub m_times_gap: f64,
    /// Masses of the two-point set, as `(mask, fraction)`.
    pub lower_witness: Vec<(u32, String)>,
    pub v_single: f64,
    pub v_pair: f64,
    /// `V(ab) - V(a) V(b)` for `X_m`; negative, so `X_m` itself fails the
    /// pair condition of infinitely divisible sets.
    pub necessary_condition_slack: f64,
    /// `(1 - 1/m)^m - (1 - 1/(2m))^{2m}` against `4/(e m)`.
    pub separation_as_stated: f64,
    pub separation_as_stated_holds: bool,
    /// `(1 - 1/(2m))^{2m} - (1 - 1/m)^m` against `1/(4 e m)`.
    pub separation: f64,
    pub separation_bound: f64,
    pub separation_holds: bool,
    pub m0: Option<u32>,
    pub m0_as_stated: Option<u32>,
    pub d_low: f64,
    pub m_times_d_low: f64,
    pub lower_constant: f64,
    pub notes: Vec<String>,
}

pub fn lower_bound_witness(m: u32) -> Result<ApproxReport> {
    let x = two_point(m)?;
    let gap = sup_gap(m)?;
    let mf = m as f64;
    let (v, w) = two_point_void(m);
    let stated = w - v * v;
    let stated_bound = 4.0 / (E * mf);
    let sep = separation(m);
    let sep_bound = 1.0 / (4.0 * E * mf);
    let m0 = separation_threshold(1.0 / (4.0 * E));
    let m0_as_stated = {
        let holds = (1..=M0_SCAN).any(|k| {
            let (v, w) = two_point_void(k);
            w - v * v >= 4.0 / (E * k as f64)
        });
        if holds {
            Some(1)
        } else {
            None
        }
    };
    let dl = d_low(m);
    let mut notes = Vec::new();
    if m0_as_stated.is_none() {
        notes.push(format!(
            "(1-1/m)^m - (1-1/(2m))^(2m) is negative for all m <= {M0_SCAN}; the separation holds with the sign reversed and constant 1/(4e)"
        ));
    }
    notes.push("psi_m itself is not computed; d_low is a lower estimate and sup_gap an upper bound".into());
    Ok(ApproxReport {
        m,
        t_m: if m >= 2 { Some(t_m_solve(m)?) } else { None },
        sup_gap: gap,
        sup_gap_golden: sup_gap_golden(m)?,
        m_times_gap: mf * gap,
        lower_witness: x
            .support()
            .into_iter()
            .map(|(a, p)| (a, p.to_string()))
            .collect(),
        v_single: v,
        v_pair: w,
        necessary_condition_slack: w - v * v,
        separation_as_stated: stated,
        separation_as_stated_holds: stated >= stated_bound,
        separation: sep,
        separation_bound: sep_bound,
        separation_holds: sep >= sep_bound,
        m0,
        m0_as_stated,
        d_low: dl,
        m_times_d_low: mf * dl,
        lower_constant: lower_constant(),
        notes,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UpperBoundReport {
    pub m: u32,
    pub distance: f64,
    pub sup_gap: f64,
    pub holds: bool,
}

/// `d_V(X_m, Y)` for `X_m` the union of `m` copies of `X` and `Y` the union
/// of `Poisson(m)` copies.
pub fn upper_bound_witness<S: Scalar>(x: &RandomSubset<S>, m: u32) -> Result<UpperBoundReport> {
    let xm = x.union_iid(m)?;
    let y = poisson_union(x, m as f64)?;
    let distance = d_v(&xm, &y)?;
    let gap = sup_gap(m)?;
    let holds = distance <= gap + 1e-12;
    debug_assert!(holds, "accompaniment distance {distance} exceeds {gap}");
    Ok(UpperBoundReport {
        m,
        distance,
        sup_gap: gap,
        holds,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct LatticeTauReport {
    pub m: u32,
    /// `[a, b, c, d]` with `a = b ∧ c` and `d = b ∨ c`.
    pub square: [usize; 4],
    /// Extension of `(1, 1 - 1/(2m), 1 - 1/(2m), 1 - 1/m)` from the square.
    pub root: Vec<f64>,
    /// The `m`-divisible function `root^m`.
    pub divisible: Vec<f64>,
    /// Its accompaniment `exp(-m (1 - root))`.
    pub accompaniment: Vec<f64>,
    pub distance: f64,
    pub sup_gap: f64,
    pub within_gap: bool,
    /// `F(d) - F(b) F(c)` for `F = root^m`.
    pub necessary_condition_slack: f64,
    pub d_low: f64,
}

pub fn lattice_tau_witness(lattice: &Arc<FiniteLattice>, m: u32) -> Result<LatticeTauReport> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be positive".into()));
    }
    let square = lattice.find_square().ok_or(Error::ChainLattice)?;
    let sub = lattice.sublattice(&square)?;
    let mi = m as i64;
    let local_value = |host: usize| -> (i64, i64) {
        if host == square[0] {
            (1, 1)
        } else if host == square[3] {
            (mi - 1, mi)
        } else {
            (2 * mi - 1, 2 * mi)
        }
    };
    let values: Vec<(i64, i64)> = sub.embedding.iter().map(|&h| local_value(h)).collect();
    let f = rational_function(Arc::clone(&sub.lattice), &values)?;
    let root = extend_cm(&f, &sub)?;
    let big = root.power(m as f64)?;
    let acc = poisson_accompany(&big, m)?;
    let distance = big.sup_distance(&acc)?;
    let gap = sup_gap(m)?;
    let fv = big.values();
    Ok(LatticeTauReport {
        m,
        square,
        root: root.to_f64().values().to_vec(),
        divisible: fv.to_vec(),
        accompaniment: acc.values().to_vec(),
        distance,
        sup_gap: gap,
        within_gap: distance <= gap + 1e-12,
        necessary_condition_slack: fv[square[3]] - fv[square[1]] * fv[square[2]],
        d_low: d_low(m),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PsiRow {
    pub m: u32,
    pub t_m: Option<f64>,
    pub sup_gap: f64,
    pub m_gap: f64,
    pub d_low: f64,
    pub m_d_low: f64,
    pub separation: f64,
}

pub fn psi_table(ms: &[u32]) -> Result<Vec<PsiRow>> {
    ms.par_iter()
        .map(|&m| {
            let gap = sup_gap(m)?;
            let dl = d_low(m);
            Ok(PsiRow {
                m,
                t_m: if m >= 2 { Some(t_m_solve(m)?) } else { None },
                sup_gap: gap,
                m_gap: m as f64 * gap,
                d_low: dl,
                m_d_low: m as f64 * dl,
                separation: separation(m),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{chain, diamond};
    use crate::randset::RandomSubset;
    use crate::scalar::Rational;

    #[test]
    fn t_two() {
        let t = t_m_solve(2).unwrap();
        assert!((t - 0.2032).abs() < 1e-4);
        assert!(t_m_residual(2).unwrap() <= 1e-12);
        assert!(t_m_solve(1).is_err());
        let t = t_m_solve(1000).unwrap();
        assert!((t - (1.0 - 2.0 / 1000.0)).abs() <= 5e-6);
    }

    #[test]
    fn gap_formulas_agree() {
        assert!((sup_gap(1).unwrap() - 1.0 / E).abs() < 1e-15);
        for m in [1u32, 2, 3, 7, 50, 400] {
            let a = sup_gap(m).unwrap();
            let b = sup_gap_golden(m).unwrap();
            assert!((a - b).abs() < 1e-10, "m = {m}: {a} vs {b}");
            if m >= 2 {
                let t = t_m_solve(m).unwrap();
                let alt = t.powi(m as i32 - 1) - t.powi(m as i32);
                assert!((a - alt).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn constants() {
        assert!((lower_constant() - 0.0415577551).abs() < 1e-10);
        assert!((two_over_e_squared() - 0.27067).abs() < 1e-5);
        let m = 1000;
        assert!((m as f64 * d_low(m) - 0.041587).abs() < 1e-5);
    }

    #[test]
    fn closed_form_void_matches_union() {
        for m in [1u32, 2, 3, 6] {
            let xm = two_point(m).unwrap().union_iid(m).unwrap();
            let v = xm.void_functional();
            let (a, b) = two_point_void(m);
            assert!((v.values()[1].to_f64() - a).abs() < 1e-15);
            assert!((v.values()[3].to_f64() - b).abs() < 1e-15);
        }
    }

    #[test]
    fn lower_report() {
        let r = lower_bound_witness(100).unwrap();
        assert!(r.necessary_condition_slack < 0.0);
        assert!(!r.separation_as_stated_holds);
        assert!(r.separation_holds);
        assert_eq!(r.m0, Some(1));
        assert_eq!(r.m0_as_stated, None);
        assert!((4.0 / (E * 100.0) - 0.014715).abs() < 1e-6);
    }

    #[test]
    fn upper_witness_examples() {
        let e = RandomSubset::<Rational>::empty(2).unwrap();
        assert_eq!(upper_bound_witness(&e, 5).unwrap().distance, 0.0);
        let r = upper_bound_witness(&two_point(100).unwrap(), 100).unwrap();
        assert!(r.holds);
        assert!((r.sup_gap - 0.0027).abs() < 1e-4);
    }

    #[test]
    fn tau_witness() {
        let b2 = Arc::new(FiniteLattice::boolean(2).unwrap());
        let r = lattice_tau_witness(&b2, 10).unwrap();
        assert_eq!(r.square, [0, 1, 2, 3]);
        let xm = two_point(10).unwrap().union_iid(10).unwrap();
        let y = poisson_union(&two_point(10).unwrap(), 10.0).unwrap();
        // the lattice function is the void functional indexed by K
        let vx = xm.void_functional();
        let vy = y.void_functional();
        for k in 0..4 {
            assert!((r.divisible[k] - vx.values()[k].to_f64()).abs() < 1e-14);
            assert!((r.accompaniment[k] - vy.values()[k]).abs() < 1e-12);
        }
        assert!(r.within_gap);

        let m3 = Arc::new(diamond(3).unwrap());
        let r = lattice_tau_witness(&m3, 5).unwrap();
        assert_eq!(r.square, [0, 1, 2, 4]);
        assert!(r.distance <= sup_gap(5).unwrap());

        let c = Arc::new(chain(3).unwrap());
        assert_eq!(lattice_tau_witness(&c, 3).unwrap_err(), Error::ChainLattice);
    }
}
