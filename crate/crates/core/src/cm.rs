//! Discrete differences, Möbius weights and complete monotonicity on a
//! finite lattice.
//!
//! For `f: L -> [0, inf)` the Möbius weight `p` is the unique function with
//! `f(x) = sum_{y >= x} p(y)`. The function `f` is completely monotone
//! exactly when `p >= 0`, and `p(x)` equals the iterated difference of `f`
//! at `x` taken over all covers of `x`.

use std::sync::Arc;

use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::lattice::{FiniteLattice, Sublattice};
use crate::scalar::{max_abs, Rational, Scalar, ScalarKind};
use crate::subsets;

/// Relative tolerance for float-mode sign decisions on weights.
pub const DEFAULT_REL_TOL: f64 = 1e-9;

/// Work budget for [`LatticeFunction::is_cm_bruteforce`].
pub const BRUTEFORCE_BUDGET: u128 = 10_000_000;

const MAX_DELTA_ARGS: usize = 24;

/// A nonnegative function on a lattice.
#[derive(Debug, Clone, PartialEq)]
pub struct LatticeFunction<S> {
    lattice: Arc<FiniteLattice>,
    values: Vec<S>,
}

/// Möbius weights `p` of a lattice function; may take negative values.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightFunction<S> {
    lattice: Arc<FiniteLattice>,
    weights: Vec<S>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CmCertificate<S> {
    pub element: usize,
    /// Covers of `element`; the iterated difference over them equals `weight`.
    pub covers: Vec<usize>,
    pub weight: S,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CmVerdict<S> {
    pub is_cm: bool,
    pub min_weight: S,
    /// Absolute tolerance used (zero in exact mode).
    pub tolerance: f64,
    /// Elements whose weight is nonzero but within the tolerance band.
    pub indeterminate: Vec<usize>,
    pub certificate: Option<CmCertificate<S>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BruteForceVerdict<S> {
    pub is_cm: bool,
    /// First violating `(args, base, value)` in enumeration order.
    pub witness: Option<(Vec<usize>, usize, S)>,
    pub evaluations: u64,
}

fn check_len(lattice: &FiniteLattice, found: usize) -> Result<()> {
    if lattice.len() == found {
        Ok(())
    } else {
        Err(Error::LengthMismatch {
            expected: lattice.len(),
            found,
        })
    }
}

fn abs_tolerance<S: Scalar>(values: &[S], rel: f64) -> f64 {
    match S::KIND {
        ScalarKind::Exact => 0.0,
        ScalarKind::Float => rel * max_abs(values),
    }
}

impl<S: Scalar> LatticeFunction<S> {
    pub fn new(lattice: Arc<FiniteLattice>, values: Vec<S>) -> Result<Self> {
        check_len(&lattice, values.len())?;
        if let Some((element, v)) = values.iter().enumerate().find(|(_, v)| v.below_zero()) {
            return Err(Error::NegativeValue {
                element,
                value: v.to_string(),
            });
        }
        Ok(LatticeFunction { lattice, values })
    }

    pub fn constant(lattice: Arc<FiniteLattice>, c: S) -> Result<Self> {
        let values = vec![c; lattice.len()];
        Self::new(lattice, values)
    }

    pub fn lattice(&self) -> &Arc<FiniteLattice> {
        &self.lattice
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn value(&self, x: usize) -> &S {
        &self.values[x]
    }

    pub fn into_values(self) -> Vec<S> {
        self.values
    }

    pub fn to_f64(&self) -> LatticeFunction<f64> {
        LatticeFunction {
            lattice: Arc::clone(&self.lattice),
            values: self.values.iter().map(Scalar::to_f64).collect(),
        }
    }

    /// `Δ_{x_k} ... Δ_{x_1} f(x)`: the alternating sum of `f(x ∨ ⋁_{i∈J} x_i)` over `J ⊆ [k]`.
    pub fn delta(&self, args: &[usize], base: usize) -> Result<S> {
        let l = &self.lattice;
        l.check_element(base)?;
        for &a in args {
            l.check_element(a)?;
        }
        if args.len() > MAX_DELTA_ARGS {
            return Err(Error::InvalidArgument(format!(
                "at most {MAX_DELTA_ARGS} difference arguments supported"
            )));
        }
        let k = args.len();
        let mut joins = vec![base; 1 << k];
        let mut total = self.values[base].clone();
        for mask in 1usize..(1 << k) {
            let low = mask.trailing_zeros() as usize;
            joins[mask] = l.join(joins[mask & (mask - 1)], args[low]);
            let v = &self.values[joins[mask]];
            if mask.count_ones() % 2 == 0 {
                total = total + v.clone();
            } else {
                total = total - v.clone();
            }
        }
        Ok(total)
    }

    /// Weights computed top-down: `p(x) = f(x) - sum_{y > x} p(y)`.
    pub fn mobius_weights(&self) -> WeightFunction<S> {
        let l = &self.lattice;
        let weights = if l.boolean_bits().is_some() {
            let mut w = self.values.clone();
            subsets::superset_mobius(&mut w);
            w
        } else {
            let mut w: Vec<Option<S>> = vec![None; l.len()];
            for x in l.top_down_order() {
                let above = l
                    .strictly_above(x)
                    .into_iter()
                    .fold(S::zero(), |acc, y| {
                        acc + w[y].clone().expect("upper elements are processed first")
                    });
                w[x] = Some(self.values[x].clone() - above);
            }
            w.into_iter().map(Option::unwrap).collect()
        };
        WeightFunction {
            lattice: Arc::clone(&self.lattice),
            weights,
        }
    }

    pub fn is_cm(&self) -> CmVerdict<S> {
        self.is_cm_with(DEFAULT_REL_TOL)
    }

    /// Weight test with float tolerance `rel_tol * max|f|`.
    pub fn is_cm_with(&self, rel_tol: f64) -> CmVerdict<S> {
        let tol = abs_tolerance(&self.values, rel_tol);
        let p = self.mobius_weights();
        let (argmin, min_weight) = p
            .weights
            .iter()
            .enumerate()
            .fold(None::<(usize, &S)>, |best, (i, w)| match best {
                Some((_, b)) if b <= w => best,
                _ => Some((i, w)),
            })
            .map(|(i, w)| (i, w.clone()))
            .expect("lattices are nonempty");
        let indeterminate = match S::KIND {
            ScalarKind::Exact => Vec::new(),
            ScalarKind::Float => p
                .weights
                .iter()
                .enumerate()
                .filter(|(_, w)| {
                    let a = w.to_f64().abs();
                    a > 0.0 && a <= tol
                })
                .map(|(i, _)| i)
                .collect(),
        };
        let is_cm = !min_weight.is_below(tol);
        let certificate = (!is_cm).then(|| CmCertificate {
            element: argmin,
            covers: self.lattice.covers(argmin),
            weight: min_weight.clone(),
        });
        CmVerdict {
            is_cm,
            min_weight,
            tolerance: tol,
            indeterminate,
            certificate,
        }
    }

    /// Checks every iterated difference over sets of at most `max_len`
    /// distinct elements at every base point.
    ///
    /// Elements below the base give a zero difference and are skipped.
    pub fn is_cm_bruteforce(&self, max_len: usize) -> Result<BruteForceVerdict<S>> {
        let n = self.lattice.len();
        let required = bruteforce_cost(n, max_len);
        if required > BRUTEFORCE_BUDGET {
            return Err(Error::BudgetExceeded {
                required,
                budget: BRUTEFORCE_BUDGET,
            });
        }
        let tol = abs_tolerance(&self.values, DEFAULT_REL_TOL);
        let mut evaluations = 0u64;
        for k in 0..=max_len.min(n) {
            for base in 0..n {
                let pool: Vec<usize> = (0..n).filter(|&y| !self.lattice.leq(y, base)).collect();
                let mut found = None;
                for_each_combination(pool.len(), k, |idx| {
                    let args: Vec<usize> = idx.iter().map(|&i| pool[i]).collect();
                    let v = self.delta(&args, base).expect("indices are in range");
                    evaluations += 1;
                    if v.is_below(tol) {
                        found = Some((args, base, v));
                        return false;
                    }
                    true
                });
                if found.is_some() {
                    return Ok(BruteForceVerdict {
                        is_cm: false,
                        witness: found,
                        evaluations,
                    });
                }
            }
        }
        Ok(BruteForceVerdict {
            is_cm: true,
            witness: None,
            evaluations,
        })
    }

    /// Pointwise `f^alpha` in floating point, with `0^0 = 1`.
    pub fn power(&self, alpha: f64) -> Result<LatticeFunction<f64>> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::DomainViolation(format!("exponent {alpha} must be >= 0")));
        }
        Ok(LatticeFunction {
            lattice: Arc::clone(&self.lattice),
            values: self.values.iter().map(|v| pow0(v.to_f64(), alpha)).collect(),
        })
    }

    /// Pointwise `f^k`, staying in the scalar type.
    pub fn power_int(&self, k: u32) -> LatticeFunction<S> {
        LatticeFunction {
            lattice: Arc::clone(&self.lattice),
            values: self.values.iter().map(|v| v.powi(k)).collect(),
        }
    }

    pub fn product(&self, other: &LatticeFunction<S>) -> Result<LatticeFunction<S>> {
        if self.lattice != other.lattice {
            return Err(Error::LatticeMismatch);
        }
        Ok(LatticeFunction {
            lattice: Arc::clone(&self.lattice),
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.clone() * b.clone())
                .collect(),
        })
    }

    /// Values on the elements of a sublattice, as a function on its local lattice.
    pub fn restrict(&self, sub: &Sublattice) -> Result<LatticeFunction<S>> {
        if *sub.host != *self.lattice {
            return Err(Error::LatticeMismatch);
        }
        Ok(LatticeFunction {
            lattice: Arc::clone(&sub.lattice),
            values: sub.embedding.iter().map(|&x| self.values[x].clone()).collect(),
        })
    }

    /// `max_x |f(x) - g(x)|`.
    pub fn sup_distance<T: Scalar>(&self, other: &LatticeFunction<T>) -> Result<f64> {
        if self.lattice != other.lattice {
            return Err(Error::LatticeMismatch);
        }
        Ok(self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| (a.to_f64() - b.to_f64()).abs())
            .fold(0.0, f64::max))
    }
}

/// `x^alpha` with `0^0 = 1`.
pub fn pow0(x: f64, alpha: f64) -> f64 {
    if alpha == 0.0 {
        1.0
    } else {
        x.powf(alpha)
    }
}

/// `sum_{k <= max_len} C(n, k) 2^k`, the brute-force work estimate.
pub fn bruteforce_cost(n: usize, max_len: usize) -> u128 {
    let mut total: u128 = 0;
    let mut binom: u128 = 1;
    for k in 0..=max_len.min(n) {
        if k > 0 {
            binom = binom * (n - k + 1) as u128 / k as u128;
        }
        total = total.saturating_add(binom.saturating_mul(1u128 << k.min(126)));
    }
    total
}

/// Visits the `k`-subsets of `0..n` in lexicographic order until `visit` returns false.
fn for_each_combination(n: usize, k: usize, mut visit: impl FnMut(&[usize]) -> bool) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        if !visit(&idx) {
            return;
        }
        let Some(i) = (0..k).rev().find(|&i| idx[i] != i + n - k) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

impl<S: Scalar> WeightFunction<S> {
    pub fn new(lattice: Arc<FiniteLattice>, weights: Vec<S>) -> Result<Self> {
        check_len(&lattice, weights.len())?;
        Ok(WeightFunction { lattice, weights })
    }

    pub fn lattice(&self) -> &Arc<FiniteLattice> {
        &self.lattice
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    /// `g(x) = sum_{y >= x} p(y)`; fails if some value is negative.
    pub fn reconstruct(&self) -> Result<LatticeFunction<S>> {
        let l = &self.lattice;
        let values = if l.boolean_bits().is_some() {
            let mut v = self.weights.clone();
            subsets::superset_sum(&mut v);
            v
        } else {
            (0..l.len())
                .map(|x| {
                    l.strictly_above(x)
                        .into_iter()
                        .fold(self.weights[x].clone(), |acc, y| acc + self.weights[y].clone())
                })
                .collect()
        };
        LatticeFunction::new(Arc::clone(&self.lattice), values)
    }
}

/// Checks `f^alpha` for a completely monotone `f`.
///
/// In debug builds, a negative verdict where the exponent is an integer or at
/// least `d_max - 1` trips an assertion.
pub fn cm_power_threshold_check<S: Scalar>(
    f: &LatticeFunction<S>,
    alpha: f64,
) -> Result<CmVerdict<f64>> {
    let base = f.is_cm();
    if let Some(cert) = base.certificate {
        return Err(Error::NotCmInput {
            element: cert.element,
        });
    }
    let verdict = f.power(alpha)?.is_cm();
    let d_max = f.lattice().d_max() as f64;
    debug_assert!(
        verdict.is_cm || !(alpha.fract() == 0.0 || alpha >= d_max - 1.0),
        "power {alpha} of a c.m. function failed with d_max = {d_max}"
    );
    Ok(verdict)
}

/// A completely monotone function on a distributive lattice whose
/// non-integer powers below `d_max - 1` fail to be completely monotone.
///
/// Picks the first `x` with `d_x = d_max`, puts weight `1/d_max` on each
/// `x ∨ (join of all covers of x but one)` and zero elsewhere.
pub fn sharpness_witness(lattice: &Arc<FiniteLattice>) -> Result<LatticeFunction<Rational>> {
    if !lattice.is_distributive() {
        return Err(Error::NotDistributive);
    }
    let d_max = lattice.d_max();
    if d_max <= 1 {
        return Err(Error::NoSharpnessNeeded { d_max });
    }
    let x = (0..lattice.len())
        .find(|&x| lattice.cover_degree(x) == d_max)
        .expect("d_max is attained");
    let covers = lattice.covers(x);
    let share = Rational::from_ratio(1, d_max as i64);
    let mut weights = vec![Rational::zero(); lattice.len()];
    for skip in 0..d_max {
        let y = lattice.join_all(
            x,
            covers.iter().enumerate().filter(|&(i, _)| i != skip).map(|(_, &c)| c),
        );
        weights[y] += share.clone();
    }
    WeightFunction::new(Arc::clone(lattice), weights)?.reconstruct()
}

/// Extends a completely monotone function on a sublattice to the host by
/// zero-extending its weights.
pub fn extend_cm<S: Scalar>(f: &LatticeFunction<S>, sub: &Sublattice) -> Result<LatticeFunction<S>> {
    if *f.lattice != *sub.lattice {
        return Err(Error::LatticeMismatch);
    }
    let verdict = f.is_cm();
    if let Some(cert) = verdict.certificate {
        return Err(Error::NotCmInput {
            element: sub.embedding[cert.element],
        });
    }
    let local = f.mobius_weights();
    let mut weights = vec![S::zero(); sub.host.len()];
    for (i, w) in local.weights.into_iter().enumerate() {
        weights[sub.embedding[i]] = w;
    }
    let extended = WeightFunction::new(Arc::clone(&sub.host), weights)?.reconstruct()?;
    debug_assert!(sub
        .embedding
        .iter()
        .zip(f.values())
        .all(|(&x, v)| (extended.values[x].to_f64() - v.to_f64()).abs()
            <= 1e-12 * (1.0 + v.to_f64().abs())));
    Ok(extended)
}

/// `exp(-m (1 - f^{1/m}))` pointwise.
pub fn poisson_accompany<S: Scalar>(f: &LatticeFunction<S>, m: u32) -> Result<LatticeFunction<f64>> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be positive".into()));
    }
    let one = S::one();
    if let Some((element, v)) = f
        .values
        .iter()
        .enumerate()
        .find(|(_, v)| v.below_zero() || **v > one)
    {
        return Err(Error::ValueOutOfUnitInterval {
            element,
            value: v.to_f64(),
        });
    }
    let mf = m as f64;
    Ok(LatticeFunction {
        lattice: Arc::clone(&f.lattice),
        values: f
            .values
            .iter()
            .map(|v| (-mf * (1.0 - v.to_f64().powf(1.0 / mf))).exp())
            .collect(),
    })
}

/// Convenience: rational function from `(num, den)` pairs.
pub fn rational_function(
    lattice: Arc<FiniteLattice>,
    values: &[(i64, i64)],
) -> Result<LatticeFunction<Rational>> {
    LatticeFunction::new(
        lattice,
        values.iter().map(|&(a, b)| Rational::from_ratio(a, b)).collect(),
    )
}

impl LatticeFunction<Rational> {
    pub fn one(lattice: Arc<FiniteLattice>) -> Self {
        let values = vec![Rational::one(); lattice.len()];
        LatticeFunction { lattice, values }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::{catalog, chain, diamond, product};

    fn b2() -> Arc<FiniteLattice> {
        Arc::new(FiniteLattice::boolean(2).unwrap())
    }

    fn example_two(p: f64) -> LatticeFunction<f64> {
        LatticeFunction::new(b2(), vec![1.0, 1.0 - p, p, 0.0]).unwrap()
    }

    #[test]
    fn delta_matches_closed_form() {
        for (p, alpha) in [(0.3, 0.7), (0.5, 0.5), (0.2, 1.5)] {
            let f = example_two(p).power(alpha).unwrap();
            let d = f.delta(&[1, 2], 0).unwrap();
            let expected = 1.0 - f64::powf(p, alpha) - f64::powf(1.0 - p, alpha);
            assert!((d - expected).abs() < 1e-15);
        }
        let f = example_two(0.5).power(0.5).unwrap();
        assert!((f.delta(&[1, 2], 0).unwrap() - (1.0 - 2f64.sqrt())).abs() < 1e-12);
        assert_eq!(f.delta(&[], 1).unwrap(), f.values()[1]);
    }

    #[test]
    fn weights_of_example_two() {
        let f = rational_function(b2(), &[(1, 1), (2, 3), (1, 3), (0, 1)]).unwrap();
        let p = f.mobius_weights();
        let expected: Vec<Rational> = [(0, 1), (2, 3), (1, 3), (0, 1)]
            .iter()
            .map(|&(a, b)| Rational::from_ratio(a, b))
            .collect();
        // order: {} , {1}, {2}, {1,2}
        assert_eq!(p.weights()[3], expected[0]);
        assert_eq!(p.weights()[1], expected[1]);
        assert_eq!(p.weights()[2], expected[2]);
        assert_eq!(p.weights()[0], expected[3]);
        assert_eq!(p.reconstruct().unwrap(), f);
    }

    #[test]
    fn constant_has_weight_at_top() {
        let l = Arc::new(diamond(3).unwrap());
        let f = LatticeFunction::constant(Arc::clone(&l), Rational::from_ratio(7, 2)).unwrap();
        let p = f.mobius_weights();
        for x in 0..l.len() {
            let expected = if x == l.top() {
                Rational::from_ratio(7, 2)
            } else {
                Rational::zero()
            };
            assert_eq!(p.weights()[x], expected);
        }
        assert!(f.is_cm().is_cm);
    }

    #[test]
    fn reconstruct_counts_upper_elements() {
        let l = Arc::new(diamond(3).unwrap());
        let p = WeightFunction::new(Arc::clone(&l), vec![Rational::one(); 5]).unwrap();
        let g = p.reconstruct().unwrap();
        let expected: Vec<Rational> = [5, 2, 2, 2, 1].iter().map(|&k| Rational::from_ratio(k, 1)).collect();
        assert_eq!(g.values(), expected.as_slice());
    }

    #[test]
    fn reconstruct_rejects_negative_values() {
        let l = Arc::new(chain(2).unwrap());
        let p = WeightFunction::new(l, vec![Rational::zero(), Rational::from_ratio(-1, 1)]).unwrap();
        assert!(matches!(p.reconstruct(), Err(Error::NegativeValue { .. })));
    }

    #[test]
    fn example_two_half_root_is_not_cm() {
        let f = example_two(0.5).power(0.5).unwrap();
        let v = f.is_cm();
        assert!(!v.is_cm);
        let cert = v.certificate.unwrap();
        assert_eq!(cert.element, 0);
        assert!((cert.weight - (1.0 - 2f64.sqrt())).abs() < 1e-12);
        let again = f.delta(&cert.covers, cert.element).unwrap();
        assert!((again - cert.weight).abs() < 1e-12);

        let bf = f.is_cm_bruteforce(4).unwrap();
        assert!(!bf.is_cm);
        let (args, base, _) = bf.witness.unwrap();
        assert_eq!((args, base), (vec![1, 2], 0));
    }

    #[test]
    fn bruteforce_budget_guard() {
        let l = Arc::new(FiniteLattice::boolean(5).unwrap());
        let f = LatticeFunction::constant(l, 1.0).unwrap();
        assert!(matches!(
            f.is_cm_bruteforce(32),
            Err(Error::BudgetExceeded { .. })
        ));
        assert_eq!(bruteforce_cost(3, 3), 27);
    }

    #[test]
    fn combinations_in_lexicographic_order() {
        let mut seen = Vec::new();
        for_each_combination(4, 2, |c| {
            seen.push(c.to_vec());
            true
        });
        assert_eq!(seen.len(), 6);
        assert_eq!(seen[0], vec![0, 1]);
        assert_eq!(seen[5], vec![2, 3]);
        let mut count = 0;
        for_each_combination(3, 0, |_| {
            count += 1;
            true
        });
        assert_eq!(count, 1);
    }

    #[test]
    fn powers_and_zero_exponent() {
        let f = example_two(0.25);
        assert_eq!(f.power(1.0).unwrap().values(), f.values());
        assert!(f.power(0.0).unwrap().values().iter().all(|&v| v == 1.0));
        let g = rational_function(b2(), &[(1, 1), (1, 2), (1, 2), (1, 4)]).unwrap();
        assert!(g.power_int(3).is_cm().is_cm);
    }

    #[test]
    fn diamond_example_powers() {
        let l = Arc::new(diamond(3).unwrap());
        let w = WeightFunction::new(
            Arc::clone(&l),
            [(0, 1), (1, 4), (1, 4), (1, 4), (1, 4)]
                .iter()
                .map(|&(a, b)| Rational::from_ratio(a, b))
                .collect(),
        )
        .unwrap();
        let f = w.reconstruct().unwrap();
        for alpha in [1.0, 1.25, 1.5, 2.0, 2.5] {
            assert!(cm_power_threshold_check(&f, alpha).unwrap().is_cm, "alpha {alpha}");
        }
        // below one the bottom weight turns negative
        let v = f.power(0.5).unwrap().is_cm();
        assert!(!v.is_cm);
        let h = 1.0 - 3.0 * 0.5f64.sqrt() + 2.0 * 0.25f64.sqrt();
        assert!((v.min_weight - h).abs() < 1e-12);
    }

    #[test]
    fn threshold_check_rejects_non_cm_input() {
        let f = example_two(0.5).power(0.5).unwrap();
        assert!(matches!(
            cm_power_threshold_check(&f, 2.0),
            Err(Error::NotCmInput { element: 0 })
        ));
    }

    #[test]
    fn sharpness_on_boolean_three_is_uniform_singleton() {
        let l = Arc::new(FiniteLattice::boolean(3).unwrap());
        let f = sharpness_witness(&l).unwrap();
        for k in 0..8u32 {
            let expected = Rational::from_ratio(3 - k.count_ones() as i64, 3);
            assert_eq!(f.values()[k as usize], expected);
        }
        assert!(f.is_cm().is_cm);
        assert!(!f.power(1.5).unwrap().is_cm().is_cm);
    }

    #[test]
    fn sharpness_errors() {
        let c = Arc::new(chain(4).unwrap());
        assert_eq!(
            sharpness_witness(&c).unwrap_err(),
            Error::NoSharpnessNeeded { d_max: 1 }
        );
        let m3 = Arc::new(diamond(3).unwrap());
        assert_eq!(sharpness_witness(&m3).unwrap_err(), Error::NotDistributive);
    }

    #[test]
    fn sharpness_on_product() {
        let l = Arc::new(product(&chain(2).unwrap(), &FiniteLattice::boolean(2).unwrap()).unwrap());
        assert_eq!(l.d_max(), 3);
        let f = sharpness_witness(&l).unwrap();
        assert!(f.is_cm().is_cm);
        let v = f.power(1.5).unwrap().is_cm();
        assert!(!v.is_cm);
        assert!(v.min_weight < -1e-8);
    }

    #[test]
    fn extension_restricts_back() {
        let host = Arc::new(FiniteLattice::boolean(3).unwrap());
        let sub = host.sublattice(&[0, 1, 2, 3]).unwrap();
        let m = 5;
        let f = rational_function(
            Arc::clone(&sub.lattice),
            &[(1, 1), (2 * m - 1, 2 * m), (2 * m - 1, 2 * m), (m - 1, m)],
        )
        .unwrap();
        let g = extend_cm(&f, &sub).unwrap();
        assert_eq!(g.restrict(&sub).unwrap(), f);
        assert!(g.is_cm().is_cm);

        let same = host.sublattice(&(0..8).collect::<Vec<_>>()).unwrap();
        let h = sharpness_witness(&host).unwrap();
        let local = LatticeFunction::new(Arc::clone(&same.lattice), h.values().to_vec()).unwrap();
        assert_eq!(extend_cm(&local, &same).unwrap().values(), h.values());
    }

    #[test]
    fn extension_from_chain_in_diamond() {
        let host = Arc::new(diamond(3).unwrap());
        let sub = host.sublattice(&[0, 2, 4]).unwrap();
        let f = rational_function(Arc::clone(&sub.lattice), &[(1, 1), (1, 2), (1, 5)]).unwrap();
        let g = extend_cm(&f, &sub).unwrap();
        assert!(g.is_cm().is_cm);
        assert_eq!(g.restrict(&sub).unwrap(), f);
    }

    #[test]
    fn accompaniment() {
        let l = b2();
        let one = LatticeFunction::constant(Arc::clone(&l), 1.0).unwrap();
        assert!(poisson_accompany(&one, 3).unwrap().values().iter().all(|&v| v == 1.0));
        let m = 4u32;
        let t = 0.6f64;
        let fm = LatticeFunction::constant(Arc::clone(&l), t.powi(m as i32)).unwrap();
        let g = poisson_accompany(&fm, m).unwrap();
        assert!((g.values()[0] - (m as f64 * (t - 1.0)).exp()).abs() < 1e-14);
        let too_big = LatticeFunction::constant(l, 1.5).unwrap();
        assert!(matches!(
            poisson_accompany(&too_big, 2),
            Err(Error::ValueOutOfUnitInterval { .. })
        ));
    }

    #[test]
    fn catalog_weights_roundtrip() {
        for (name, l) in catalog::small() {
            let n = l.len() as i64;
            let values: Vec<Rational> = (0..n).map(|i| Rational::from_ratio(i * i + 1, n + 3)).collect();
            let f = LatticeFunction::new(Arc::clone(&l), values).unwrap();
            assert_eq!(f.mobius_weights().reconstruct().unwrap(), f, "{name}");
        }
    }
}
