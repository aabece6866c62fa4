//! Random subsets of `[n]` and their void functionals.
//!
//! Distributions are tables indexed by subset mask. With `Z(B) = P{X ⊆ B}`
//! (the subset-sum transform of the point masses), the void functional is
//! `V(K) = P{X ∩ K = ∅} = Z(K^c)`.


use crate::cm::pow0;
use crate::error::{Error, Result};
use crate::scalar::{Rational, Scalar, ScalarKind};
use crate::subsets::{self, full_mask, MAX_GROUND_SET};

/// Negative masses down to `-EXISTENCE_TOL` count as zero.
pub const EXISTENCE_TOL: f64 = 1e-9;

/// Float distributions must sum to one within this bound.
pub const SUM_TOL: f64 = 1e-12;

fn check_n(n: u32) -> Result<()> {
    if (1..=MAX_GROUND_SET).contains(&n) {
        Ok(())
    } else {
        Err(Error::SizeLimitExceeded {
            requested: n as usize,
            limit: MAX_GROUND_SET as usize,
        })
    }
}

fn table_len(n: u32, found: usize) -> Result<()> {
    let expected = 1usize << n;
    if found == expected {
        Ok(())
    } else {
        Err(Error::LengthMismatch { expected, found })
    }
}

fn is_one<S: Scalar>(v: &S) -> bool {
    match S::KIND {
        ScalarKind::Exact => v.is_one(),
        ScalarKind::Float => (v.to_f64() - 1.0).abs() <= SUM_TOL,
    }
}

/// Distribution of a random subset of `[n]`: `probs[A] = P{X = A}`.
#[derive(Debug, Clone, PartialEq)]
pub struct RandomSubset<S> {
    n: u32,
    probs: Vec<S>,
}

/// `V(K) = P{X ∩ K = ∅}` for every `K ⊆ [n]`.
#[derive(Debug, Clone, PartialEq)]
pub struct VoidFunctional<S> {
    n: u32,
    values: Vec<S>,
}

/// Outcome of the existence test for `X_alpha`.
#[derive(Debug, Clone, PartialEq)]
pub struct PowerVerdict {
    pub alpha: f64,
    pub exists: bool,
    /// Some `q(A)` lies in `[-tol, 0)` and was treated as zero.
    pub boundary: bool,
    /// Subset with the most negative `q`, reported when the power does not exist.
    pub witness: Option<u32>,
    pub min_q: f64,
    pub argmin: u32,
    /// `q(A)` for every mask `A`.
    pub q_values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DivisibilityReport {
    pub divisible: bool,
    /// Smallest `m` whose `1/m` power fails.
    pub failing_m: Option<u32>,
    /// `(K, K', V(K ∪ K') - V(K) V(K'))` for the worst violated pair.
    pub pair_violation: Option<(u32, u32, f64)>,
    pub m_max: u32,
}

impl<S: Scalar> RandomSubset<S> {
    pub fn new(n: u32, probs: Vec<S>) -> Result<Self> {
        check_n(n)?;
        table_len(n, probs.len())?;
        if let Some((a, v)) = probs.iter().enumerate().find(|(_, v)| v.below_zero()) {
            return Err(Error::InvalidDistribution(format!(
                "negative mass {v} at {}",
                subsets::format_mask(a as u32)
            )));
        }
        let total = probs.iter().fold(S::zero(), |acc, v| acc + v.clone());
        if !is_one(&total) {
            return Err(Error::InvalidDistribution(format!("masses sum to {total}")));
        }
        Ok(RandomSubset { n, probs })
    }

    /// Builds a distribution from `(mask, mass)` pairs; unlisted masks get zero.
    pub fn from_masses(n: u32, masses: &[(u32, S)]) -> Result<Self> {
        check_n(n)?;
        let mut probs = vec![S::zero(); 1 << n];
        for (mask, mass) in masses {
            if *mask > full_mask(n) {
                return Err(Error::InvalidDistribution(format!(
                    "mask {mask} is not a subset of [{n}]"
                )));
            }
            probs[*mask as usize] = probs[*mask as usize].clone() + mass.clone();
        }
        Self::new(n, probs)
    }

    /// `X = ∅` almost surely.
    pub fn empty(n: u32) -> Result<Self> {
        Self::from_masses(n, &[(0, S::one())])
    }

    /// `P{X = {i}} = p_i`; requires every `p_i > 0` and `sum p_i = 1`.
    pub fn singleton_set(p: &[S]) -> Result<Self> {
        let n = p.len() as u32;
        if n == 0 {
            return Err(Error::InvalidProbabilityVector("empty vector".into()));
        }
        check_n(n)?;
        if let Some((i, v)) = p.iter().enumerate().find(|(_, v)| !v.above_zero()) {
            return Err(Error::InvalidProbabilityVector(format!(
                "p_{} = {v} is not positive",
                i + 1
            )));
        }
        let total = p.iter().fold(S::zero(), |acc, v| acc + v.clone());
        if !is_one(&total) {
            return Err(Error::InvalidProbabilityVector(format!("sum is {total}")));
        }
        let masses: Vec<(u32, S)> = p
            .iter()
            .enumerate()
            .map(|(i, v)| (1u32 << i, v.clone()))
            .collect();
        Self::from_masses(n, &masses)
    }

    pub fn uniform_singleton(n: u32) -> Result<Self> {
        check_n(n)?;
        Self::singleton_set(&vec![S::from_ratio(1, n as i64); n as usize])
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn probs(&self) -> &[S] {
        &self.probs
    }

    pub fn prob(&self, mask: u32) -> &S {
        &self.probs[mask as usize]
    }

    pub fn to_f64(&self) -> RandomSubset<f64> {
        RandomSubset {
            n: self.n,
            probs: self.probs.iter().map(Scalar::to_f64).collect(),
        }
    }

    /// `Z(B) = P{X ⊆ B}`.
    pub fn containment(&self) -> Vec<S> {
        let mut z = self.probs.clone();
        subsets::subset_sum(&mut z);
        z
    }

    pub fn void_functional(&self) -> VoidFunctional<S> {
        let z = self.containment();
        let full = full_mask(self.n) as usize;
        VoidFunctional {
            n: self.n,
            values: (0..z.len()).map(|k| z[full ^ k].clone()).collect(),
        }
    }

    /// Support as `(mask, mass)` pairs with nonzero mass, by increasing mask.
    pub fn support(&self) -> Vec<(u32, S)> {
        self.probs
            .iter()
            .enumerate()
            .filter(|(_, v)| !v.is_zero())
            .map(|(a, v)| (a as u32, v.clone()))
            .collect()
    }

    /// `m` i.i.d. copies united: void functional `V^m`.
    pub fn union_iid(&self, m: u32) -> Result<Self> {
        if m == 0 {
            return Err(Error::InvalidArgument("m must be positive".into()));
        }
        let v = self.void_functional();
        VoidFunctional {
            n: self.n,
            values: v.values.iter().map(|x| x.powi(m)).collect(),
        }
        .to_random_subset()
    }

    /// Existence test for `X_alpha`: `q(A) = sum_{B ⊆ A} (-1)^{|A|-|B|} Z(B)^alpha >= -tol`.
    ///
    /// Integer exponents of exact distributions are evaluated exactly.
    pub fn power_exists(&self, alpha: f64) -> Result<PowerVerdict> {
        if !(alpha >= 0.0 && alpha.is_finite()) {
            return Err(Error::DomainViolation(format!("exponent {alpha} must be >= 0")));
        }
        let q_values = if S::KIND == ScalarKind::Exact && alpha.fract() == 0.0 && alpha <= 1e6 {
            let k = alpha as u32;
            let mut q: Vec<S> = self
                .containment()
                .iter()
                .map(|z| if k == 0 { S::one() } else { z.powi(k) })
                .collect();
            subsets::subset_mobius(&mut q);
            q.iter().map(Scalar::to_f64).collect()
        } else {
            let mut q: Vec<f64> = self
                .containment()
                .iter()
                .map(|z| pow0(z.to_f64(), alpha))
                .collect();
            subsets::subset_mobius(&mut q);
            q
        };
        Ok(verdict_from_q(alpha, q_values))
    }

    pub fn is_m_divisible(&self, m: u32) -> Result<PowerVerdict> {
        if m == 0 {
            return Err(Error::InvalidArgument("m must be positive".into()));
        }
        self.power_exists(1.0 / m as f64)
    }

    /// Tests the `1/m` powers for `m = 1..=m_max` and the pair condition
    /// `V(K ∪ K') >= V(K) V(K')`.
    pub fn is_infinitely_divisible(&self, m_max: u32) -> Result<DivisibilityReport> {
        if self.n > 12 {
            return Err(Error::SizeLimitExceeded {
                requested: self.n as usize,
                limit: 12,
            });
        }
        let mut failing_m = None;
        for m in 1..=m_max {
            if !self.is_m_divisible(m)?.exists {
                failing_m = Some(m);
                break;
            }
        }
        let v: Vec<f64> = self.void_functional().values.iter().map(Scalar::to_f64).collect();
        let mut worst: Option<(u32, u32, f64)> = None;
        for k in 0..v.len() {
            for k2 in k..v.len() {
                let slack = v[k | k2] - v[k] * v[k2];
                if slack < -EXISTENCE_TOL && worst.is_none_or(|w| slack < w.2) {
                    worst = Some((k as u32, k2 as u32, slack));
                }
            }
        }
        Ok(DivisibilityReport {
            divisible: failing_m.is_none() && worst.is_none(),
            failing_m,
            pair_violation: worst,
            m_max,
        })
    }
}

fn verdict_from_q(alpha: f64, q_values: Vec<f64>) -> PowerVerdict {
    let (argmin, min_q) = q_values
        .iter()
        .enumerate()
        .fold((0usize, f64::INFINITY), |(bi, bv), (i, &v)| {
            if v < bv {
                (i, v)
            } else {
                (bi, bv)
            }
        });
    let exists = min_q >= -EXISTENCE_TOL;
    PowerVerdict {
        alpha,
        exists,
        boundary: exists && min_q < 0.0,
        witness: (!exists).then_some(argmin as u32),
        min_q,
        argmin: argmin as u32,
        q_values,
    }
}

impl PowerVerdict {
    /// The distribution of `X_alpha` when it exists, tiny negatives set to zero.
    pub fn distribution(&self, n: u32) -> Result<RandomSubset<f64>> {
        if !self.exists {
            return Err(Error::NotAVoidFunctional {
                witness: self.argmin,
                mass: self.min_q,
            });
        }
        let probs = self.q_values.iter().map(|&q| q.max(0.0)).collect();
        RandomSubset::new(n, probs)
    }
}

/// Distribution of `X_alpha` for float `alpha`.
pub fn power_set_distribution<S: Scalar>(x: &RandomSubset<S>, alpha: f64) -> Result<RandomSubset<f64>> {
    x.power_exists(alpha)?.distribution(x.n)
}

impl<S: Scalar> VoidFunctional<S> {
    /// Checks the table shape and `V(∅) = 1`; complete monotonicity is
    /// checked by [`VoidFunctional::to_random_subset`].
    pub fn new(n: u32, values: Vec<S>) -> Result<Self> {
        check_n(n)?;
        table_len(n, values.len())?;
        if !is_one(&values[0]) {
            return Err(Error::InvalidArgument(format!(
                "V(empty set) = {}, expected 1",
                values[0]
            )));
        }
        Ok(VoidFunctional { n, values })
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn value(&self, k: u32) -> &S {
        &self.values[k as usize]
    }

    /// `T(K) = 1 - V(K)`.
    pub fn capacity(&self, k: u32) -> S {
        S::one() - self.values[k as usize].clone()
    }

    /// Möbius inversion `P{X = A} = sum_{B ⊆ A} (-1)^{|A|-|B|} V(B^c)`.
    pub fn to_random_subset(&self) -> Result<RandomSubset<S>> {
        let full = full_mask(self.n) as usize;
        let mut p: Vec<S> = (0..self.values.len())
            .map(|b| self.values[full ^ b].clone())
            .collect();
        subsets::subset_mobius(&mut p);
        let (argmin, min) = p
            .iter()
            .enumerate()
            .fold(None::<(usize, &S)>, |best, (i, v)| match best {
                Some((_, b)) if b <= v => best,
                _ => Some((i, v)),
            })
            .expect("tables are nonempty");
        if min.is_below(EXISTENCE_TOL) {
            return Err(Error::NotAVoidFunctional {
                witness: argmin as u32,
                mass: min.to_f64(),
            });
        }
        if S::KIND == ScalarKind::Float {
            for v in &mut p {
                if v.below_zero() {
                    *v = S::zero();
                }
            }
        }
        RandomSubset::new(self.n, p)
    }
}

/// Inverse of [`RandomSubset::void_functional`].
pub fn from_void<S: Scalar>(v: &VoidFunctional<S>) -> Result<RandomSubset<S>> {
    v.to_random_subset()
}

/// Union of `N ~ Poisson(lambda)` i.i.d. copies: void functional `exp(lambda (V - 1))`.
pub fn poisson_union<S: Scalar>(x: &RandomSubset<S>, lambda: f64) -> Result<RandomSubset<f64>> {
    if !(lambda > 0.0 && lambda.is_finite()) {
        return Err(Error::DomainViolation(format!("lambda = {lambda} must be positive")));
    }
    let v = x.void_functional();
    let values = v
        .values
        .iter()
        .map(|t| (lambda * (t.to_f64() - 1.0)).exp())
        .collect();
    let out = VoidFunctional { n: x.n, values }.to_random_subset();
    debug_assert!(out.is_ok(), "compound Poisson void functional rejected");
    out
}

/// `sup_K |V_X(K) - V_Y(K)|`.
pub fn d_v<S: Scalar, T: Scalar>(x: &RandomSubset<S>, y: &RandomSubset<T>) -> Result<f64> {
    if x.n != y.n {
        return Err(Error::GroundSetMismatch {
            left: x.n,
            right: y.n,
        });
    }
    let vx = x.void_functional();
    let vy = y.void_functional();
    Ok(vx
        .values
        .iter()
        .zip(&vy.values)
        .map(|(a, b)| (a.to_f64() - b.to_f64()).abs())
        .fold(0.0, f64::max))
}

/// Two-point example on `{a, b} = [2]`: `P{∅} = 1 - 1/m`, `P{{a}} = P{{b}} = 1/(2m)`.
pub fn two_point(m: u32) -> Result<RandomSubset<Rational>> {
    if m == 0 {
        return Err(Error::InvalidArgument("m must be positive".into()));
    }
    let m = m as i64;
    RandomSubset::from_masses(
        2,
        &[
            (0, Rational::from_ratio(m - 1, m)),
            (1, Rational::from_ratio(1, 2 * m)),
            (2, Rational::from_ratio(1, 2 * m)),
        ],
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn r(a: i64, b: i64) -> Rational {
        Rational::from_ratio(a, b)
    }

    fn example_two(p: Rational) -> RandomSubset<Rational> {
        RandomSubset::from_masses(2, &[(1, p.clone()), (2, Rational::one() - p)]).unwrap()
    }

    #[test]
    fn void_functional_of_example_two() {
        let x = example_two(r(1, 3));
        let v = x.void_functional();
        assert_eq!(v.values(), &[r(1, 1), r(2, 3), r(1, 3), r(0, 1)]);
        assert_eq!(v.capacity(3), r(1, 1));
        assert_eq!(v.to_random_subset().unwrap(), x);
    }

    #[test]
    fn empty_and_uniform() {
        let e = RandomSubset::<Rational>::empty(3).unwrap();
        assert!(e.void_functional().values().iter().all(|v| v.is_one()));
        let u = RandomSubset::<Rational>::uniform_singleton(3).unwrap();
        for k in 0..8u32 {
            assert_eq!(u.void_functional().values()[k as usize], r(3 - k.count_ones() as i64, 3));
        }
        let four = RandomSubset::<Rational>::uniform_singleton(4).unwrap();
        assert_eq!(four, RandomSubset::singleton_set(&[r(1, 4), r(1, 4), r(1, 4), r(1, 4)]).unwrap());
    }

    #[test]
    fn singleton_set_validation() {
        let x = RandomSubset::singleton_set(&[0.2, 0.3, 0.5]).unwrap();
        assert!((x.void_functional().values()[1] - 0.8).abs() < 1e-15);
        assert!(matches!(
            RandomSubset::singleton_set(&[0.5, 0.0, 0.5]),
            Err(Error::InvalidProbabilityVector(_))
        ));
        assert!(matches!(
            RandomSubset::singleton_set(&[0.5, 0.2]),
            Err(Error::InvalidProbabilityVector(_))
        ));
    }

    #[test]
    fn inversion_rejects_non_cm_table() {
        let h = 0.5f64.sqrt();
        let v = VoidFunctional::new(2, vec![1.0, h, h, 0.0]).unwrap();
        match v.to_random_subset() {
            Err(Error::NotAVoidFunctional { witness, mass }) => {
                assert_eq!(witness, 3);
                assert!((mass - (1.0 - 2f64.sqrt())).abs() < 1e-12);
            }
            other => panic!("{other:?}"),
        }
        assert!(VoidFunctional::new(1, vec![0.5, 0.5]).is_err());
    }

    #[test]
    fn uniform_singleton_three_at_one_and_a_half() {
        let x = RandomSubset::<Rational>::uniform_singleton(3).unwrap();
        let v = x.power_exists(1.5).unwrap();
        assert!(!v.exists);
        assert_eq!(v.witness, Some(7));
        let expected = 1.0 - 3.0 * (2.0f64 / 3.0).powf(1.5) + 3.0 * (1.0f64 / 3.0).powf(1.5);
        assert!((v.min_q - expected).abs() < 1e-12);
        assert!((v.min_q + 0.055643).abs() < 1e-6);
        assert!(x.power_exists(2.0).unwrap().exists);
        assert!(x.power_exists(2.3).unwrap().exists);
    }

    #[test]
    fn power_one_reproduces_distribution() {
        let x = example_two(r(1, 5));
        let v = x.power_exists(1.0).unwrap();
        assert!(v.exists);
        let d = v.distribution(2).unwrap();
        assert!(d_v(&d, &x).unwrap() < 1e-15);
        let half = example_two(r(1, 2)).is_m_divisible(2).unwrap();
        assert!(!half.exists);
        assert_eq!(half.witness, Some(3));
        assert!((half.min_q - (1.0 - 2f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn unions() {
        let x = example_two(r(1, 2));
        assert_eq!(x.union_iid(1).unwrap(), x);
        let y = x.union_iid(2).unwrap();
        assert_eq!(y.probs(), &[r(0, 1), r(1, 4), r(1, 4), r(1, 2)]);
        let x3 = two_point(3).unwrap().union_iid(3).unwrap();
        let expected = num_traits::pow(r(5, 6), 3);
        assert_eq!(x3.void_functional().values()[1], expected);
    }

    #[test]
    fn poisson_union_values() {
        let e = RandomSubset::<f64>::empty(2).unwrap();
        let pe = poisson_union(&e, 2.0).unwrap();
        assert_eq!(pe.probs()[0], 1.0);
        for m in [1u32, 4, 30] {
            let y = poisson_union(&two_point(m).unwrap(), m as f64).unwrap();
            assert!((y.void_functional().values()[1] - (-0.5f64).exp()).abs() < 1e-13);
            assert!(y.is_infinitely_divisible(16).unwrap().divisible);
        }
    }

    #[test]
    fn distance() {
        let e = RandomSubset::<Rational>::empty(2).unwrap();
        let u = RandomSubset::<Rational>::uniform_singleton(2).unwrap();
        assert_eq!(d_v(&e, &e).unwrap(), 0.0);
        assert_eq!(d_v(&e, &u).unwrap(), 1.0);
        let other = RandomSubset::<Rational>::empty(3).unwrap();
        assert!(matches!(d_v(&e, &other), Err(Error::GroundSetMismatch { .. })));
    }

    #[test]
    fn two_point_powers_are_not_divisible() {
        let x = two_point(5).unwrap().union_iid(5).unwrap();
        let rep = x.is_infinitely_divisible(8).unwrap();
        assert!(!rep.divisible);
        let (k, k2, slack) = rep.pair_violation.unwrap();
        assert_eq!((k, k2), (1, 2));
        assert!(slack < 0.0);
        assert!(x.is_m_divisible(5).unwrap().exists);
    }
}
