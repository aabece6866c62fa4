//! Seeded generators for random test objects.

use std::sync::Arc;

use num_traits::Zero;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::cm::{LatticeFunction, WeightFunction};
use crate::lattice::FiniteLattice;
use crate::randset::RandomSubset;
use crate::scalar::{Rational, Scalar};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Nonnegative weights `k/den` with roughly a third of them zero.
pub fn random_weights(l: &FiniteLattice, rng: &mut impl Rng, den: i64) -> Vec<Rational> {
    (0..l.len())
        .map(|_| {
            if rng.gen_bool(1.0 / 3.0) {
                Rational::zero()
            } else {
                Rational::from_ratio(rng.gen_range(1..=den), den)
            }
        })
        .collect()
}

/// A completely monotone function: the reconstruction of random nonnegative weights.
pub fn random_cm_function(l: &Arc<FiniteLattice>, rng: &mut impl Rng) -> LatticeFunction<Rational> {
    let w = random_weights(l, rng, 12);
    WeightFunction::new(Arc::clone(l), w)
        .and_then(|w| w.reconstruct())
        .expect("nonnegative weights give a nonnegative function")
}

/// A mix of completely monotone and other nonnegative rational functions.
///
/// A third are completely monotone, a third have weights with random signs
/// (shifted at the top until all values are nonnegative), and a third are
/// arbitrary values in `{0, 1/10, ..., 1}`.
pub fn random_function(l: &Arc<FiniteLattice>, rng: &mut impl Rng) -> LatticeFunction<Rational> {
    match rng.gen_range(0..3) {
        0 => random_cm_function(l, rng),
        1 => {
            let mut w: Vec<Rational> = (0..l.len())
                .map(|_| Rational::from_ratio(rng.gen_range(-3..=8), 8))
                .collect();
            let g = WeightFunction::new(Arc::clone(l), w.clone())
                .expect("length matches");
            let values = raw_reconstruct(&g);
            let low = values
                .iter()
                .cloned()
                .fold(Rational::zero(), |a, b| if b < a { b } else { a });
            w[l.top()] -= low;
            WeightFunction::new(Arc::clone(l), w)
                .and_then(|w| w.reconstruct())
                .expect("shifted values are nonnegative")
        }
        _ => {
            let values = (0..l.len())
                .map(|_| Rational::from_ratio(rng.gen_range(0..=10), 10))
                .collect();
            LatticeFunction::new(Arc::clone(l), values).expect("values are nonnegative")
        }
    }
}

fn raw_reconstruct(w: &WeightFunction<Rational>) -> Vec<Rational> {
    let l = w.lattice();
    (0..l.len())
        .map(|x| {
            (0..l.len())
                .filter(|&y| l.leq(x, y))
                .fold(Rational::zero(), |acc, y| acc + w.weights()[y].clone())
        })
        .collect()
}

/// Random exact distribution on `[n]` with integer weights `0..=9` per subset.
pub fn random_distribution(n: u32, rng: &mut impl Rng) -> RandomSubset<Rational> {
    loop {
        let counts: Vec<i64> = (0..1u32 << n)
            .map(|_| if rng.gen_bool(0.4) { 0 } else { rng.gen_range(1..=9) })
            .collect();
        let total: i64 = counts.iter().sum();
        if total == 0 {
            continue;
        }
        let probs = counts.iter().map(|&c| Rational::from_ratio(c, total)).collect();
        return RandomSubset::new(n, probs).expect("normalised counts");
    }
}

/// Random float distribution on `[n]` with independent uniform weights.
pub fn random_distribution_f64(n: u32, rng: &mut impl Rng) -> RandomSubset<f64> {
    let raw: Vec<f64> = (0..1u32 << n).map(|_| rng.gen::<f64>()).collect();
    let total: f64 = raw.iter().sum();
    let mut probs: Vec<f64> = raw.iter().map(|v| v / total).collect();
    let drift: f64 = 1.0 - probs.iter().sum::<f64>();
    probs[0] += drift;
    RandomSubset::new(n, probs).expect("normalised weights")
}

/// Probability vector with entries proportional to `U(lo, 1)` draws.
pub fn random_probability_vector(n: usize, lo: f64, rng: &mut impl Rng) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(lo..1.0)).collect();
    let total: f64 = raw.iter().sum();
    raw.iter().map(|v| v / total).collect()
}

/// Interior point of `{x >= 0, sum x <= 1}` with every coordinate above
/// `margin`, sum below `1 - margin` and `|x_1 - x_2| > margin / 2`.
pub fn random_interior_point(n: usize, margin: f64, rng: &mut impl Rng) -> Vec<f64> {
    loop {
        let x: Vec<f64> = (0..n).map(|_| rng.gen_range(margin..1.0)).collect();
        let scale: f64 = rng.gen_range(margin..1.0 - margin) / x.iter().sum::<f64>();
        let x: Vec<f64> = x.iter().map(|v| v * scale).collect();
        let s: f64 = x.iter().sum();
        if x.iter().all(|&v| v > margin) && s < 1.0 - margin && (n < 2 || (x[0] - x[1]).abs() > margin / 2.0) {
            return x;
        }
    }
}

/// Point on the boundary of the simplex: a zero coordinate or unit sum.
pub fn random_boundary_point(n: usize, rng: &mut impl Rng) -> Vec<f64> {
    let mut x: Vec<f64> = (0..n).map(|_| rng.gen::<f64>()).collect();
    let s: f64 = x.iter().sum();
    if rng.gen_bool(0.5) {
        let i = rng.gen_range(0..n);
        x[i] = 0.0;
        let t: f64 = rng.gen::<f64>();
        let s: f64 = x.iter().sum::<f64>().max(f64::MIN_POSITIVE);
        x.iter_mut().for_each(|v| *v *= t / s);
    } else {
        x.iter_mut().for_each(|v| *v /= s);
    }
    x
}

/// Random value in `(lo, hi)` avoiding integers by at least `gap`.
pub fn random_non_integer(lo: f64, hi: f64, gap: f64, rng: &mut impl Rng) -> f64 {
    loop {
        let a = rng.gen_range(lo..hi);
        if (a - a.round()).abs() > gap {
            return a;
        }
    }
}

/// Converts to floats; convenience for mixed-mode tests.
pub fn to_f64(values: &[Rational]) -> Vec<f64> {
    values.iter().map(Scalar::to_f64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::diamond;

    #[test]
    fn generated_objects_are_valid() {
        let mut r = rng(7);
        let l = Arc::new(diamond(3).unwrap());
        let mut kinds = [0, 0];
        for _ in 0..60 {
            let f = random_function(&l, &mut r);
            kinds[f.is_cm().is_cm as usize] += 1;
            assert!(random_cm_function(&l, &mut r).is_cm().is_cm);
        }
        assert!(kinds[0] > 0 && kinds[1] > 0);
        let x = random_distribution(4, &mut r);
        assert_eq!(x.probs().len(), 16);
        let p = random_probability_vector(5, 0.05, &mut r);
        assert!((p.iter().sum::<f64>() - 1.0).abs() < 1e-12);
        let b = random_boundary_point(3, &mut r);
        assert!(b.iter().all(|&v| v >= 0.0) && b.iter().sum::<f64>() <= 1.0 + 1e-12);
    }

    #[test]
    fn seeds_are_reproducible() {
        let a = random_distribution(3, &mut rng(11));
        let b = random_distribution(3, &mut rng(11));
        assert_eq!(a, b);
    }
}
