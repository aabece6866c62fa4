use std::sync::Arc;

use proptest::prelude::*;

use cmdiv::approx::sup_gap;
use cmdiv::cm::{poisson_accompany, LatticeFunction, WeightFunction};
use cmdiv::gen;
use cmdiv::io;
use cmdiv::lattice::{catalog, FiniteLattice};
use cmdiv::randset::{d_v, from_void, RandomSubset};
use cmdiv::scalar::Scalar;
use cmdiv::subsets::{self, full_mask};
use cmdiv::Rational;

fn lattice_strategy() -> impl Strategy<Value = Arc<FiniteLattice>> {
    let all = catalog::all();
    (0..all.len()).prop_map(move |i| Arc::clone(&all[i].1))
}

fn weights_strategy(len: usize) -> impl Strategy<Value = Vec<Rational>> {
    prop::collection::vec((0i64..6, 1i64..6), len)
        .prop_map(|v| v.into_iter().map(|(a, b)| Rational::from_ratio(a, b)).collect())
}

fn cm_function() -> impl Strategy<Value = LatticeFunction<Rational>> {
    lattice_strategy().prop_flat_map(|l| {
        weights_strategy(l.len()).prop_map(move |w| {
            WeightFunction::new(Arc::clone(&l), w).unwrap().reconstruct().unwrap()
        })
    })
}

fn distribution(n: u32) -> impl Strategy<Value = RandomSubset<f64>> {
    prop::collection::vec(0.0f64..1.0, 1usize << n).prop_filter_map("nonzero total", move |raw| {
        let total: f64 = raw.iter().sum();
        (total > 1e-3).then(|| {
            let mut p: Vec<f64> = raw.iter().map(|v| v / total).collect();
            p[0] += 1.0 - p.iter().sum::<f64>();
            RandomSubset::new(n, p.iter().map(|v| v.max(0.0)).collect()).unwrap()
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weights_round_trip(f in cm_function()) {
        let back = f.mobius_weights().reconstruct().unwrap();
        prop_assert_eq!(back, f);
    }

    #[test]
    fn products_and_integer_powers_stay_cm(f in cm_function(), k in 1u32..4) {
        prop_assert!(f.product(&f).unwrap().is_cm().is_cm);
        prop_assert!(f.power_int(k).is_cm().is_cm);
    }

    #[test]
    fn powers_above_threshold_stay_cm(f in cm_function(), extra in 0.0f64..2.0) {
        let alpha = (f.lattice().d_max() as f64 - 1.0).max(0.0) + extra;
        prop_assert!(f.power(alpha).unwrap().is_cm().is_cm);
    }

    #[test]
    fn accompaniment_of_divisible_function_is_within_gap(f in cm_function(), m in 1u32..20) {
        let scale = f.values().iter().map(Scalar::to_f64).fold(0.0, f64::max);
        prop_assume!(scale > 0.0);
        let unit = LatticeFunction::new(
            Arc::clone(f.lattice()),
            f.values().iter().map(|v| v.to_f64() / scale).collect(),
        ).unwrap();
        let divisible = unit.power_int(m);
        let g = poisson_accompany(&divisible, m).unwrap();
        prop_assert!(g.is_cm().is_cm);
        prop_assert!(divisible.sup_distance(&g).unwrap() <= sup_gap(m).unwrap() + 1e-12);
    }

    #[test]
    fn void_functional_inverts(x in (1u32..6).prop_flat_map(distribution)) {
        let back = from_void(&x.void_functional()).unwrap();
        for (a, b) in x.probs().iter().zip(back.probs()) {
            prop_assert!((a - b).abs() < 1e-12);
        }
    }

    #[test]
    fn void_functional_is_monotone(x in (1u32..6).prop_flat_map(distribution)) {
        let v = x.void_functional();
        let full = full_mask(x.n());
        for k in 0..=full {
            for i in 0..x.n() {
                let bigger = k | (1 << i);
                prop_assert!(*v.value(bigger) <= *v.value(k) + 1e-15);
            }
        }
    }

    #[test]
    fn semigroup_of_powers(x in (1u32..5).prop_flat_map(distribution), a in 0.1f64..3.0, b in 0.1f64..3.0) {
        let n = x.n();
        let va = x.power_exists(a).unwrap();
        let vb = x.power_exists(b).unwrap();
        prop_assume!(va.exists && vb.exists && !va.boundary && !vb.boundary);
        let xa = va.distribution(n).unwrap();
        let xab = xa.power_exists(b).unwrap();
        let direct = x.power_exists(a * b).unwrap();
        prop_assert_eq!(xab.exists, direct.exists);
        if xab.exists {
            let left = xab.distribution(n).unwrap();
            let right = direct.distribution(n).unwrap();
            prop_assert!(d_v(&left, &right).unwrap() < 1e-9);
        }
    }

    #[test]
    fn union_powers_match_integer_exponents(x in (1u32..5).prop_flat_map(distribution), m in 1u32..5) {
        let u = x.union_iid(m).unwrap();
        let vx = x.void_functional();
        let vu = u.void_functional();
        for k in 0..vx.values().len() as u32 {
            prop_assert!((Scalar::powi(vx.value(k), m) - vu.value(k)).abs() < 1e-12);
        }
        prop_assert!(x.power_exists(m as f64).unwrap().exists);
    }

    #[test]
    fn subset_transforms_invert(v in prop::collection::vec(-5i64..5, 32)) {
        let mut t = v.clone();
        subsets::subset_sum(&mut t);
        subsets::subset_mobius(&mut t);
        prop_assert_eq!(&t, &v);
        subsets::superset_sum(&mut t);
        subsets::superset_mobius(&mut t);
        prop_assert_eq!(t, v);
    }

    #[test]
    fn lattice_text_round_trip(l in lattice_strategy()) {
        let table = if l.boolean_bits().is_some() { l.to_table().unwrap() } else { (*l).clone() };
        let back = io::parse_lattice(&io::write_lattice(&table)).unwrap();
        prop_assert_eq!(back.cover_pairs(), table.cover_pairs());
        for x in 0..l.len() {
            for y in 0..l.len() {
                prop_assert_eq!(back.join(x, y), l.join(x, y));
                prop_assert_eq!(back.meet(x, y), l.meet(x, y));
            }
        }
    }

    #[test]
    fn distribution_text_round_trip(seed in any::<u64>(), n in 1u32..5) {
        let x = gen::random_distribution(n, &mut gen::rng(seed));
        let back: RandomSubset<Rational> = io::parse_distribution(&io::write_distribution(&x)).unwrap();
        prop_assert_eq!(back, x);
    }
}

#[test]
fn random_functions_agree_with_brute_force_on_larger_lattices() {
    let mut r = gen::rng(9);
    for (name, l) in catalog::all().into_iter().filter(|(_, l)| l.len() <= 9) {
        for _ in 0..20 {
            let f = gen::random_function(&l, &mut r);
            let fast = f.is_cm().is_cm;
            let slow = f.is_cm_bruteforce(l.len()).unwrap().is_cm;
            assert_eq!(fast, slow, "{name}: {:?}", f.values());
        }
    }
}
