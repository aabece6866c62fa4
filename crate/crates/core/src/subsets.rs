//! Subsets of `[n]` encoded as bit masks, and the subset/superset sum
//! transforms over them.
//!
//! Element `i` of `[n] = {1, ..., n}` corresponds to bit `i - 1`.

use std::ops::{Add, Sub};

pub const MAX_GROUND_SET: u32 = 20;

#[inline]
pub fn full_mask(n: u32) -> u32 {
    if n == 0 {
        0
    } else {
        u32::MAX >> (32 - n)
    }
}

#[inline]
pub fn popcount(mask: u32) -> u32 {
    mask.count_ones()
}

#[inline]
pub fn is_subset(a: u32, b: u32) -> bool {
    a & !b == 0
}

/// `(-1)^k` as an integer.
#[inline]
pub fn parity_sign(k: u32) -> i64 {
    if k % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Iterates over all submasks of `mask`, from `mask` down to `0`.
pub fn submasks(mask: u32) -> impl Iterator<Item = u32> {
    let mut next = Some(mask);
    std::iter::from_fn(move || {
        let current = next?;
        next = if current == 0 {
            None
        } else {
            Some((current - 1) & mask)
        };
        Some(current)
    })
}

/// Elements of a mask as 1-based integers.
pub fn elements(mask: u32) -> Vec<u32> {
    (0..32).filter(|i| mask >> i & 1 == 1).map(|i| i + 1).collect()
}

/// Brace notation, e.g. `{1,3}` or `{}`.
pub fn format_mask(mask: u32) -> String {
    let items: Vec<String> = elements(mask).iter().map(u32::to_string).collect();
    format!("{{{}}}", items.join(","))
}

fn check_len(len: usize) -> u32 {
    assert!(len.is_power_of_two(), "table length must be a power of two");
    len.trailing_zeros()
}

/// In place: `t[B] <- sum_{A subset of B} t[A]`.
pub fn subset_sum<T: Clone + Add<Output = T>>(t: &mut [T]) {
    let bits = check_len(t.len());
    for i in 0..bits {
        let bit = 1usize << i;
        for mask in 0..t.len() {
            if mask & bit != 0 {
                let lower = t[mask ^ bit].clone();
                t[mask] = t[mask].clone() + lower;
            }
        }
    }
}

/// Inverse of [`subset_sum`] (Möbius inversion on the Boolean lattice).
pub fn subset_mobius<T: Clone + Sub<Output = T>>(t: &mut [T]) {
    let bits = check_len(t.len());
    for i in 0..bits {
        let bit = 1usize << i;
        for mask in 0..t.len() {
            if mask & bit != 0 {
                let lower = t[mask ^ bit].clone();
                t[mask] = t[mask].clone() - lower;
            }
        }
    }
}

/// In place: `t[A] <- sum_{B superset of A} t[B]`.
pub fn superset_sum<T: Clone + Add<Output = T>>(t: &mut [T]) {
    let bits = check_len(t.len());
    for i in 0..bits {
        let bit = 1usize << i;
        for mask in 0..t.len() {
            if mask & bit == 0 {
                let upper = t[mask | bit].clone();
                t[mask] = t[mask].clone() + upper;
            }
        }
    }
}

/// Inverse of [`superset_sum`].
pub fn superset_mobius<T: Clone + Sub<Output = T>>(t: &mut [T]) {
    let bits = check_len(t.len());
    for i in 0..bits {
        let bit = 1usize << i;
        for mask in 0..t.len() {
            if mask & bit == 0 {
                let upper = t[mask | bit].clone();
                t[mask] = t[mask].clone() - upper;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn submask_enumeration_is_complete() {
        let subs: Vec<u32> = submasks(0b101).collect();
        assert_eq!(subs, vec![0b101, 0b100, 0b001, 0]);
        assert_eq!(submasks(0).count(), 1);
    }

    #[test]
    fn formatting() {
        assert_eq!(format_mask(0), "{}");
        assert_eq!(format_mask(0b101), "{1,3}");
        assert_eq!(full_mask(3), 7);
        assert_eq!(full_mask(0), 0);
    }

    fn naive_subset_sum(t: &[i64]) -> Vec<i64> {
        (0..t.len() as u32)
            .map(|b| submasks(b).map(|a| t[a as usize]).sum())
            .collect()
    }

    proptest! {
        #[test]
        fn transforms_match_naive_and_invert(values in prop::collection::vec(-50i64..50, 16)) {
            let mut fast = values.clone();
            subset_sum(&mut fast);
            prop_assert_eq!(&fast, &naive_subset_sum(&values));
            subset_mobius(&mut fast);
            prop_assert_eq!(&fast, &values);

            let mut up = values.clone();
            superset_sum(&mut up);
            for a in 0..16u32 {
                let expected: i64 = (0..16u32).filter(|&b| is_subset(a, b)).map(|b| values[b as usize]).sum();
                prop_assert_eq!(up[a as usize], expected);
            }
            superset_mobius(&mut up);
            prop_assert_eq!(up, values);
        }
    }
}
