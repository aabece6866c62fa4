//! Exponential polynomials `alpha -> sum_i c_i b_i^alpha` with positive bases.

use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

/// Bases closer than this (relative) are merged.
pub const BASE_MERGE_REL: f64 = 1e-13;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Term {
    pub coefficient: f64,
    pub base: f64,
}

/// Canonical form: strictly decreasing positive bases, nonzero coefficients.
///
/// Terms with base zero only matter at `alpha = 0` (where `0^0 = 1`); their
/// total coefficient is kept separately in `zero_base`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExponentialPolynomial {
    terms: Vec<Term>,
    zero_base: f64,
}

impl ExponentialPolynomial {
    pub fn new(raw: impl IntoIterator<Item = (f64, f64)>) -> Result<Self> {
        let mut zero_base = 0.0;
        let mut terms = Vec::new();
        for (c, b) in raw {
            if !(b >= 0.0 && b.is_finite() && c.is_finite()) {
                return Err(Error::DomainViolation(format!(
                    "term {c} * {b}^alpha needs a finite nonnegative base"
                )));
            }
            if b == 0.0 {
                zero_base += c;
            } else {
                terms.push(Term {
                    coefficient: c,
                    base: b,
                });
            }
        }
        terms.sort_by(|x, y| y.base.total_cmp(&x.base));
        let mut merged: Vec<Term> = Vec::with_capacity(terms.len());
        for t in terms {
            match merged.last_mut() {
                Some(last) if (last.base - t.base).abs() <= BASE_MERGE_REL * last.base => {
                    last.coefficient += t.coefficient;
                }
                _ => merged.push(t),
            }
        }
        merged.retain(|t| t.coefficient != 0.0);
        Ok(ExponentialPolynomial {
            terms: merged,
            zero_base,
        })
    }

    pub fn constant(c: f64) -> Self {
        ExponentialPolynomial::new([(c, 1.0)]).expect("base one is valid")
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn zero_base(&self) -> f64 {
        self.zero_base
    }

    pub fn eval(&self, alpha: f64) -> f64 {
        let s: f64 = self
            .terms
            .iter()
            .map(|t| t.coefficient * t.base.powf(alpha))
            .sum();
        if alpha == 0.0 {
            s + self.zero_base
        } else {
            s
        }
    }

    /// Sign changes of the coefficients ordered by decreasing base: an upper
    /// bound on the number of real zeros, counted with multiplicity.
    pub fn sign_change_bound(&self) -> usize {
        self.terms
            .windows(2)
            .filter(|w| (w[0].coefficient > 0.0) != (w[1].coefficient > 0.0))
            .count()
    }

    /// Sign changes of the values on a grid over `[lo, hi]`, ignoring values
    /// with `|v| <= zero_tol`. Each change brackets at least one zero.
    pub fn grid_sign_changes(&self, lo: f64, hi: f64, step: f64, zero_tol: f64) -> usize {
        let steps = ((hi - lo) / step).round().max(0.0) as usize;
        let mut last: Option<bool> = None;
        let mut changes = 0;
        for i in 0..=steps {
            let a = (lo + i as f64 * step).min(hi);
            let v = self.eval(a);
            if v.abs() <= zero_tol {
                continue;
            }
            let positive = v > 0.0;
            if last.is_some_and(|p| p != positive) {
                changes += 1;
            }
            last = Some(positive);
        }
        changes
    }
}

impl fmt::Display for ExponentialPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        for (i, t) in self.terms.iter().enumerate() {
            let sign = if t.coefficient < 0.0 { "-" } else if i > 0 { "+" } else { "" };
            if i > 0 {
                f.write_str(" ")?;
            }
            write!(f, "{sign}{}*{}^a", t.coefficient.abs(), t.base)?;
        }
        Ok(())
    }
}
