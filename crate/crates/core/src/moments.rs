//! Completely monotone sequences, Hankel positivity and the two-atom family
//! `f(k) = (1 + x^k)/2` whose non-integer powers are not moment sequences.

use nalgebra::{DMatrix, SymmetricEigen};
use serde::Serialize;

use crate::cm::pow0;
use crate::error::{Error, Result};
use crate::scalar::{Scalar, ScalarKind};

/// Number of terms kept by default.
pub const DEFAULT_TERMS: usize = 64;
/// `lambda_min >= -PSD_REL * trace` counts as positive semidefinite.
pub const PSD_REL: f64 = 1e-10;
/// `lambda_min < -VIOLATION_REL * trace` counts as a violation.
pub const VIOLATION_REL: f64 = 1e-8;
pub const ORDER_CAP: usize = 64;

/// A finite initial segment `a_0, ..., a_K` of a sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentSequence<S> {
    values: Vec<S>,
    /// `(weight, point)` pairs generating the values, when known.
    atoms: Option<Vec<(S, S)>>,
}

impl<S: Scalar> MomentSequence<S> {
    pub fn new(values: Vec<S>) -> Result<Self> {
        if let Some((i, v)) = values.iter().enumerate().find(|(_, v)| v.below_zero()) {
            return Err(Error::NegativeValue {
                element: i,
                value: v.to_string(),
            });
        }
        Ok(MomentSequence { values, atoms: None })
    }

    /// `a_k = sum_j w_j x_j^k` for `k < len`, with `w_j >= 0` and `x_j ∈ [0, 1]`.
    pub fn from_atoms(atoms: Vec<(S, S)>, len: usize) -> Result<Self> {
        let one = S::one();
        for (w, x) in &atoms {
            if w.below_zero() || x.below_zero() || *x > one {
                return Err(Error::InvalidArgument(format!(
                    "atom ({w}, {x}) needs weight >= 0 and point in [0, 1]"
                )));
            }
        }
        let values = (0..len as u32)
            .map(|k| {
                atoms
                    .iter()
                    .fold(S::zero(), |acc, (w, x)| acc + w.clone() * x.powi(k))
            })
            .collect();
        Ok(MomentSequence {
            values,
            atoms: Some(atoms),
        })
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    pub fn atoms(&self) -> Option<&[(S, S)]> {
        self.atoms.as_deref()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn to_f64(&self) -> MomentSequence<f64> {
        MomentSequence {
            values: self.values.iter().map(Scalar::to_f64).collect(),
            atoms: self.atoms.as_ref().map(|a| {
                a.iter().map(|(w, x)| (w.to_f64(), x.to_f64())).collect()
            }),
        }
    }

    /// Pointwise `a_k^alpha`.
    pub fn pow(&self, alpha: f64) -> MomentSequence<f64> {
        MomentSequence {
            values: self.values.iter().map(|v| pow0(v.to_f64(), alpha)).collect(),
            atoms: None,
        }
    }

    /// Pointwise `a_k^p`; the atoms of the product measure are kept.
    pub fn powi(&self, p: u32) -> MomentSequence<S> {
        let mut out = MomentSequence {
            values: vec![S::one(); self.values.len()],
            atoms: Some(vec![(S::one(), S::one())]),
        };
        for _ in 0..p {
            out = out.product(self).expect("same length");
        }
        out
    }

    /// Pointwise product; atoms multiply as for independent variables.
    pub fn product(&self, other: &MomentSequence<S>) -> Result<MomentSequence<S>> {
        if self.len() != other.len() {
            return Err(Error::LengthMismatch {
                expected: self.len(),
                found: other.len(),
            });
        }
        let atoms = match (&self.atoms, &other.atoms) {
            (Some(a), Some(b)) => Some(
                a.iter()
                    .flat_map(|(w1, x1)| {
                        b.iter()
                            .map(move |(w2, x2)| (w1.clone() * w2.clone(), x1.clone() * x2.clone()))
                    })
                    .collect(),
            ),
            _ => None,
        };
        Ok(MomentSequence {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a.clone() * b.clone())
                .collect(),
            atoms,
        })
    }
}

/// `(1 + x^k)/2` for `k < len`: moments of `(δ_1 + δ_x)/2`.
pub fn two_atom(x: f64, len: usize) -> Result<MomentSequence<f64>> {
    if !(x > 0.0 && x < 1.0) {
        return Err(Error::DomainViolation(format!("x = {x} must lie in (0, 1)")));
    }
    MomentSequence::from_atoms(vec![(0.5, 1.0), (0.5, x)], len)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FiniteDiffVerdict {
    pub is_cm: bool,
    /// First `(k, j, ((-D)^k a)_j)` below tolerance, by increasing `k` then `j`.
    pub witness: Option<(usize, usize, f64)>,
    pub max_order: usize,
    pub terms: usize,
}

/// Checks `((-D)^k a)_j >= 0` for all `k <= max_order` and all `j` the data allows.
///
/// Float tolerance at order `k` is `2^k * 4 eps * max|a|`, which bounds the
/// accumulated rounding error of `k` differencing steps.
pub fn finite_diff_cm_check<S: Scalar>(seq: &MomentSequence<S>, max_order: usize) -> Result<FiniteDiffVerdict> {
    if seq.len() < max_order + 1 {
        return Err(Error::InsufficientLength {
            needed: max_order + 1,
            available: seq.len(),
        });
    }
    let scale = seq.values.iter().map(|v| v.to_f64().abs()).fold(0.0, f64::max);
    let mut row: Vec<S> = seq.values.clone();
    for k in 0..=max_order {
        let tol = match S::KIND {
            ScalarKind::Exact => 0.0,
            ScalarKind::Float => 2f64.powi(k as i32) * 4.0 * f64::EPSILON * scale,
        };
        if let Some((j, v)) = row.iter().enumerate().find(|(_, v)| v.is_below(tol)) {
            return Ok(FiniteDiffVerdict {
                is_cm: false,
                witness: Some((k, j, v.to_f64())),
                max_order,
                terms: seq.len(),
            });
        }
        row = row.windows(2).map(|w| w[0].clone() - w[1].clone()).collect();
    }
    Ok(FiniteDiffVerdict {
        is_cm: true,
        witness: None,
        max_order,
        terms: seq.len(),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PsdStatus {
    Psd,
    Indeterminate,
    Violated,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HankelVerdict {
    pub order: usize,
    pub status: PsdStatus,
    pub min_eigenvalue: f64,
    pub trace: f64,
    /// `min_eigenvalue / trace`.
    pub ratio: f64,
    /// Unit vector with `v^T M v < 0`, when one was found.
    pub certificate: Option<Vec<f64>>,
    pub certificate_value: Option<f64>,
    /// Source of the certificate: `factorization` or `eigenvector`.
    pub certificate_source: Option<String>,
}

impl HankelVerdict {
    pub fn is_psd(&self) -> bool {
        self.status == PsdStatus::Psd
    }
}

/// `M_ij = a_{i+j}` for `0 <= i, j < n`.
pub fn hankel_matrix(values: &[f64], n: usize) -> Result<DMatrix<f64>> {
    if n == 0 || values.len() < 2 * n - 1 {
        return Err(Error::InsufficientLength {
            needed: (2 * n).saturating_sub(1).max(1),
            available: values.len(),
        });
    }
    Ok(DMatrix::from_fn(n, n, |i, j| values[i + j]))
}

fn quad_form(m: &DMatrix<f64>, v: &[f64]) -> f64 {
    let n = v.len();
    (0..n)
        .map(|i| (0..n).map(|j| v[i] * m[(i, j)] * v[j]).sum::<f64>())
        .sum()
}

fn normalized(mut v: Vec<f64>) -> Vec<f64> {
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    if norm > 0.0 {
        v.iter_mut().for_each(|x| *x /= norm);
    }
    v
}

/// Symmetric elimination with diagonal pivoting.
///
/// Keeps, for every uneliminated index, the original-space vector whose
/// quadratic form reproduces the current Schur complement entry, so a
/// negative direction found late is lifted back to `M` directly. Returns
/// such a direction with `v^T M v < -tol`, or `None`.
pub fn pivoted_ldl_certificate(m: &DMatrix<f64>, tol: f64) -> Option<Vec<f64>> {
    let n = m.nrows();
    let mut a = m.clone();
    let mut basis: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let mut e = vec![0.0; n];
            e[i] = 1.0;
            e
        })
        .collect();
    let mut remaining: Vec<usize> = (0..n).collect();
    while !remaining.is_empty() {
        let (&lowest, &highest) = (
            remaining
                .iter()
                .min_by(|&&i, &&j| a[(i, i)].total_cmp(&a[(j, j)]))
                .unwrap(),
            remaining
                .iter()
                .max_by(|&&i, &&j| a[(i, i)].total_cmp(&a[(j, j)]))
                .unwrap(),
        );
        if a[(lowest, lowest)] < -tol {
            return Some(basis[lowest].clone());
        }
        if a[(highest, highest)] <= tol {
            // All remaining pivots are tiny: look for a dominant off-diagonal entry.
            for (x, &i) in remaining.iter().enumerate() {
                for &j in &remaining[x + 1..] {
                    let s = a[(i, j)].signum();
                    if a[(i, i)] + a[(j, j)] - 2.0 * a[(i, j)].abs() < -tol {
                        return Some(
                            basis[i]
                                .iter()
                                .zip(&basis[j])
                                .map(|(u, w)| u - s * w)
                                .collect(),
                        );
                    }
                }
            }
            return None;
        }
        let p = highest;
        let d = a[(p, p)];
        remaining.retain(|&i| i != p);
        for &i in &remaining {
            let f = a[(p, i)] / d;
            let bp = basis[p].clone();
            basis[i].iter_mut().zip(&bp).for_each(|(u, w)| *u -= f * w);
        }
        for &i in &remaining {
            for &j in &remaining {
                let v = a[(i, j)] - a[(i, p)] * a[(p, j)] / d;
                a[(i, j)] = v;
            }
        }
    }
    None
}

/// Positive semidefiniteness of the order-`n` Hankel matrix.
pub fn hankel_psd_check<S: Scalar>(seq: &MomentSequence<S>, n: usize) -> Result<HankelVerdict> {
    let values: Vec<f64> = seq.values.iter().map(Scalar::to_f64).collect();
    let m = hankel_matrix(&values, n)?;
    let trace = m.trace();
    let eig = SymmetricEigen::new(m.clone());
    let (imin, &lambda) = eig
        .eigenvalues
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .expect("n >= 1");
    let ratio = if trace > 0.0 { lambda / trace } else { lambda };
    let status = if ratio >= -PSD_REL {
        PsdStatus::Psd
    } else if ratio < -VIOLATION_REL {
        PsdStatus::Violated
    } else {
        PsdStatus::Indeterminate
    };
    let (certificate, source) = if status == PsdStatus::Psd {
        (None, None)
    } else {
        match pivoted_ldl_certificate(&m, PSD_REL * trace) {
            Some(v) => (Some(normalized(v)), Some("factorization")),
            None => (
                Some(normalized(eig.eigenvectors.column(imin).iter().copied().collect())),
                Some("eigenvector"),
            ),
        }
    };
    let certificate_value = certificate.as_ref().map(|v| quad_form(&m, v));
    Ok(HankelVerdict {
        order: n,
        status,
        min_eigenvalue: lambda,
        trace,
        ratio,
        certificate,
        certificate_value,
        certificate_source: source.map(str::to_string),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TjCertificate {
    pub x: f64,
    pub alpha: f64,
    /// Set when the sequence came from `(1 + e^{-ty})/2` at integer `t`.
    pub y: Option<f64>,
    pub failing_order: usize,
    pub verdict: HankelVerdict,
    /// `(order, lambda_min / trace)` for every order tried.
    pub scanned: Vec<(usize, f64)>,
}

/// Smallest Hankel order at which `((1 + x^k)/2)^alpha` is not certified psd.
pub fn tj_counterexample(x: f64, alpha: f64) -> Result<TjCertificate> {
    tj_counterexample_capped(x, alpha, ORDER_CAP)
}

pub fn tj_counterexample_capped(x: f64, alpha: f64, cap: usize) -> Result<TjCertificate> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::DomainViolation(format!("alpha = {alpha} must be positive")));
    }
    let seq = two_atom(x, 2 * cap.max(2) - 1)?.pow(alpha);
    let mut scanned = Vec::new();
    for n in 2..=cap {
        let v = hankel_psd_check(&seq, n)?;
        scanned.push((n, v.ratio));
        if !v.is_psd() {
            return Ok(TjCertificate {
                x,
                alpha,
                y: None,
                failing_order: n,
                verdict: v,
                scanned,
            });
        }
    }
    Err(Error::SearchBudgetExceeded { cap })
}

/// The continuous family `g(t) = (1 + e^{-t y})/2` sampled at integers is
/// the two-atom sequence with `x = e^{-y}`.
pub fn laplace_counterexample_bridge(y: f64, alpha: f64) -> Result<TjCertificate> {
    laplace_counterexample_bridge_capped(y, alpha, ORDER_CAP)
}

pub fn laplace_counterexample_bridge_capped(y: f64, alpha: f64, cap: usize) -> Result<TjCertificate> {
    if !(y > 0.0 && y.is_finite()) {
        return Err(Error::DomainViolation(format!("y = {y} must be positive")));
    }
    let mut cert = tj_counterexample_capped((-y).exp(), alpha, cap)?;
    cert.y = Some(y);
    Ok(cert)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Rational;

    #[test]
    fn constant_and_geometric() {
        let ones = MomentSequence::new(vec![1.0; 20]).unwrap();
        assert!(finite_diff_cm_check(&ones, 19).unwrap().is_cm);
        let half = Rational::from_ratio(1, 2);
        let g = MomentSequence::from_atoms(vec![(Rational::from_ratio(1, 1), half)], 30).unwrap();
        assert!(finite_diff_cm_check(&g, 29).unwrap().is_cm);
        assert!(matches!(
            finite_diff_cm_check(&g, 30),
            Err(Error::InsufficientLength { .. })
        ));
    }

    #[test]
    fn two_atom_power_first_difference_violation() {
        let seq = two_atom(0.5, DEFAULT_TERMS).unwrap().pow(1.5);
        let short = MomentSequence::new(seq.values()[..11].to_vec()).unwrap();
        assert!(finite_diff_cm_check(&short, 10).unwrap().is_cm);
        let full = finite_diff_cm_check(&seq, DEFAULT_TERMS - 1).unwrap();
        let (k, j, v) = full.witness.unwrap();
        assert_eq!((k, j), (20, 0));
        assert!((v + 2.33e-5).abs() < 1e-7);
    }

    #[test]
    fn hankel_of_moments_is_psd() {
        let s = two_atom(0.3, 20).unwrap();
        for n in 1..=8 {
            assert!(hankel_psd_check(&s, n).unwrap().is_psd());
        }
        assert!(hankel_psd_check(&s, 11).is_err());
    }

    #[test]
    fn counterexample_orders() {
        let c = tj_counterexample(0.5, 1.5).unwrap();
        assert_eq!(c.failing_order, 4);
        assert_eq!(c.verdict.status, PsdStatus::Violated);
        assert!(c.verdict.certificate_value.unwrap() < 0.0);
        assert_eq!(tj_counterexample(0.5, 0.5).unwrap().failing_order, 3);
        assert!(matches!(
            tj_counterexample_capped(0.5, 2.0, 16),
            Err(Error::SearchBudgetExceeded { cap: 16 })
        ));
    }

    #[test]
    fn bridge_matches_sequence_case() {
        let a = laplace_counterexample_bridge(2f64.ln(), 1.5).unwrap();
        let b = tj_counterexample(0.5, 1.5).unwrap();
        assert_eq!(a.failing_order, b.failing_order);
        assert!((a.verdict.min_eigenvalue - b.verdict.min_eigenvalue).abs() < 1e-12);
    }

    #[test]
    fn ldl_finds_negative_directions() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]);
        let v = pivoted_ldl_certificate(&m, 1e-12).unwrap();
        assert!(quad_form(&m, &v) < 0.0);
        let m = DMatrix::from_row_slice(3, 3, &[4.0, 2.0, 2.0, 2.0, 1.0, 2.0, 2.0, 2.0, 1.0]);
        let v = pivoted_ldl_certificate(&m, 1e-12).unwrap();
        assert!(quad_form(&m, &v) < 0.0);
        let psd = DMatrix::from_row_slice(2, 2, &[2.0, 1.0, 1.0, 2.0]);
        assert!(pivoted_ldl_certificate(&psd, 1e-12).is_none());
    }
}
