//! Admissible pairs and compatible pairs for arithmetic digit sets.
//!
//! `(b, D)` is admissible when some `L ⊂ ℤ` makes
//! `H = (1/√#D) [e^{2πi d l / b}]` unitary. The exact decision goes through
//! vanishing sums of roots of unity; the unitarity residual and the Parseval
//! sum are floating point cross-checks.

use std::f64::consts::TAU;

use num_complex::Complex64;
use num_integer::Integer;

use crate::error::{Error, Result};
use crate::exactmath::{root_sum_is_zero, RootSum};
use crate::measure::StagePair;

/// Outcome of checking one Hadamard triple.
#[derive(Debug, Clone, PartialEq)]
pub struct TripleCheckReport {
    pub exact_compatible: bool,
    pub unitarity_residual: f64,
    pub canonical_l: Option<Vec<i64>>,
}

/// `p | b / gcd(b, t)`, ignoring signs.
pub fn is_admissible(b: i64, p: u64, t: i64) -> bool {
    let ab = b.unsigned_abs();
    let g = ab.gcd(&t.unsigned_abs());
    g != 0 && p != 0 && (ab / g).is_multiple_of(p)
}

/// `(|b| / (p · gcd(b, t))) · {0, 1, ..., p - 1}`.
///
/// Scaling by `|b|` rather than `b` keeps every entry in `[0, |b|)`; the
/// compatibility condition only sees differences, so the sign is immaterial.
pub fn canonical_l(b: i64, p: u64, t: i64) -> Result<Vec<i64>> {
    if !is_admissible(b, p, t) {
        return Err(Error::NotAdmissible { b, p, t });
    }
    let ab = b.unsigned_abs();
    let s = ab.gcd(&t.unsigned_abs());
    let step = (ab / (s * p)) as i64;
    Ok((0..p as i64).map(|j| j * step).collect())
}

/// `Σ_{d ∈ D} e^{2πi d (l1 - l2) / b} = 0` for all distinct `l1, l2 ∈ L`,
/// decided exactly.
pub fn is_compatible_pair(b: i64, digits: &[i64], l: &[i64]) -> Result<bool> {
    if digits.len() != l.len() {
        return Err(Error::SizeMismatch {
            left: digits.len(),
            right: l.len(),
        });
    }
    if digits.is_empty() {
        return Err(Error::EmptyRootSum);
    }
    if b == 0 {
        return Err(Error::InvalidParameter("b must be nonzero".into()));
    }
    let order = b.unsigned_abs() as i128;
    for (i, &l1) in l.iter().enumerate() {
        for &l2 in &l[i + 1..] {
            let diff = l1 as i128 - l2 as i128;
            let exps = digits
                .iter()
                .map(|&d| ((d as i128 * diff).rem_euclid(order)) as i64);
            if !root_sum_is_zero(&RootSum::new(order as i64, exps)?) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `e^{2πi n / b}` with `n` reduced modulo `|b|` before the division.
fn root_of_unity(n: i128, b: i64) -> Complex64 {
    let r = n.rem_euclid(b.unsigned_abs() as i128);
    Complex64::from_polar(1.0, TAU * r as f64 / b as f64)
}

/// Frobenius norm of `H*H - I` for `H = (1/√#D) [e^{2πi d l / b}]`.
pub fn unitarity_residual(b: i64, digits: &[i64], l: &[i64]) -> Result<f64> {
    if digits.len() != l.len() {
        return Err(Error::SizeMismatch {
            left: digits.len(),
            right: l.len(),
        });
    }
    let n = digits.len();
    let mut acc = 0.0;
    for (i, &li) in l.iter().enumerate() {
        for (j, &lj) in l.iter().enumerate() {
            let entry: Complex64 = digits
                .iter()
                .map(|&d| root_of_unity(d as i128 * (lj as i128 - li as i128), b))
                .sum::<Complex64>()
                / n as f64;
            let target = if i == j { 1.0 } else { 0.0 };
            acc += (entry - target).norm_sqr();
        }
    }
    Ok(acc.sqrt())
}

/// `m_D(y) = (1/#D) Σ_{d ∈ D} e^{2πi d y}` for an arbitrary integer digit set.
pub fn mask_general(digits: &[i64], y: f64) -> Complex64 {
    let sum: Complex64 = digits
        .iter()
        .map(|&d| Complex64::from_polar(1.0, TAU * d as f64 * y))
        .sum();
    sum / digits.len() as f64
}

/// `Σ_{l ∈ L} |m_D(l / b + x)|²`, which equals 1 for every `x` exactly when
/// `(b⁻¹D, L)` is compatible.
pub fn parseval_check(b: i64, digits: &[i64], l: &[i64], x: f64) -> f64 {
    l.iter()
        .map(|&li| {
            let sum: Complex64 = digits
                .iter()
                .map(|&d| {
                    root_of_unity(d as i128 * li as i128, b)
                        * Complex64::from_polar(1.0, TAU * d as f64 * x)
                })
                .sum();
            (sum / digits.len() as f64).norm_sqr()
        })
        .sum()
}

/// Exact and numeric checks for an explicit triple `(b, D, L)`.
pub fn check_triple(b: i64, digits: &[i64], l: &[i64]) -> Result<TripleCheckReport> {
    Ok(TripleCheckReport {
        exact_compatible: is_compatible_pair(b, digits, l)?,
        unitarity_residual: unitarity_residual(b, digits, l)?,
        canonical_l: None,
    })
}

/// Builds the canonical `L` of an admissible stage and checks it.
pub fn check_stage(stage: &StagePair) -> Result<TripleCheckReport> {
    let l = canonical_l(stage.b(), stage.p(), stage.t())?;
    let digits = stage.digits();
    Ok(TripleCheckReport {
        exact_compatible: is_compatible_pair(stage.b(), &digits, &l)?,
        unitarity_residual: unitarity_residual(stage.b(), &digits, &l)?,
        canonical_l: Some(l),
    })
}
