//! Finite spectra of truncated measures: the tower construction, exact
//! verification, the Q-function, and the residue-class decomposition of a
//! spectrum with the extraction of a spectrum for the tail measure.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::TAU;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactmath::{frac, rem_euclid, to_f64, Rational};
use crate::hadamard::canonical_l;
use crate::measure::{
    mu_hat_truncated, stage_sequence, zero_set_contains_upto, DiscreteMeasure, SymbolicWord,
    SystemConfig,
};

/// A candidate set of frequencies.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpectrumCandidate {
    /// Sorted, pairwise distinct points.
    Finite(Vec<Rational>),
    /// `digits + period · ℤ`, digits reduced into `[0, period)` and sorted.
    Structured {
        digits: Vec<Rational>,
        period: Rational,
    },
}

impl SpectrumCandidate {
    pub fn finite(points: Vec<Rational>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        for x in &points {
            if !seen.insert(x.clone()) {
                return Err(Error::DuplicatePoint(x.clone()));
            }
        }
        Ok(SpectrumCandidate::Finite(seen.into_iter().collect()))
    }

    pub fn from_integers(points: &[i64]) -> Result<Self> {
        Self::finite(
            points
                .iter()
                .map(|&n| Rational::from_integer(n.into()))
                .collect(),
        )
    }

    pub fn structured(digits: Vec<Rational>, period: Rational) -> Result<Self> {
        if !period.is_positive() {
            return Err(Error::InvalidParameter(
                "lattice period must be positive".into(),
            ));
        }
        let mut seen = BTreeSet::new();
        for d in &digits {
            let r = rem_euclid(d, &period);
            if !seen.insert(r.clone()) {
                return Err(Error::DuplicatePoint(r));
            }
        }
        Ok(SpectrumCandidate::Structured {
            digits: seen.into_iter().collect(),
            period,
        })
    }

    /// The points themselves, or `digits + period · {-window, ..., window}`.
    pub fn enumerate(&self, window: u64) -> Vec<Rational> {
        match self {
            SpectrumCandidate::Finite(points) => points.clone(),
            SpectrumCandidate::Structured { digits, period } => {
                let w = window as i64;
                (-w..=w)
                    .flat_map(|k| {
                        let shift = period * BigInt::from(k);
                        digits.iter().map(move |d| d + &shift)
                    })
                    .collect()
            }
        }
    }

    /// Points of a finite candidate; `None` for a structured one.
    pub fn points(&self) -> Option<&[Rational]> {
        match self {
            SpectrumCandidate::Finite(points) => Some(points),
            SpectrumCandidate::Structured { .. } => None,
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, SpectrumCandidate::Finite(p) if p.is_empty())
    }
}

/// `Λ_k = Σ_j B_{j-1} L_j` with `L_j` the canonical spectrum digits of stage `j`.
pub fn build_tower_spectrum(
    config: &SystemConfig,
    word: &SymbolicWord,
    k: usize,
) -> Result<SpectrumCandidate> {
    let mut points: BTreeSet<BigInt> = BTreeSet::from([BigInt::zero()]);
    let mut scale = BigInt::one();
    for stage in stage_sequence(config, word, k)? {
        let l = canonical_l(stage.b(), stage.p(), stage.t())?;
        let mut next = BTreeSet::new();
        for lambda in &points {
            for &digit in &l {
                let x = lambda + &scale * digit;
                if !next.insert(x.clone()) {
                    return Err(Error::DuplicateTowerPoint(Rational::from_integer(x)));
                }
            }
        }
        points = next;
        scale *= stage.b();
    }
    Ok(SpectrumCandidate::Finite(
        points.into_iter().map(Rational::from_integer).collect(),
    ))
}

/// Outcome of checking a finite candidate against a truncated measure.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumVerification {
    /// Every nonzero difference lies in the zero set of the truncation.
    pub orthogonal: bool,
    /// As many points as atoms.
    pub complete: bool,
    /// First pair whose difference is not a zero, if any.
    pub offending_pair: Option<(Rational, Rational)>,
    pub point_count: usize,
    pub atom_count: usize,
    /// Frobenius norm of `M*M - I` for `M = [√w_a e^{2πi a λ}]`.
    pub unitarity_residual: f64,
}

impl SpectrumVerification {
    pub fn passed(&self) -> bool {
        self.orthogonal && self.complete
    }
}

/// Frobenius norm of `M*M - I` with `M_{a,λ} = √w_a e^{2πi a λ}`. Products
/// `a λ` are reduced mod 1 exactly before conversion to floating point.
pub fn weighted_exponential_residual(measure: &DiscreteMeasure, points: &[Rational]) -> f64 {
    let weights: Vec<f64> = measure.atoms().values().map(to_f64).collect();
    // columns[j][a] = e^{2πi a λ_j}
    let columns: Vec<Vec<Complex64>> = points
        .iter()
        .map(|lambda| {
            measure
                .atoms()
                .keys()
                .map(|a| Complex64::from_polar(1.0, TAU * to_f64(&frac(&(a * lambda)))))
                .collect()
        })
        .collect();
    let n = points.len();
    let mut acc = 0.0;
    for i in 0..n {
        for j in i..n {
            let entry: Complex64 = weights
                .iter()
                .zip(&columns[i])
                .zip(&columns[j])
                .map(|((w, ei), ej)| *w * ei.conj() * ej)
                .sum();
            let target = if i == j { 1.0 } else { 0.0 };
            let e = (entry - target).norm_sqr();
            acc += if i == j { e } else { 2.0 * e };
        }
    }
    acc.sqrt()
}

/// Checks `Λ` against `μ_{σ,k}` exactly: all nonzero differences lie in the
/// zero set of the depth-`k` transform, and `#Λ` equals the atom count.
pub fn verify_spectrum_finite(
    measure: &DiscreteMeasure,
    lambda: &SpectrumCandidate,
    config: &SystemConfig,
    word: &SymbolicWord,
    k: usize,
) -> Result<SpectrumVerification> {
    let points = lambda.points().ok_or_else(|| {
        Error::InvalidParameter("finite verification needs a finite candidate".into())
    })?;
    let mut offending_pair = None;
    'outer: for (i, x) in points.iter().enumerate() {
        for y in &points[i + 1..] {
            if !zero_set_contains_upto(config, word, &(y - x), k)? {
                offending_pair = Some((x.clone(), y.clone()));
                break 'outer;
            }
        }
    }
    Ok(SpectrumVerification {
        orthogonal: offending_pair.is_none(),
        complete: points.len() == measure.len(),
        offending_pair,
        point_count: points.len(),
        atom_count: measure.len(),
        unitarity_residual: weighted_exponential_residual(measure, points),
    })
}

/// `Σ_λ |μ̂_{σ,depth}(x + λ)|²` over the enumerated points of `Λ`.
pub fn q_function(
    config: &SystemConfig,
    word: &SymbolicWord,
    depth: usize,
    lambda: &SpectrumCandidate,
    x: f64,
    lattice_window: u64,
) -> Result<f64> {
    let mut sum = 0.0;
    for point in lambda.enumerate(lattice_window) {
        sum += mu_hat_truncated(config, word, x + to_f64(&point), depth)?.norm_sqr();
    }
    Ok(sum)
}

/// `Λ / b1 = ⋃_n (n/q + Λ_n)`; `classes` omits empty residues.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decomposition {
    pub q: u64,
    pub b1: i64,
    pub classes: BTreeMap<u64, BTreeSet<BigInt>>,
}

impl Decomposition {
    /// `q / (p1 |t1|)`.
    pub fn tau1(&self, p1: u64, t1: i64) -> Result<u64> {
        let base = p1 * t1.unsigned_abs();
        if base == 0 || !self.q.is_multiple_of(base) {
            return Err(Error::InvalidParameter(format!(
                "q = {} is not a multiple of p1 |t1| = {base}",
                self.q
            )));
        }
        Ok(self.q / base)
    }

    pub fn class(&self, n: u64) -> Option<&BTreeSet<BigInt>> {
        self.classes.get(&n)
    }
}

/// Splits `Λ / b1` by the residue of `q λ / b1` modulo `q`.
pub fn decompose_spectrum(points: &[Rational], b1: i64, q: u64) -> Result<Decomposition> {
    if b1 == 0 || q == 0 {
        return Err(Error::InvalidParameter("b1 and q must be nonzero".into()));
    }
    let qb = BigInt::from(q);
    let factor = Rational::new(qb.clone(), BigInt::from(b1));
    let mut classes: BTreeMap<u64, BTreeSet<BigInt>> = BTreeMap::new();
    for lambda in points {
        let y = lambda * &factor;
        if !y.is_integer() {
            return Err(Error::NotOnLattice(lambda.clone()));
        }
        let (z, n) = y.to_integer().div_mod_floor(&qb);
        let n = n.to_u64().expect("residue below q");
        classes.entry(n).or_default().insert(z);
    }
    Ok(Decomposition { q, b1, classes })
}

/// `Γ = ⋃_i ⋃_l ((i + τ1 j_i + τ1 p1 l)/q + Λ_{i + τ1 j_i + τ1 p1 l})` with
/// `i < τ1`, `l < |t1|` and `choices[i] = j_i < p1`.
pub fn extract_gamma(
    dec: &Decomposition,
    choices: &[u64],
    p1: u64,
    t1: i64,
) -> Result<SpectrumCandidate> {
    let tau1 = dec.tau1(p1, t1)?;
    if choices.len() as u64 != tau1 {
        return Err(Error::InvalidParameter(format!(
            "expected {tau1} choices, got {}",
            choices.len()
        )));
    }
    if let Some(&bad) = choices.iter().find(|&&j| j >= p1) {
        return Err(Error::InvalidParameter(format!(
            "choice {bad} is not below p1 = {p1}"
        )));
    }
    let q = BigInt::from(dec.q);
    let mut gamma = Vec::new();
    for (i, &j) in choices.iter().enumerate() {
        for l in 0..t1.unsigned_abs() {
            let n = i as u64 + tau1 * j + tau1 * p1 * l;
            if let Some(class) = dec.class(n) {
                let offset = Rational::new(BigInt::from(n), q.clone());
                gamma.extend(
                    class
                        .iter()
                        .map(|z| &offset + Rational::from_integer(z.clone())),
                );
            }
        }
    }
    SpectrumCandidate::finite(gamma)
}

/// All maps `{0, ..., tau1 - 1} → {0, ..., p1 - 1}`, in lexicographic order.
pub fn choice_maps(tau1: u64, p1: u64) -> Vec<Vec<u64>> {
    let mut out = vec![Vec::new()];
    for _ in 0..tau1 {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                (0..p1).map(move |j| {
                    let mut v = prefix.clone();
                    v.push(j);
                    v
                })
            })
            .collect();
    }
    out
}

/// `lcm_k p_k |t_k|` over the whole alphabet.
pub fn default_q(config: &SystemConfig) -> u64 {
    config
        .pairs()
        .iter()
        .fold(1u64, |acc, s| acc.lcm(&(s.p() * s.t().unsigned_abs())))
}

/// For each `j < p1`, the first `λ ∈ Λ` of the form
/// `b1 (j + p1 l) / (p1 t1) + b1 z` with integers `l, z`, i.e. with
/// `p1 t1 λ / b1` an integer congruent to `j` mod `p1`. Absence in a finite
/// set says nothing about the infinite spectrum.
pub fn residue_representatives(
    points: &[Rational],
    b1: i64,
    p1: u64,
    t1: i64,
) -> Vec<Option<Rational>> {
    let factor = Rational::new(BigInt::from(p1) * BigInt::from(t1), BigInt::from(b1));
    let p = BigInt::from(p1);
    (0..p1)
        .map(|j| {
            points
                .iter()
                .find(|lambda| {
                    let y = *lambda * &factor;
                    y.is_integer() && y.to_integer().mod_floor(&p) == BigInt::from(j)
                })
                .cloned()
        })
        .collect()
}
