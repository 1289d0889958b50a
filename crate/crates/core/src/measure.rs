//! Stage alphabets, eventually periodic words, truncated convolutions and
//! their Fourier transforms.
//!
//! A letter `k` of the alphabet is a [`StagePair`] `(b_k, p_k, t_k)` standing
//! for the digit set `D_k = {0, t_k, ..., (p_k - 1) t_k}`. A word `σ` picks one
//! letter per stage, and the `n`-th stage of `μ_σ` contributes the uniform
//! measure on `D_{σ_n} / (b_{σ_1} ⋯ b_{σ_n})`.

use std::collections::{BTreeMap, BTreeSet};
use std::f64::consts::{PI, TAU};
use std::fmt;

use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactmath::{to_f64, Rational};

pub const DEFAULT_ATOM_CAP: u64 = 1_000_000;

/// One alphabet letter `(b, p, t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct StagePair {
    b: i64,
    p: u64,
    t: i64,
}

impl StagePair {
    pub fn new(b: i64, p: u64, t: i64) -> Result<Self> {
        let reject = |reason| Err(Error::InvalidStage { b, p, t, reason });
        if b.unsigned_abs() < 2 {
            return reject("|b| must be at least 2");
        }
        if p < 2 {
            return reject("p must be at least 2");
        }
        if t == 0 {
            return reject("t must be nonzero");
        }
        Ok(StagePair { b, p, t })
    }

    pub fn b(&self) -> i64 {
        self.b
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn t(&self) -> i64 {
        self.t
    }

    pub fn digits(&self) -> Vec<i64> {
        (0..self.p as i64).map(|j| j * self.t).collect()
    }

    pub fn abs(&self) -> StagePair {
        StagePair {
            b: self.b.abs(),
            p: self.p,
            t: self.t.abs(),
        }
    }

    pub fn with_b(&self, b: i64) -> Result<StagePair> {
        StagePair::new(b, self.p, self.t)
    }

    /// `m_D(y) = (1/p) Σ_j e^{2πi j t y}`.
    pub fn mask(&self, y: f64) -> Complex64 {
        mask_value(self.p, self.t as f64, y)
    }
}

impl fmt::Display for StagePair {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(b={}, p={}, t={})", self.b, self.p, self.t)
    }
}

pub(crate) fn mask_value(p: u64, t: f64, y: f64) -> Complex64 {
    let sum: Complex64 = (0..p)
        .map(|j| Complex64::from_polar(1.0, TAU * j as f64 * t * y))
        .sum();
    sum / p as f64
}

/// An ordered alphabet of `m ≥ 1` stage pairs; letters are numbered from 1.
///
/// Only the structural constraints of each pair are enforced here. The
/// coprimality hypothesis of the classification is checked by
/// [`crate::classifier::validate_config`], since several rewrites of interest
/// deliberately use alphabets that violate it.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct SystemConfig {
    pairs: Vec<StagePair>,
}

impl SystemConfig {
    pub fn new(pairs: Vec<StagePair>) -> Result<Self> {
        if pairs.is_empty() {
            return Err(Error::EmptyConfig);
        }
        Ok(SystemConfig { pairs })
    }

    /// Convenience constructor from `(b, p, t)` triples.
    pub fn from_triples(triples: &[(i64, u64, i64)]) -> Result<Self> {
        let pairs = triples
            .iter()
            .map(|&(b, p, t)| StagePair::new(b, p, t))
            .collect::<Result<Vec<_>>>()?;
        Self::new(pairs)
    }

    pub fn pairs(&self) -> &[StagePair] {
        &self.pairs
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pair(&self, letter: usize) -> Result<&StagePair> {
        letter
            .checked_sub(1)
            .and_then(|i| self.pairs.get(i))
            .ok_or(Error::LetterOutOfRange {
                letter,
                alphabet: self.pairs.len(),
            })
    }

    pub fn check_word(&self, word: &SymbolicWord) -> Result<()> {
        for &letter in word.preperiod().iter().chain(word.period()) {
            self.pair(letter)?;
        }
        Ok(())
    }

    /// `min_j 1/(p_j |t_j|)`, the smallest nonzero magnitude in any mask zero set.
    pub fn zero_scale_bound(&self) -> Rational {
        self.pairs
            .iter()
            .map(|s| Rational::new(BigInt::one(), BigInt::from(s.p) * BigInt::from(s.t.abs())))
            .min()
            .expect("nonempty alphabet")
    }

    pub fn with_pair(&self, letter: usize, pair: StagePair) -> Result<SystemConfig> {
        self.pair(letter)?;
        let mut pairs = self.pairs.clone();
        pairs[letter - 1] = pair;
        Ok(SystemConfig { pairs })
    }
}

/// Eventually periodic word `preperiod · period^∞` over `{1, ..., m}`, kept in
/// canonical form: the period is primitive and the preperiod is as short as
/// possible. Two words are equal as infinite sequences iff their canonical
/// forms are equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SymbolicWord {
    preperiod: Vec<usize>,
    period: Vec<usize>,
}

impl SymbolicWord {
    pub fn new(preperiod: Vec<usize>, period: Vec<usize>) -> Result<Self> {
        if period.is_empty() {
            return Err(Error::EmptyPeriod);
        }
        if let Some(&bad) = preperiod.iter().chain(&period).find(|&&l| l == 0) {
            return Err(Error::LetterOutOfRange {
                letter: bad,
                alphabet: 0,
            });
        }
        let mut preperiod = preperiod;
        let mut period = primitive_root(period);
        while preperiod.last().is_some() && preperiod.last() == period.last() {
            preperiod.pop();
            period.rotate_right(1);
        }
        Ok(SymbolicWord { preperiod, period })
    }

    /// The constant word `letter^∞`.
    pub fn constant(letter: usize) -> Result<Self> {
        Self::new(Vec::new(), vec![letter])
    }

    /// Parses `"pre;per"` where each side is a comma- or space-separated list of
    /// letters, e.g. `"1;2"`, `";1,2"` or `"1 2;3"`.
    pub fn parse(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::InvalidParameter(format!("bad word {s:?}: {why}"));
        let (pre, per) = s
            .split_once(';')
            .ok_or_else(|| bad("expected 'preperiod;period'"))?;
        let letters = |part: &str| -> Result<Vec<usize>> {
            part.split(|c: char| c == ',' || c.is_whitespace())
                .filter(|tok| !tok.is_empty())
                .map(|tok| {
                    tok.parse::<usize>()
                        .map_err(|_| bad("letters must be positive integers"))
                })
                .collect()
        };
        Self::new(letters(pre)?, letters(per)?)
    }

    pub fn preperiod(&self) -> &[usize] {
        &self.preperiod
    }

    pub fn period(&self) -> &[usize] {
        &self.period
    }

    /// Letter at 1-based position `n`.
    pub fn letter_at(&self, n: usize) -> usize {
        assert!(n >= 1, "positions start at 1");
        let s = self.preperiod.len();
        if n <= s {
            self.preperiod[n - 1]
        } else {
            self.period[(n - s - 1) % self.period.len()]
        }
    }

    /// The first `k` letters.
    pub fn prefix(&self, k: usize) -> Vec<usize> {
        (1..=k).map(|n| self.letter_at(n)).collect()
    }

    /// The tail `σ_{n+1} σ_{n+2} ⋯`.
    pub fn shift(&self, n: usize) -> SymbolicWord {
        let s = self.preperiod.len();
        if n <= s {
            SymbolicWord {
                preperiod: self.preperiod[n..].to_vec(),
                period: self.period.clone(),
            }
        } else {
            let mut period = self.period.clone();
            let len = period.len();
            period.rotate_left((n - s) % len);
            SymbolicWord {
                preperiod: Vec::new(),
                period,
            }
        }
    }

    /// `Some(j)` when the word is eventually `j^∞`.
    pub fn tail_letter(&self) -> Option<usize> {
        (self.period.len() == 1).then(|| self.period[0])
    }

    pub fn letters_infinitely_often(&self) -> BTreeSet<usize> {
        self.period.iter().copied().collect()
    }

    /// Letters occurring at some position `≥ n`.
    pub fn letters_from_position(&self, n: usize) -> BTreeSet<usize> {
        let mut out = self.letters_infinitely_often();
        if n >= 1 && n <= self.preperiod.len() {
            out.extend(self.preperiod[n - 1..].iter().copied());
        }
        out
    }

    pub fn letters(&self) -> BTreeSet<usize> {
        self.letters_from_position(1)
    }

    pub fn max_letter(&self) -> usize {
        self.preperiod
            .iter()
            .chain(&self.period)
            .copied()
            .max()
            .unwrap_or(0)
    }

    /// Replaces the letter at position 1, keeping the rest of the word.
    pub fn with_first_letter(&self, letter: usize) -> Result<SymbolicWord> {
        let tail = self.shift(1);
        let mut pre = vec![letter];
        pre.extend_from_slice(&tail.preperiod);
        SymbolicWord::new(pre, tail.period)
    }
}

impl fmt::Display for SymbolicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let join = |v: &[usize]| {
            v.iter()
                .map(|l| l.to_string())
                .collect::<Vec<_>>()
                .join(",")
        };
        write!(f, "{};{}", join(&self.preperiod), join(&self.period))
    }
}

fn primitive_root(period: Vec<usize>) -> Vec<usize> {
    let n = period.len();
    for d in 1..n {
        if n.is_multiple_of(d) && (d..n).all(|i| period[i] == period[i - d]) {
            return period[..d].to_vec();
        }
    }
    period
}

/// Stage pairs `(b_{σ_1}, ...), ..., (b_{σ_k}, ...)` in order.
pub fn stage_sequence(
    config: &SystemConfig,
    word: &SymbolicWord,
    k: usize,
) -> Result<Vec<StagePair>> {
    (1..=k)
        .map(|n| config.pair(word.letter_at(n)).copied())
        .collect()
}

/// `B_1, ..., B_k` with `B_j = b_{σ_1} ⋯ b_{σ_j}`.
pub fn partial_products(
    config: &SystemConfig,
    word: &SymbolicWord,
    k: usize,
) -> Result<Vec<BigInt>> {
    let mut out = Vec::with_capacity(k);
    let mut acc = BigInt::one();
    for stage in stage_sequence(config, word, k)? {
        acc *= stage.b;
        out.push(acc.clone());
    }
    Ok(out)
}

/// Finite probability measure with rational atoms and rational weights.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiscreteMeasure {
    atoms: BTreeMap<Rational, Rational>,
}

impl DiscreteMeasure {
    pub fn point_mass(x: Rational) -> Self {
        let mut atoms = BTreeMap::new();
        atoms.insert(x, Rational::one());
        DiscreteMeasure { atoms }
    }

    /// Merges coinciding points; weights must be positive and sum to exactly 1.
    pub fn from_atoms<I>(atoms: I) -> Result<Self>
    where
        I: IntoIterator<Item = (Rational, Rational)>,
    {
        let mut map: BTreeMap<Rational, Rational> = BTreeMap::new();
        for (x, w) in atoms {
            if !w.is_positive() {
                return Err(Error::Constraint(format!(
                    "atom weight {w} is not positive"
                )));
            }
            *map.entry(x).or_insert_with(Rational::zero) += w;
        }
        let total: Rational = map.values().sum();
        if !total.is_one() {
            return Err(Error::Constraint(format!(
                "atom weights sum to {total}, not 1"
            )));
        }
        Ok(DiscreteMeasure { atoms: map })
    }

    pub fn atoms(&self) -> &BTreeMap<Rational, Rational> {
        &self.atoms
    }

    pub fn len(&self) -> usize {
        self.atoms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.atoms.is_empty()
    }

    pub fn total_weight(&self) -> Rational {
        self.atoms.values().sum()
    }

    pub fn translate(&self, shift: &Rational) -> DiscreteMeasure {
        DiscreteMeasure {
            atoms: self
                .atoms
                .iter()
                .map(|(x, w)| (x + shift, w.clone()))
                .collect(),
        }
    }

    pub fn convolve(&self, other: &DiscreteMeasure) -> DiscreteMeasure {
        let mut atoms: BTreeMap<Rational, Rational> = BTreeMap::new();
        for (x, w) in &self.atoms {
            for (y, v) in &other.atoms {
                *atoms.entry(x + y).or_insert_with(Rational::zero) += w * v;
            }
        }
        DiscreteMeasure { atoms }
    }

    /// `∫ e^{2πi x ξ} dμ(ξ)`, summed over atoms in floating point.
    pub fn fourier(&self, x: f64) -> Complex64 {
        self.atoms
            .iter()
            .map(|(a, w)| Complex64::from_polar(to_f64(w), TAU * x * to_f64(a)))
            .sum()
    }
}

fn uniform_stage(p: u64, step: &Rational) -> DiscreteMeasure {
    let w = Rational::new(BigInt::one(), BigInt::from(p));
    DiscreteMeasure {
        atoms: (0..p)
            .map(|j| (step * BigInt::from(j), w.clone()))
            .collect(),
    }
}

fn check_cap(ps: impl Iterator<Item = u64>, cap: u64) -> Result<()> {
    let mut needed: u128 = 1;
    for p in ps {
        needed = needed.saturating_mul(p as u128);
        if needed > cap as u128 {
            return Err(Error::AtomCapExceeded { needed, cap });
        }
    }
    Ok(())
}

/// Convolution of `δ_{D_j / (b_1 ⋯ b_j)}` over an explicit list of stages with
/// rational digit steps `t_j`.
pub(crate) fn convolve_rational_stages(
    stages: &[(i64, u64, Rational)],
    cap: u64,
) -> Result<DiscreteMeasure> {
    check_cap(stages.iter().map(|s| s.1), cap)?;
    let mut mu = DiscreteMeasure::point_mass(Rational::zero());
    let mut scale = BigInt::one();
    for (b, p, t) in stages {
        scale *= *b;
        let step = t / Rational::from_integer(scale.clone());
        mu = mu.convolve(&uniform_stage(*p, &step));
    }
    Ok(mu)
}

/// Convolution over an explicit stage list (no word needed).
pub fn truncate_stage_list(stages: &[StagePair], cap: u64) -> Result<DiscreteMeasure> {
    let stages: Vec<_> = stages
        .iter()
        .map(|s| (s.b, s.p, Rational::from_integer(BigInt::from(s.t))))
        .collect();
    convolve_rational_stages(&stages, cap)
}

/// `μ_{σ,k}`, the exact convolution of the first `k` stages, with the default
/// atom cap.
pub fn truncate(config: &SystemConfig, word: &SymbolicWord, k: usize) -> Result<DiscreteMeasure> {
    truncate_with_cap(config, word, k, DEFAULT_ATOM_CAP)
}

pub fn truncate_with_cap(
    config: &SystemConfig,
    word: &SymbolicWord,
    k: usize,
    cap: u64,
) -> Result<DiscreteMeasure> {
    let stages = stage_sequence(config, word, k)?;
    truncate_stage_list(&stages, cap)
}

pub fn measures_equal(a: &DiscreteMeasure, b: &DiscreteMeasure) -> bool {
    a == b
}

/// `x ∈ Z(m_D) = (ℤ ∖ pℤ) / (p t)`.
pub fn mask_zero_contains(p: u64, t: i64, x: &Rational) -> bool {
    let y = x * Rational::from_integer(BigInt::from(p) * BigInt::from(t));
    y.is_integer() && !y.to_integer().is_multiple_of(&BigInt::from(p))
}

/// Smallest stage `k ≥ 1` with `x / B_k ∈ Z(m_{D_{σ_k}})`, if any.
///
/// The scan stops once `|x| / |B_k|` drops below `min_j 1/(p_j |t_j|)`, after
/// which no later stage can vanish.
pub fn zero_set_witness(
    config: &SystemConfig,
    word: &SymbolicWord,
    x: &Rational,
) -> Result<Option<usize>> {
    zero_set_scan(config, word, x, None)
}

/// Exact membership of `x` in the zero set of `μ̂_σ`.
pub fn zero_set_contains(config: &SystemConfig, word: &SymbolicWord, x: &Rational) -> Result<bool> {
    Ok(zero_set_witness(config, word, x)?.is_some())
}

/// Exact membership of `x` in the zero set of the truncation `μ̂_{σ,depth}`.
pub fn zero_set_contains_upto(
    config: &SystemConfig,
    word: &SymbolicWord,
    x: &Rational,
    depth: usize,
) -> Result<bool> {
    Ok(zero_set_scan(config, word, x, Some(depth))?.is_some())
}

fn zero_set_scan(
    config: &SystemConfig,
    word: &SymbolicWord,
    x: &Rational,
    depth: Option<usize>,
) -> Result<Option<usize>> {
    config.check_word(word)?;
    if x.is_zero() {
        return Ok(None);
    }
    let bound = config.zero_scale_bound();
    let ax = x.abs();
    let mut scale = BigInt::one();
    let mut k = 0usize;
    loop {
        k += 1;
        if depth.is_some_and(|d| k > d) {
            return Ok(None);
        }
        let stage = config.pair(word.letter_at(k))?;
        scale *= stage.b;
        let scale_r = Rational::from_integer(scale.abs());
        if &ax / &scale_r < bound {
            return Ok(None);
        }
        if mask_zero_contains(
            stage.p,
            stage.t,
            &(x / Rational::from_integer(scale.clone())),
        ) {
            return Ok(Some(k));
        }
    }
}

/// Value of a Fourier transform truncated after some stages, with an upper
/// bound on the distance to the infinite product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FourierSample {
    pub value: Complex64,
    pub tail_bound: f64,
}

/// `Π_{k ≤ depth} m_{D_{σ_k}}(x / B_k)` without any tail estimate.
pub fn mu_hat_truncated(
    config: &SystemConfig,
    word: &SymbolicWord,
    x: f64,
    depth: usize,
) -> Result<Complex64> {
    let mut scale = 1.0f64;
    let mut value = Complex64::new(1.0, 0.0);
    for stage in stage_sequence(config, word, depth)? {
        scale *= stage.b as f64;
        value *= stage.mask(x / scale);
    }
    Ok(value)
}

/// Evaluates `μ̂_σ(x)` by its first `depth` factors. The tail bound uses
/// `|m_D(y) - 1| ≤ π (p - 1)|t||y|` summed over the omitted factors, with the
/// geometric decay `|B_k| ≥ |B_depth| · min|b|^{k - depth}`.
pub fn mu_hat_eval(
    config: &SystemConfig,
    word: &SymbolicWord,
    x: f64,
    depth: usize,
) -> Result<FourierSample> {
    if depth == 0 {
        return Err(Error::InvalidParameter("depth must be at least 1".into()));
    }
    config.check_word(word)?;
    let value = mu_hat_truncated(config, word, x, depth)?;
    let letters = word.letters();
    let mut spread = 0.0f64;
    let mut min_b = f64::INFINITY;
    for &l in &letters {
        let s = config.pair(l)?;
        spread = spread.max((s.p - 1) as f64 * s.t.abs() as f64);
        min_b = min_b.min(s.b.abs() as f64);
    }
    let scale: f64 = stage_sequence(config, word, depth)?
        .iter()
        .map(|s| s.b.abs() as f64)
        .product();
    let r = 1.0 / min_b;
    let tail_bound = if x == 0.0 {
        0.0
    } else {
        value.norm() * PI * spread * x.abs() / scale * r / (1.0 - r)
    };
    Ok(FourierSample { value, tail_bound })
}

/// `Σ_{k ≥ 1} c(σ_k, B_k) / B_k` in closed form, where `c` depends on `B_k`
/// only through its sign. The sign pattern repeats after two periods, so the
/// periodic part is a geometric series with ratio `P^{-2}`, `P` being the
/// product of `b` over one period.
fn eventually_periodic_series<F>(
    config: &SystemConfig,
    word: &SymbolicWord,
    coeff: F,
) -> Result<Rational>
where
    F: Fn(&StagePair, bool) -> Rational,
{
    config.check_word(word)?;
    let s = word.preperiod().len();
    let len = word.period().len();
    let mut scale = BigInt::one();
    let mut head = Rational::zero();
    for n in 1..=s {
        let stage = config.pair(word.letter_at(n))?;
        scale *= stage.b;
        head += coeff(stage, scale.is_negative()) / Rational::from_integer(scale.clone());
    }
    let mut block = Rational::zero();
    let mut period_product = BigInt::one();
    for n in s + 1..=s + 2 * len {
        let stage = config.pair(word.letter_at(n))?;
        scale *= stage.b;
        if n <= s + len {
            period_product *= stage.b;
        }
        block += coeff(stage, scale.is_negative()) / Rational::from_integer(scale.clone());
    }
    let p2 = Rational::from_integer(&period_product * &period_product);
    Ok(head + block * &p2 / (p2 - Rational::one()))
}

/// Exact convex hull `[0, Σ (p_k - 1) t_k / B_k]` of the support.
pub fn support_hull(config: &SystemConfig, word: &SymbolicWord) -> Result<(Rational, Rational)> {
    config.check_word(word)?;
    for &l in &word.letters() {
        let s = config.pair(l)?;
        if s.b <= 0 || s.t <= 0 {
            return Err(Error::SignsNotNormalized);
        }
    }
    let sup = eventually_periodic_series(config, word, |s, _| {
        Rational::from_integer(BigInt::from((s.p - 1) as i64) * BigInt::from(s.t))
    })?;
    Ok((Rational::zero(), sup))
}

/// Result of replacing every `(b_k, t_k)` by `(|b_k|, |t_k|)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SignNormalization {
    pub config: SystemConfig,
    pub gamma: Rational,
}

fn gamma_coeff(s: &StagePair, scale_negative: bool) -> Rational {
    if scale_negative != (s.t < 0) {
        // B_k t_k < 0: γ_k = -(p_k - 1) t_k / B_k
        -Rational::from_integer(BigInt::from((s.p - 1) as i64) * BigInt::from(s.t))
    } else {
        Rational::zero()
    }
}

/// Sign normalization: `ν̂(x) = e^{2πiγx} μ̂(x)` where `ν` uses `|b_k|, |t_k|`.
pub fn normalize_signs(config: &SystemConfig, word: &SymbolicWord) -> Result<SignNormalization> {
    let gamma = eventually_periodic_series(config, word, gamma_coeff)?;
    let pairs = config.pairs().iter().map(StagePair::abs).collect();
    Ok(SignNormalization {
        config: SystemConfig::new(pairs)?,
        gamma,
    })
}

/// `Σ_{k ≤ depth} γ_k`: the exact shift between the depth-`depth` truncations
/// of the normalized and original measures.
pub fn gamma_partial(config: &SystemConfig, word: &SymbolicWord, depth: usize) -> Result<Rational> {
    let mut scale = BigInt::one();
    let mut acc = Rational::zero();
    for stage in stage_sequence(config, word, depth)? {
        scale *= stage.b;
        acc += gamma_coeff(&stage, scale.is_negative()) / Rational::from_integer(scale.clone());
    }
    Ok(acc)
}

/// A stage whose digit step may be rational after scaling.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaledStage {
    pub b: i64,
    pub p: u64,
    pub t: Rational,
}

/// Alphabet with digit sets `q D_k`. Any spectrum `Λ` of the original measure
/// corresponds to the spectrum `q^{-1} Λ` of the scaled one.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScaledConfig {
    pub q: Rational,
    pub stages: Vec<ScaledStage>,
}

impl ScaledConfig {
    pub fn truncate(&self, word: &SymbolicWord, k: usize, cap: u64) -> Result<DiscreteMeasure> {
        let stages = (1..=k)
            .map(|n| {
                let letter = word.letter_at(n);
                self.stages
                    .get(letter.wrapping_sub(1))
                    .map(|s| (s.b, s.p, s.t.clone()))
                    .ok_or(Error::LetterOutOfRange {
                        letter,
                        alphabet: self.stages.len(),
                    })
            })
            .collect::<Result<Vec<_>>>()?;
        convolve_rational_stages(&stages, cap)
    }

    /// Back to an integer alphabet when every `q t_k` is an integer.
    pub fn to_integer_config(&self) -> Option<SystemConfig> {
        let pairs = self
            .stages
            .iter()
            .map(|s| {
                if !s.t.is_integer() {
                    return None;
                }
                let t = s.t.to_integer().to_i64()?;
                StagePair::new(s.b, s.p, t).ok()
            })
            .collect::<Option<Vec<_>>>()?;
        SystemConfig::new(pairs).ok()
    }
}

pub fn scale_digits(config: &SystemConfig, q: &Rational) -> Result<ScaledConfig> {
    if q.is_zero() {
        return Err(Error::ZeroScale);
    }
    Ok(ScaledConfig {
        q: q.clone(),
        stages: config
            .pairs()
            .iter()
            .map(|s| ScaledStage {
                b: s.b,
                p: s.p,
                t: q * Rational::from_integer(BigInt::from(s.t)),
            })
            .collect(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::{int, rat};

    fn cfg(triples: &[(i64, u64, i64)]) -> SystemConfig {
        SystemConfig::from_triples(triples).unwrap()
    }

    fn w(pre: &[usize], per: &[usize]) -> SymbolicWord {
        SymbolicWord::new(pre.to_vec(), per.to_vec()).unwrap()
    }

    #[test]
    fn stage_pair_rejects_degenerate_values() {
        assert!(StagePair::new(1, 2, 1).is_err());
        assert!(StagePair::new(-1, 2, 1).is_err());
        assert!(StagePair::new(4, 1, 1).is_err());
        assert!(StagePair::new(4, 2, 0).is_err());
        assert!(StagePair::new(-4, 2, -3).is_ok());
        assert_eq!(StagePair::new(4, 3, 5).unwrap().digits(), vec![0, 5, 10]);
    }

    #[test]
    fn word_canonical_form() {
        assert_eq!(w(&[], &[1, 1]), w(&[], &[1]));
        assert_eq!(w(&[2, 1], &[2, 1]), w(&[], &[2, 1]));
        assert_eq!(w(&[1, 2], &[1, 2, 1, 2]), w(&[], &[1, 2]));
        assert_eq!(w(&[3, 1], &[2, 1]).preperiod(), &[3]);
        assert_eq!(w(&[3, 1], &[2, 1]).period(), &[1, 2]);
        assert_eq!(w(&[2, 2, 2], &[2]), SymbolicWord::constant(2).unwrap());
        assert!(SymbolicWord::new(vec![1], vec![]).is_err());
        assert!(SymbolicWord::new(vec![0], vec![1]).is_err());
    }

    #[test]
    fn word_positions_and_shifts() {
        let word = w(&[3], &[1, 2]);
        assert_eq!(word.prefix(5), vec![3, 1, 2, 1, 2]);
        assert_eq!(word.shift(1), w(&[], &[1, 2]));
        assert_eq!(word.shift(2), w(&[], &[2, 1]));
        assert_eq!(word.letters_from_position(2), [1, 2].into_iter().collect());
        assert_eq!(
            word.letters_from_position(1),
            [1, 2, 3].into_iter().collect()
        );
        assert_eq!(w(&[1], &[2]).tail_letter(), Some(2));
        assert_eq!(word.with_first_letter(4).unwrap(), w(&[4], &[1, 2]));
    }

    #[test]
    fn word_parse_roundtrip() {
        let word = SymbolicWord::parse("1;2").unwrap();
        assert_eq!(word, w(&[1], &[2]));
        assert_eq!(SymbolicWord::parse(";1,2").unwrap(), w(&[], &[1, 2]));
        assert_eq!(
            SymbolicWord::parse(" 3 1 ; 2 1 ").unwrap(),
            w(&[3], &[1, 2])
        );
        assert_eq!(SymbolicWord::parse(&word.to_string()).unwrap(), word);
        assert!(SymbolicWord::parse("1,2").is_err());
        assert!(SymbolicWord::parse("1;").is_err());
        assert!(SymbolicWord::parse("a;1").is_err());
    }

    #[test]
    fn truncate_single_stage() {
        let mu = truncate(&cfg(&[(4, 2, 1)]), &w(&[], &[1]), 1).unwrap();
        let expected =
            DiscreteMeasure::from_atoms([(int(0), rat(1, 2)), (rat(1, 4), rat(1, 2))]).unwrap();
        assert!(measures_equal(&mu, &expected));
    }

    #[test]
    fn truncate_depth_zero_is_point_mass() {
        let mu = truncate(&cfg(&[(3, 2, 5), (7, 3, 1)]), &w(&[1], &[2]), 0).unwrap();
        assert_eq!(mu, DiscreteMeasure::point_mass(int(0)));
    }

    #[test]
    fn twelve_adic_rewrite_depth_two() {
        let original = cfg(&[(12, 2, 1), (2, 3, 4)]);
        let mu = truncate(&original, &w(&[1], &[2]), 2).unwrap();
        let merged = truncate(&cfg(&[(12, 6, 1)]), &w(&[], &[1]), 1).unwrap();
        assert!(measures_equal(&mu, &merged));
    }

    #[test]
    fn atom_cap_enforced() {
        let err = truncate_with_cap(&cfg(&[(4, 2, 1)]), &w(&[], &[1]), 11, 1024).unwrap_err();
        assert_eq!(
            err,
            Error::AtomCapExceeded {
                needed: 2048,
                cap: 1024
            }
        );
        assert!(truncate_with_cap(&cfg(&[(4, 2, 1)]), &w(&[], &[1]), 10, 1024).is_ok());
    }

    #[test]
    fn measures_equal_distinguishes() {
        let a = DiscreteMeasure::point_mass(int(0));
        let b = DiscreteMeasure::from_atoms([(int(0), rat(1, 2)), (int(1), rat(1, 2))]).unwrap();
        assert!(!measures_equal(&a, &b));
        assert!(measures_equal(&a, &a.clone()));
    }

    #[test]
    fn from_atoms_validates() {
        assert!(DiscreteMeasure::from_atoms([(int(0), rat(1, 2))]).is_err());
        assert!(DiscreteMeasure::from_atoms([(int(0), int(2)), (int(1), int(-1))]).is_err());
        let merged =
            DiscreteMeasure::from_atoms([(int(0), rat(1, 2)), (int(0), rat(1, 2))]).unwrap();
        assert_eq!(merged.len(), 1);
    }

    #[test]
    fn mask_zero_set_membership() {
        assert!(mask_zero_contains(3, 4, &rat(1, 12)));
        assert!(!mask_zero_contains(3, 4, &rat(1, 4)));
        assert!(!mask_zero_contains(3, 4, &int(0)));
        assert!(mask_zero_contains(2, -3, &rat(1, 6)));
    }

    #[test]
    fn zero_set_examples() {
        let c = cfg(&[(4, 2, 1)]);
        let word = w(&[], &[1]);
        assert_eq!(zero_set_witness(&c, &word, &int(2)).unwrap(), Some(1));
        assert!(!zero_set_contains(&c, &word, &rat(1, 2)).unwrap());
        assert!(!zero_set_contains(&c, &word, &int(0)).unwrap());
        assert!(zero_set_contains(&c, &word, &int(8)).unwrap());
        assert_eq!(zero_set_witness(&c, &word, &int(8)).unwrap(), Some(2));
        assert!(!zero_set_contains_upto(&c, &word, &int(8), 1).unwrap());
    }

    #[test]
    fn mu_hat_examples() {
        let c = cfg(&[(4, 2, 1)]);
        let word = w(&[], &[1]);
        let at0 = mu_hat_eval(&c, &word, 0.0, 5).unwrap();
        assert_eq!(at0.value, Complex64::new(1.0, 0.0));
        assert_eq!(at0.tail_bound, 0.0);
        assert!(mu_hat_eval(&c, &word, 2.0, 20).unwrap().value.norm() < 1e-12);
        // |m_{0,1}(y)| = |cos(π y)|
        let x = 1.0 / 3.0;
        let closed: f64 = (1..=30).map(|k| (PI * x / 4f64.powi(k)).cos()).product();
        let got = mu_hat_eval(&c, &word, x, 30).unwrap();
        assert!((got.value.norm() - closed.abs()).abs() < 1e-10);
        assert!(mu_hat_eval(&c, &word, 1.0, 0).is_err());
    }

    #[test]
    fn tail_bound_covers_deeper_product() {
        let c = cfg(&[(3, 2, 5), (4, 3, 1)]);
        let word = w(&[1], &[2, 1]);
        for &x in &[0.37, 1.5, -2.25, 11.0] {
            let shallow = mu_hat_eval(&c, &word, x, 6).unwrap();
            let deep = mu_hat_truncated(&c, &word, x, 40).unwrap();
            assert!(
                (shallow.value - deep).norm() <= shallow.tail_bound + 1e-12,
                "x = {x}"
            );
        }
    }

    #[test]
    fn mask_product_matches_atom_sum() {
        let c = cfg(&[(3, 2, 5), (-4, 3, 1)]);
        let word = w(&[1], &[2, 1]);
        let mu = truncate(&c, &word, 5).unwrap();
        for &x in &[0.1, 0.77, 3.0, -5.4] {
            let a = mu.fourier(x);
            let b = mu_hat_truncated(&c, &word, x, 5).unwrap();
            assert!((a - b).norm() < 1e-12);
        }
    }

    #[test]
    fn support_hull_examples() {
        assert_eq!(
            support_hull(&cfg(&[(4, 2, 1)]), &w(&[], &[1])).unwrap(),
            (int(0), rat(1, 3))
        );
        assert_eq!(
            support_hull(&cfg(&[(2, 2, 1)]), &w(&[], &[1])).unwrap(),
            (int(0), int(1))
        );
        // (b1, p1, t1) followed by (p2, p2, t2)^∞
        let (b1, p1, t1, p2, t2) = (5i64, 3u64, 4i64, 3u64, 2i64);
        let hull =
            support_hull(&cfg(&[(b1, p1, t1), (p2 as i64, p2, t2)]), &w(&[1], &[2])).unwrap();
        assert_eq!(hull.1, rat((p1 as i64 - 1) * t1 + t2, b1));
        assert_eq!(
            support_hull(&cfg(&[(-4, 2, 1)]), &w(&[], &[1])).unwrap_err(),
            Error::SignsNotNormalized
        );
    }

    #[test]
    fn support_hull_contains_truncation_atoms() {
        let c = cfg(&[(3, 2, 5), (4, 3, 1), (6, 2, 7)]);
        let word = w(&[3, 1], &[2, 1]);
        let (lo, hi) = support_hull(&c, &word).unwrap();
        for k in 0..=7 {
            for x in truncate(&c, &word, k).unwrap().atoms().keys() {
                assert!(&lo <= x && x <= &hi);
            }
        }
    }

    #[test]
    fn gamma_examples() {
        let norm = normalize_signs(&cfg(&[(4, 2, 1)]), &w(&[], &[1])).unwrap();
        assert_eq!(norm.gamma, int(0));
        let norm = normalize_signs(&cfg(&[(-4, 2, 1)]), &w(&[], &[1])).unwrap();
        assert_eq!(norm.gamma, rat(4, 15));
        assert_eq!(norm.config, cfg(&[(4, 2, 1)]));
    }

    #[test]
    fn gamma_partial_sums_converge_to_closed_form() {
        let c = cfg(&[(-3, 2, 5), (4, 3, -1), (-2, 2, 3)]);
        let word = w(&[2], &[1, 3, 3]);
        let gamma = normalize_signs(&c, &word).unwrap().gamma;
        let g40 = gamma_partial(&c, &word, 40).unwrap();
        assert!(to_f64(&(gamma - g40)).abs() < 1e-9);
    }

    #[test]
    fn truncations_of_normalized_measure_are_translates() {
        let c = cfg(&[(-3, 2, 5), (4, 3, -1)]);
        let word = w(&[2], &[1, 2]);
        let norm = normalize_signs(&c, &word).unwrap();
        for k in 0..=6 {
            let mu = truncate(&c, &word, k).unwrap();
            let nu = truncate(&norm.config, &word, k).unwrap();
            let shift = gamma_partial(&c, &word, k).unwrap();
            assert_eq!(mu.translate(&shift), nu);
        }
    }

    #[test]
    fn scale_digits_identity_and_leading_b() {
        let c = cfg(&[(6, 2, 1), (4, 2, 3)]);
        let word = w(&[1], &[2]);
        let same = scale_digits(&c, &int(1)).unwrap();
        assert_eq!(same.to_integer_config().unwrap(), c);
        assert!(scale_digits(&c, &int(0)).is_err());

        // digits scaled by b1 / b equal the measure with b1 replaced by b
        let b = 10;
        let scaled = scale_digits(&c, &rat(6, b)).unwrap();
        let mut stages = stage_sequence(&c, &word, 4).unwrap();
        stages[0] = stages[0].with_b(b).unwrap();
        assert_eq!(
            scaled.truncate(&word, 4, DEFAULT_ATOM_CAP).unwrap(),
            truncate_stage_list(&stages, DEFAULT_ATOM_CAP).unwrap()
        );
    }

    #[test]
    fn scale_by_three_on_binary_digits() {
        let scaled = scale_digits(&cfg(&[(2, 2, 1)]), &int(3)).unwrap();
        let c3 = scaled.to_integer_config().unwrap();
        assert_eq!(c3.pair(1).unwrap().digits(), vec![0, 3]);
        // {0, 1} spans the depth-1 original; {0, 1/3} spans the scaled one
        assert!(zero_set_contains_upto(&cfg(&[(2, 2, 1)]), &w(&[], &[1]), &int(1), 1).unwrap());
        assert!(zero_set_contains_upto(&c3, &w(&[], &[1]), &rat(1, 3), 1).unwrap());
    }
}
