//! Decision procedures for spectrality.
//!
//! The main classification: for a coprime alphabet and an eventually periodic
//! word `σ`, `μ_σ` is spectral iff `p_{σ_n} | b_{σ_n}` for every `n ≥ 2` and
//! `σ` is not of the form `i_1 ⋯ i_l j^∞` with `i_l ≠ j`, `|b_j| = p_j` and
//! `|t_j| ≠ 1`. The remaining functions cover the two-stage family, the
//! necessary conditions for arbitrary stage sequences, the integral periodic
//! zero set, and the alternating family with merged stages.

use std::collections::BTreeSet;
use std::fmt;

use num_integer::Integer;

use crate::error::{Error, Result};
use crate::exactmath::Rational;
use crate::measure::{zero_set_contains, StagePair, SymbolicWord, SystemConfig};
use crate::tiling::{tile_decide, TileDecision};

/// A broken hypothesis of the classification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ConfigViolation {
    /// `gcd(p_k, t_j) ≠ 1`.
    DigitCountShare {
        k: usize,
        j: usize,
        gcd: u64,
    },
    /// `gcd(t_i, t_j) ≠ 1` for `i ≠ j`.
    StepShare {
        i: usize,
        j: usize,
        gcd: u64,
    },
    Other(String),
}

impl fmt::Display for ConfigViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ConfigViolation::DigitCountShare { k, j, gcd } => {
                write!(f, "gcd(p_{k}, t_{j}) = {gcd}")
            }
            ConfigViolation::StepShare { i, j, gcd } => write!(f, "gcd(t_{i}, t_{j}) = {gcd}"),
            ConfigViolation::Other(s) => f.write_str(s),
        }
    }
}

/// Checks the coprimality hypothesis: `gcd(p_k, t_j) = 1` for all `k, j` and
/// `gcd(t_i, t_j) = 1` for `i ≠ j`. The `p_k` need not be coprime to each
/// other. Per-pair bounds are already enforced by [`StagePair::new`].
pub fn validate_config(config: &SystemConfig) -> Result<(), Vec<ConfigViolation>> {
    let pairs = config.pairs();
    let mut out = Vec::new();
    for (k, sk) in pairs.iter().enumerate() {
        for (j, sj) in pairs.iter().enumerate() {
            let g = sk.p().gcd(&sj.t().unsigned_abs());
            if g != 1 {
                out.push(ConfigViolation::DigitCountShare {
                    k: k + 1,
                    j: j + 1,
                    gcd: g,
                });
            }
        }
    }
    for (i, si) in pairs.iter().enumerate() {
        for (j, sj) in pairs.iter().enumerate().skip(i + 1) {
            let g = si.t().unsigned_abs().gcd(&sj.t().unsigned_abs());
            if g != 1 {
                out.push(ConfigViolation::StepShare {
                    i: i + 1,
                    j: j + 1,
                    gcd: g,
                });
            }
        }
    }
    if out.is_empty() {
        Ok(())
    } else {
        Err(out)
    }
}

/// The clause that rules spectrality out.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Certificate {
    /// `p ∤ b` for the letter at `position ≥ 2`.
    Divisibility {
        position: usize,
        letter: usize,
        b: i64,
        p: u64,
    },
    /// `σ = i_1 ⋯ i_l j^∞` with `i_l ≠ j`, `|b_j| = p_j`, `|t_j| ≠ 1`.
    EventuallyConstantTail { l: usize, last: usize, j: usize },
    /// Two-stage family with `t2 ∤ t1`.
    StepNotDividing { t1: i64, t2: i64, residue: i64 },
    /// Alternating family: `p1 ∤ b_{2k+1} t_{2k}`.
    AlternatingProduct { k: usize, b: i64, t: i64, p1: u64 },
}

impl Certificate {
    /// Short machine-readable clause name.
    pub fn clause(&self) -> &'static str {
        match self {
            Certificate::Divisibility { .. } => "divisibility",
            Certificate::EventuallyConstantTail { .. } => "Pi_l",
            Certificate::StepNotDividing { .. } => "step_divisibility",
            Certificate::AlternatingProduct { .. } => "alternating_product",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpectralVerdict {
    Spectral,
    NotSpectral(Certificate),
    OutOfScope(Vec<ConfigViolation>),
}

impl SpectralVerdict {
    pub fn kind(&self) -> &'static str {
        match self {
            SpectralVerdict::Spectral => "Spectral",
            SpectralVerdict::NotSpectral(_) => "NotSpectral",
            SpectralVerdict::OutOfScope(_) => "OutOfScope",
        }
    }

    pub fn is_spectral(&self) -> bool {
        matches!(self, SpectralVerdict::Spectral)
    }
}

/// `σ = i_1 ⋯ i_l j^∞` with `i_l ≠ j`; `last = None` when `l = 0`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventuallyConstant {
    pub j: usize,
    pub l: usize,
    pub last: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordClassification {
    /// Letters with `|t| = 1`.
    pub unit_steps: BTreeSet<usize>,
    /// Letters with `|t| ≠ 1`.
    pub wide_steps: BTreeSet<usize>,
    pub eventually_constant: Option<EventuallyConstant>,
    pub letters_in_tail: BTreeSet<usize>,
    pub letters_from_second: BTreeSet<usize>,
}

pub fn classify_word(config: &SystemConfig, word: &SymbolicWord) -> Result<WordClassification> {
    config.check_word(word)?;
    let (unit_steps, wide_steps) =
        (1..=config.len()).partition(|&k| config.pairs()[k - 1].t().abs() == 1);
    let eventually_constant = word.tail_letter().map(|j| EventuallyConstant {
        j,
        l: word.preperiod().len(),
        last: word.preperiod().last().copied(),
    });
    Ok(WordClassification {
        unit_steps,
        wide_steps,
        eventually_constant,
        letters_in_tail: word.letters_infinitely_often(),
        letters_from_second: word.letters_from_position(2),
    })
}

fn first_divisibility_failure(
    config: &SystemConfig,
    word: &SymbolicWord,
) -> Result<Option<Certificate>> {
    let end = word.preperiod().len() + word.period().len() + 1;
    for position in 2..=end {
        let letter = word.letter_at(position);
        let s = config.pair(letter)?;
        if s.b().unsigned_abs() % s.p() != 0 {
            return Ok(Some(Certificate::Divisibility {
                position,
                letter,
                b: s.b(),
                p: s.p(),
            }));
        }
    }
    Ok(None)
}

fn exceptional_tail(config: &SystemConfig, word: &SymbolicWord) -> Result<Option<Certificate>> {
    let (Some(j), Some(&last)) = (word.tail_letter(), word.preperiod().last()) else {
        return Ok(None);
    };
    let s = config.pair(j)?;
    if s.b().unsigned_abs() == s.p() && s.t().abs() != 1 {
        return Ok(Some(Certificate::EventuallyConstantTail {
            l: word.preperiod().len(),
            last,
            j,
        }));
    }
    Ok(None)
}

/// The main classification for a coprime alphabet.
pub fn decide_spectrality(config: &SystemConfig, word: &SymbolicWord) -> Result<SpectralVerdict> {
    config.check_word(word)?;
    if let Err(v) = validate_config(config) {
        return Ok(SpectralVerdict::OutOfScope(v));
    }
    if let Some(cert) = first_divisibility_failure(config, word)? {
        return Ok(SpectralVerdict::NotSpectral(cert));
    }
    if let Some(cert) = exceptional_tail(config, word)? {
        return Ok(SpectralVerdict::NotSpectral(cert));
    }
    Ok(SpectralVerdict::Spectral)
}

/// A failed necessary condition at transition `k → k + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NecessityViolation {
    pub k: usize,
    pub p_next: u64,
    pub b_next: i64,
    pub t_k: i64,
}

/// For `k = 1, ..., horizon` (1-based): whenever `p_k ∤ t_{k+1}`, a spectral
/// measure needs `p_{k+1} | b_{k+1} t_k`. Returns every `k` where that fails.
pub fn necessity_check(stages: &[StagePair], horizon: usize) -> Result<Vec<NecessityViolation>> {
    if horizon + 1 > stages.len() {
        return Err(Error::InvalidParameter(format!(
            "horizon {horizon} needs at least {} stages, got {}",
            horizon + 1,
            stages.len()
        )));
    }
    let mut out = Vec::new();
    for k in 1..=horizon {
        let cur = &stages[k - 1];
        let next = &stages[k];
        if next.t().unsigned_abs().is_multiple_of(cur.p()) {
            continue;
        }
        let prod = next.b() as i128 * cur.t() as i128;
        if prod % next.p() as i128 != 0 {
            out.push(NecessityViolation {
                k,
                p_next: next.p(),
                b_next: next.b(),
                t_k: cur.t(),
            });
        }
    }
    Ok(out)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoStageDecision {
    pub divides: bool,
    pub spectral: bool,
    pub tiles: bool,
    pub tiling: TileDecision,
}

/// `(b1, {0..p1-1} t1)` followed by `(p2, {0..p2-1} t2)^∞`: spectral iff its
/// support tiles iff `t2 | t1`. The tiling flag comes from the constructive
/// check, so the three flags agreeing is a genuine cross-check.
pub fn two_stage_decide(p1: u64, p2: u64, b1: i64, t1: i64, t2: i64) -> Result<TwoStageDecision> {
    let tiling = tile_decide(p1, p2, b1, t1, t2)?;
    let divides = t1 % t2 == 0;
    Ok(TwoStageDecision {
        divides,
        spectral: divides,
        tiles: tiling.tiles,
        tiling,
    })
}

/// The verdict of the two-stage family as a [`SpectralVerdict`].
pub fn two_stage_verdict(decision: &TwoStageDecision, t1: i64, t2: i64) -> SpectralVerdict {
    if decision.spectral {
        SpectralVerdict::Spectral
    } else {
        SpectralVerdict::NotSpectral(Certificate::StepNotDividing {
            t1,
            t2,
            residue: t1.mod_floor(&t2),
        })
    }
}

/// Which sufficient condition settled the integral periodic zero set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ZCriterion {
    /// The steps `|t|` of the letters occurring infinitely often are coprime,
    /// and every letter of the word is admissible.
    CoprimeTailSteps,
    /// `σ = i^∞` with `p_i | b_i`, `p_i ≠ |b_i|`.
    ProperMultipleConstant { i: usize },
    /// `σ = i ξ` with `|t_i| = 1` and `p | b` at every position.
    UnitStepLead { i: usize },
    /// `σ = j η` with `|t_j| ≠ 1`, `j` absent from `η`, `p | b` everywhere.
    IsolatedLead { j: usize },
}

impl ZCriterion {
    pub fn name(&self) -> &'static str {
        match self {
            ZCriterion::CoprimeTailSteps => "coprime_tail_steps",
            ZCriterion::ProperMultipleConstant { .. } => "proper_multiple_constant",
            ZCriterion::UnitStepLead { .. } => "unit_step_lead",
            ZCriterion::IsolatedLead { .. } => "isolated_lead",
        }
    }

    /// The letter the criterion is about, if any.
    pub fn letter(&self) -> Option<usize> {
        match *self {
            ZCriterion::CoprimeTailSteps => None,
            ZCriterion::ProperMultipleConstant { i } | ZCriterion::UnitStepLead { i } => Some(i),
            ZCriterion::IsolatedLead { j } => Some(j),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ZSetStatus {
    Empty(ZCriterion),
    /// `σ = j^∞` with `|b_j| = p_j`, `|t_j| ≠ 1`; `1/t_j + ℤ` lies in the zero set.
    Nonempty {
        j: usize,
    },
    Unknown,
    OutOfScope(Vec<ConfigViolation>),
}

impl ZSetStatus {
    /// `Some(true)` for empty, `Some(false)` for nonempty, `None` otherwise.
    pub fn as_option(&self) -> Option<bool> {
        match self {
            ZSetStatus::Empty(_) => Some(true),
            ZSetStatus::Nonempty { .. } => Some(false),
            _ => None,
        }
    }
}

fn divides_b(s: &StagePair) -> bool {
    s.b().unsigned_abs().is_multiple_of(s.p())
}

/// Sufficient conditions for emptiness (or nonemptiness) of the integral
/// periodic zero set `{ξ : μ̂(ξ + k) = 0 for all k ∈ ℤ}`.
///
/// The coprime-steps criterion is only applied when every letter of the word
/// is admissible: without it, e.g. `(2, {0, 1, 2, 3})^∞` has steps of gcd 1
/// yet `1/2 + ℤ` lies in its zero set.
pub fn z_set_criteria(config: &SystemConfig, word: &SymbolicWord) -> Result<ZSetStatus> {
    config.check_word(word)?;
    if let Err(v) = validate_config(config) {
        return Ok(ZSetStatus::OutOfScope(v));
    }
    let letters = word.letters();
    let pair = |l: usize| config.pairs()[l - 1];
    let all_divide = letters.iter().all(|&l| divides_b(&pair(l)));

    if let Some(j) = word.tail_letter() {
        let s = pair(j);
        if word.preperiod().is_empty() && s.b().unsigned_abs() == s.p() && s.t().abs() != 1 {
            return Ok(ZSetStatus::Nonempty { j });
        }
    }

    let tail_gcd = word
        .letters_infinitely_often()
        .iter()
        .fold(0u64, |g, &l| g.gcd(&pair(l).t().unsigned_abs()));
    let all_admissible = letters
        .iter()
        .all(|&l| crate::hadamard::is_admissible(pair(l).b(), pair(l).p(), pair(l).t()));
    if tail_gcd == 1 && all_admissible {
        return Ok(ZSetStatus::Empty(ZCriterion::CoprimeTailSteps));
    }

    if let Some(i) = word.tail_letter() {
        let s = pair(i);
        if word.preperiod().is_empty() && divides_b(&s) && s.p() != s.b().unsigned_abs() {
            return Ok(ZSetStatus::Empty(ZCriterion::ProperMultipleConstant { i }));
        }
    }

    if all_divide {
        let lead = word.letter_at(1);
        if pair(lead).t().abs() == 1 {
            return Ok(ZSetStatus::Empty(ZCriterion::UnitStepLead { i: lead }));
        }
        if !word.letters_from_position(2).contains(&lead) {
            return Ok(ZSetStatus::Empty(ZCriterion::IsolatedLead { j: lead }));
        }
    }
    Ok(ZSetStatus::Unknown)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ProbeResult {
    /// `μ̂(ξ + k) ≠ 0`, so `ξ` is outside the integral periodic zero set.
    Witness(i64),
    /// Every `ξ + k` with `|k| ≤ window` is a zero; inconclusive.
    NoWitness { window: u64 },
}

/// Scans `k = 0, 1, -1, 2, -2, ...` up to `window` for `ξ + k` outside the
/// zero set of `μ̂_σ`.
pub fn z_membership_probe(
    config: &SystemConfig,
    word: &SymbolicWord,
    xi: &Rational,
    window: u64,
) -> Result<ProbeResult> {
    if window == 0 {
        return Err(Error::InvalidParameter("window must be at least 1".into()));
    }
    let w = window as i64;
    let order = std::iter::once(0).chain((1..=w).flat_map(|k| [k, -k]));
    for k in order {
        let x = xi + Rational::from_integer(k.into());
        if !zero_set_contains(config, word, &x)? {
            return Ok(ProbeResult::Witness(k));
        }
    }
    Ok(ProbeResult::NoWitness { window })
}

fn periodic_at(list: &[i64], k: usize) -> i64 {
    list[(k - 1) % list.len()]
}

fn check_alternating_inputs(p1: u64, p2: u64, odd_b: &[i64], even_t: &[i64]) -> Result<()> {
    if p1 < 2 || p2 < 2 {
        return Err(Error::InvalidParameter(
            "p1 and p2 must be at least 2".into(),
        ));
    }
    if odd_b.is_empty() || even_t.is_empty() {
        return Err(Error::EmptyPeriod);
    }
    if odd_b.iter().any(|&b| b < 2) || even_t.iter().any(|&t| t < 1) {
        return Err(Error::InvalidParameter("need b ≥ 2 and t ≥ 1".into()));
    }
    Ok(())
}

/// Alternating family: odd stages `(b_{2k+1}, {0..p1-1})`, even stages
/// `(p2 t_{2k}, {0..p2-1} t_{2k})`. `odd_b[k-1]` is `b_{2k+1}` and
/// `even_t[k-1]` is `t_{2k}`, both repeated periodically. Spectral iff
/// `p1 | b_{2k+1} t_{2k}` for all `k ≥ 1`.
pub fn alternating_family_decide(
    p1: u64,
    p2: u64,
    odd_b: &[i64],
    even_t: &[i64],
) -> Result<SpectralVerdict> {
    check_alternating_inputs(p1, p2, odd_b, even_t)?;
    let span = odd_b.len().lcm(&even_t.len());
    for k in 1..=span {
        let b = periodic_at(odd_b, k);
        let t = periodic_at(even_t, k);
        if (b as i128 * t as i128) % p1 as i128 != 0 {
            return Ok(SpectralVerdict::NotSpectral(
                Certificate::AlternatingProduct { k, b, t, p1 },
            ));
        }
    }
    Ok(SpectralVerdict::Spectral)
}

/// The first `2 pairs` stages of the alternating family with digits scaled by
/// `p2`, and the `pairs` merged stages `(b_{2k} b_{2k+1}, {0..p1 p2 - 1})`
/// (with `b1` for the first block) whose truncations coincide with it.
pub fn alternating_rewrite_stages(
    p1: u64,
    p2: u64,
    b1: i64,
    odd_b: &[i64],
    even_t: &[i64],
    pairs: usize,
) -> Result<(Vec<StagePair>, Vec<StagePair>)> {
    check_alternating_inputs(p1, p2, odd_b, even_t)?;
    let mut original = Vec::with_capacity(2 * pairs);
    let mut merged = Vec::with_capacity(pairs);
    let mut prev_even_b = None;
    for k in 1..=pairs {
        let b_odd = if k == 1 {
            b1
        } else {
            periodic_at(odd_b, k - 1)
        };
        let t_even = periodic_at(even_t, k);
        let b_even = p2 as i64 * t_even;
        original.push(StagePair::new(b_odd, p1, p2 as i64)?);
        original.push(StagePair::new(b_even, p2, p2 as i64 * t_even)?);
        let merged_b = match prev_even_b {
            None => b_odd,
            Some(prev) => prev * b_odd,
        };
        merged.push(StagePair::new(merged_b, p1 * p2, 1)?);
        prev_even_b = Some(b_even);
    }
    Ok((original, merged))
}
