//! Exact translation tiling by finite unions of half-open rational intervals.
//!
//! A periodic translation set `digits + period · ℤ` tiles the line with `K`
//! iff the translates `K + d` cover the circle `ℝ / period ℤ` exactly once,
//! which is what the sweep below checks.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::exactmath::{format_rational, rem_euclid, Rational};

/// Sorted, pairwise disjoint half-open intervals `[a, b)` with `a < b`;
/// touching intervals are merged.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IntervalUnion {
    intervals: Vec<(Rational, Rational)>,
}

impl IntervalUnion {
    pub fn new(mut intervals: Vec<(Rational, Rational)>) -> Result<Self> {
        if let Some((a, b)) = intervals.iter().find(|(a, b)| a >= b) {
            return Err(Error::InvalidParameter(format!(
                "empty interval [{}, {})",
                format_rational(a),
                format_rational(b)
            )));
        }
        intervals.sort();
        let mut merged: Vec<(Rational, Rational)> = Vec::with_capacity(intervals.len());
        for (a, b) in intervals {
            if let Some(last) = merged.last_mut() {
                if a < last.1 {
                    return Err(Error::InvalidParameter(format!(
                        "intervals overlap at {}",
                        format_rational(&a)
                    )));
                }
                if a == last.1 {
                    last.1 = b;
                    continue;
                }
            }
            merged.push((a, b));
        }
        Ok(IntervalUnion { intervals: merged })
    }

    pub fn intervals(&self) -> &[(Rational, Rational)] {
        &self.intervals
    }

    pub fn total_length(&self) -> Rational {
        self.intervals.iter().map(|(a, b)| b - a).sum()
    }

    pub fn translate(&self, shift: &Rational) -> IntervalUnion {
        IntervalUnion {
            intervals: self
                .intervals
                .iter()
                .map(|(a, b)| (a + shift, b + shift))
                .collect(),
        }
    }
}

impl fmt::Display for IntervalUnion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .intervals
            .iter()
            .map(|(a, b)| format!("[{}, {})", format_rational(a), format_rational(b)))
            .collect();
        f.write_str(&parts.join(" u "))
    }
}

/// A segment of the circle covered the wrong number of times.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverageDefect {
    pub start: Rational,
    pub end: Rational,
    pub multiplicity: u64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TilingCheck {
    pub tiles: bool,
    pub defect: Option<CoverageDefect>,
}

/// Checks that `{K + d : d ∈ digits}` covers `[0, period)` exactly once,
/// working modulo `period`.
pub fn tiles_by_periodic_set(
    k: &IntervalUnion,
    digits: &[Rational],
    period: &Rational,
) -> Result<TilingCheck> {
    if !period.is_positive() {
        return Err(Error::InvalidParameter("period must be positive".into()));
    }
    let mut residues: Vec<Rational> = digits.iter().map(|d| rem_euclid(d, period)).collect();
    residues.sort();
    if let Some(w) = residues.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::DuplicatePoint(w[0].clone()));
    }

    // multiplicity changes at each breakpoint, plus full windings
    let mut base: u64 = 0;
    let mut events: BTreeMap<Rational, i64> = BTreeMap::new();
    events.entry(Rational::zero()).or_insert(0);
    events.entry(period.clone()).or_insert(0);
    for d in digits {
        for (a, b) in k.intervals() {
            let len = b - a;
            let windings = (&len / period).floor();
            base += windings.to_integer().to_u64().ok_or_else(|| {
                Error::InvalidParameter("interval wraps the period too many times".into())
            })?;
            let rest = len - windings * period;
            if rest.is_zero() {
                continue;
            }
            let start = rem_euclid(&(a + d), period);
            let end = &start + &rest;
            if &end <= period {
                *events.entry(start).or_insert(0) += 1;
                *events.entry(end).or_insert(0) -= 1;
            } else {
                *events.entry(start).or_insert(0) += 1;
                *events.entry(period.clone()).or_insert(0) -= 1;
                *events.entry(Rational::zero()).or_insert(0) += 1;
                *events.entry(end - period).or_insert(0) -= 1;
            }
        }
    }

    let mut level = base as i64;
    let points: Vec<(Rational, i64)> = events.into_iter().collect();
    for pair in points.windows(2) {
        let (x, delta) = &pair[0];
        let (y, _) = &pair[1];
        level += delta;
        if x >= period {
            break;
        }
        if level != 1 {
            return Ok(TilingCheck {
                tiles: false,
                defect: Some(CoverageDefect {
                    start: x.clone(),
                    end: y.clone(),
                    multiplicity: level.max(0) as u64,
                }),
            });
        }
    }
    Ok(TilingCheck {
        tiles: true,
        defect: None,
    })
}

fn require_positive(name: &str, v: i64, min: i64) -> Result<()> {
    if v < min {
        return Err(Error::InvalidParameter(format!(
            "{name} must be at least {min}, got {v}"
        )));
    }
    Ok(())
}

/// `⋃_{k < p1} [k t c, (k t + 1) c)` with `c = t2 / b1`, `t = t1 / t2`.
pub fn two_stage_support(p1: u64, t1: i64, t2: i64, b1: i64) -> Result<IntervalUnion> {
    require_positive("p1", p1 as i64, 2)?;
    require_positive("b1", b1, 2)?;
    require_positive("t1", t1, 1)?;
    require_positive("t2", t2, 1)?;
    if t1 % t2 != 0 {
        return Err(Error::NotDivisible { t1, t2 });
    }
    let c = Rational::new(BigInt::from(t2), BigInt::from(b1));
    let t = t1 / t2;
    let intervals = (0..p1 as i64)
        .map(|k| (&c * BigInt::from(k * t), &c * BigInt::from(k * t + 1)))
        .collect();
    IntervalUnion::new(intervals)
}

/// Why a two-stage support does or does not tile.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum TileCertificate {
    /// `K + digits + period ℤ` is an exact tiling.
    Tiling {
        support: IntervalUnion,
        digits: Vec<Rational>,
        period: Rational,
    },
    /// `t1 mod t2 ≠ 0`: the gap `[t2/b1, t1/b1)` is not a multiple of the
    /// block length `t2/b1`.
    Residue { t1: i64, t2: i64, residue: i64 },
    /// The constructed translation set failed the sweep.
    CoverageFailure(CoverageDefect),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TileDecision {
    pub tiles: bool,
    pub certificate: TileCertificate,
}

/// Decides whether the support of the two-stage measure
/// `(b1, {0..p1-1} t1)` followed by `(p2, {0..p2-1} t2)^∞` is a translation
/// tile, constructing `J = (t2/b1)({0, ..., t-1} + t p1 ℤ)` when it is.
pub fn tile_decide(p1: u64, p2: u64, b1: i64, t1: i64, t2: i64) -> Result<TileDecision> {
    require_positive("p2", p2 as i64, 2)?;
    require_positive("p1", p1 as i64, 2)?;
    require_positive("b1", b1, 2)?;
    require_positive("t1", t1, 1)?;
    require_positive("t2", t2, 1)?;
    let residue = t1.mod_floor(&t2);
    if residue != 0 {
        return Ok(TileDecision {
            tiles: false,
            certificate: TileCertificate::Residue { t1, t2, residue },
        });
    }
    let support = two_stage_support(p1, t1, t2, b1)?;
    let c = Rational::new(BigInt::from(t2), BigInt::from(b1));
    let t = t1 / t2;
    let digits: Vec<Rational> = (0..t).map(|i| &c * BigInt::from(i)).collect();
    let period = &c * BigInt::from(t * p1 as i64);
    let check = tiles_by_periodic_set(&support, &digits, &period)?;
    Ok(match check.defect {
        None => TileDecision {
            tiles: true,
            certificate: TileCertificate::Tiling {
                support,
                digits,
                period,
            },
        },
        Some(defect) => TileDecision {
            tiles: false,
            certificate: TileCertificate::CoverageFailure(defect),
        },
    })
}
