//! Brute-force cross-checks, independent of the constructive code paths.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exactmath::Rational;
use crate::hadamard::is_compatible_pair;
use crate::measure::{
    mask_zero_contains, zero_set_contains_upto, DiscreteMeasure, StagePair, SymbolicWord,
    SystemConfig,
};
use crate::spectra::weighted_exponential_residual;

pub const MAX_SEARCH_ATOMS: usize = 64;

/// All `L ⊂ [0, window)` with `0 ∈ L`, `#L = p`, and `(b⁻¹D, L)` compatible,
/// as sorted lists in lexicographic order.
pub fn search_compatible_l(b: i64, p: u64, t: i64, window: u64) -> Result<Vec<Vec<i64>>> {
    search_compatible_l_limited(b, p, t, window, None)
}

/// Like [`search_compatible_l`], stopping after `limit` results.
///
/// Candidates are pruned by requiring each pairwise difference `Δ` to satisfy
/// `Δ / b ∈ Z(m_D)`; every complete set is then confirmed by the exact
/// root-sum test.
pub fn search_compatible_l_limited(
    b: i64,
    p: u64,
    t: i64,
    window: u64,
    limit: Option<usize>,
) -> Result<Vec<Vec<i64>>> {
    let stage = StagePair::new(b, p, t)?;
    if window < b.unsigned_abs() {
        return Err(Error::InvalidParameter(format!(
            "window {window} is below |b| = {}",
            b.abs()
        )));
    }
    let digits = stage.digits();
    let bq = BigInt::from(b);
    let ok = |delta: i64| mask_zero_contains(p, t, &Rational::new(BigInt::from(delta), bq.clone()));
    let candidates: Vec<i64> = (1..window as i64).filter(|&x| ok(x)).collect();

    let mut out = Vec::new();
    let mut current = vec![0i64];
    let mut state = Search {
        ok: &ok,
        digits: &digits,
        b,
        p: p as usize,
        limit,
        out: &mut out,
    };
    state.extend(&mut current, &candidates)?;
    Ok(out)
}

struct Search<'a, F: Fn(i64) -> bool> {
    ok: &'a F,
    digits: &'a [i64],
    b: i64,
    p: usize,
    limit: Option<usize>,
    out: &'a mut Vec<Vec<i64>>,
}

impl<F: Fn(i64) -> bool> Search<'_, F> {
    fn done(&self) -> bool {
        self.limit.is_some_and(|l| self.out.len() >= l)
    }

    fn extend(&mut self, current: &mut Vec<i64>, candidates: &[i64]) -> Result<()> {
        if current.len() == self.p {
            if is_compatible_pair(self.b, self.digits, current)? {
                self.out.push(current.clone());
            }
            return Ok(());
        }
        let need = self.p - current.len();
        for (idx, &x) in candidates.iter().enumerate() {
            if self.done() || candidates.len() - idx < need {
                break;
            }
            let rest: Vec<i64> = candidates[idx + 1..]
                .iter()
                .copied()
                .filter(|&y| (self.ok)(y - x))
                .collect();
            if rest.len() + 1 < need {
                continue;
            }
            current.push(x);
            self.extend(current, &rest)?;
            current.pop();
        }
        Ok(())
    }
}

/// Stage data allowing the exact zero-set test on differences.
#[derive(Debug, Clone, Copy)]
pub struct StageContext<'a> {
    pub config: &'a SystemConfig,
    pub word: &'a SymbolicWord,
    pub depth: usize,
}

/// Every `Λ ⊂ pool` with `0 ∈ Λ` and `#Λ = #atoms` whose weighted exponential
/// matrix is unitary within `1e-9`, and, given `context`, whose differences
/// all pass the exact zero-set test. Results are sorted.
pub fn search_spectra(
    measure: &DiscreteMeasure,
    pool: &[Rational],
    context: Option<StageContext<'_>>,
) -> Result<Vec<Vec<Rational>>> {
    let n = measure.len();
    if n > MAX_SEARCH_ATOMS {
        return Err(Error::SearchTooLarge(format!(
            "{n} atoms, at most {MAX_SEARCH_ATOMS} supported"
        )));
    }
    let mut pool: Vec<Rational> = pool.to_vec();
    pool.sort();
    pool.dedup();
    if !pool.iter().any(Zero::is_zero) {
        return Ok(Vec::new());
    }
    let orthogonal = |x: &Rational, y: &Rational| {
        measure.fourier(crate::exactmath::to_f64(&(y - x))).norm() < 1e-9
    };
    let others: Vec<Rational> = pool
        .iter()
        .filter(|x| !x.is_zero() && orthogonal(&Rational::zero(), x))
        .cloned()
        .collect();

    let mut out = Vec::new();
    let mut current = vec![Rational::zero()];
    extend_spectrum(&mut current, &others, n, &orthogonal, &mut out);

    let mut confirmed = Vec::new();
    for mut cand in out {
        cand.sort();
        if weighted_exponential_residual(measure, &cand) >= 1e-9 {
            continue;
        }
        if let Some(ctx) = context {
            let mut exact = true;
            'pairs: for (i, x) in cand.iter().enumerate() {
                for y in &cand[i + 1..] {
                    if !zero_set_contains_upto(ctx.config, ctx.word, &(y - x), ctx.depth)? {
                        exact = false;
                        break 'pairs;
                    }
                }
            }
            if !exact {
                continue;
            }
        }
        confirmed.push(cand);
    }
    confirmed.sort();
    Ok(confirmed)
}

fn extend_spectrum<F>(
    current: &mut Vec<Rational>,
    candidates: &[Rational],
    n: usize,
    ok: &F,
    out: &mut Vec<Vec<Rational>>,
) where
    F: Fn(&Rational, &Rational) -> bool,
{
    if current.len() == n {
        out.push(current.clone());
        return;
    }
    let need = n - current.len();
    for (idx, x) in candidates.iter().enumerate() {
        if candidates.len() - idx < need {
            break;
        }
        let rest: Vec<Rational> = candidates[idx + 1..]
            .iter()
            .filter(|y| ok(x, y))
            .cloned()
            .collect();
        current.push(x.clone());
        extend_spectrum(current, &rest, n, ok, out);
        current.pop();
    }
}

/// Both sides of the equivalence for one instance.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub weighted_sum: Rational,
    /// `Σ p_ij x_ij = 1`.
    pub left: bool,
    /// `Σ_i x_i1 = 1` and every row of `x` constant.
    pub right: bool,
    pub equivalent: bool,
}

/// For a positive row-stochastic `p` and a nonnegative `x` with
/// `Σ_i max_j x_ij ≤ 1`: `Σ p_ij x_ij = 1` iff `Σ_i x_i1 = 1` and each row of
/// `x` is constant. Evaluates both sides exactly.
pub fn row_constancy_verify(p: &[Vec<Rational>], x: &[Vec<Rational>]) -> Result<EquivalenceReport> {
    let m = p.len();
    if m == 0 || x.len() != m {
        return Err(Error::Constraint(
            "p and x need the same positive number of rows".into(),
        ));
    }
    let n = p[0].len();
    if n == 0 || p.iter().chain(x).any(|row| row.len() != n) {
        return Err(Error::Constraint(
            "all rows need the same positive length".into(),
        ));
    }
    for row in p {
        if row.iter().any(|v| !v.is_positive()) {
            return Err(Error::Constraint("p must be entrywise positive".into()));
        }
        if row.iter().sum::<Rational>() != Rational::one() {
            return Err(Error::Constraint("rows of p must sum to 1".into()));
        }
    }
    if x.iter().flatten().any(|v| v.is_negative()) {
        return Err(Error::Constraint("x must be entrywise nonnegative".into()));
    }
    let max_sum: Rational = x
        .iter()
        .map(|row| row.iter().max().cloned().expect("nonempty row"))
        .sum();
    if max_sum > Rational::one() {
        return Err(Error::Constraint(
            "row maxima of x must sum to at most 1".into(),
        ));
    }
    let weighted_sum: Rational = p
        .iter()
        .zip(x)
        .flat_map(|(pr, xr)| pr.iter().zip(xr).map(|(a, b)| a * b))
        .sum();
    let left = weighted_sum.is_one();
    let rows_constant = x.iter().all(|row| row.iter().all(|v| v == &row[0]));
    let first_col: Rational = x.iter().map(|row| row[0].clone()).sum();
    let right = rows_constant && first_col.is_one();
    Ok(EquivalenceReport {
        weighted_sum,
        left,
        right,
        equivalent: left == right,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exactmath::{int, rat};
    use crate::measure::truncate;

    #[test]
    fn compatible_l_examples() {
        let found = search_compatible_l(4, 2, 1, 8).unwrap();
        assert!(found.contains(&vec![0, 2]) && found.contains(&vec![0, 6]));
        assert!(search_compatible_l(6, 4, 2, 48).unwrap().is_empty());
        assert!(search_compatible_l(2, 2, 3, 12)
            .unwrap()
            .contains(&vec![0, 1]));
        assert_eq!(
            search_compatible_l_limited(12, 3, 1, 36, Some(1))
                .unwrap()
                .len(),
            1
        );
        assert!(search_compatible_l(4, 2, 1, 3).is_err());
    }

    #[test]
    fn spectra_search_examples() {
        let c = SystemConfig::from_triples(&[(4, 2, 1)]).unwrap();
        let word = SymbolicWord::constant(1).unwrap();
        let mu = truncate(&c, &word, 1).unwrap();
        let pool: Vec<Rational> = (0..8).map(int).collect();
        let ctx = StageContext {
            config: &c,
            word: &word,
            depth: 1,
        };
        assert_eq!(
            search_spectra(&mu, &pool, Some(ctx)).unwrap(),
            vec![vec![int(0), int(2)], vec![int(0), int(6)]]
        );
        assert_eq!(
            search_spectra(&DiscreteMeasure::point_mass(int(0)), &[int(0)], None).unwrap(),
            vec![vec![int(0)]]
        );
        let c = SystemConfig::from_triples(&[(2, 2, 3)]).unwrap();
        let mu = truncate(&c, &word, 1).unwrap();
        let pool: Vec<Rational> = (0..6).map(int).collect();
        assert!(search_spectra(&mu, &pool, None)
            .unwrap()
            .contains(&vec![int(0), int(1)]));
    }

    #[test]
    fn row_constancy_examples() {
        let r = row_constancy_verify(&[vec![int(1)]], &[vec![int(1)]]).unwrap();
        assert!(r.left && r.right && r.equivalent);
        let p = vec![vec![rat(1, 3), rat(2, 3)], vec![rat(1, 2), rat(1, 2)]];
        let x = vec![vec![rat(1, 4), rat(1, 4)], vec![rat(3, 4), rat(3, 4)]];
        let r = row_constancy_verify(&p, &x).unwrap();
        assert_eq!(r.weighted_sum, int(1));
        assert!(r.equivalent && r.right);
        let r =
            row_constancy_verify(&[vec![rat(1, 2), rat(1, 2)]], &[vec![int(1), int(0)]]).unwrap();
        assert_eq!(r.weighted_sum, rat(1, 2));
        assert!(!r.left && !r.right && r.equivalent);
    }

    #[test]
    fn row_constancy_rejects_bad_input() {
        assert!(row_constancy_verify(&[vec![rat(1, 2)]], &[vec![int(0)]]).is_err());
        assert!(row_constancy_verify(&[vec![int(1)]], &[vec![int(2)]]).is_err());
        assert!(row_constancy_verify(&[vec![int(1)]], &[vec![int(-1)]]).is_err());
        assert!(row_constancy_verify(&[vec![int(0), int(1)]], &[vec![int(0), int(0)]]).is_err());
        assert!(row_constancy_verify(&[], &[]).is_err());
    }
}
