//! Exact arithmetic substrate.
//!
//! Rationals are `num_rational::BigRational`, always kept in lowest terms with a
//! positive denominator. Vanishing of a sum of roots of unity is decided by
//! polynomial division by the cyclotomic polynomial, never by evaluating the
//! sum numerically.

use std::collections::HashMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(numer: i64, denom: i64) -> Rational {
    Rational::new(BigInt::from(numer), BigInt::from(denom))
}

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn big(n: i64) -> BigInt {
    BigInt::from(n)
}

/// Parses `"n"` or `"n/d"` with arbitrary-size decimal integers.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::InvalidParameter(format!("not a rational number: {s:?}"));
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: BigInt = n.parse().map_err(|_| bad())?;
    let d: BigInt = d.parse().map_err(|_| bad())?;
    if d.is_zero() {
        return Err(bad());
    }
    Ok(Rational::new(n, d))
}

/// Always prints `n/d` in lowest terms, including `d = 1`.
pub fn format_rational(x: &Rational) -> String {
    format!("{}/{}", x.numer(), x.denom())
}

pub fn to_f64(x: &Rational) -> f64 {
    x.to_f64().unwrap_or_else(|| {
        if x.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}

/// `x - floor(x)`, in `[0, 1)`.
pub fn frac(x: &Rational) -> Rational {
    x - x.floor()
}

/// Reduces `x` into `[0, period)`.
pub fn rem_euclid(x: &Rational, period: &Rational) -> Rational {
    let q = (x / period).floor();
    x - q * period
}

/// Dense integer polynomial, coefficients from the constant term upwards.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntPoly {
    coeffs: Vec<BigInt>,
}

impl IntPoly {
    pub fn new(mut coeffs: Vec<BigInt>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        IntPoly { coeffs }
    }

    pub fn from_i64(coeffs: &[i64]) -> Self {
        Self::new(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    /// `x^n - 1`.
    pub fn x_pow_minus_one(n: usize) -> Self {
        let mut coeffs = vec![BigInt::zero(); n + 1];
        coeffs[0] = BigInt::from(-1);
        coeffs[n] = BigInt::one();
        IntPoly { coeffs }
    }

    pub fn coeffs(&self) -> &[BigInt] {
        &self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree, with the zero polynomial reported as `None`.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Division by a monic polynomial. Integer arithmetic is exact here and
    /// agrees with division over the rationals because the divisor is monic.
    pub fn div_rem_monic(&self, divisor: &IntPoly) -> (IntPoly, IntPoly) {
        let dd = divisor.degree().expect("division by the zero polynomial");
        assert!(divisor.coeffs[dd].is_one(), "divisor must be monic");
        let mut rem = self.coeffs.clone();
        if rem.len() <= dd {
            return (IntPoly::new(Vec::new()), IntPoly::new(rem));
        }
        let mut quot = vec![BigInt::zero(); rem.len() - dd];
        for shift in (0..quot.len()).rev() {
            let lead = rem[shift + dd].clone();
            if lead.is_zero() {
                continue;
            }
            for (i, c) in divisor.coeffs.iter().enumerate() {
                if !c.is_zero() {
                    rem[shift + i] -= &lead * c;
                }
            }
            quot[shift] = lead;
        }
        rem.truncate(dd);
        (IntPoly::new(quot), IntPoly::new(rem))
    }
}

impl fmt::Debug for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "IntPoly({self})")
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let sign = if c.is_negative() { "-" } else { "+" };
            let mag = c.abs();
            if first {
                if c.is_negative() {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            match (i, mag.is_one()) {
                (0, _) => write!(f, "{mag}")?,
                (1, true) => write!(f, "x")?,
                (1, false) => write!(f, "{mag}x")?,
                (_, true) => write!(f, "x^{i}")?,
                (_, false) => write!(f, "{mag}x^{i}")?,
            }
        }
        Ok(())
    }
}

fn divisors(n: u64) -> Vec<u64> {
    let mut small = Vec::new();
    let mut large = Vec::new();
    let mut d = 1;
    while d * d <= n {
        if n.is_multiple_of(d) {
            small.push(d);
            if d * d != n {
                large.push(n / d);
            }
        }
        d += 1;
    }
    small.extend(large.into_iter().rev());
    small
}

fn cyclotomic_memo(n: u64, memo: &mut HashMap<u64, IntPoly>) -> IntPoly {
    if let Some(p) = memo.get(&n) {
        return p.clone();
    }
    let mut poly = IntPoly::x_pow_minus_one(n as usize);
    for d in divisors(n) {
        if d == n {
            continue;
        }
        let phi_d = cyclotomic_memo(d, memo);
        let (q, r) = poly.div_rem_monic(&phi_d);
        debug_assert!(r.is_zero());
        poly = q;
    }
    memo.insert(n, poly.clone());
    poly
}

/// The `n`-th cyclotomic polynomial, obtained by dividing `x^n - 1` by every
/// `Φ_d` with `d` a proper divisor of `n`.
pub fn cyclotomic_poly(n: i64) -> Result<IntPoly> {
    if n <= 0 {
        return Err(Error::NonPositiveOrder(n));
    }
    Ok(cyclotomic_memo(n as u64, &mut HashMap::new()))
}

/// A multiset of exponents `a` standing for `Σ ζ_n^a` with `ζ_n = e^{2πi/n}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct RootSum {
    order: u64,
    exponents: Vec<u64>,
}

impl RootSum {
    /// Exponents are reduced mod `order` on construction.
    pub fn new<I>(order: i64, exponents: I) -> Result<Self>
    where
        I: IntoIterator<Item = i64>,
    {
        if order <= 0 {
            return Err(Error::NonPositiveOrder(order));
        }
        let exponents: Vec<u64> = exponents
            .into_iter()
            .map(|a| a.rem_euclid(order) as u64)
            .collect();
        if exponents.is_empty() {
            return Err(Error::EmptyRootSum);
        }
        Ok(RootSum {
            order: order as u64,
            exponents,
        })
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn exponents(&self) -> &[u64] {
        &self.exponents
    }

    /// Same sum written over the smallest possible order: divides the order
    /// and every exponent by their common gcd.
    pub fn reduced(&self) -> RootSum {
        let g = self.exponents.iter().fold(self.order, |g, &a| g.gcd(&a));
        RootSum {
            order: self.order / g,
            exponents: self.exponents.iter().map(|a| a / g).collect(),
        }
    }

    /// `P(x) = Σ x^a`, of degree below the order.
    pub fn exponent_poly(&self) -> IntPoly {
        let mut coeffs = vec![BigInt::zero(); self.order as usize];
        for &a in &self.exponents {
            coeffs[a as usize] += 1;
        }
        IntPoly::new(coeffs)
    }

    /// Floating-point value of the sum; used only for cross-checks.
    pub fn numeric(&self) -> num_complex::Complex64 {
        let n = self.order as f64;
        self.exponents
            .iter()
            .map(|&a| num_complex::Complex64::from_polar(1.0, std::f64::consts::TAU * a as f64 / n))
            .sum()
    }
}

/// True iff the sum of roots of unity is exactly zero, i.e. `Φ_n | P`.
pub fn root_sum_is_zero(s: &RootSum) -> bool {
    let s = s.reduced();
    let phi = cyclotomic_memo(s.order, &mut HashMap::new());
    let (_, r) = s.exponent_poly().div_rem_monic(&phi);
    r.is_zero()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn small_cyclotomics() {
        assert_eq!(cyclotomic_poly(1).unwrap(), IntPoly::from_i64(&[-1, 1]));
        assert_eq!(cyclotomic_poly(2).unwrap(), IntPoly::from_i64(&[1, 1]));
        assert_eq!(
            cyclotomic_poly(12).unwrap(),
            IntPoly::from_i64(&[1, 0, -1, 0, 1])
        );
        assert_eq!(cyclotomic_poly(12).unwrap().to_string(), "x^4 - x^2 + 1");
        assert!(cyclotomic_poly(0).is_err());
        assert!(cyclotomic_poly(-3).is_err());
    }

    #[test]
    fn phi_105_has_a_minus_two() {
        // First cyclotomic polynomial with a coefficient outside {-1, 0, 1}.
        let phi = cyclotomic_poly(105).unwrap();
        assert_eq!(phi.degree(), Some(48));
        assert!(phi.coeffs().contains(&BigInt::from(-2)));
    }

    #[test]
    fn product_over_divisors_is_x_n_minus_one() {
        for n in 1..=40u64 {
            let mut prod = IntPoly::from_i64(&[1]);
            for d in divisors(n) {
                let phi = cyclotomic_poly(d as i64).unwrap();
                let mut out = vec![BigInt::zero(); prod.coeffs().len() + phi.coeffs().len() - 1];
                for (i, a) in prod.coeffs().iter().enumerate() {
                    for (j, b) in phi.coeffs().iter().enumerate() {
                        out[i + j] += a * b;
                    }
                }
                prod = IntPoly::new(out);
            }
            assert_eq!(prod, IntPoly::x_pow_minus_one(n as usize), "n = {n}");
        }
    }

    #[test]
    fn root_sum_examples() {
        assert!(root_sum_is_zero(&RootSum::new(4, [0, 1, 2, 3]).unwrap()));
        assert!(!root_sum_is_zero(&RootSum::new(3, [0, 0]).unwrap()));
        assert!(root_sum_is_zero(&RootSum::new(6, [0, 2, 4]).unwrap()));
        assert!(root_sum_is_zero(&RootSum::new(6, [0, 3]).unwrap()));
        assert!(!root_sum_is_zero(&RootSum::new(4, [0, 1]).unwrap()));
        assert!(RootSum::new(3, Vec::<i64>::new()).is_err());
        assert!(RootSum::new(0, [1]).is_err());
    }

    #[test]
    fn exponents_reduced_mod_order() {
        let s = RootSum::new(5, [-1, 7, 10]).unwrap();
        assert_eq!(s.exponents(), &[4, 2, 0]);
    }

    #[test]
    fn rational_parsing_and_printing() {
        assert_eq!(parse_rational("6/8").unwrap(), rat(3, 4));
        assert_eq!(parse_rational(" -2 ").unwrap(), int(-2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
        assert_eq!(format_rational(&rat(-6, 4)), "-3/2");
        assert_eq!(format_rational(&int(0)), "0/1");
        assert_eq!(rem_euclid(&rat(-1, 3), &int(2)), rat(5, 3));
    }
}
