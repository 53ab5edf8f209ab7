//! Regular continued fractions on the unit interval.
//!
//! A point `x` in `(0, 1]` is written `x = 1/(a_1 + 1/(a_2 + ...))` with
//! positive integer digits. Two paths are provided: an exact one over
//! unbounded rationals, used for rational inputs and every oracle test, and a
//! binary64 one for sampled or irrational inputs. The float path loses about
//! one bit per Gauss-map step on average, so expansions longer than
//! [`DEFAULT_RELIABLE_DIGITS`] are flagged as unreliable.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Number of float digits trusted by default.
pub const DEFAULT_RELIABLE_DIGITS: usize = 30;

/// A binary64 value checked to lie in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct UnitReal(f64);

impl UnitReal {
    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(UnitReal(value))
        } else {
            Err(Error::domain(format!("{value} is not in [0, 1]")))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

impl TryFrom<f64> for UnitReal {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        UnitReal::new(value)
    }
}

impl From<UnitReal> for f64 {
    fn from(x: UnitReal) -> f64 {
        x.0
    }
}

/// Digits `a_1, ..., a_n` of a regular continued fraction.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct DigitSequence {
    pub digits: Vec<u64>,
    /// The expansion ended because an iterate hit zero exactly.
    pub terminated: bool,
    /// False when the float path produced more digits than it can vouch for.
    pub reliable: bool,
}

impl DigitSequence {
    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }
}

/// One step of the float digit recursion: returns `(floor(1/x), 1/x - floor(1/x))`.
///
/// The floor is guarded so the digit is at least 1 and the remainder stays in
/// `[0, 1)` even when `1/x` rounds across an integer.
#[inline]
fn split_reciprocal(x: f64) -> (f64, f64) {
    let inv = 1.0 / x;
    let mut digit = inv.floor();
    let mut rem = inv - digit;
    if rem < 0.0 {
        digit -= 1.0;
        rem += 1.0;
    }
    if rem >= 1.0 {
        digit += 1.0;
        rem -= 1.0;
    }
    if digit < 1.0 {
        // only reachable if x > 1 slipped through
        digit = 1.0;
        rem = 0.0;
    }
    (digit, rem)
}

/// The Gauss map `x -> 1/x - floor(1/x)`, with `0 -> 0`.
#[inline]
pub fn gauss_map(x: f64) -> f64 {
    debug_assert!((0.0..=1.0).contains(&x), "gauss_map outside [0, 1]: {x}");
    if x == 0.0 {
        return 0.0;
    }
    split_reciprocal(x).1
}

/// First digit `floor(1/x)` of `x` in `(0, 1]`.
#[inline]
pub fn first_digit(x: f64) -> u64 {
    debug_assert!(x > 0.0 && x <= 1.0);
    let d = split_reciprocal(x).0;
    if d >= u64::MAX as f64 {
        u64::MAX
    } else {
        d as u64
    }
}

/// Float digit expansion with the default reliability limit.
pub fn rcf_digits(x: UnitReal, n_max: usize) -> DigitSequence {
    rcf_digits_with_limit(x, n_max, DEFAULT_RELIABLE_DIGITS)
}

/// Float digit expansion: `a_k = floor(1 / tau^{k-1}(x))`, at most `n_max`
/// digits, stopping early when an iterate is exactly zero.
pub fn rcf_digits_with_limit(x: UnitReal, n_max: usize, reliable_digits: usize) -> DigitSequence {
    let mut digits = Vec::with_capacity(n_max.min(64));
    let mut cur = x.get();
    let mut terminated = cur == 0.0;
    let mut reliable = true;
    while !terminated && digits.len() < n_max {
        let inv = 1.0 / cur;
        if !inv.is_finite() || inv >= u64::MAX as f64 {
            reliable = false;
            break;
        }
        let (digit, rem) = split_reciprocal(cur);
        digits.push(digit as u64);
        cur = rem;
        terminated = cur == 0.0;
    }
    if digits.len() > reliable_digits {
        reliable = false;
    }
    DigitSequence {
        digits,
        terminated,
        reliable,
    }
}

fn check_unit_rational(x: &BigRational) -> Result<()> {
    if x.is_negative() || *x > BigRational::one() {
        return Err(Error::domain(format!("{x} is not in [0, 1]")));
    }
    Ok(())
}

/// Exact Gauss map on a rational in `[0, 1]`.
pub fn gauss_map_exact(x: &BigRational) -> Result<BigRational> {
    check_unit_rational(x)?;
    if x.is_zero() {
        return Ok(BigRational::zero());
    }
    let inv = x.recip();
    Ok(&inv - inv.floor())
}

/// Exact digit expansion of a rational in `[0, 1]`.
///
/// `0` yields an empty, terminated sequence. Digits that do not fit in `u64`
/// are reported as [`Error::Unsupported`].
pub fn rcf_digits_exact(x: &BigRational, n_max: usize) -> Result<DigitSequence> {
    check_unit_rational(x)?;
    let mut digits = Vec::new();
    // work on numerator/denominator directly: x = p/q, 1/x = q/p
    let mut p = x.numer().clone();
    let mut q = x.denom().clone();
    while !p.is_zero() && digits.len() < n_max {
        let (digit, rem) = q.div_rem(&p);
        let digit = digit
            .to_u64()
            .ok_or_else(|| Error::Unsupported(format!("digit {digit} exceeds u64")))?;
        digits.push(digit);
        q = std::mem::replace(&mut p, rem);
    }
    Ok(DigitSequence {
        digits,
        terminated: p.is_zero(),
        reliable: true,
    })
}

fn check_digits(digits: &[u64]) -> Result<()> {
    if digits.is_empty() {
        return Err(Error::domain("empty digit list"));
    }
    if digits.contains(&0) {
        return Err(Error::domain("continued fraction digits must be >= 1"));
    }
    Ok(())
}

/// Exact value of the finite continued fraction `[a_1, ..., a_n]`.
pub fn evaluate_finite(digits: &[u64]) -> Result<BigRational> {
    check_digits(digits)?;
    let value = digits.iter().rev().fold(BigRational::zero(), |acc, &a| {
        (BigRational::from_integer(BigInt::from(a)) + acc).recip()
    });
    Ok(value)
}

/// Convergents `p_k / q_k` of every prefix of a digit list.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Convergents {
    pub numerators: Vec<BigInt>,
    pub denominators: Vec<BigInt>,
}

impl Convergents {
    pub fn len(&self) -> usize {
        self.numerators.len()
    }

    pub fn is_empty(&self) -> bool {
        self.numerators.is_empty()
    }

    /// The `k`-th convergent (0-based) as a reduced rational.
    pub fn ratio(&self, k: usize) -> BigRational {
        BigRational::new(self.numerators[k].clone(), self.denominators[k].clone())
    }

    pub fn iter(&self) -> impl Iterator<Item = (&BigInt, &BigInt)> {
        self.numerators.iter().zip(&self.denominators)
    }
}

/// Two-term recurrence `p_k = a_k p_{k-1} + p_{k-2}`, `q_k = a_k q_{k-1} + q_{k-2}`
/// seeded with `p_{-1} = 1, p_0 = 0, q_{-1} = 0, q_0 = 1`.
pub fn convergents(digits: &[u64]) -> Result<Convergents> {
    check_digits(digits)?;
    let mut numerators = Vec::with_capacity(digits.len());
    let mut denominators = Vec::with_capacity(digits.len());
    let (mut p_prev, mut p) = (BigInt::one(), BigInt::zero());
    let (mut q_prev, mut q) = (BigInt::zero(), BigInt::one());
    for &a in digits {
        let a = BigInt::from(a);
        let p_next = &a * &p + &p_prev;
        let q_next = &a * &q + &q_prev;
        p_prev = std::mem::replace(&mut p, p_next);
        q_prev = std::mem::replace(&mut q, q_next);
        numerators.push(p.clone());
        denominators.push(q.clone());
    }
    Ok(Convergents {
        numerators,
        denominators,
    })
}

/// The backward chain `s_k = [a_k, ..., a_1]` via `s_0 = 0`, `s_k = 1/(a_k + s_{k-1})`.
pub fn backward_chain(digits: &[u64]) -> Result<Vec<BigRational>> {
    check_digits(digits)?;
    let mut s = BigRational::zero();
    Ok(digits
        .iter()
        .map(|&a| {
            s = (BigRational::from_integer(BigInt::from(a)) + &s).recip();
            s.clone()
        })
        .collect())
}

/// A rational in `(0, 1]` parsed from `p/q` or a plain decimal such as `0.125`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnitRational(pub BigRational);

impl FromStr for UnitRational {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let value = if let Some((num, den)) = s.split_once('/') {
            let num: BigInt = num
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad numerator in {s:?}")))?;
            let den: BigInt = den
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad denominator in {s:?}")))?;
            if den.is_zero() {
                return Err(Error::Parse(format!("zero denominator in {s:?}")));
            }
            BigRational::new(num, den)
        } else {
            parse_decimal(s)?
        };
        if !value.is_positive() || value > BigRational::one() {
            return Err(Error::domain(format!("{s} is not in (0, 1]")));
        }
        Ok(UnitRational(value))
    }
}

fn parse_decimal(s: &str) -> Result<BigRational> {
    let bad = || Error::Parse(format!("{s:?} is neither p/q nor a decimal"));
    let (int_part, frac_part) = s.split_once('.').unwrap_or((s, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    let all_digits = |t: &str| t.bytes().all(|b| b.is_ascii_digit());
    let int_digits = int_part.strip_prefix('+').unwrap_or(int_part);
    if !all_digits(int_digits) || !all_digits(frac_part) {
        return Err(bad());
    }
    let digits = format!("{int_digits}{frac_part}");
    let numer: BigInt = if digits.is_empty() {
        BigInt::zero()
    } else {
        digits.parse().map_err(|_| bad())?
    };
    let denom = num_traits::pow(BigInt::from(10u32), frac_part.len());
    Ok(BigRational::new(numer, denom))
}

impl fmt::Display for UnitRational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rat(p: i64, q: i64) -> BigRational {
        BigRational::new(BigInt::from(p), BigInt::from(q))
    }

    #[test]
    fn gauss_map_examples() {
        assert_eq!(gauss_map(0.0), 0.0);
        assert_eq!(gauss_map(1.0), 0.0);
        assert!((gauss_map(0.4) - 0.5).abs() < 1e-15);
        let golden = (5f64.sqrt() - 1.0) / 2.0;
        assert!((gauss_map(golden) - golden).abs() < 1e-15);
    }

    #[test]
    fn gauss_map_exact_matches_hand_values() {
        assert_eq!(gauss_map_exact(&rat(2, 5)).unwrap(), rat(1, 2));
        assert_eq!(gauss_map_exact(&rat(0, 1)).unwrap(), rat(0, 1));
        assert!(gauss_map_exact(&rat(3, 2)).is_err());
    }

    #[test]
    fn float_digits() {
        let half = rcf_digits(UnitReal::new(0.5).unwrap(), 5);
        assert_eq!(half.digits, vec![2]);
        assert!(half.terminated);

        let silver = rcf_digits(UnitReal::new(2f64.sqrt() - 1.0).unwrap(), 4);
        assert_eq!(silver.digits, vec![2, 2, 2, 2]);
        assert!(!silver.terminated);
        assert!(silver.reliable);

        let zero = rcf_digits(UnitReal::new(0.0).unwrap(), 5);
        assert!(zero.is_empty() && zero.terminated);
    }

    #[test]
    fn long_float_expansions_are_flagged() {
        let x = UnitReal::new(std::f64::consts::PI - 3.0).unwrap();
        let short = rcf_digits(x, 10);
        assert!(short.reliable);
        let long = rcf_digits_with_limit(x, 60, 30);
        if long.len() > 30 {
            assert!(!long.reliable);
        }
    }

    #[test]
    fn exact_digits() {
        let d = rcf_digits_exact(&rat(2, 3), 5).unwrap();
        assert_eq!(d.digits, vec![1, 2]);
        assert!(d.terminated);
        let d = rcf_digits_exact(&rat(0, 1), 5).unwrap();
        assert!(d.is_empty() && d.terminated);
        let d = rcf_digits_exact(&rat(5, 8), 2).unwrap();
        assert_eq!(d.digits, vec![1, 1]);
        assert!(!d.terminated);
    }

    #[test]
    fn evaluate_finite_examples() {
        assert_eq!(evaluate_finite(&[2]).unwrap(), rat(1, 2));
        assert_eq!(evaluate_finite(&[1, 2]).unwrap(), rat(2, 3));
        assert_eq!(evaluate_finite(&[1, 1, 1, 1, 1]).unwrap(), rat(5, 8));
        assert!(evaluate_finite(&[]).is_err());
        assert!(evaluate_finite(&[1, 0]).is_err());
    }

    #[test]
    fn convergents_examples() {
        let c = convergents(&[2, 2, 2]).unwrap();
        let got: Vec<_> = (0..c.len()).map(|k| c.ratio(k)).collect();
        assert_eq!(got, vec![rat(1, 2), rat(2, 5), rat(5, 12)]);
        let c = convergents(&[1, 2]).unwrap();
        assert_eq!(c.ratio(0), rat(1, 1));
        assert_eq!(c.ratio(1), rat(2, 3));
    }

    #[test]
    fn backward_chain_examples() {
        assert_eq!(backward_chain(&[1, 2]).unwrap(), vec![rat(1, 1), rat(1, 3)]);
        assert_eq!(
            backward_chain(&[2, 2, 2]).unwrap(),
            vec![rat(1, 2), rat(2, 5), rat(5, 12)]
        );
        assert_eq!(backward_chain(&[5]).unwrap(), vec![rat(1, 5)]);
    }

    #[test]
    fn parse_inputs() {
        assert_eq!("2/3".parse::<UnitRational>().unwrap().0, rat(2, 3));
        assert_eq!("0.125".parse::<UnitRational>().unwrap().0, rat(1, 8));
        assert_eq!("1".parse::<UnitRational>().unwrap().0, rat(1, 1));
        assert_eq!(".5".parse::<UnitRational>().unwrap().0, rat(1, 2));
        assert!(matches!(
            "5/3".parse::<UnitRational>(),
            Err(Error::Domain(_))
        ));
        assert!(matches!("0".parse::<UnitRational>(), Err(Error::Domain(_))));
        assert!(matches!(
            "abc".parse::<UnitRational>(),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            "1/0".parse::<UnitRational>(),
            Err(Error::Parse(_))
        ));
        assert!(matches!(
            "-0.5".parse::<UnitRational>(),
            Err(Error::Parse(_))
        ));
    }

    #[test]
    fn decimal_shadow_of_silver_ratio() {
        let x = "0.41421356237".parse::<UnitRational>().unwrap();
        let d = rcf_digits_exact(&x.0, 8).unwrap();
        assert_eq!(&d.digits[..4], &[2, 2, 2, 2]);
    }
}
