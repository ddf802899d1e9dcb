//! Number types the combinatorial core is generic over.
//!
//! Every partition polynomial, Bell coefficient and probability handled by this crate is
//! non-negative, so the core only needs a semiring with division. Three kinds of scalar
//! implement [`Scalar`]:
//!
//! * `f32` / `f64` — plain floating point, fine for moderate sizes;
//! * [`LogReal`] — a non-negative real stored as its logarithm, immune to overflow;
//! * [`BigRational`] — exact arithmetic, used by every identity check.
//!
//! The few routes that genuinely need subtraction (alternating sums) are bounded by
//! [`Field`], which `LogReal` deliberately does not implement.

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_rational::BigRational;
use num_traits::{Float, One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};

/// Arithmetic required by the combinatorial core.
pub trait Scalar:
    Clone
    + fmt::Debug
    + PartialOrd
    + Send
    + Sync
    + 'static
    + Zero
    + One
    + Add<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
{
    /// `true` when arithmetic is exact (rational mode).
    const EXACT: bool;

    fn from_u64(n: u64) -> Self;

    /// Build a non-negative value from its logarithm and, when known, its exact rational
    /// form. Exact scalars require the rational; floating scalars use whichever is more
    /// accurate.
    fn from_parts(ln: f64, exact: Option<&BigRational>) -> Result<Self>;

    fn from_rational(r: &BigRational) -> Result<Self>;

    /// Fails for exact scalars: a float carries no trustworthy rational value.
    fn from_f64(x: f64) -> Result<Self>;

    fn from_param(p: &Param) -> Result<Self> {
        match p.exact_value() {
            Some(r) => Self::from_rational(r),
            None => Self::from_f64(p.value()),
        }
    }

    fn to_f64(&self) -> f64;

    /// Natural logarithm (`-inf` for zero).
    fn ln(&self) -> f64;

    /// Serialization form: `"p/q"` for rationals, shortest round-trip decimal otherwise.
    fn to_repr(&self) -> String;

    /// Equality for exact scalars, relative closeness `rel` otherwise.
    fn approx_eq(&self, other: &Self, rel: f64) -> bool;

    fn powu(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }

    fn sum_of<I: IntoIterator<Item = Self>>(terms: I) -> Self {
        terms.into_iter().fold(Self::zero(), |a, b| a + b)
    }

    fn factorial(n: u64) -> Self {
        (2..=n).fold(Self::one(), |acc, j| acc * Self::from_u64(j))
    }

    /// Falling factorial `{n}_p = n(n-1)…(n-p+1)`.
    fn falling(n: u64, p: u64) -> Self {
        if p > n {
            return Self::zero();
        }
        (0..p).fold(Self::one(), |acc, j| acc * Self::from_u64(n - j))
    }

    fn binomial(n: u64, k: u64) -> Self {
        if k > n {
            return Self::zero();
        }
        let k = k.min(n - k);
        (0..k).fold(Self::one(), |acc, i| acc * Self::from_u64(n - i) / Self::from_u64(i + 1))
    }
}

/// Scalars that also support subtraction.
pub trait Field: Scalar + Sub<Output = Self> + Neg<Output = Self> {
    fn from_i64(n: i64) -> Self {
        if n >= 0 {
            Self::from_u64(n as u64)
        } else {
            -Self::from_u64(n.unsigned_abs())
        }
    }
}

fn rel_close(a: f64, b: f64, rel: f64) -> bool {
    if a == b {
        return true;
    }
    let scale = a.abs().max(b.abs());
    (a - b).abs() <= rel * scale
}

macro_rules! impl_float_scalar {
    ($t:ty) => {
        impl Scalar for $t {
            const EXACT: bool = false;

            fn from_u64(n: u64) -> Self {
                n as $t
            }

            fn from_parts(ln: f64, exact: Option<&BigRational>) -> Result<Self> {
                match exact {
                    Some(r) => Self::from_rational(r),
                    None => Ok(ln.exp() as $t),
                }
            }

            fn from_rational(r: &BigRational) -> Result<Self> {
                Ok(rational_to_f64(r) as $t)
            }

            fn from_f64(x: f64) -> Result<Self> {
                Ok(x as $t)
            }

            fn to_f64(&self) -> f64 {
                *self as f64
            }

            fn ln(&self) -> f64 {
                (*self as f64).ln()
            }

            fn to_repr(&self) -> String {
                format!("{}", self)
            }

            fn approx_eq(&self, other: &Self, rel: f64) -> bool {
                rel_close(*self as f64, *other as f64, rel)
            }
        }

        impl Field for $t {}
    };
}

impl_float_scalar!(f32);
impl_float_scalar!(f64);

impl Scalar for BigRational {
    const EXACT: bool = true;

    fn from_u64(n: u64) -> Self {
        BigRational::from_integer(BigInt::from(n))
    }

    fn from_parts(_ln: f64, exact: Option<&BigRational>) -> Result<Self> {
        exact
            .cloned()
            .ok_or_else(|| Error::NotExact("value has no rational form".into()))
    }

    fn from_rational(r: &BigRational) -> Result<Self> {
        Ok(r.clone())
    }

    fn from_f64(x: f64) -> Result<Self> {
        Err(Error::NotExact(format!(
            "floating-point input {x} cannot seed exact arithmetic; pass a rational"
        )))
    }

    fn to_f64(&self) -> f64 {
        rational_to_f64(self)
    }

    fn ln(&self) -> f64 {
        ln_rational(self)
    }

    fn to_repr(&self) -> String {
        self.to_string()
    }

    fn approx_eq(&self, other: &Self, _rel: f64) -> bool {
        self == other
    }
}

impl Field for BigRational {}

/// A non-negative real number stored as its natural logarithm.
///
/// Zero is represented by a logarithm of `-inf`; it absorbs multiplication and is the
/// identity for addition. Addition is log-sum-exp.
#[derive(Clone, Copy, PartialEq)]
pub struct LogReal<F> {
    ln: F,
}

impl<F: Float> LogReal<F> {
    pub fn from_ln(ln: F) -> Self {
        LogReal { ln }
    }

    /// Panics in debug builds on negative input.
    pub fn new(x: F) -> Self {
        debug_assert!(!(x < F::zero()), "LogReal cannot hold a negative value");
        LogReal { ln: x.ln() }
    }

    pub fn ln_value(&self) -> F {
        self.ln
    }

    pub fn value(&self) -> F {
        self.ln.exp()
    }
}

impl<F: Float> PartialOrd for LogReal<F> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.ln.partial_cmp(&other.ln)
    }
}

impl<F: Float + fmt::Debug> fmt::Debug for LogReal<F> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LogReal(ln={:?})", self.ln)
    }
}

impl<F: Float> Add for LogReal<F> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let (hi, lo) = if self.ln >= rhs.ln { (self.ln, rhs.ln) } else { (rhs.ln, self.ln) };
        if lo == F::neg_infinity() {
            return LogReal { ln: hi };
        }
        LogReal { ln: hi + (lo - hi).exp().ln_1p() }
    }
}

impl<F: Float> Mul for LogReal<F> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.ln == F::neg_infinity() || rhs.ln == F::neg_infinity() {
            return LogReal { ln: F::neg_infinity() };
        }
        LogReal { ln: self.ln + rhs.ln }
    }
}

impl<F: Float> Div for LogReal<F> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        if self.ln == F::neg_infinity() {
            return self;
        }
        LogReal { ln: self.ln - rhs.ln }
    }
}

impl<F: Float> Zero for LogReal<F> {
    fn zero() -> Self {
        LogReal { ln: F::neg_infinity() }
    }
    fn is_zero(&self) -> bool {
        self.ln == F::neg_infinity()
    }
}

impl<F: Float> One for LogReal<F> {
    fn one() -> Self {
        LogReal { ln: F::zero() }
    }
}

impl<F> Scalar for LogReal<F>
where
    F: Float + fmt::Debug + fmt::Display + Send + Sync + 'static,
{
    const EXACT: bool = false;

    fn from_u64(n: u64) -> Self {
        LogReal { ln: F::from(n as f64).unwrap().ln() }
    }

    fn from_parts(ln: f64, exact: Option<&BigRational>) -> Result<Self> {
        match exact {
            Some(r) => Self::from_rational(r),
            None => Ok(LogReal { ln: F::from(ln).unwrap() }),
        }
    }

    fn from_rational(r: &BigRational) -> Result<Self> {
        if r.is_negative() {
            return Err(Error::Domain(format!("log-space value cannot be negative: {r}")));
        }
        Ok(LogReal { ln: F::from(ln_rational(r)).unwrap() })
    }

    fn from_f64(x: f64) -> Result<Self> {
        if x < 0.0 || x.is_nan() {
            return Err(Error::Domain(format!("log-space value cannot be negative: {x}")));
        }
        Ok(LogReal { ln: F::from(x.ln()).unwrap() })
    }

    fn to_f64(&self) -> f64 {
        self.ln.to_f64().unwrap().exp()
    }

    fn ln(&self) -> f64 {
        self.ln.to_f64().unwrap()
    }

    fn to_repr(&self) -> String {
        format!("{}", self.to_f64())
    }

    fn approx_eq(&self, other: &Self, rel: f64) -> bool {
        let (a, b) = (self.ln(), other.ln());
        if a == b {
            return true;
        }
        // |x/y - 1| ≈ |ln x - ln y| for close values.
        (a - b).abs() <= rel
    }

    /// Sums in descending-magnitude order with compensated (Neumaier) accumulation of the
    /// max-shifted exponentials.
    fn sum_of<I: IntoIterator<Item = Self>>(terms: I) -> Self {
        let mut lns: Vec<F> = terms
            .into_iter()
            .map(|t| t.ln)
            .filter(|l| *l != F::neg_infinity())
            .collect();
        if lns.is_empty() {
            return Self::zero();
        }
        lns.sort_by(|a, b| b.partial_cmp(a).unwrap_or(Ordering::Equal));
        let max = lns[0];
        if max == F::infinity() || max.is_nan() {
            return LogReal { ln: max };
        }
        let mut sum = F::zero();
        let mut comp = F::zero();
        for l in lns {
            let x = (l - max).exp();
            let t = sum + x;
            if sum.abs() >= x.abs() {
                comp = comp + ((sum - t) + x);
            } else {
                comp = comp + ((x - t) + sum);
            }
            sum = t;
        }
        LogReal { ln: max + (sum + comp).ln() }
    }

    fn factorial(n: u64) -> Self {
        if n <= 20 {
            return (2..=n).fold(Self::one(), |acc, j| acc * Self::from_u64(j));
        }
        LogReal { ln: F::from(statrs::function::gamma::ln_gamma(n as f64 + 1.0)).unwrap() }
    }
}

/// Convert a rational to the nearest `f64`, handling numerators and denominators far
/// beyond the `f64` range.
pub fn rational_to_f64(r: &BigRational) -> f64 {
    if r.is_zero() {
        return 0.0;
    }
    if let (Some(n), Some(d)) = (r.numer().to_f64(), r.denom().to_f64()) {
        if n.is_finite() && d.is_finite() && n.abs() < 1e300 && d < 1e300 {
            return n / d;
        }
    }
    let sign = if r.is_negative() { -1.0 } else { 1.0 };
    sign * ln_rational(&r.abs()).exp()
}

fn ln_bigint(n: &BigInt) -> f64 {
    let bits = n.bits();
    if bits < 1000 {
        return n.to_f64().unwrap().abs().ln();
    }
    let shift = bits - 64;
    let top: BigInt = n.abs() >> shift;
    top.to_f64().unwrap().ln() + shift as f64 * std::f64::consts::LN_2
}

/// Natural log of a non-negative rational; `-inf` at zero, NaN for negatives.
pub fn ln_rational(r: &BigRational) -> f64 {
    match r.numer().sign() {
        Sign::NoSign => f64::NEG_INFINITY,
        Sign::Minus => f64::NAN,
        Sign::Plus => ln_bigint(r.numer()) - ln_bigint(r.denom()),
    }
}

/// Parse an exact rational from `"p/q"` or a decimal such as `"-0.25"` or `"1.5e-3"`.
pub fn parse_rational(s: &str) -> Result<BigRational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: `{s}`"));
    if let Some((num, den)) = s.split_once('/') {
        let n = parse_rational(num)?;
        let d = parse_rational(den)?;
        if d.is_zero() {
            return Err(Error::Parse(format!("zero denominator in `{s}`")));
        }
        return Ok(n / d);
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(i) => (&s[..i], s[i + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (negative, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all_digits = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(all_digits.parse::<BigInt>().map_err(|_| bad())?);
    let scale = exponent - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= num_traits::pow(ten, scale as usize);
    } else {
        value /= num_traits::pow(ten, (-scale) as usize);
    }
    Ok(if negative { -value } else { value })
}

/// A real model parameter that remembers its exact rational value when it has one.
///
/// Parameters parsed from decimal or `p/q` strings are always exact; parameters built
/// from an `f64` are not, and cannot drive rational-mode computations.
#[derive(Clone, Debug, PartialEq)]
pub struct Param {
    value: f64,
    exact: Option<BigRational>,
}

impl Param {
    pub fn exact(r: BigRational) -> Self {
        Param { value: rational_to_f64(&r), exact: Some(r) }
    }

    pub fn ratio(numer: i64, denom: i64) -> Self {
        Self::exact(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn int(n: i64) -> Self {
        Self::ratio(n, 1)
    }

    pub fn float(x: f64) -> Self {
        Param { value: x, exact: None }
    }

    pub fn value(&self) -> f64 {
        self.value
    }

    pub fn exact_value(&self) -> Option<&BigRational> {
        self.exact.as_ref()
    }

    /// The integer value, when the parameter is an exact integer.
    pub fn as_integer(&self) -> Option<i64> {
        self.exact.as_ref().filter(|r| r.is_integer()).and_then(|r| r.to_integer().to_i64())
    }
}

impl FromStr for Param {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        if let Ok(r) = parse_rational(s) {
            return Ok(Param::exact(r));
        }
        match s.trim().parse::<f64>() {
            Ok(x) if x.is_finite() => Ok(Param::float(x)),
            _ => Err(Error::Parse(format!("not a number: `{s}`"))),
        }
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.exact {
            Some(r) => write!(f, "{r}"),
            None => write!(f, "{}", self.value),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    type L = LogReal<f64>;

    fn q(n: i64, d: i64) -> BigRational {
        BigRational::new(n.into(), d.into())
    }

    #[test]
    fn log_real_arithmetic() {
        let a = L::new(3.0);
        let b = L::new(5.0);
        assert!(((a + b).value() - 8.0).abs() < 1e-14);
        assert!(((a * b).value() - 15.0).abs() < 1e-13);
        assert!(((b / a).value() - 5.0 / 3.0).abs() < 1e-15);
        assert!((L::zero() + a).approx_eq(&a, 0.0));
        assert!((L::zero() * a).is_zero());
        assert!(a > L::zero());
    }

    #[test]
    fn log_real_sum_of_many_tiny_terms() {
        let terms = (0..10_000).map(|_| L::from_ln(-800.0));
        let s = L::sum_of(terms);
        assert!((s.ln_value() - (-800.0 + 10_000f64.ln())).abs() < 1e-12);
    }

    #[test]
    fn decimal_and_fraction_parsing() {
        assert_eq!(parse_rational("0.5").unwrap(), q(1, 2));
        assert_eq!(parse_rational("-7/3").unwrap(), q(-7, 3));
        assert_eq!(parse_rational("1.25e2").unwrap(), q(125, 1));
        assert_eq!(parse_rational("3e-2").unwrap(), q(3, 100));
        assert_eq!(parse_rational(".5").unwrap(), q(1, 2));
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational("1/0").is_err());
    }

    #[test]
    fn param_remembers_exactness() {
        let p: Param = "7/3".parse().unwrap();
        assert_eq!(p.exact_value(), Some(&q(7, 3)));
        assert!((p.value() - 7.0 / 3.0).abs() < 1e-15);
        assert_eq!("4".parse::<Param>().unwrap().as_integer(), Some(4));
        assert!(Param::float(0.1).exact_value().is_none());
        assert!(BigRational::from_param(&Param::float(0.1)).is_err());
    }

    #[test]
    fn huge_rationals_convert() {
        let big = BigRational::from_integer(num_traits::pow(BigInt::from(10), 400));
        assert!((ln_rational(&big) - 400.0 * 10f64.ln()).abs() < 1e-10);
        let ratio = big.clone() / (big * BigRational::from_integer(3.into()));
        assert!((rational_to_f64(&ratio) - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn combinatorial_defaults() {
        assert_eq!(BigRational::binomial(10, 3), q(120, 1));
        assert_eq!(BigRational::falling(5, 2), q(20, 1));
        assert_eq!(BigRational::falling(2, 3), q(0, 1));
        assert_eq!(BigRational::factorial(6), q(720, 1));
        assert!(L::factorial(30).approx_eq(&L::from_f64(2.652528598121911e32).unwrap(), 1e-13));
        assert_eq!(q(2, 3).powu(3), q(8, 27));
    }
}
