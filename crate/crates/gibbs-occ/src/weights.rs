//! Generator weight families `φ• = (φ_m)_{m≥1}`.
//!
//! A weight sequence is the list of Taylor coefficients of the exponential generating
//! function `φ(x) = Σ_{m≥1} φ_m x^m / m!` (with `φ₀ = 0` and `φ₁ > 0`). It determines
//! every law in the crate. Besides the coefficients themselves, a [`WeightSequence`]
//! knows its convergence radius, how to evaluate `φ` and `φ′`, and — for the families
//! that come with an explicit Lévy measure — the tail `π̄(t)` of the associated
//! subordinator and its inverse.
//!
//! Families are named on the command line by short identifiers; see
//! [`WeightSequence::from_str`](std::str::FromStr).

use std::fmt;
use std::path::Path;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::Serialize;
use statrs::function::gamma::ln_gamma;

use crate::error::{Error, Result};
use crate::scalar::{ln_rational, parse_rational, Param, Scalar};
use crate::special::{
    bisect, gamma_p, ln_exp_int_e1, ln_gamma_q, ln_upper_gamma_cf, polylog_negative,
};

/// The supported generator families and their parameters.
#[derive(Clone, Debug, PartialEq)]
pub enum Family {
    /// `φ(x) = −log(1−x)`, `φ_m = (m−1)!` — the Ewens / Dirichlet case.
    LogSeries,
    /// `φ(x) = (1−x)^{−α} − 1`, `φ_m = (α)_m`, `α > 0`.
    NegBinCompound { alpha: Param },
    /// `φ(x) = 1 − (1−x)^α`, `φ_m = α(1−α)_{m−1}`, `0 < α < 1`.
    Engen { alpha: Param },
    /// Cayley tree function `φ = x e^φ`, `φ_m = m^{m−1}`.
    Cayley,
    /// `φ = x(1 + bφ)^a`, `φ_m = {am}_{m−1} b^{m−1}`; needs `b > 0, a ≥ 1` or `a < 0, b < 0`.
    GenBinomialTree { a: Param, b: Param },
    /// `φ_m = m!·m^{−α}`, `α > 0`.
    Polylog { alpha: Param },
    /// `φ_m = m!/Γ(1 + mα)`, `0 < α < 1`.
    MittagLeffler { alpha: Param },
    /// `φ(x) = e^x − 1`, all weights one.
    BellExp,
    /// `φ(x) = x`.
    Linear,
    /// `φ(x) = x(1−x)^{−α}`, `φ_m = m(α)_{m−1}`, `0 < α ≤ 1`.
    NewEngenLike { alpha: Param },
    /// `φ(x) = (1 − √(1−2x²))/x`; weights vanish at even orders.
    BinaryTree,
    /// A finite user-supplied list `φ₁, φ₂, …`.
    Custom { weights: Vec<BigRational> },
}

/// Whether `φ′` is absolutely monotone on `(−∞, x₀)`, i.e. the family corresponds to a
/// subordinator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Membership {
    Yes,
    No,
    /// Believed but unproven; treated as `Yes` for computation.
    Conjectured,
    Unknown,
}

/// One weight `φ_m`: its logarithm and, when the family admits one, its exact value.
#[derive(Clone, Debug, PartialEq)]
pub struct Weight {
    pub ln: f64,
    pub exact: Option<BigRational>,
}

impl Weight {
    pub fn value(&self) -> f64 {
        self.ln.exp()
    }
}

/// An immutable, validated generator weight family.
#[derive(Clone, Debug, PartialEq)]
pub struct WeightSequence {
    family: Family,
}

fn ln_rising(x: f64, n: usize) -> f64 {
    if n <= 64 {
        (0..n).map(|j| (x + j as f64).ln()).sum()
    } else {
        ln_gamma(x + n as f64) - ln_gamma(x)
    }
}

fn rising_exact(x: &BigRational, n: usize) -> BigRational {
    let mut acc = BigRational::one();
    let mut term = x.clone();
    for _ in 0..n {
        acc *= &term;
        term += BigRational::one();
    }
    acc
}

fn int(n: u64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn factorial_exact(n: u64) -> BigInt {
    (2..=n).fold(BigInt::one(), |acc, j| acc * j)
}

fn binomial_exact(n: u64, k: u64) -> BigInt {
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * (n - i) / (i + 1);
    }
    acc
}

fn check_alpha(name: &str, alpha: &Param, lo_open: f64, hi: f64, hi_inclusive: bool) -> Result<()> {
    let a = alpha.value();
    let hi_ok = if hi_inclusive { a <= hi } else { a < hi };
    if !(a > lo_open && hi_ok) || a.is_nan() {
        let close = if hi_inclusive { "]" } else { ")" };
        return Err(Error::Domain(format!(
            "{name} requires alpha in ({lo_open}, {hi}{close}, got {alpha}"
        )));
    }
    Ok(())
}

impl WeightSequence {
    /// Validate the family parameters (and, for custom lists, `φ₁ > 0` and non-negativity).
    pub fn new(family: Family) -> Result<Self> {
        match &family {
            Family::NegBinCompound { alpha } => check_alpha("negbin", alpha, 0.0, f64::INFINITY, false)?,
            Family::Engen { alpha } => check_alpha("engen", alpha, 0.0, 1.0, false)?,
            Family::Polylog { alpha } => check_alpha("polylog", alpha, 0.0, f64::INFINITY, false)?,
            Family::MittagLeffler { alpha } => check_alpha("mittagleffler", alpha, 0.0, 1.0, false)?,
            Family::NewEngenLike { alpha } => check_alpha("newengen", alpha, 0.0, 1.0, true)?,
            Family::GenBinomialTree { a, b } => {
                let (a, b) = (a.value(), b.value());
                let ok = (b > 0.0 && a >= 1.0) || (a < 0.0 && b < 0.0);
                if !ok {
                    return Err(Error::Domain(format!(
                        "tree requires (b > 0 and a ≥ 1) or (a < 0 and b < 0), got a={a}, b={b}"
                    )));
                }
            }
            Family::Custom { weights } => {
                if weights.is_empty() {
                    return Err(Error::Domain("custom weight list is empty".into()));
                }
                if let Some((i, w)) = weights.iter().enumerate().find(|(_, w)| w.is_negative()) {
                    return Err(Error::Domain(format!("custom weight phi_{} = {w} is negative", i + 1)));
                }
                if weights[0].is_zero() {
                    return Err(Error::Domain("custom weights must have phi_1 > 0".into()));
                }
            }
            _ => {}
        }
        Ok(WeightSequence { family })
    }

    pub fn log_series() -> Self {
        WeightSequence { family: Family::LogSeries }
    }

    pub fn cayley() -> Self {
        WeightSequence { family: Family::Cayley }
    }

    pub fn bell() -> Self {
        WeightSequence { family: Family::BellExp }
    }

    pub fn linear() -> Self {
        WeightSequence { family: Family::Linear }
    }

    pub fn binary_tree() -> Self {
        WeightSequence { family: Family::BinaryTree }
    }

    pub fn neg_bin(alpha: Param) -> Result<Self> {
        Self::new(Family::NegBinCompound { alpha })
    }

    pub fn engen(alpha: Param) -> Result<Self> {
        Self::new(Family::Engen { alpha })
    }

    pub fn gen_binomial_tree(a: Param, b: Param) -> Result<Self> {
        Self::new(Family::GenBinomialTree { a, b })
    }

    pub fn polylog(alpha: Param) -> Result<Self> {
        Self::new(Family::Polylog { alpha })
    }

    pub fn mittag_leffler(alpha: Param) -> Result<Self> {
        Self::new(Family::MittagLeffler { alpha })
    }

    pub fn new_engen(alpha: Param) -> Result<Self> {
        Self::new(Family::NewEngenLike { alpha })
    }

    pub fn custom(weights: Vec<BigRational>) -> Result<Self> {
        Self::new(Family::Custom { weights })
    }

    /// Parse a JSON array of non-negative decimal strings (numbers are accepted too, and
    /// read through their decimal representation).
    pub fn custom_from_json(text: &str) -> Result<Self> {
        let value: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Parse(format!("weights JSON: {e}")))?;
        let items = value
            .as_array()
            .ok_or_else(|| Error::Parse("weights JSON must be an array".into()))?;
        let weights = items
            .iter()
            .map(|v| match v {
                serde_json::Value::String(s) => parse_rational(s),
                serde_json::Value::Number(n) => parse_rational(&n.to_string()),
                other => Err(Error::Parse(format!("weight entry is not a number: {other}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        Self::custom(weights)
    }

    /// Read a custom weight list from a JSON file.
    pub fn custom_from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::custom_from_json(&text)
    }

    pub fn family(&self) -> &Family {
        &self.family
    }

    /// Convergence radius `x₀` of `φ` (possibly infinite).
    pub fn radius(&self) -> f64 {
        match &self.family {
            Family::LogSeries
            | Family::NegBinCompound { .. }
            | Family::Engen { .. }
            | Family::Polylog { .. }
            | Family::NewEngenLike { .. } => 1.0,
            Family::Cayley => (-1.0f64).exp(),
            Family::GenBinomialTree { a, b } => {
                let (a, b) = (a.value(), b.value());
                if a == 1.0 {
                    1.0 / b
                } else {
                    (1.0 - 1.0 / a).powf(a - 1.0) / (a * b)
                }
            }
            Family::BinaryTree => std::f64::consts::FRAC_1_SQRT_2,
            Family::MittagLeffler { .. } | Family::BellExp | Family::Linear | Family::Custom { .. } => {
                f64::INFINITY
            }
        }
    }

    pub fn membership(&self) -> Membership {
        match &self.family {
            Family::BinaryTree => Membership::No,
            Family::GenBinomialTree { .. } => Membership::Conjectured,
            Family::Custom { .. } => Membership::Unknown,
            _ => Membership::Yes,
        }
    }

    /// Whether `levy_tail` and `levy_tail_inverse` are available.
    pub fn levy_tail_support(&self) -> bool {
        matches!(
            self.family,
            Family::LogSeries | Family::NegBinCompound { .. } | Family::Engen { .. }
        )
    }

    /// Compound-Poisson families have a finite Lévy measure (finitely many jumps).
    pub fn finite_activity(&self) -> bool {
        matches!(self.family, Family::NegBinCompound { .. })
    }

    /// The largest index available, for finite custom lists.
    pub fn max_index(&self) -> Option<usize> {
        match &self.family {
            Family::Custom { weights } => Some(weights.len()),
            _ => None,
        }
    }

    /// Fail with `WeightsExhausted` unless weights up to `k_max` exist.
    pub fn ensure_available(&self, k_max: usize) -> Result<()> {
        match self.max_index() {
            Some(len) if k_max > len => Err(Error::WeightsExhausted { index: k_max, available: len }),
            _ => Ok(()),
        }
    }

    /// Exact value of `φ_m` when the family and its parameters are rational.
    pub fn phi_exact(&self, m: usize) -> Result<Option<BigRational>> {
        self.check_index(m)?;
        let mu = m as u64;
        let r = match &self.family {
            Family::LogSeries => Some(BigRational::from_integer(factorial_exact(mu - 1))),
            Family::NegBinCompound { alpha } => alpha.exact_value().map(|a| rising_exact(a, m)),
            Family::Engen { alpha } => alpha.exact_value().map(|a| {
                let one_minus = BigRational::one() - a;
                a * rising_exact(&one_minus, m - 1)
            }),
            Family::Cayley => Some(BigRational::from_integer(num_traits::pow(BigInt::from(mu), m - 1))),
            Family::GenBinomialTree { a, b } => match (a.exact_value(), b.exact_value()) {
                (Some(a), Some(b)) => {
                    let am = a * int(mu);
                    let mut acc = BigRational::one();
                    for j in 0..(mu - 1) {
                        acc *= (&am - int(j)) * b;
                    }
                    if acc.is_negative() {
                        return Err(Error::Domain(format!("tree weight phi_{m} is negative")));
                    }
                    Some(acc)
                }
                _ => None,
            },
            Family::Polylog { alpha } => alpha.as_integer().filter(|a| *a >= 0).map(|a| {
                BigRational::new(factorial_exact(mu), num_traits::pow(BigInt::from(mu), a as usize))
            }),
            Family::MittagLeffler { .. } => None,
            Family::BellExp => Some(BigRational::one()),
            Family::Linear => Some(if m == 1 { BigRational::one() } else { BigRational::zero() }),
            Family::NewEngenLike { alpha } => alpha.exact_value().map(|a| int(mu) * rising_exact(a, m - 1)),
            Family::BinaryTree => Some(if m % 2 == 0 {
                BigRational::zero()
            } else {
                let j = (mu - 1) / 2;
                BigRational::new(
                    factorial_exact(mu - 1) * binomial_exact(mu, j),
                    num_traits::pow(BigInt::from(2), j as usize),
                )
            }),
            Family::Custom { weights } => Some(weights[m - 1].clone()),
        };
        Ok(r)
    }

    /// `ln φ_m` (`-inf` for vanishing weights).
    pub fn phi_ln(&self, m: usize) -> Result<f64> {
        self.check_index(m)?;
        let mf = m as f64;
        let v = match &self.family {
            Family::LogSeries => ln_gamma(mf),
            Family::NegBinCompound { alpha } => ln_rising(alpha.value(), m),
            Family::Engen { alpha } => alpha.value().ln() + ln_rising(1.0 - alpha.value(), m - 1),
            Family::Cayley => (mf - 1.0) * mf.ln(),
            Family::GenBinomialTree { a, b } => {
                let (a, b) = (a.value(), b.value());
                if m == 1 {
                    0.0
                } else if a >= 1.0 {
                    ln_rising(a * mf - mf + 2.0, m - 1) + (mf - 1.0) * b.ln()
                } else {
                    ln_rising(-a * mf, m - 1) + (mf - 1.0) * (-b).ln()
                }
            }
            Family::Polylog { alpha } => ln_gamma(mf + 1.0) - alpha.value() * mf.ln(),
            Family::MittagLeffler { alpha } => ln_gamma(mf + 1.0) - ln_gamma(1.0 + mf * alpha.value()),
            Family::BellExp => 0.0,
            Family::Linear => {
                if m == 1 {
                    0.0
                } else {
                    f64::NEG_INFINITY
                }
            }
            Family::NewEngenLike { alpha } => mf.ln() + ln_rising(alpha.value(), m - 1),
            Family::BinaryTree => {
                if m % 2 == 0 {
                    f64::NEG_INFINITY
                } else {
                    let j = ((m - 1) / 2) as f64;
                    ln_gamma(mf) + ln_gamma(mf + 1.0) - ln_gamma(j + 1.0) - ln_gamma(mf - j + 1.0)
                        - j * std::f64::consts::LN_2
                }
            }
            Family::Custom { weights } => ln_rational(&weights[m - 1]),
        };
        Ok(v)
    }

    /// `φ_m` in both representations.
    pub fn phi_m(&self, m: usize) -> Result<Weight> {
        Ok(Weight { ln: self.phi_ln(m)?, exact: self.phi_exact(m)? })
    }

    /// `φ_m` as a scalar of type `S`. Exact scalars fail with `NotExact` for irrational
    /// weights.
    pub fn phi<S: Scalar>(&self, m: usize) -> Result<S> {
        let ln = self.phi_ln(m)?;
        // Small exact values are cheap and make floating results correctly rounded.
        let exact = if S::EXACT || m <= 64 { self.phi_exact(m)? } else { None };
        if S::EXACT && exact.is_none() {
            return Err(Error::NotExact(format!("{self} has irrational weights")));
        }
        S::from_parts(ln, exact.as_ref())
    }

    /// `[φ₀ = 0, φ₁, …, φ_{k_max}]`.
    pub fn phi_table<S: Scalar>(&self, k_max: usize) -> Result<Vec<S>> {
        self.ensure_available(k_max)?;
        let mut out = Vec::with_capacity(k_max + 1);
        out.push(S::zero());
        for m in 1..=k_max {
            out.push(self.phi::<S>(m)?);
        }
        Ok(out)
    }

    fn check_index(&self, m: usize) -> Result<()> {
        if m == 0 {
            return Err(Error::Domain("weights are indexed from m = 1 (phi_0 = 0)".into()));
        }
        if let Family::Custom { weights } = &self.family {
            if m > weights.len() {
                return Err(Error::WeightsExhausted { index: m, available: weights.len() });
            }
        }
        Ok(())
    }

    fn check_eval_domain(&self, x: f64) -> Result<()> {
        let x0 = self.radius();
        let inside = match self.membership() {
            Membership::No => x.abs() < x0,
            _ => x < x0,
        };
        if !inside || x.is_nan() {
            return Err(Error::Domain(format!("x = {x} is outside the domain of phi for {self} (radius {x0})")));
        }
        Ok(())
    }

    /// Power series `Σ_{m≥1} φ_{m+shift} x^{m-1+…}` helper: with `shift = 0` it sums
    /// `φ(x)`, with `shift = 1` it sums `φ′(x) = Σ_{j≥0} φ_{j+1} x^j / j!`.
    fn series(&self, x: f64, shift: usize) -> Result<f64> {
        let start = if shift == 0 { 1 } else { 0 };
        let limit = self.max_index().map(|len| len.saturating_sub(shift)).unwrap_or(1_000_000);
        if x == 0.0 {
            return Ok(if shift == 1 { self.phi_ln(1)?.exp() } else { 0.0 });
        }
        let lnx = x.abs().ln();
        let mut sum = 0.0;
        let mut comp = 0.0;
        let mut max_term: f64 = 0.0;
        let mut small_run = 0;
        for j in start..=limit {
            let ln_t = self.phi_ln(j + shift)? + j as f64 * lnx - ln_gamma(j as f64 + 1.0);
            let mut t = ln_t.exp();
            if x < 0.0 && j % 2 == 1 {
                t = -t;
            }
            max_term = max_term.max(t.abs());
            let s = sum + t;
            comp += if sum.abs() >= t.abs() { (sum - s) + t } else { (t - s) + sum };
            sum = s;
            if t.abs() <= 1e-17 * (sum + comp).abs() || t == 0.0 && j > 2 {
                small_run += 1;
                if small_run >= 5 {
                    break;
                }
            } else {
                small_run = 0;
            }
            if j == limit && self.max_index().is_none() {
                return Err(Error::NoSolution(format!("series for {self} did not converge at x = {x}")));
            }
        }
        let total = sum + comp;
        if max_term > 1e8 * total.abs() {
            return Err(Error::Diagnostic(format!(
                "series for {self} at x = {x} loses more than 8 digits to cancellation"
            )));
        }
        Ok(total)
    }

    /// Evaluate `φ(x)` for `x < x₀` (`|x| < x₀` for families outside the subordinator
    /// class). Closed forms are used where they exist; other families sum their series
    /// to full double precision.
    pub fn phi_eval(&self, x: f64) -> Result<f64> {
        self.check_eval_domain(x)?;
        if x == 0.0 {
            return Ok(0.0);
        }
        let v = match &self.family {
            Family::LogSeries => -(-x).ln_1p(),
            Family::NegBinCompound { alpha } => (-alpha.value() * (-x).ln_1p()).exp_m1(),
            Family::Engen { alpha } => -(alpha.value() * (-x).ln_1p()).exp_m1(),
            Family::Cayley => solve_cayley(x),
            Family::GenBinomialTree { a, b } => solve_tree(a.value(), b.value(), x)?,
            Family::Polylog { alpha } => {
                if x > -1.0 {
                    self.series(x, 0)?
                } else {
                    polylog_negative(alpha.value(), x)
                }
            }
            Family::MittagLeffler { .. } | Family::Custom { .. } => self.series(x, 0)?,
            Family::BellExp => x.exp_m1(),
            Family::Linear => x,
            Family::NewEngenLike { alpha } => x * (-alpha.value() * (-x).ln_1p()).exp(),
            Family::BinaryTree => 2.0 * x / (1.0 + (1.0 - 2.0 * x * x).sqrt()),
        };
        Ok(v)
    }

    /// Evaluate `φ′(x)` on the same domain as [`phi_eval`](Self::phi_eval).
    pub fn phi_prime_eval(&self, x: f64) -> Result<f64> {
        self.check_eval_domain(x)?;
        let v = match &self.family {
            Family::LogSeries => 1.0 / (1.0 - x),
            Family::NegBinCompound { alpha } => {
                let a = alpha.value();
                a * (-(a + 1.0) * (-x).ln_1p()).exp()
            }
            Family::Engen { alpha } => {
                let a = alpha.value();
                a * ((a - 1.0) * (-x).ln_1p()).exp()
            }
            Family::Cayley => {
                let y = solve_cayley(x);
                y.exp() / (1.0 - y)
            }
            Family::GenBinomialTree { a, b } => {
                let (a, b) = (a.value(), b.value());
                let y = solve_tree(a, b, x)?;
                let base = 1.0 + b * y;
                base.powf(a) / (1.0 - a * b * x * base.powf(a - 1.0))
            }
            Family::Polylog { .. } => {
                if x.abs() < 1.0 {
                    self.series(x, 1)?
                } else {
                    return Err(Error::Domain("polylog derivative is only summed for |x| < 1".into()));
                }
            }
            Family::MittagLeffler { .. } | Family::Custom { .. } => self.series(x, 1)?,
            Family::BellExp => x.exp(),
            Family::Linear => 1.0,
            Family::NewEngenLike { alpha } => {
                let a = alpha.value();
                let l = (-x).ln_1p();
                (-a * l).exp() + a * x * (-(a + 1.0) * l).exp()
            }
            Family::BinaryTree => {
                let r = (1.0 - 2.0 * x * x).sqrt();
                (2.0 * (1.0 + r) + 4.0 * x * x / r) / ((1.0 + r) * (1.0 + r))
            }
        };
        Ok(v)
    }

    fn require_tail(&self) -> Result<()> {
        if self.levy_tail_support() {
            Ok(())
        } else {
            Err(Error::NoLevyTail(self.to_string()))
        }
    }

    /// `ln π̄(t)`, the log of the Lévy tail.
    pub fn levy_tail_ln(&self, t: f64) -> Result<f64> {
        self.require_tail()?;
        let finite = self.finite_activity();
        if t.is_nan() || t < 0.0 || (t == 0.0 && !finite) {
            return Err(Error::Domain(format!("Lévy tail of {self} needs t > 0, got {t}")));
        }
        let v = match &self.family {
            Family::LogSeries => ln_exp_int_e1(t),
            Family::NegBinCompound { alpha } => ln_gamma_q(alpha.value(), t),
            Family::Engen { alpha } => {
                let a = alpha.value();
                if t <= 1.0 {
                    let head = (-a * t.ln() - t - ln_gamma(1.0 - a)).exp();
                    (head - statrs::function::gamma::gamma_ur(1.0 - a, t)).ln()
                } else {
                    a.ln() - ln_gamma(1.0 - a) + ln_upper_gamma_cf(-a, t)
                }
            }
            _ => unreachable!(),
        };
        Ok(v)
    }

    /// The Lévy tail `π̄(t) = π((t, ∞))`: `E₁(t)` for log-series, `Q(α, t)` for the
    /// compound negative binomial (total mass one), and
    /// `t^{−α}e^{−t}/Γ(1−α) − Q(1−α, t)` for Engen.
    pub fn levy_tail(&self, t: f64) -> Result<f64> {
        Ok(self.levy_tail_ln(t)?.exp())
    }

    /// Solve `π̄(t) = u` for `t` by bisection in `log t` on the strictly decreasing tail.
    pub fn levy_tail_inverse(&self, u: f64) -> Result<f64> {
        self.require_tail()?;
        if !(u > 0.0) || !u.is_finite() {
            return Err(Error::Domain(format!("tail level must be positive and finite, got {u}")));
        }
        if self.finite_activity() {
            if u > 1.0 {
                return Err(Error::Domain(format!("tail level {u} exceeds the total mass 1 of {self}")));
            }
            if u == 1.0 {
                return Ok(0.0);
            }
        }
        let target = u.ln();
        let f = |s: f64| self.levy_tail_ln(s.exp()).map(|v| v - target);
        let (mut lo, mut hi) = (-1.0f64, 1.0f64);
        while f(lo)? < 0.0 {
            lo *= 2.0;
            if lo < -740.0 {
                return Err(Error::Domain(format!("tail level {u} is beyond the representable range")));
            }
        }
        while f(hi)? > 0.0 {
            hi *= 2.0;
            if hi > 16.0 {
                return Err(Error::Domain(format!("tail level {u} is beyond the representable range")));
            }
        }
        let s = bisect(|s| f(s).unwrap_or(f64::NAN), lo, hi, 1e-15);
        Ok(s.exp())
    }

    /// Upper bound on the expected mass discarded when jumps of size `≤ t` are dropped:
    /// `γ ∫₀ᵗ s π(ds)`.
    pub fn levy_truncation_bound(&self, gamma: f64, t: f64) -> Result<f64> {
        self.require_tail()?;
        let v = match &self.family {
            Family::LogSeries => -(-t).exp_m1(),
            Family::NegBinCompound { alpha } => alpha.value() * gamma_p(alpha.value() + 1.0, t),
            Family::Engen { alpha } => alpha.value() * gamma_p(1.0 - alpha.value(), t),
            _ => unreachable!(),
        };
        Ok(gamma * v)
    }

    /// Spec string, e.g. `negbin:alpha=1/2`.
    pub fn spec(&self) -> String {
        self.to_string()
    }
}

/// Principal solution of `y = x e^y` (the Cayley tree function) for `x < 1/e`.
fn solve_cayley(x: f64) -> f64 {
    if x == 0.0 {
        return 0.0;
    }
    let g = |y: f64| y * (-y).exp() - x;
    let y = if x > 0.0 { bisect(g, 0.0, 1.0, 0.0) } else { bisect(g, x, 0.0, 0.0) };
    // One Newton step on y − x e^y polishes the last bits.
    let fy = y - x * y.exp();
    let dfy = 1.0 - x * y.exp();
    if dfy != 0.0 {
        y - fy / dfy
    } else {
        y
    }
}

/// Solve `y = x(1 + b y)^a` on the branch through the origin.
fn solve_tree(a: f64, b: f64, x: f64) -> Result<f64> {
    if x == 0.0 {
        return Ok(0.0);
    }
    if a == 1.0 {
        return Ok(x / (1.0 - b * x));
    }
    // h(y) = y (1+by)^{-a} increases on the branch up to y₀ = 1/(b(a−1)).
    let h = |y: f64| y * (1.0 + b * y).powf(-a) - x;
    let y0 = 1.0 / (b * (a - 1.0));
    if x > 0.0 {
        return Ok(bisect(h, 0.0, y0, 0.0));
    }
    let mut lo = if b > 0.0 { -1.0 / b * (1.0 - 1e-15) } else { -1.0 };
    if b < 0.0 {
        while h(lo) > 0.0 {
            lo *= 2.0;
            if lo < -1e300 {
                return Err(Error::NoSolution(format!("tree equation has no root at x = {x}")));
            }
        }
    } else if h(lo) > 0.0 {
        return Err(Error::NoSolution(format!("tree equation has no root at x = {x}")));
    }
    Ok(bisect(h, lo, 0.0, 0.0))
}

fn param_list(params: &str) -> Result<Vec<(String, String)>> {
    if params.is_empty() {
        return Ok(Vec::new());
    }
    params
        .split(',')
        .map(|kv| {
            kv.split_once('=')
                .map(|(k, v)| (k.trim().to_string(), v.trim().to_string()))
                .ok_or_else(|| Error::Parse(format!("expected key=value, got `{kv}`")))
        })
        .collect()
}

fn take(params: &[(String, String)], key: &str, family: &str) -> Result<Param> {
    params
        .iter()
        .find(|(k, _)| k == key)
        .ok_or_else(|| Error::Parse(format!("family `{family}` needs parameter `{key}`")))?
        .1
        .parse()
}

fn only_keys(params: &[(String, String)], allowed: &[&str], family: &str) -> Result<()> {
    for (k, _) in params {
        if !allowed.contains(&k.as_str()) {
            return Err(Error::Parse(format!("unknown parameter `{k}` for family `{family}`")));
        }
    }
    Ok(())
}

/// Parses family identifiers: `logseries`, `negbin:alpha=0.5`, `engen:alpha=0.5`,
/// `cayley`, `tree:a=2,b=1`, `polylog:alpha=2`, `mittagleffler:alpha=0.5`, `bell`,
/// `linear`, `newengen:alpha=0.5`, `binarytree`, `custom:file=weights.json`.
impl FromStr for WeightSequence {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let (name, rest) = s.split_once(':').unwrap_or((s, ""));
        let name = name.to_ascii_lowercase();
        if name == "custom" {
            let path = rest
                .strip_prefix("file=")
                .ok_or_else(|| Error::Parse("custom family expects `custom:file=<path>`".into()))?;
            return Self::custom_from_file(path);
        }
        let params = param_list(rest)?;
        let alpha = |fam: &str| -> Result<Param> {
            only_keys(&params, &["alpha"], fam)?;
            take(&params, "alpha", fam)
        };
        let none = |fam: &str| only_keys(&params, &[], fam);
        match name.as_str() {
            "logseries" => none("logseries").map(|_| Self::log_series()),
            "cayley" => none("cayley").map(|_| Self::cayley()),
            "bell" => none("bell").map(|_| Self::bell()),
            "linear" => none("linear").map(|_| Self::linear()),
            "binarytree" => none("binarytree").map(|_| Self::binary_tree()),
            "negbin" => Self::neg_bin(alpha("negbin")?),
            "engen" => Self::engen(alpha("engen")?),
            "polylog" => Self::polylog(alpha("polylog")?),
            "mittagleffler" => Self::mittag_leffler(alpha("mittagleffler")?),
            "newengen" => Self::new_engen(alpha("newengen")?),
            "tree" => {
                only_keys(&params, &["a", "b"], "tree")?;
                Self::gen_binomial_tree(take(&params, "a", "tree")?, take(&params, "b", "tree")?)
            }
            other => Err(Error::Parse(format!("unknown family `{other}`"))),
        }
    }
}

impl fmt::Display for WeightSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.family {
            Family::LogSeries => write!(f, "logseries"),
            Family::NegBinCompound { alpha } => write!(f, "negbin:alpha={alpha}"),
            Family::Engen { alpha } => write!(f, "engen:alpha={alpha}"),
            Family::Cayley => write!(f, "cayley"),
            Family::GenBinomialTree { a, b } => write!(f, "tree:a={a},b={b}"),
            Family::Polylog { alpha } => write!(f, "polylog:alpha={alpha}"),
            Family::MittagLeffler { alpha } => write!(f, "mittagleffler:alpha={alpha}"),
            Family::BellExp => write!(f, "bell"),
            Family::Linear => write!(f, "linear"),
            Family::NewEngenLike { alpha } => write!(f, "newengen:alpha={alpha}"),
            Family::BinaryTree => write!(f, "binarytree"),
            Family::Custom { weights } => write!(f, "custom[{}]", weights.len()),
        }
    }
}
