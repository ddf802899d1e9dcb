//! Estimators of the number of species `n` (finite model, `θ` known) and of the
//! diversity `γ` (star limit) from the data `(k, P)`.
//!
//! * [`mle_n`]: integer maximum-likelihood `n̂` from a scan of the likelihood ratio
//!   `L(n)/L(n−1) = n/(n−P) · σ_k((n−1)θ)/σ_k(nθ)`, reporting the supremum of the set
//!   where the ratio exceeds one.
//! * [`approx_mle_n`]: real root of `n(1 − σ_k((n−1)θ)/σ_k(nθ)) = P`.
//! * [`alt_n`]: `ñ = P + B_{k,P−1}(σ•(θ))/B_{k,P}(σ•(θ))`, unbiased when `k ≥ n`.
//! * [`mle_gamma`]: root of `γσ′_k(γ)/σ_k(γ) = P`.
//! * [`alt_gamma`]: `γ̃ = B_{k,P−1}(φ•)/B_{k,P}(φ•)` with closed forms where known.
//!
//! Boundary data (`P = 1`, `P = k`) yield flagged sentinel estimates instead of errors.

use num_rational::BigRational;
use num_traits::One;
use statrs::function::gamma::ln_gamma;

use crate::bellpoly::BellTriangle;
use crate::error::{Error, Result};
use crate::occupancy::Occupancy;
use crate::scalar::{Field, LogReal, Param, Scalar};
use crate::special::bisect;
use crate::starlimit::StarModel;
use crate::weights::{Family, WeightSequence};

type L = LogReal<f64>;

/// Hard upper limit of the `n̂` search.
pub const MLE_N_CAP: u64 = 10_000_000;
/// Length of the initial linear scan above `P`.
const LINEAR_SCAN: u64 = 10_000;
/// Upper limit of the bracket for [`approx_mle_n`].
pub const APPROX_N_CAP: f64 = 1e9;
/// Relative tolerance under which two adjacent likelihoods count as tied.
const TIE_TOL: f64 = 1e-9;

/// Observed data: sample size `k` and number of distinct species `P`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SampleSummary {
    pub k: u64,
    pub p: u64,
}

impl SampleSummary {
    pub fn new(k: u64, p: u64) -> Result<Self> {
        if p == 0 || p > k {
            return Err(Error::Contract(format!("need 1 ≤ P ≤ k, got k = {k}, P = {p}")));
        }
        Ok(SampleSummary { k, p })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    Mle,
    Ratio,
    ClosedForm,
}

impl Method {
    pub fn tag(self) -> &'static str {
        match self {
            Method::Mle => "MLE",
            Method::Ratio => "Ratio",
            Method::ClosedForm => "ClosedForm",
        }
    }
}

/// Solver bookkeeping attached to an [`Estimate`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Diagnostics {
    pub iterations: u64,
    pub bracket: Option<(f64, f64)>,
    pub log_likelihood: Option<f64>,
    /// All maximizers of an integer likelihood (two when adjacent values tie).
    pub maximizers: Vec<u64>,
    /// Whether the pre-scan saw a monotone estimating function.
    pub monotone: Option<bool>,
}

/// An estimate with its provenance. `value = None` encodes `+∞`.
#[derive(Clone, Debug, PartialEq)]
pub struct Estimate {
    pub value: Option<f64>,
    pub integer_valued: bool,
    pub method: Method,
    pub residual: Option<f64>,
    pub boundary: Option<String>,
    pub diagnostics: Diagnostics,
}

impl Estimate {
    fn plain(value: f64, method: Method) -> Self {
        Estimate {
            value: Some(value),
            integer_valued: false,
            method,
            residual: None,
            boundary: None,
            diagnostics: Diagnostics::default(),
        }
    }

    fn sentinel(value: Option<f64>, method: Method, boundary: &str) -> Self {
        Estimate { value, boundary: Some(boundary.to_string()), ..Estimate::plain(0.0, method) }
    }

    pub fn boundary_flag(&self) -> bool {
        self.boundary.is_some()
    }

    /// JSON object `{value, method, residual, boundary_flag, boundary, diagnostics}`;
    /// integer estimates serialize as JSON integers and `+∞` as `null`.
    pub fn to_json(&self) -> serde_json::Value {
        use serde_json::{json, Value};
        let value = match self.value {
            None => Value::Null,
            Some(v) if self.integer_valued => json!(v as u64),
            Some(v) => json!(v),
        };
        let d = &self.diagnostics;
        let mut diag = serde_json::Map::new();
        diag.insert("iterations".into(), json!(d.iterations));
        if let Some((a, b)) = d.bracket {
            diag.insert("bracket".into(), json!([a, b]));
        }
        if let Some(ll) = d.log_likelihood {
            diag.insert("log_likelihood".into(), json!(ll));
        }
        if !d.maximizers.is_empty() {
            diag.insert("maximizers".into(), json!(d.maximizers));
        }
        if let Some(m) = d.monotone {
            diag.insert("monotone".into(), json!(m));
        }
        json!({
            "value": value,
            "method": self.method.tag(),
            "residual": self.residual,
            "boundary_flag": self.boundary_flag(),
            "boundary": self.boundary,
            "diagnostics": Value::Object(diag),
        })
    }
}

fn check_theta(theta: f64) -> Result<()> {
    if !(theta > 0.0 && theta.is_finite()) {
        return Err(Error::Domain(format!("theta must be positive and finite, got {theta}")));
    }
    Ok(())
}

fn log_sum_exp(terms: impl Iterator<Item = f64>) -> f64 {
    let v: Vec<f64> = terms.filter(|x| *x > f64::NEG_INFINITY).collect();
    let m = v.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + v.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

/// `ln B_{k,l}(φ•)`, `l = 0..=k`, so that `σ_k(x) = Σ_l B_{k,l} x^l`.
fn ln_bell_row(w: &WeightSequence, k: u64) -> Result<Vec<f64>> {
    let bt = BellTriangle::<L>::of_phi(w, k as usize)?;
    Ok(bt.row(k as usize).iter().map(|b| b.ln_value()).collect())
}

/// Log-space evaluation of the finite-`n` likelihood ratio, cancellation-free.
struct NRatio {
    ln_b: Vec<f64>,
    ln_theta: f64,
    p: f64,
}

impl NRatio {
    fn ln_sigma(&self, x_ln: f64) -> f64 {
        log_sum_exp(self.ln_b.iter().enumerate().map(|(l, b)| b + l as f64 * x_ln))
    }

    /// `ln(1 − σ_k((n−1)θ)/σ_k(nθ))`, using `n^l − (n−1)^l = −n^l·expm1(l·ln(1−1/n))`.
    fn ln_one_minus_q(&self, n: f64) -> f64 {
        let ln_n = n.ln();
        let step = (-1.0 / n).ln_1p();
        let diff = log_sum_exp(self.ln_b.iter().enumerate().skip(1).map(|(l, b)| {
            let l = l as f64;
            b + l * (self.ln_theta + ln_n) + (-(l * step).exp_m1()).ln()
        }));
        diff - self.ln_sigma(self.ln_theta + ln_n)
    }

    /// `ln r(n)` with `r(n) = L(n)/L(n−1)`, for `n > P`.
    fn ln_ratio(&self, n: f64) -> f64 {
        let one_minus_q = self.ln_one_minus_q(n).exp();
        (self.p / (n - self.p)).ln_1p() + (-one_minus_q).ln_1p()
    }

    /// Whether `L(n) > L(n−1)` beyond the tie tolerance; the tolerance scales with the
    /// size of the two cancelling terms of `ln r(n)`.
    fn increasing(&self, n: f64) -> (bool, bool) {
        let lr = self.ln_ratio(n);
        let tol = TIE_TOL * self.p / (n - self.p);
        (lr > tol, lr.abs() <= tol)
    }
}

/// `ln P(P_{n,k} = P)` at integer `n`, via `{n}_P B_{k,P}(σ•(θ))/σ_k(nθ)`.
fn ln_likelihood_n(w: &WeightSequence, theta: f64, s: SampleSummary, n: u64, ratio: &NRatio) -> Result<f64> {
    let bt = BellTriangle::<L>::of_sigma_from(w, L::new(theta), s.k as usize)?;
    let ln_falling = ln_gamma(n as f64 + 1.0) - ln_gamma((n - s.p) as f64 + 1.0);
    Ok(ln_falling + bt.get(s.k as usize, s.p as usize).ln_value() - ratio.ln_sigma(theta.ln() + (n as f64).ln()))
}

/// Integer maximum-likelihood estimate of `n`.
///
/// Scans `n = P+1, P+2, …` for the first `n` with `L(n) ≤ L(n−1)`, then continues with a
/// doubling probe and integer bisection up to [`MLE_N_CAP`]. The estimate is the
/// supremum of `{n : L(n)/L(n−1) > 1}`; when two adjacent values tie, the smaller is
/// reported and both appear in `diagnostics.maximizers`. If the ratio stays above one up
/// to the cap, the estimate is `+∞` (flagged `P=k` or `unbounded`).
pub fn mle_n(w: &WeightSequence, theta: f64, s: SampleSummary) -> Result<Estimate> {
    check_theta(theta)?;
    let ratio = NRatio { ln_b: ln_bell_row(w, s.k)?, ln_theta: theta.ln(), p: s.p as f64 };
    let mut iterations = 0u64;
    let mut crossing = None;
    for n in s.p + 1..=s.p + LINEAR_SCAN {
        iterations += 1;
        let (up, tie) = ratio.increasing(n as f64);
        if !up {
            crossing = Some((n, tie));
            break;
        }
    }
    if crossing.is_none() {
        let mut lo = s.p + LINEAR_SCAN;
        let mut hi = lo;
        loop {
            if hi >= MLE_N_CAP {
                let flag = if s.p == s.k { "P=k" } else { "unbounded" };
                let mut e = Estimate::sentinel(None, Method::Mle, flag);
                e.integer_valued = true;
                e.diagnostics.iterations = iterations;
                e.diagnostics.bracket = Some((lo as f64, MLE_N_CAP as f64));
                return Ok(e);
            }
            hi = (hi * 2).min(MLE_N_CAP);
            iterations += 1;
            if !ratio.increasing(hi as f64).0 {
                break;
            }
            lo = hi;
        }
        // Invariant: ratio > 1 at lo, ≤ 1 at hi.
        while hi - lo > 1 {
            iterations += 1;
            let mid = lo + (hi - lo) / 2;
            if ratio.increasing(mid as f64).0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        crossing = Some((hi, ratio.increasing(hi as f64).1));
    }
    let (n_cross, tie) = crossing.expect("crossing found");
    let n_hat = n_cross - 1;
    let mut e = Estimate::plain(n_hat as f64, Method::Mle);
    e.integer_valued = true;
    e.diagnostics.iterations = iterations;
    e.diagnostics.bracket = Some((n_hat as f64, n_cross as f64));
    e.diagnostics.maximizers = if tie { vec![n_hat, n_cross] } else { vec![n_hat] };
    e.diagnostics.log_likelihood = Some(ln_likelihood_n(w, theta, s, n_hat, &ratio)?);
    Ok(e)
}

/// Real solution of `n(1 − σ_k((n−1)θ)/σ_k(nθ)) = P` bracketed between `P` and a
/// doubling upper bound (at most [`APPROX_N_CAP`]).
pub fn approx_mle_n(w: &WeightSequence, theta: f64, s: SampleSummary) -> Result<Estimate> {
    check_theta(theta)?;
    if s.p == s.k {
        return Ok(Estimate::sentinel(None, Method::Mle, "P=k"));
    }
    let ratio = NRatio { ln_b: ln_bell_row(w, s.k)?, ln_theta: theta.ln(), p: s.p as f64 };
    let p = s.p as f64;
    // E[P_{n,k}] − P, with E[P_{n,k}] = n(1 − q(n)).
    let g = |n: f64| n * ratio.ln_one_minus_q(n).exp() - p;
    let lo = p;
    if g(lo) >= 0.0 {
        let mut e = Estimate::plain(lo, Method::Mle);
        e.residual = Some(g(lo));
        e.diagnostics.bracket = Some((lo, lo));
        return Ok(e);
    }
    let mut hi = 2.0 * lo.max(1.0);
    let mut iterations = 0;
    while g(hi) < 0.0 {
        iterations += 1;
        if hi >= APPROX_N_CAP {
            return Err(Error::NoSolution(format!("E[P_n,k] stays below P = {} up to n = {APPROX_N_CAP:e}", s.p)));
        }
        hi = (hi * 2.0).min(APPROX_N_CAP);
    }
    let root = bisect(g, lo, hi, 0.0);
    let mut e = Estimate::plain(root, Method::Mle);
    e.residual = Some(g(root));
    e.diagnostics.iterations = iterations;
    e.diagnostics.bracket = Some((lo, hi));
    if e.residual.is_none_or(|r| r.abs() >= 1e-8) {
        return Err(Error::Diagnostic(format!("approx_mle_n residual {:?} above 1e-8", e.residual)));
    }
    Ok(e)
}

/// `ñ(P) = P + B_{k,P−1}(σ•(θ))/B_{k,P}(σ•(θ))` for `P = 0..=k` (entry 0 unused, zero).
pub fn alt_n_table<S: Scalar>(w: &WeightSequence, theta: S, k: u64) -> Result<Vec<S>> {
    let bt = BellTriangle::of_sigma_from(w, theta, k as usize)?;
    let mut out = vec![S::zero()];
    for p in 1..=k as usize {
        let den = bt.get(k as usize, p);
        if !(den > S::zero()) {
            return Err(Error::Domain(format!("B_{{{k},{p}}}(σ) vanishes; ñ undefined")));
        }
        out.push(S::from_u64(p as u64) + bt.get(k as usize, p - 1) / den);
    }
    Ok(out)
}

/// `ñ` at the observed `P` in the scalar of choice.
pub fn alt_n_value<S: Scalar>(w: &WeightSequence, theta: S, s: SampleSummary) -> Result<S> {
    Ok(alt_n_table(w, theta, s.k)?.swap_remove(s.p as usize))
}

/// The alternative (ratio) estimator `ñ`, evaluated in log space.
pub fn alt_n(w: &WeightSequence, theta: f64, s: SampleSummary) -> Result<Estimate> {
    check_theta(theta)?;
    let v = alt_n_value(w, L::new(theta), s)?.value();
    let mut e = Estimate::plain(v, Method::Ratio);
    if s.p == 1 {
        e.boundary = Some("P=1".into());
    }
    Ok(e)
}

/// `E(ñ)` under the exact law of `P_{n,k}`.
pub fn expected_alt_n<S: Scalar>(w: &WeightSequence, theta: S, n: u64, k: u64) -> Result<S> {
    let table = alt_n_table(w, theta.clone(), k)?;
    let pmf = Occupancy::new(w, theta, n, k as usize)?.pnk_pmf();
    Ok(S::sum_of(pmf.into_iter().zip(table).skip(1).map(|(a, b)| a * b)))
}

/// `γσ′_k(γ)/σ_k(γ)` as a function of `ln γ`: the mean of `l` under weights `B_{k,l}γ^l`.
struct GammaMean {
    ln_b: Vec<f64>,
}

impl GammaMean {
    fn mean(&self, ln_gamma: f64) -> f64 {
        let terms: Vec<f64> = self.ln_b.iter().enumerate().map(|(l, b)| b + l as f64 * ln_gamma).collect();
        let m = terms.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let (mut num, mut den) = (0.0, 0.0);
        for (l, t) in terms.iter().enumerate() {
            if *t > f64::NEG_INFINITY {
                let wgt = (t - m).exp();
                num += l as f64 * wgt;
                den += wgt;
            }
        }
        num / den
    }

    fn ln_sigma(&self, ln_gamma: f64) -> f64 {
        log_sum_exp(self.ln_b.iter().enumerate().map(|(l, b)| b + l as f64 * ln_gamma))
    }
}

/// Maximum-likelihood diversity `γ̂`, the root of `γσ′_k(γ)/σ_k(γ) = P`.
///
/// `P = 1` gives the sentinel `0` and `P = k` the sentinel `+∞`, both flagged. The
/// bracket grows by doubling from `γ = 1` (at most 200 steps each way); a 64-point
/// log-grid pre-scan inside it picks the first crossing and records monotonicity.
pub fn mle_gamma(w: &WeightSequence, s: SampleSummary) -> Result<Estimate> {
    if s.p == 1 && s.k > 1 {
        return Ok(Estimate::sentinel(Some(0.0), Method::Mle, "P=1"));
    }
    if s.p == s.k {
        return Ok(Estimate::sentinel(None, Method::Mle, "P=k"));
    }
    let gm = GammaMean { ln_b: ln_bell_row(w, s.k)? };
    let target = s.p as f64;
    let f = |x: f64| gm.mean(x) - target;
    let ln2 = std::f64::consts::LN_2;
    let (mut lo, mut hi) = (0.0f64, 0.0f64);
    let mut iterations = 0u64;
    while f(lo) > 0.0 {
        iterations += 1;
        lo -= ln2;
        if iterations > 200 {
            return Err(Error::Diagnostic("mle_gamma: no lower bracket after 200 halvings".into()));
        }
    }
    while f(hi) < 0.0 {
        iterations += 1;
        hi += ln2;
        if iterations > 400 {
            return Err(Error::Diagnostic("mle_gamma: no upper bracket after 200 doublings".into()));
        }
    }
    const GRID: usize = 64;
    let grid: Vec<f64> = (0..=GRID).map(|i| lo + (hi - lo) * i as f64 / GRID as f64).collect();
    let vals: Vec<f64> = grid.iter().map(|&x| f(x)).collect();
    let monotone = vals.windows(2).all(|v| v[1] >= v[0] - 1e-12);
    let i = (0..GRID).find(|&i| vals[i] <= 0.0 && vals[i + 1] >= 0.0).unwrap_or(0);
    let (a, b) = (grid[i], grid[i + 1]);
    let root = bisect(f, a, b, 0.0);
    let residual = f(root);
    if residual.abs() >= 1e-8 {
        return Err(Error::Diagnostic(format!("mle_gamma residual {residual:e} above 1e-8")));
    }
    let gamma = root.exp();
    let mut e = Estimate::plain(gamma, Method::Mle);
    e.residual = Some(residual);
    e.diagnostics.iterations = iterations;
    e.diagnostics.bracket = Some((a.exp(), b.exp()));
    e.diagnostics.monotone = Some(monotone);
    e.diagnostics.log_likelihood = Some(target * root + gm.ln_b[s.p as usize] - gm.ln_sigma(root));
    Ok(e)
}

fn rising<S: Scalar>(x: S, m: u64) -> S {
    (0..m).fold(S::one(), |acc, j| acc * (x.clone() + S::from_u64(j)))
}

/// Closed form of `γ̃` when the family has one; `None` otherwise. Requires `P ≥ 2`.
fn alt_gamma_closed<S: Scalar>(w: &WeightSequence, k: u64, p: u64) -> Result<Option<S>> {
    let kp1 = S::from_u64(k - p + 1);
    let pm1 = S::from_u64(p - 1);
    Ok(match w.family() {
        Family::NegBinCompound { alpha } if alpha.as_integer() == Some(1) => {
            Some(S::from_u64(p) * pm1 / kp1)
        }
        Family::Cayley => Some(S::from_u64(k) * pm1 / kp1),
        Family::GenBinomialTree { a, b } => {
            // b((a−1)k + P) may need subtraction (and is positive for both sign regimes),
            // so it is formed as a parameter first.
            let factor = match (a.exact_value(), b.exact_value()) {
                (Some(a), Some(b)) => {
                    let kq = BigRational::from_integer(k.into());
                    Param::exact(b * ((a - BigRational::one()) * kq + BigRational::from_integer(p.into())))
                }
                _ => Param::float(b.value() * ((a.value() - 1.0) * k as f64 + p as f64)),
            };
            Some(S::from_param(&factor)? * pm1 / kp1)
        }
        Family::NewEngenLike { alpha } => {
            let alpha = S::from_param(alpha)?;
            let top = rising(alpha.clone() * pm1, k - p + 1);
            let bottom = rising(alpha * S::from_u64(p), k - p);
            Some(S::from_u64(p) / kp1 * top / bottom)
        }
        _ => None,
    })
}

/// `γ̃` from the Bell triangle of `φ•`, ignoring any closed form.
pub fn alt_gamma_generic<S: Scalar>(w: &WeightSequence, s: SampleSummary) -> Result<S> {
    let bt = BellTriangle::<S>::of_phi(w, s.k as usize)?;
    Ok(bt.get(s.k as usize, s.p as usize - 1) / bt.get(s.k as usize, s.p as usize))
}

/// `γ̃` in the scalar of choice; closed forms short-circuit the Bell triangle.
pub fn alt_gamma_value<S: Scalar>(w: &WeightSequence, s: SampleSummary) -> Result<S> {
    if s.p == 1 {
        return Ok(S::zero());
    }
    match alt_gamma_closed(w, s.k, s.p)? {
        Some(v) => Ok(v),
        None => alt_gamma_generic(w, s),
    }
}

/// The alternative diversity estimator `γ̃` (`P = 1` gives the flagged sentinel `0`).
pub fn alt_gamma(w: &WeightSequence, s: SampleSummary) -> Result<Estimate> {
    if s.p == 1 {
        return Ok(Estimate::sentinel(Some(0.0), Method::Ratio, "P=1"));
    }
    if let Some(v) = alt_gamma_closed::<f64>(w, s.k, s.p)? {
        return Ok(Estimate::plain(v, Method::ClosedForm));
    }
    let v: L = alt_gamma_generic(w, s)?;
    Ok(Estimate::plain(v.value(), Method::Ratio))
}

/// `E*(γ̃)` under the star-limit law of `P_k`.
pub fn expected_alt_gamma<S: Scalar>(w: &WeightSequence, gamma: S, k: u64) -> Result<S> {
    let model = StarModel::new(w, gamma, k as usize)?;
    let pmf = model.star_pnk_pmf(k as usize)?;
    let mut terms = Vec::new();
    for p in 2..=k {
        let est = alt_gamma_value::<S>(w, SampleSummary { k, p })?;
        terms.push(pmf[p as usize].clone() * est);
    }
    Ok(S::sum_of(terms))
}

/// `γ(1 − (φ₁γ)^k/σ_k(γ))`, the closed-form value of `E*(γ̃)`.
pub fn alt_gamma_bias_law<S: Field>(w: &WeightSequence, gamma: S, k: u64) -> Result<S> {
    let model = StarModel::new(w, gamma.clone(), k as usize)?;
    let phi1 = w.phi::<S>(1)?;
    let all_distinct = (phi1 * gamma.clone()).powu(k) / model.sigma().get(k as usize).clone();
    Ok(gamma * (S::one() - all_distinct))
}
