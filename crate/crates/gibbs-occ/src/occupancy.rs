//! Exact finite-`n` occupancy laws.
//!
//! With `n` boxes, `k` balls and weights `φ•` at `θ > 0`, the occupancy vector has law
//!
//! ```text
//! P(K = (k₁,…,k_n)) = k!/(k₁!⋯k_n!) · Π σ_{k_m}(θ) / σ_k(nθ).
//! ```
//!
//! [`Occupancy`] caches the σ-tables this needs and derives the component and
//! partial-sum marginals, the law of the number `P_{n,k}` of occupied boxes, the
//! frequency-of-frequencies law and the factorial moments. [`enumerate_oracle`] is an
//! independent brute-force evaluation used as ground truth by the tests.

use crate::bellpoly::{BellTriangle, SigmaTable, StirlingTable, DEFAULT_EXACT_CAP};
use crate::combinat::{count_compositions, positive_compositions, Compositions};
use crate::error::{Error, Result};
use crate::scalar::{Field, Scalar};
use crate::weights::WeightSequence;

/// Largest number of configurations [`enumerate_oracle`] will visit.
pub const ORACLE_CAP: u128 = 1_000_000;

/// A realized occupancy vector with its derived statistics.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OccupancySample {
    pub counts: Vec<u64>,
}

impl OccupancySample {
    pub fn new(counts: Vec<u64>) -> Self {
        OccupancySample { counts }
    }

    /// Number of boxes `n`.
    pub fn n(&self) -> usize {
        self.counts.len()
    }

    /// Sample size `k = Σ k_m`.
    pub fn k(&self) -> u64 {
        self.counts.iter().sum()
    }

    /// Number of occupied boxes `P`.
    pub fn p(&self) -> usize {
        self.counts.iter().filter(|&&c| c > 0).count()
    }

    /// `(a₁, …, a_k)` with `a_i = #{m : k_m = i}`.
    pub fn aff(&self) -> Vec<u64> {
        crate::combinat::aff_of(&self.counts, self.k() as usize)
    }
}

/// Finite-`n` model `(φ•, θ, n, k)` with cached σ-tables.
#[derive(Clone, Debug)]
pub struct Occupancy<S> {
    phi: Vec<S>,
    theta: S,
    n: u64,
    k: usize,
    sigma_one: SigmaTable<S>,
    sigma_all: SigmaTable<S>,
}

impl<S: Scalar> Occupancy<S> {
    pub fn new(w: &WeightSequence, theta: S, n: u64, k: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("the number of boxes n must be at least 1".into()));
        }
        if S::EXACT && k > DEFAULT_EXACT_CAP {
            return Err(Error::TooLarge(format!("exact mode is capped at k = {DEFAULT_EXACT_CAP}")));
        }
        let phi = w.phi_table::<S>(k)?;
        let sigma_one = SigmaTable::from_phi(&phi, theta.clone(), k)?;
        let sigma_all = SigmaTable::from_phi(&phi, theta.clone() * S::from_u64(n), k)?;
        Ok(Occupancy { phi, theta, n, k, sigma_one, sigma_all })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn theta(&self) -> &S {
        &self.theta
    }

    /// `σ_j(θ)` for `j ≤ k`.
    pub fn sigma_one(&self) -> &SigmaTable<S> {
        &self.sigma_one
    }

    /// `σ_j(nθ)` for `j ≤ k`.
    pub fn sigma_all(&self) -> &SigmaTable<S> {
        &self.sigma_all
    }

    /// `σ_j(mθ)` for `j ≤ k`, including the degenerate `m = 0` (`σ_j(0) = δ_{j0}`).
    pub fn sigma_scaled(&self, m: u64) -> SigmaTable<S> {
        if m == 1 {
            self.sigma_one.clone()
        } else if m == self.n {
            self.sigma_all.clone()
        } else {
            SigmaTable::from_phi_unchecked(&self.phi, self.theta.clone() * S::from_u64(m), self.k)
        }
    }

    fn norm(&self) -> S {
        self.sigma_all.get(self.k).clone()
    }

    /// Probability of the occupancy vector `counts` (missing trailing boxes are empty).
    pub fn joint_pmf(&self, counts: &[u64]) -> Result<S> {
        if counts.len() as u64 > self.n {
            return Err(Error::Contract(format!("{} counts given for {} boxes", counts.len(), self.n)));
        }
        let total: u64 = counts.iter().sum();
        if total != self.k as u64 {
            return Err(Error::Contract(format!("counts sum to {total}, expected k = {}", self.k)));
        }
        let mut num = S::factorial(self.k as u64);
        for &c in counts {
            num = num * self.sigma_one.get(c as usize).clone() / S::factorial(c);
        }
        Ok(num / self.norm())
    }

    /// `P(K(1) = l)`, `l = 0..=k`.
    pub fn component_pmf(&self) -> Vec<S> {
        if self.n == 1 {
            return (0..=self.k).map(|l| if l == self.k { S::one() } else { S::zero() }).collect();
        }
        self.split_pmf(&self.sigma_one, &self.sigma_scaled(self.n - 1))
    }

    /// Law of the number of balls in the first `m` boxes, `1 ≤ m < n`.
    pub fn partialsum_pmf(&self, m: u64) -> Result<Vec<S>> {
        if m == 0 || m >= self.n {
            return Err(Error::Domain(format!("partial sums need 1 ≤ m < n = {}, got m = {m}", self.n)));
        }
        Ok(self.split_pmf(&self.sigma_scaled(m), &self.sigma_scaled(self.n - m)))
    }

    fn split_pmf(&self, left: &SigmaTable<S>, right: &SigmaTable<S>) -> Vec<S> {
        let k = self.k;
        let norm = self.norm();
        (0..=k)
            .map(|l| {
                S::binomial(k as u64, l as u64) * left.get(l).clone() * right.get(k - l).clone() / norm.clone()
            })
            .collect()
    }

    /// `B_{j,p}(σ•(θ))` for `j, p ≤ k`.
    pub fn sigma_bell(&self) -> BellTriangle<S> {
        let bt = BellTriangle::of_phi_weights(&self.phi, self.k);
        BellTriangle::of_sigma(&self.sigma_one, &StirlingTable::new(self.k), &bt)
            .expect("tables share theta and order")
    }

    /// `P(P_{n,k} = p)` indexed by `p = 0..=min(n,k)`; the `p = 0` entry is zero unless
    /// `k = 0`, in which case the law is a point mass at zero.
    pub fn pnk_pmf(&self) -> Vec<S> {
        if self.k == 0 {
            return vec![S::one()];
        }
        let p_max = (self.n.min(self.k as u64)) as usize;
        let bell = self.sigma_bell();
        let norm = self.norm();
        let mut out = Vec::with_capacity(p_max + 1);
        out.push(S::zero());
        let mut falling = S::one();
        for p in 1..=p_max {
            falling = falling * S::from_u64(self.n - p as u64 + 1);
            out.push(falling.clone() * bell.get(self.k, p) / norm.clone());
        }
        out
    }

    /// Mean and variance of `P_{n,k}` from the closed forms in
    /// `r₁ = σ_k((n−1)θ)/σ_k(nθ)` and `r₂ = σ_k((n−2)θ)/σ_k(nθ)`.
    pub fn pnk_mean_var(&self) -> (f64, f64) {
        if self.k == 0 {
            return (0.0, 0.0);
        }
        if self.n == 1 {
            return (1.0, 0.0);
        }
        let n = self.n as f64;
        let norm = self.norm();
        let r1 = (self.sigma_scaled(self.n - 1).get(self.k).clone() / norm.clone()).to_f64();
        let r2 = (self.sigma_scaled(self.n - 2).get(self.k).clone() / norm).to_f64();
        let mean = n * (1.0 - r1);
        let var = n * r1 + n * (n - 1.0) * r2 - n * n * r1 * r1;
        (mean, var.max(0.0))
    }

    /// Joint probability of the frequency-of-frequencies vector `aff` (entry `i−1` holds
    /// `a_i`) and `P_{n,k} = Σ a_i`. Zero when more than `n` boxes would be occupied.
    pub fn aff_pmf(&self, aff: &[u64]) -> Result<S> {
        let (p, kappa) = aff_totals(aff);
        if kappa != self.k as u64 {
            return Err(Error::Contract(format!("Σ i·a_i = {kappa}, expected k = {}", self.k)));
        }
        if p > self.n {
            return Ok(S::zero());
        }
        let mut v = S::falling(self.n, p) * S::factorial(self.k as u64) / self.norm();
        for (idx, &a) in aff.iter().enumerate() {
            if a == 0 {
                continue;
            }
            let i = idx + 1;
            let base = self.sigma_one.get(i).clone() / S::factorial(i as u64);
            v = v * base.powu(a) / S::factorial(a);
        }
        Ok(v)
    }

    /// `E[Π_i {A(i)}_{r_i}]` (entry `i−1` of `r` holds `r_i`). Exactly zero when the
    /// falling factorials vanish (`Σ r_i > n` or `Σ i·r_i > k`).
    pub fn aff_factorial_moments(&self, r: &[u64]) -> Result<S> {
        let (r_total, kappa) = aff_totals(r);
        if r_total > self.n || kappa > self.k as u64 {
            return Ok(S::zero());
        }
        let rest = self.sigma_scaled(self.n - r_total);
        let mut v = S::falling(self.n, r_total) * S::falling(self.k as u64, kappa)
            * rest.get(self.k - kappa as usize).clone()
            / self.norm();
        for (idx, &ri) in r.iter().enumerate() {
            if ri == 0 {
                continue;
            }
            let i = idx + 1;
            v = v * (self.sigma_one.get(i).clone() / S::factorial(i as u64)).powu(ri);
        }
        Ok(v)
    }

    /// `E[Π_m {K(m)}_{l_m}]` for `l` of length at most `n` (missing boxes have `l_m = 0`).
    ///
    /// Evaluated as `k!/σ_k(nθ)` times the coefficient of `x^{k−l}` in
    /// `Π_{m: l_m>0} (Σ_j σ_{l_m+j}(θ) x^j/j!) · Z_{(n−c)θ}(x)`, `c = #{m: l_m > 0}`.
    pub fn k_factorial_moments(&self, l: &[u64]) -> Result<S> {
        if l.len() as u64 > self.n {
            return Err(Error::Contract(format!("{} entries given for {} boxes", l.len(), self.n)));
        }
        let l_total: u64 = l.iter().sum();
        if l_total > self.k as u64 {
            return Ok(S::zero());
        }
        let d = self.k - l_total as usize;
        let inv_fact: Vec<S> = (0..=self.k).map(|j| S::one() / S::factorial(j as u64)).collect();
        let mut poly: Vec<S> = (0..=d).map(|j| if j == 0 { S::one() } else { S::zero() }).collect();
        let mut occupied = 0u64;
        for &lm in l.iter().filter(|&&x| x > 0) {
            occupied += 1;
            let g: Vec<S> = (0..=d)
                .map(|j| self.sigma_one.get(lm as usize + j).clone() * inv_fact[j].clone())
                .collect();
            poly = truncated_product(&poly, &g, d);
        }
        let rest = self.sigma_scaled(self.n - occupied);
        let z: Vec<S> = (0..=d).map(|j| rest.get(j).clone() * inv_fact[j].clone()).collect();
        let coeff = truncated_product(&poly, &z, d)[d].clone();
        Ok(S::factorial(self.k as u64) * coeff / self.norm())
    }
}

impl<S: Field> Occupancy<S> {
    /// `P(P_{n,k} = p) = C(n,p) Σ_{q=1}^{p} (−1)^{p−q} C(p,q) σ_k(qθ)/σ_k(nθ)`.
    /// Suffers catastrophic cancellation in floating point; meant for exact mode.
    pub fn pnk_pmf_alternating(&self) -> Vec<S> {
        if self.k == 0 {
            return vec![S::one()];
        }
        let p_max = (self.n.min(self.k as u64)) as usize;
        let norm = self.norm();
        let sig: Vec<S> = (1..=p_max as u64).map(|q| self.sigma_scaled(q).get(self.k).clone()).collect();
        let mut out = vec![S::zero()];
        for p in 1..=p_max {
            let mut acc = S::zero();
            for q in 1..=p {
                let term = S::binomial(p as u64, q as u64) * sig[q - 1].clone();
                acc = if (p - q) % 2 == 0 { acc + term } else { acc - term };
            }
            out.push(S::binomial(self.n, p as u64) * acc / norm.clone());
        }
        out
    }

    /// `E(u^{P_{n,k}}) = Σ_{p=0}^{n} C(n,p) u^{n−p} (1−u)^p σ_k((n−p)θ)/σ_k(nθ)`; the
    /// `p = n` term carries `σ_k(0) = δ_{k0}` and only matters for `k = 0`.
    pub fn pnk_pgf(&self, u: &S) -> S {
        let one_minus = S::one() - u.clone();
        let norm = self.norm();
        let mut acc = S::zero();
        for p in 0..=self.n {
            let sig = self.sigma_scaled(self.n - p).get(self.k).clone();
            acc = acc
                + S::binomial(self.n, p) * u.powu(self.n - p) * one_minus.powu(p) * sig / norm.clone();
        }
        acc
    }
}

fn aff_totals(aff: &[u64]) -> (u64, u64) {
    let p = aff.iter().sum();
    let kappa = aff.iter().enumerate().map(|(i, &a)| (i as u64 + 1) * a).sum();
    (p, kappa)
}

fn truncated_product<S: Scalar>(a: &[S], b: &[S], d: usize) -> Vec<S> {
    (0..=d)
        .map(|j| S::sum_of((0..=j).map(|i| a[i].clone() * b[j - i].clone())))
        .collect()
}

/// Brute-force joint law over all `C(k+n−1, n−1)` occupancy vectors, in the order of
/// [`Compositions`].
///
/// Deliberately shares no code with [`Occupancy`]: `σ_j(θ)` comes from the defining sum
/// over compositions `σ_j(θ) = Σ_l θ^l (j!/l!) Σ_{m₁+…+m_l=j} Π φ_{m_i}/m_i!`, and the
/// probabilities are normalized by their own total rather than by `σ_k(nθ)`.
pub fn enumerate_oracle<S: Scalar>(w: &WeightSequence, theta: S, n: usize, k: usize) -> Result<Vec<(Vec<u64>, S)>> {
    let count = count_compositions(k as u64, n).unwrap_or(u128::MAX);
    if count > ORACLE_CAP {
        return Err(Error::TooLarge(format!(
            "{count} configurations exceed the enumeration cap {ORACLE_CAP}"
        )));
    }
    if n == 0 {
        return Err(Error::Domain("n must be at least 1".into()));
    }
    let mut sigma = vec![S::one()];
    for j in 1..=k {
        let mut total = S::zero();
        let mut theta_pow = S::one();
        for l in 1..=j {
            theta_pow = theta_pow * theta.clone();
            let mut inner = S::zero();
            for comp in positive_compositions(j as u64, l) {
                let mut term = S::one();
                for &m in &comp {
                    term = term * w.phi::<S>(m as usize)? / S::factorial(m);
                }
                inner = inner + term;
            }
            total = total + theta_pow.clone() * S::factorial(j as u64) / S::factorial(l as u64) * inner;
        }
        sigma.push(total);
    }
    let mut weights = Vec::new();
    for comp in Compositions::new(k as u64, n) {
        let mut wt = S::factorial(k as u64);
        for &c in &comp {
            wt = wt * sigma[c as usize].clone() / S::factorial(c);
        }
        weights.push((comp, wt));
    }
    let total = S::sum_of(weights.iter().map(|(_, x)| x.clone()));
    Ok(weights.into_iter().map(|(c, x)| (c, x / total.clone())).collect())
}
