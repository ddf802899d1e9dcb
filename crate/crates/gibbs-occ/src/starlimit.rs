//! The infinitely-many-species limit.
//!
//! Letting `n → ∞` and `θ → 0` with `nθ → γ > 0`, the finite-`n` laws converge to laws
//! that depend on `γ` and the weights only:
//!
//! ```text
//! P*(species counts k₁,…,k_p; P_k = p) = (k!/p!) (γ^p/σ_k(γ)) Π φ_{k_q}/k_q!
//! P*(P_k = p)                          = γ^p B_{k,p}(φ•) / σ_k(γ)
//! ```
//!
//! These are implemented directly from the closed forms; the finite-`n` convergence is
//! only exercised by tests.

use crate::bellpoly::{BellTriangle, SigmaTable, DEFAULT_EXACT_CAP};
use crate::error::{Error, Result};
use crate::scalar::Scalar;
use crate::weights::WeightSequence;

/// Star-limit model at diversity `γ`, with tables up to sample size `K`.
#[derive(Clone, Debug)]
pub struct StarModel<S> {
    phi: Vec<S>,
    gamma: S,
    sigma: SigmaTable<S>,
    bell: BellTriangle<S>,
}

impl<S: Scalar> StarModel<S> {
    pub fn new(w: &WeightSequence, gamma: S, k_max: usize) -> Result<Self> {
        if !(gamma > S::zero()) {
            return Err(Error::Domain(format!("gamma must be positive, got {gamma:?}")));
        }
        if S::EXACT && k_max > DEFAULT_EXACT_CAP {
            return Err(Error::TooLarge(format!("exact mode is capped at k = {DEFAULT_EXACT_CAP}")));
        }
        let phi = w.phi_table::<S>(k_max)?;
        let sigma = SigmaTable::from_phi(&phi, gamma.clone(), k_max)?;
        let bell = BellTriangle::of_phi_weights(&phi, k_max);
        Ok(StarModel { phi, gamma, sigma, bell })
    }

    pub fn gamma(&self) -> &S {
        &self.gamma
    }

    pub fn k_max(&self) -> usize {
        self.sigma.k_max()
    }

    /// `σ_j(γ)`, `j ≤ K`.
    pub fn sigma(&self) -> &SigmaTable<S> {
        &self.sigma
    }

    /// `B_{j,p}(φ•)`, `j ≤ K`.
    pub fn bell(&self) -> &BellTriangle<S> {
        &self.bell
    }

    fn check_k(&self, k: usize) -> Result<()> {
        if k > self.k_max() {
            return Err(Error::Contract(format!("sample size {k} exceeds the model size {}", self.k_max())));
        }
        Ok(())
    }

    /// Probability that the `p = counts.len()` species seen have (unordered, labelled in
    /// order of appearance) counts `counts`; every count must be positive.
    pub fn star_joint_pmf(&self, counts: &[u64]) -> Result<S> {
        if counts.contains(&0) {
            return Err(Error::Contract("species counts in the star limit must be positive".into()));
        }
        let k: u64 = counts.iter().sum();
        self.check_k(k as usize)?;
        let p = counts.len() as u64;
        let mut v = S::factorial(k) / S::factorial(p) * self.gamma.powu(p) / self.sigma.get(k as usize).clone();
        for &c in counts {
            v = v * self.phi[c as usize].clone() / S::factorial(c);
        }
        Ok(v)
    }

    /// `P*(P_k = p)` indexed by `p = 0..=k` (zero at `p = 0` unless `k = 0`).
    pub fn star_pnk_pmf(&self, k: usize) -> Result<Vec<S>> {
        self.check_k(k)?;
        if k == 0 {
            return Ok(vec![S::one()]);
        }
        let norm = self.sigma.get(k).clone();
        let mut out = vec![S::zero()];
        let mut pow = S::one();
        for p in 1..=k {
            pow = pow * self.gamma.clone();
            out.push(pow.clone() * self.bell.get(k, p) / norm.clone());
        }
        Ok(out)
    }

    /// `E*(P_k) = γ σ′_k(γ)/σ_k(γ)`.
    pub fn star_pnk_mean(&self, k: usize) -> Result<S> {
        self.check_k(k)?;
        Ok(self.gamma.clone() * self.bell.sigma_prime(k, &self.gamma) / self.sigma.get(k).clone())
    }

    /// Probability of the frequency-of-frequencies vector `aff` (entry `i−1` holds `a_i`),
    /// with `k = Σ i·a_i` and `P_k = Σ a_i`.
    pub fn star_aff_pmf(&self, aff: &[u64]) -> Result<S> {
        let p: u64 = aff.iter().sum();
        let k: u64 = aff.iter().enumerate().map(|(i, &a)| (i as u64 + 1) * a).sum();
        self.check_k(k as usize)?;
        let mut v = self.gamma.powu(p) * S::factorial(k) / self.sigma.get(k as usize).clone();
        for (idx, &a) in aff.iter().enumerate() {
            if a > 0 {
                let i = idx + 1;
                v = v * (self.phi[i].clone() / S::factorial(i as u64)).powu(a) / S::factorial(a);
            }
        }
        Ok(v)
    }

    /// `E*[Π_i {A_k(i)}_{r_i}] = γ^r {k}_κ σ_{k−κ}(γ)/σ_k(γ) Π (φ_i/i!)^{r_i}`; exactly
    /// zero when `κ = Σ i·r_i > k`.
    pub fn star_aff_moments(&self, k: usize, r: &[u64]) -> Result<S> {
        self.check_k(k)?;
        let r_total: u64 = r.iter().sum();
        let kappa: u64 = r.iter().enumerate().map(|(i, &x)| (i as u64 + 1) * x).sum();
        if kappa > k as u64 {
            return Ok(S::zero());
        }
        let mut v = self.gamma.powu(r_total) * S::falling(k as u64, kappa) * self.sigma.get(k - kappa as usize).clone()
            / self.sigma.get(k).clone();
        for (idx, &ri) in r.iter().enumerate() {
            if ri > 0 {
                let i = idx + 1;
                v = v * (self.phi[i].clone() / S::factorial(i as u64)).powu(ri);
            }
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Param;
    use num_rational::BigRational;

    type Q = BigRational;

    fn q(n: i64, d: i64) -> Q {
        Q::new(n.into(), d.into())
    }

    #[test]
    fn small_cases() {
        let w = WeightSequence::cayley();
        let g = q(3, 2);
        let m = StarModel::new(&w, g.clone(), 6).unwrap();
        let s2 = m.sigma().get(2).clone();
        // σ₂(γ) = γφ₂ + γ²φ₁².
        assert_eq!(s2, g.clone() * q(2, 1) + g.clone() * g.clone());
        assert_eq!(m.star_aff_pmf(&[2, 0]).unwrap(), g.clone() * g.clone() / s2.clone());
        assert_eq!(m.star_aff_pmf(&[0, 1]).unwrap(), g.clone() * q(2, 1) / s2);
        assert_eq!(m.star_pnk_pmf(1).unwrap(), vec![q(0, 1), q(1, 1)]);
        let pmf = m.star_pnk_pmf(6).unwrap();
        assert_eq!(pmf[6], g.powu(6) / m.sigma().get(6).clone());
        assert_eq!(Q::sum_of(pmf), q(1, 1));
        assert_eq!(m.star_joint_pmf(&[6]).unwrap(), g.clone() * q(7776, 1) / m.sigma().get(6).clone());
        assert_eq!(m.star_aff_moments(6, &[]).unwrap(), q(1, 1));
        assert_eq!(m.star_aff_moments(6, &[0, 0, 0, 0, 0, 1]).unwrap(), m.star_joint_pmf(&[6]).unwrap());
        assert_eq!(m.star_aff_moments(3, &[0, 0, 0, 1]).unwrap(), q(0, 1));
    }

    #[test]
    fn errors() {
        let w = WeightSequence::log_series();
        assert!(StarModel::new(&w, q(0, 1), 4).is_err());
        let m = StarModel::new(&w, q(1, 1), 4).unwrap();
        assert!(matches!(m.star_joint_pmf(&[2, 0]), Err(Error::Contract(_))));
        assert!(m.star_pnk_pmf(5).is_err());
    }

    #[test]
    fn watterson_form() {
        let g = q(5, 3);
        let k = 7u64;
        let m = StarModel::new(&WeightSequence::log_series(), g.clone(), 7).unwrap();
        for i in 1..=k {
            let mut r = vec![0; i as usize];
            r[i as usize - 1] = 1;
            let rising = |x: &Q, n: u64| (0..n).fold(q(1, 1), |acc, j| acc * (x.clone() + Q::from_u64(j)));
            let want = g.clone() / Q::from_u64(i) * Q::falling(k, i) * rising(&g, k - i) / rising(&g, k);
            assert_eq!(m.star_aff_moments(k as usize, &r).unwrap(), want);
        }
    }

    #[test]
    fn mean_matches_pmf() {
        let w = WeightSequence::engen(Param::ratio(1, 3)).unwrap();
        let m = StarModel::new(&w, q(2, 1), 8).unwrap();
        let pmf = m.star_pnk_pmf(8).unwrap();
        let mean = Q::sum_of(pmf.iter().enumerate().map(|(p, x)| Q::from_u64(p as u64) * x.clone()));
        assert_eq!(m.star_pnk_mean(8).unwrap(), mean);
    }
}
