//! Partition polynomials `σ_k(θ)` and Bell coefficient triangles.
//!
//! `σ_k(θ) = k![x^k] e^{θφ(x)}` obeys `σ_{k+1}(θ) = θ Σ_l C(k,l) φ_{k−l+1} σ_l(θ)` and
//! expands as `σ_k(θ) = Σ_l B_{k,l}(φ•) θ^l`, where `B_{k,l}` are the partial Bell
//! polynomials of the weights. The triangle `B_{k,p}(σ•(θ))` built on the σ-sequence is
//! what the law of the number of distinct species needs; it is computed from the
//! all-non-negative route `Σ_l B_{k,l}(φ•) S_{l,p} θ^l` (Stirling numbers of the second
//! kind), which is stable in floating point. The alternating-sum route and the
//! power-series route are provided for exact cross-checks.
//!
//! Internally the recurrences run on the normalized quantities `σ_k/k!`, `B_{k,l}/k!`
//! and `φ_m/m!`, which removes every binomial coefficient from the inner loops.

use serde_json::json;

use crate::combinat::positive_compositions;
use crate::error::{Error, Result};
use crate::scalar::{Field, Scalar};
use crate::weights::WeightSequence;

/// Default cap on the table size in exact mode (rationals grow factorially).
pub const DEFAULT_EXACT_CAP: usize = 64;

/// Largest order accepted by the composition-enumeration route [`sigma_from_sigma1`].
pub const SIGMA1_ROUTE_CAP: usize = 12;

/// `[1/0!, 1/1!, …, 1/k_max!]` and `[0!, …, k_max!]`.
fn factorials<S: Scalar>(k_max: usize) -> (Vec<S>, Vec<S>) {
    let mut fact = Vec::with_capacity(k_max + 1);
    fact.push(S::one());
    for j in 1..=k_max {
        let next = if S::EXACT || j <= 20 {
            fact[j - 1].clone() * S::from_u64(j as u64)
        } else {
            S::factorial(j as u64)
        };
        fact.push(next);
    }
    let inv = fact.iter().map(|f| S::one() / f.clone()).collect();
    (fact, inv)
}

fn normalized_weights<S: Scalar>(phi: &[S], inv_fact: &[S]) -> Vec<S> {
    phi.iter().zip(inv_fact).map(|(p, f)| p.clone() * f.clone()).collect()
}

/// `σ_k(θ)` for `k = 0..=K` at a fixed `θ`.
#[derive(Clone, Debug, PartialEq)]
pub struct SigmaTable<S> {
    theta: S,
    values: Vec<S>,
}

impl<S: Scalar> SigmaTable<S> {
    /// Build the table for weights `w` at `θ > 0`, up to order `k_max`.
    pub fn new(w: &WeightSequence, theta: S, k_max: usize) -> Result<Self> {
        Self::with_exact_cap(w, theta, k_max, DEFAULT_EXACT_CAP)
    }

    /// As [`new`](Self::new) with an explicit cap for exact mode.
    pub fn with_exact_cap(w: &WeightSequence, theta: S, k_max: usize, cap: usize) -> Result<Self> {
        if S::EXACT && k_max > cap {
            return Err(Error::TooLarge(format!(
                "exact sigma table of order {k_max} exceeds the cap {cap}"
            )));
        }
        let phi = w.phi_table::<S>(k_max)?;
        Self::from_phi(&phi, theta, k_max)
    }

    /// Build from a precomputed weight table `[0, φ₁, …]` (at least `k_max + 1` long).
    pub fn from_phi(phi: &[S], theta: S, k_max: usize) -> Result<Self> {
        if !(theta > S::zero()) {
            return Err(Error::Domain(format!("theta must be positive, got {theta:?}")));
        }
        Ok(Self::from_phi_unchecked(phi, theta, k_max))
    }

    /// Like [`from_phi`](Self::from_phi) but also accepts `θ = 0` (`σ_k(0) = δ_{k0}`),
    /// which the finite-`n` laws need for empty box groups.
    pub(crate) fn from_phi_unchecked(phi: &[S], theta: S, k_max: usize) -> Self {
        assert!(phi.len() > k_max, "weight table too short");
        let (fact, inv_fact) = factorials::<S>(k_max);
        let f = normalized_weights(&phi[..=k_max], &inv_fact);
        // (k+1) s_{k+1} = θ Σ_{l=0}^{k} (k−l+1) f_{k−l+1} s_l,  with s_k = σ_k / k!.
        let mut s: Vec<S> = Vec::with_capacity(k_max + 1);
        s.push(S::one());
        for k in 0..k_max {
            let acc = S::sum_of((0..=k).map(|l| {
                let j = k - l + 1;
                S::from_u64(j as u64) * f[j].clone() * s[l].clone()
            }));
            s.push(theta.clone() * acc / S::from_u64(k as u64 + 1));
        }
        let values = s.into_iter().zip(fact).map(|(x, f)| x * f).collect();
        SigmaTable { theta, values }
    }

    pub fn theta(&self) -> &S {
        &self.theta
    }

    pub fn k_max(&self) -> usize {
        self.values.len() - 1
    }

    /// `σ_k(θ)`; panics if `k > K`.
    pub fn get(&self, k: usize) -> &S {
        &self.values[k]
    }

    pub fn values(&self) -> &[S] {
        &self.values
    }

    /// `{"theta": "...", "K": n, "log_values": [...]}`, plus `"values"` as `"p/q"` strings
    /// in exact mode.
    pub fn to_json(&self) -> serde_json::Value {
        let logs: Vec<serde_json::Value> = self.values.iter().map(|v| json_float(v.ln())).collect();
        let mut out = json!({
            "theta": self.theta.to_repr(),
            "K": self.k_max(),
            "log_values": logs,
        });
        if S::EXACT {
            out["values"] = self.values.iter().map(|v| v.to_repr()).collect::<Vec<_>>().into();
        }
        out
    }
}

/// JSON has no infinities; `ln 0` is written as `null`.
pub(crate) fn json_float(x: f64) -> serde_json::Value {
    if x.is_finite() {
        json!(x)
    } else {
        serde_json::Value::Null
    }
}

/// Free-function form of [`SigmaTable::new`].
pub fn sigma_table<S: Scalar>(w: &WeightSequence, theta: S, k_max: usize) -> Result<SigmaTable<S>> {
    SigmaTable::new(w, theta, k_max)
}

/// Which sequence a [`BellTriangle`] is built on.
#[derive(Clone, Debug, PartialEq)]
pub enum BellKind<S> {
    /// `B_{k,p}(φ•)`.
    OfPhi,
    /// `B_{k,p}(σ•(θ))`.
    OfSigma { theta: S },
}

/// Bell coefficients `B_{k,p}` for `0 ≤ p ≤ k ≤ K`.
#[derive(Clone, Debug, PartialEq)]
pub struct BellTriangle<S> {
    kind: BellKind<S>,
    rows: Vec<Vec<S>>,
}

impl<S: Scalar> BellTriangle<S> {
    /// `B_{k,l}(φ•)` via `l·B_{k,l} = Σ_{j=l−1}^{k−1} C(k,j) φ_{k−j} B_{j,l−1}` with
    /// `B_{0,0} = 1` and `B_{k,0} = B_{0,l} = 0`.
    pub fn of_phi(w: &WeightSequence, k_max: usize) -> Result<Self> {
        if S::EXACT && k_max > DEFAULT_EXACT_CAP {
            return Err(Error::TooLarge(format!(
                "exact Bell triangle of order {k_max} exceeds the cap {DEFAULT_EXACT_CAP}"
            )));
        }
        let phi = w.phi_table::<S>(k_max)?;
        Ok(Self::of_phi_weights(&phi, k_max))
    }

    /// As [`of_phi`](Self::of_phi) from a weight table `[0, φ₁, …]`.
    pub fn of_phi_weights(phi: &[S], k_max: usize) -> Self {
        assert!(phi.len() > k_max, "weight table too short");
        let (fact, inv_fact) = factorials::<S>(k_max);
        let f = normalized_weights(&phi[..=k_max], &inv_fact);
        // Normalized b_{k,l} = B_{k,l}/k!:  l b_{k,l} = Σ_j f_{k−j} b_{j,l−1}.
        let mut b: Vec<Vec<S>> = Vec::with_capacity(k_max + 1);
        b.push(vec![S::one()]);
        for k in 1..=k_max {
            let mut row = Vec::with_capacity(k + 1);
            row.push(S::zero());
            for l in 1..=k {
                let acc = S::sum_of((l - 1..k).map(|j| f[k - j].clone() * b[j][l - 1].clone()));
                row.push(acc / S::from_u64(l as u64));
            }
            b.push(row);
        }
        let rows = b
            .into_iter()
            .zip(fact)
            .map(|(row, f)| row.into_iter().map(|x| x * f.clone()).collect())
            .collect();
        BellTriangle { kind: BellKind::OfPhi, rows }
    }

    /// `B_{k,p}(σ•(θ)) = Σ_{l=p}^{k} B_{k,l}(φ•) S_{l,p} θ^l`.
    pub fn of_sigma(st: &SigmaTable<S>, stirling: &StirlingTable<S>, bt_phi: &BellTriangle<S>) -> Result<Self> {
        if bt_phi.kind != BellKind::OfPhi {
            return Err(Error::Contract("the Bell triangle must be built on phi".into()));
        }
        let k_max = st.k_max();
        if bt_phi.k_max() != k_max || stirling.k_max() != k_max {
            return Err(Error::Contract(format!(
                "mismatched orders: sigma table K={k_max}, Bell triangle K={}, Stirling K={}",
                bt_phi.k_max(),
                stirling.k_max()
            )));
        }
        let theta = st.theta().clone();
        let mut powers = Vec::with_capacity(k_max + 1);
        powers.push(S::one());
        for l in 1..=k_max {
            powers.push(powers[l - 1].clone() * theta.clone());
        }
        let mut rows = Vec::with_capacity(k_max + 1);
        for k in 0..=k_max {
            let row = (0..=k)
                .map(|p| {
                    S::sum_of((p..=k).map(|l| {
                        bt_phi.rows[k][l].clone() * stirling.get(l, p).clone() * powers[l].clone()
                    }))
                })
                .collect();
            rows.push(row);
        }
        Ok(BellTriangle { kind: BellKind::OfSigma { theta }, rows })
    }

    /// Convenience: the σ-triangle straight from weights and `θ`.
    pub fn of_sigma_from(w: &WeightSequence, theta: S, k_max: usize) -> Result<Self> {
        let st = SigmaTable::new(w, theta, k_max)?;
        let bt = Self::of_phi(w, k_max)?;
        Self::of_sigma(&st, &StirlingTable::new(k_max), &bt)
    }

    /// `B_{k,p}(σ•) = (k!/p!) [x^k] (Z_θ(x) − 1)^p`, by truncated power-series powers of
    /// `Z_θ(x) − 1 = Σ_{j≥1} σ_j x^j / j!`.
    pub fn of_sigma_power_series(st: &SigmaTable<S>) -> Self {
        let k_max = st.k_max();
        let (fact, inv_fact) = factorials::<S>(k_max);
        let base: Vec<S> = (0..=k_max)
            .map(|j| if j == 0 { S::zero() } else { st.get(j).clone() * inv_fact[j].clone() })
            .collect();
        let mut rows: Vec<Vec<S>> = (0..=k_max).map(|k| vec![S::zero(); k + 1]).collect();
        rows[0][0] = S::one();
        // power = (Z − 1)^p, truncated at degree K.
        let mut power: Vec<S> = (0..=k_max).map(|j| if j == 0 { S::one() } else { S::zero() }).collect();
        for p in 1..=k_max {
            let next: Vec<S> = (0..=k_max)
                .map(|d| S::sum_of((1..=d).map(|j| base[j].clone() * power[d - j].clone())))
                .collect();
            power = next;
            for k in p..=k_max {
                rows[k][p] = fact[k].clone() * inv_fact[p].clone() * power[k].clone();
            }
        }
        BellTriangle { kind: BellKind::OfSigma { theta: st.theta().clone() }, rows }
    }

    pub fn kind(&self) -> &BellKind<S> {
        &self.kind
    }

    pub fn k_max(&self) -> usize {
        self.rows.len() - 1
    }

    /// `B_{k,p}`, zero for `p > k`; panics if `k > K`.
    pub fn get(&self, k: usize, p: usize) -> S {
        if p > k {
            S::zero()
        } else {
            self.rows[k][p].clone()
        }
    }

    pub fn row(&self, k: usize) -> &[S] {
        &self.rows[k]
    }

    /// `Σ_l B_{k,l} x^l`; for a φ-triangle this is `σ_k(x)` at any `x ≥ 0`.
    pub fn sigma_at(&self, k: usize, x: &S) -> S {
        let mut pow = S::one();
        let mut terms = Vec::with_capacity(k + 1);
        for l in 0..=k {
            if l > 0 {
                pow = pow * x.clone();
            }
            terms.push(self.rows[k][l].clone() * pow.clone());
        }
        S::sum_of(terms)
    }

    /// `σ′_k(x) = Σ_{l≥1} l·B_{k,l} x^{l−1}`.
    pub fn sigma_prime(&self, k: usize, x: &S) -> S {
        let mut pow = S::one();
        let mut terms = Vec::with_capacity(k);
        for l in 1..=k {
            if l > 1 {
                pow = pow * x.clone();
            }
            terms.push(S::from_u64(l as u64) * self.rows[k][l].clone() * pow.clone());
        }
        S::sum_of(terms)
    }
}

impl<S: Field> BellTriangle<S> {
    /// The alternating route `B_{k,p}(σ•(θ)) = (1/p!) Σ_{q=1}^{p} (−1)^{p−q} C(p,q) σ_k(qθ)`.
    /// Exact mode only in practice: the cancellation is catastrophic in floating point.
    pub fn of_sigma_alternating(w: &WeightSequence, theta: S, k_max: usize) -> Result<Self> {
        let phi = w.phi_table::<S>(k_max)?;
        let tables: Vec<SigmaTable<S>> = (1..=k_max)
            .map(|q| SigmaTable::from_phi(&phi, theta.clone() * S::from_u64(q as u64), k_max))
            .collect::<Result<_>>()?;
        let mut rows = Vec::with_capacity(k_max + 1);
        for k in 0..=k_max {
            let mut row = Vec::with_capacity(k + 1);
            row.push(if k == 0 { S::one() } else { S::zero() });
            for p in 1..=k {
                let mut acc = S::zero();
                for q in 1..=p {
                    let term = S::binomial(p as u64, q as u64) * tables[q - 1].get(k).clone();
                    acc = if (p - q) % 2 == 0 { acc + term } else { acc - term };
                }
                row.push(acc / S::factorial(p as u64));
            }
            rows.push(row);
        }
        Ok(BellTriangle { kind: BellKind::OfSigma { theta }, rows })
    }
}

/// Free-function form of [`BellTriangle::of_phi`].
pub fn bell_triangle_phi<S: Scalar>(w: &WeightSequence, k_max: usize) -> Result<BellTriangle<S>> {
    BellTriangle::of_phi(w, k_max)
}

/// Free-function form of [`BellTriangle::of_sigma`].
pub fn bell_triangle_sigma<S: Scalar>(
    st: &SigmaTable<S>,
    stirling: &StirlingTable<S>,
    bt_phi: &BellTriangle<S>,
) -> Result<BellTriangle<S>> {
    BellTriangle::of_sigma(st, stirling, bt_phi)
}

/// `σ′_k(γ) = Σ_{l=1}^{k} l B_{k,l}(φ•) γ^{l−1}`.
pub fn sigma_prime<S: Scalar>(bt: &BellTriangle<S>, gamma: &S, k: usize) -> Result<S> {
    if bt.kind != BellKind::OfPhi {
        return Err(Error::Contract("sigma_prime needs a Bell triangle built on phi".into()));
    }
    if k > bt.k_max() {
        return Err(Error::Contract(format!("order {k} exceeds the triangle size {}", bt.k_max())));
    }
    Ok(bt.sigma_prime(k, gamma))
}

/// Second-kind Stirling numbers `S_{l,p}`, `0 ≤ l, p ≤ K`.
#[derive(Clone, Debug, PartialEq)]
pub struct StirlingTable<S> {
    rows: Vec<Vec<S>>,
}

impl<S: Scalar> StirlingTable<S> {
    pub fn new(k_max: usize) -> Self {
        let mut rows: Vec<Vec<S>> = Vec::with_capacity(k_max + 1);
        rows.push(vec![S::one()]);
        for l in 1..=k_max {
            let mut row = vec![S::zero(); l + 1];
            for p in 1..=l {
                let stay = if p < l { S::from_u64(p as u64) * rows[l - 1][p].clone() } else { S::zero() };
                row[p] = stay + rows[l - 1][p - 1].clone();
            }
            rows.push(row);
        }
        StirlingTable { rows }
    }

    pub fn k_max(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn get(&self, l: usize, p: usize) -> S {
        if p > l {
            S::zero()
        } else {
            self.rows[l][p].clone()
        }
    }
}

/// `σ_k(θ)` from the θ = 1 table through the binomial-series expansion
/// `Z_θ = (1 + (Z_1 − 1))^θ`:
/// `σ_k(θ) = Σ_q C(θ,q) Σ_{k₁+…+k_q=k, k_r≥1} (k!/Πk_r!) Π σ_{k_r}(1)`.
///
/// The composition sum is exponential in `k`, so this route only exists to verify the
/// recurrence; it refuses `K` above [`SIGMA1_ROUTE_CAP`].
pub fn sigma_from_sigma1<S: Field>(sigma1: &SigmaTable<S>, theta: S, k_max: usize) -> Result<SigmaTable<S>> {
    if k_max > SIGMA1_ROUTE_CAP {
        return Err(Error::TooLarge(format!(
            "the composition route is a verification route only (K ≤ {SIGMA1_ROUTE_CAP}), got {k_max}"
        )));
    }
    if !sigma1.theta().approx_eq(&S::one(), 1e-15) {
        return Err(Error::Contract("input table must be at theta = 1".into()));
    }
    if sigma1.k_max() < k_max {
        return Err(Error::Contract("input table is shorter than the requested order".into()));
    }
    if !(theta > S::zero()) {
        return Err(Error::Domain("theta must be positive".into()));
    }
    let (fact, inv_fact) = factorials::<S>(k_max);
    // Generalized binomials C(θ, q) = θ(θ−1)…(θ−q+1)/q!.
    let mut gen_binom = vec![S::one()];
    for q in 1..=k_max {
        let prev = gen_binom[q - 1].clone();
        gen_binom.push(prev * (theta.clone() - S::from_u64(q as u64 - 1)) / S::from_u64(q as u64));
    }
    let mut values = vec![S::one()];
    for k in 1..=k_max {
        let mut total = S::zero();
        for q in 1..=k {
            let mut inner = S::zero();
            for comp in positive_compositions(k as u64, q) {
                let mut term = fact[k].clone();
                for &part in &comp {
                    term = term * sigma1.get(part as usize).clone() * inv_fact[part as usize].clone();
                }
                inner = inner + term;
            }
            total = total + gen_binom[q].clone() * inner;
        }
        values.push(total);
    }
    Ok(SigmaTable { theta, values })
}
