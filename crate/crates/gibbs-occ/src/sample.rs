//! Seeded samplers that cross-validate the analytic laws.
//!
//! * [`SequentialSampler`]: exact draws of the occupancy vector, box by box from the
//!   component law conditioned on what is left.
//! * [`XiSampler`]: the compound-Poisson abundance `ξ`, a Poisson number of iid jumps.
//! * [`RejectionSampler`]: iid `ξ₁,…,ξ_n` kept only when they sum to `k`.
//! * [`sample_subordinator`]: ranked jumps of the subordinator `Y_γ` above a cutoff, from
//!   the points of a unit-rate Poisson process pushed through the inverse Lévy tail.
//! * [`star_biased_estimate`]: star-limit probabilities by multinomial sampling from the
//!   normalized jumps, importance-weighted by `Y_γ^k`.
//!
//! All randomness comes from [`RngStream`]s (ChaCha8, seed + stream id). Parallel runs are
//! split into fixed chunks of [`CHUNK`] draws, chunk `c` using stream `c`, and results are
//! reassembled in chunk order, so output never depends on the thread count.

use std::sync::OnceLock;

use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Poisson};
use rayon::prelude::*;
use statrs::function::gamma::ln_gamma;

use crate::bellpoly::SigmaTable;
use crate::error::{Error, Result};
use crate::occupancy::OccupancySample;
use crate::scalar::LogReal;
use crate::special::bisect;
use crate::weights::WeightSequence;

type L = LogReal<f64>;

/// Draws per parallel work unit.
pub const CHUNK: usize = 8192;
/// Tail mass of the jump law of `ξ` that is dropped.
pub const XI_TAIL: f64 = 1e-12;
/// Smallest acceptance probability the rejection sampler will run with.
pub const MIN_ACCEPTANCE: f64 = 1e-6;
/// Largest number of subordinator jumps kept in one path.
pub const MAX_JUMPS: usize = 10_000_000;
/// Smallest effective sample size accepted by [`star_biased_estimate`].
pub const MIN_ESS: f64 = 50.0;
/// Environment variable capping the number of worker threads.
pub const THREADS_ENV: &str = "GIBBS_OCC_THREADS";

/// A reproducible random stream: identical `(seed, stream)` give identical draws.
#[derive(Clone, Debug)]
pub struct RngStream {
    seed: u64,
    stream: u64,
    rng: ChaCha8Rng,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        RngStream { seed, stream, rng }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream(&self) -> u64 {
        self.stream
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.rng.fill_bytes(dst)
    }
}

fn pool() -> &'static rayon::ThreadPool {
    static POOL: OnceLock<rayon::ThreadPool> = OnceLock::new();
    POOL.get_or_init(|| {
        let threads = std::env::var(THREADS_ENV).ok().and_then(|v| v.parse::<usize>().ok()).unwrap_or(0);
        rayon::ThreadPoolBuilder::new().num_threads(threads).build().expect("thread pool")
    })
}

/// Run `f` `runs` times in parallel; draw `i` uses stream `i / CHUNK` of `seed`. The
/// output order (and every value) is independent of scheduling.
pub fn parallel_runs<T, F>(runs: usize, seed: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&mut RngStream) -> Result<T> + Sync,
{
    let chunks = runs.div_ceil(CHUNK);
    let parts: Result<Vec<Vec<T>>> = pool().install(|| {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut rng = RngStream::new(seed, c as u64);
                let len = CHUNK.min(runs - c * CHUNK);
                (0..len).map(|_| f(&mut rng)).collect()
            })
            .collect()
    });
    Ok(parts?.into_iter().flatten().collect())
}

/// Index of the first cumulative weight exceeding `u` (clamped to the last index).
fn search_cdf(cdf: &[f64], u: f64) -> usize {
    cdf.partition_point(|&c| c <= u).min(cdf.len() - 1)
}

fn ln_factorials(k: usize) -> Vec<f64> {
    (0..=k).map(|j| ln_gamma(j as f64 + 1.0)).collect()
}

/// Exact sampler of the occupancy vector: box `m` receives `l` of the `k′` remaining balls
/// with probability `C(k′,l) σ_l(θ) σ_{k′−l}((r−1)θ)/σ_{k′}(rθ)`, `r` boxes remaining.
#[derive(Clone, Debug)]
pub struct SequentialSampler {
    n: usize,
    k: usize,
    /// `ln σ_j(mθ)` at `[m][j]`, `m = 0..=n`.
    ln_sigma: Vec<Vec<f64>>,
    ln_fact: Vec<f64>,
}

impl SequentialSampler {
    pub fn new(w: &WeightSequence, theta: f64, n: usize, k: usize) -> Result<Self> {
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::Domain(format!("theta must be positive, got {theta}")));
        }
        if n == 0 {
            return Err(Error::Domain("n must be at least 1".into()));
        }
        let phi = w.phi_table::<L>(k)?;
        let ln_sigma = (0..=n)
            .map(|m| {
                SigmaTable::from_phi_unchecked(&phi, L::new(theta * m as f64), k)
                    .values()
                    .iter()
                    .map(|v| v.ln_value())
                    .collect()
            })
            .collect();
        Ok(SequentialSampler { n, k, ln_sigma, ln_fact: ln_factorials(k) })
    }

    pub fn sample(&self, rng: &mut RngStream) -> OccupancySample {
        let mut counts = vec![0u64; self.n];
        let mut rem = self.k;
        let mut probs = Vec::with_capacity(self.k + 1);
        for (m, slot) in counts.iter_mut().enumerate().take(self.n - 1) {
            if rem == 0 {
                break;
            }
            let r = self.n - m;
            let norm = self.ln_sigma[r][rem];
            probs.clear();
            let mut total = 0.0;
            for l in 0..=rem {
                let lw = self.ln_fact[rem] - self.ln_fact[l] - self.ln_fact[rem - l]
                    + self.ln_sigma[1][l]
                    + self.ln_sigma[r - 1][rem - l]
                    - norm;
                total += lw.exp();
                probs.push(total);
            }
            let l = search_cdf(&probs, rng.uniform() * total);
            *slot = l as u64;
            rem -= l;
        }
        counts[self.n - 1] += rem as u64;
        OccupancySample::new(counts)
    }
}

/// One exact draw of the occupancy vector (builds the tables on every call; use
/// [`SequentialSampler`] for repeated draws).
pub fn sample_occupancy_exact(
    w: &WeightSequence,
    theta: f64,
    n: usize,
    k: usize,
    rng: &mut RngStream,
) -> Result<OccupancySample> {
    Ok(SequentialSampler::new(w, theta, n, k)?.sample(rng))
}

/// The compound-Poisson variable `ξ = Σ_{j≤N} δ_j` with `N ~ Poisson(θφ(x))` and
/// `P(δ = m) = φ_m x^m/(φ(x) m!)`, so that `P(ξ = k) = σ_k(θ) x^k/(k! e^{θφ(x)})`. The jump
/// law is truncated once its tail mass drops below [`XI_TAIL`] and renormalized.
#[derive(Clone, Debug)]
pub struct XiSampler {
    lambda: f64,
    poisson: Option<Poisson<f64>>,
    cdf: Vec<f64>,
}

impl XiSampler {
    pub fn new(w: &WeightSequence, theta: f64, x: f64) -> Result<Self> {
        if !(theta > 0.0 && theta.is_finite()) {
            return Err(Error::Domain(format!("theta must be positive, got {theta}")));
        }
        if !(x > 0.0 && x < w.radius()) {
            return Err(Error::Domain(format!("x must lie in (0, {}), got {x}", w.radius())));
        }
        let phi_x = w.phi_eval(x)?;
        let lambda = theta * phi_x;
        let (ln_phi_x, ln_x) = (phi_x.ln(), x.ln());
        let mut cdf = Vec::new();
        let mut cum = 0.0;
        let mut prev = f64::INFINITY;
        let max_m = w.max_index().unwrap_or(usize::MAX);
        let mut m = 0usize;
        while m < max_m {
            m += 1;
            if m > MAX_JUMPS {
                return Err(Error::Diagnostic(format!("jump law of ξ still has mass beyond m = {MAX_JUMPS}")));
            }
            let p = (w.phi_ln(m)? + m as f64 * ln_x - ln_gamma(m as f64 + 1.0) - ln_phi_x).exp();
            cum += p;
            cdf.push(cum);
            if cum >= 1.0 - XI_TAIL || (m > 10 && p < 1e-18 && p <= prev) {
                break;
            }
            prev = p;
        }
        let total = cum;
        for c in cdf.iter_mut() {
            *c /= total;
        }
        let poisson = if lambda > 0.0 {
            Some(Poisson::new(lambda).map_err(|e| Error::Domain(format!("Poisson rate {lambda}: {e}")))?)
        } else {
            None
        };
        Ok(XiSampler { lambda, poisson, cdf })
    }

    /// The Poisson rate `θφ(x)`.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn sample(&self, rng: &mut RngStream) -> u64 {
        let jumps = match &self.poisson {
            Some(p) => p.sample(rng) as u64,
            None => 0,
        };
        (0..jumps).map(|_| search_cdf(&self.cdf, rng.uniform()) as u64 + 1).sum()
    }
}

/// One draw of `ξ`.
pub fn sample_xi(w: &WeightSequence, theta: f64, x: f64, rng: &mut RngStream) -> Result<u64> {
    Ok(XiSampler::new(w, theta, x)?.sample(rng))
}

/// Solve `θ x φ′(x) = k/n` (so that `E ζ_n = k`) by bisection on `(0, x₀)`. When `φ′` stays
/// bounded up to the radius the point just inside the radius is returned.
pub fn tune_x(w: &WeightSequence, theta: f64, n: usize, k: usize) -> Result<f64> {
    let target = k as f64 / n as f64;
    let radius = w.radius();
    if k == 0 {
        return Ok(1e-3 * radius.min(1.0));
    }
    let h = |x: f64| w.phi_prime_eval(x).map(|d| theta * x * d - target).unwrap_or(f64::INFINITY);
    let mut hi = if radius.is_finite() { radius * (1.0 - 1e-9) } else { 1.0 };
    if radius.is_finite() {
        if h(hi) < 0.0 {
            return Ok(hi);
        }
    } else {
        while h(hi) < 0.0 {
            hi *= 2.0;
            if hi > 1e300 {
                return Err(Error::NoSolution("cannot tune x: θxφ′(x) stays below k/n".into()));
            }
        }
    }
    Ok(bisect(h, 0.0, hi, 0.0))
}

/// Rejection sampler: draw `ξ₁,…,ξ_n` iid and keep the vector when `Σ ξ_m = k`.
#[derive(Clone, Debug)]
pub struct RejectionSampler {
    n: usize,
    k: usize,
    x: f64,
    acceptance: f64,
    xi: XiSampler,
}

impl RejectionSampler {
    /// `x = None` tunes `x` with [`tune_x`]. Fails with a diagnostic when the analytic
    /// acceptance probability `σ_k(nθ) x^k/(k! e^{nθφ(x)})` is below [`MIN_ACCEPTANCE`].
    pub fn new(w: &WeightSequence, theta: f64, n: usize, k: usize, x: Option<f64>) -> Result<Self> {
        if n == 0 {
            return Err(Error::Domain("n must be at least 1".into()));
        }
        let x = match x {
            Some(x) => x,
            None => tune_x(w, theta, n, k)?,
        };
        let xi = XiSampler::new(w, theta, x)?;
        let sigma = SigmaTable::<L>::new(w, L::new(theta * n as f64), k)?;
        let ln_acc =
            sigma.get(k).ln_value() + k as f64 * x.ln() - ln_gamma(k as f64 + 1.0) - n as f64 * xi.lambda();
        let acceptance = ln_acc.exp();
        if acceptance < MIN_ACCEPTANCE {
            return Err(Error::Diagnostic(format!(
                "acceptance probability {acceptance:e} is below {MIN_ACCEPTANCE:e} at x = {x}"
            )));
        }
        Ok(RejectionSampler { n, k, x, acceptance, xi })
    }

    pub fn x(&self) -> f64 {
        self.x
    }

    /// Analytic probability that a proposal is accepted.
    pub fn acceptance(&self) -> f64 {
        self.acceptance
    }

    /// An accepted draw and the number of proposals it took.
    pub fn sample_counted(&self, rng: &mut RngStream) -> (OccupancySample, u64) {
        let mut attempts = 0;
        let mut counts = vec![0u64; self.n];
        loop {
            attempts += 1;
            let mut total = 0u64;
            let mut ok = true;
            for c in counts.iter_mut() {
                *c = self.xi.sample(rng);
                total += *c;
                if total > self.k as u64 {
                    ok = false;
                    break;
                }
            }
            if ok && total == self.k as u64 {
                return (OccupancySample::new(counts), attempts);
            }
        }
    }

    pub fn sample(&self, rng: &mut RngStream) -> OccupancySample {
        self.sample_counted(rng).0
    }
}

/// Ranked jumps of `Y_γ` above a cutoff.
#[derive(Clone, Debug, PartialEq)]
pub struct SubordinatorJumps {
    pub gamma: f64,
    pub cutoff: f64,
    /// Unit-rate Poisson points `Γ₁ < Γ₂ < …` that produced the jumps.
    pub gamma_points: Vec<f64>,
    /// `Δ₍ⱼ₎ = π̄⁻¹(Γ_j/γ)`, non-increasing, all above the cutoff.
    pub jumps: Vec<f64>,
    /// Truncated total `Σ Δ₍ⱼ₎`.
    pub total: f64,
    /// Bound on the expected discarded mass `γ∫₀ᵗ s π(ds)`.
    pub truncation_bound: f64,
    /// Finitely many jumps in total (compound-Poisson subordinator).
    pub finite_activity: bool,
}

impl SubordinatorJumps {
    /// `N₊(t)`, the number of retained jumps.
    pub fn count(&self) -> usize {
        self.jumps.len()
    }

    /// Ranked frequencies `Δ₍ⱼ₎/Y`; empty when there are no jumps.
    pub fn normalized(&self) -> Vec<f64> {
        if self.total > 0.0 {
            self.jumps.iter().map(|d| d / self.total).collect()
        } else {
            Vec::new()
        }
    }
}

/// Default cutoff: zero for finite-activity families, otherwise the `t` at which the
/// truncation bound is `5·10⁻⁴·γφ₁`, half the budget of `10⁻³` of `E Y_γ = γφ₁`.
pub fn default_cutoff(w: &WeightSequence, gamma: f64) -> Result<f64> {
    if !w.levy_tail_support() {
        return Err(Error::NoLevyTail(w.spec()));
    }
    if w.finite_activity() {
        return Ok(0.0);
    }
    let budget = 5e-4 * gamma * w.phi_ln(1)?.exp();
    let f = |s: f64| w.levy_truncation_bound(gamma, s.exp()).map(|b| b.ln() - budget.ln()).unwrap_or(f64::NAN);
    Ok(bisect(f, -700.0, 5.0, 1e-12).exp())
}

/// Sample the jumps of `Y_γ` larger than `cutoff` (`cutoff = 0` only for finite activity).
pub fn sample_subordinator(w: &WeightSequence, gamma: f64, cutoff: f64, rng: &mut RngStream) -> Result<SubordinatorJumps> {
    if !w.levy_tail_support() {
        return Err(Error::NoLevyTail(w.spec()));
    }
    if !(gamma > 0.0 && gamma.is_finite()) {
        return Err(Error::Domain(format!("gamma must be positive, got {gamma}")));
    }
    let level = w.levy_tail(cutoff)?;
    let mut gamma_points = Vec::new();
    let mut jumps = Vec::new();
    let mut g = 0.0;
    loop {
        let e: f64 = Exp1.sample(rng);
        g += e;
        let u = g / gamma;
        if u >= level {
            break;
        }
        if jumps.len() >= MAX_JUMPS {
            return Err(Error::TooLarge(format!("more than {MAX_JUMPS} jumps above t = {cutoff}")));
        }
        gamma_points.push(g);
        jumps.push(w.levy_tail_inverse(u)?);
    }
    let total = jumps.iter().sum();
    Ok(SubordinatorJumps {
        gamma,
        cutoff,
        gamma_points,
        jumps,
        total,
        truncation_bound: w.levy_truncation_bound(gamma, cutoff)?,
        finite_activity: w.finite_activity(),
    })
}

/// Statistics of a star-limit sample of size `k` that [`star_biased_estimate`] targets.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StarStatistic {
    /// All `k` draws from one species; target `γφ_k/σ_k(γ)`.
    AllSame,
    /// Exactly `p` distinct species; target `γ^p B_{k,p}(φ•)/σ_k(γ)`.
    DistinctEquals(usize),
}

/// Weighted (and, for comparison, unweighted) Monte Carlo estimate.
#[derive(Clone, Debug, PartialEq)]
pub struct BiasedEstimate {
    pub estimate: f64,
    pub se: f64,
    pub ess: f64,
    pub unweighted: f64,
    pub unweighted_se: f64,
    pub truncation_bound: f64,
    pub cutoff: f64,
    pub finite_activity: bool,
    pub runs: usize,
}

impl BiasedEstimate {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "estimate": self.estimate,
            "se": self.se,
            "ess": self.ess,
            "unweighted": self.unweighted,
            "unweighted_se": self.unweighted_se,
            "truncation_bound": self.truncation_bound,
            "cutoff": self.cutoff,
            "finite_activity": self.finite_activity,
            "runs": self.runs,
        })
    }
}

/// Estimate a star-limit probability by multinomial sampling of `k` draws from the
/// normalized jumps `Δ₍ⱼ₎/Y`, with importance weights `Y^k`.
///
/// The estimate is `Σ w_i f_i/Σ w_i` with standard error from the ratio-estimator
/// linearization, `SE² = Σ w_i²(f_i − R)²/(Σ w_i)²`. For [`StarStatistic::AllSame`] the
/// indicator is replaced by its conditional expectation `Σ_j (Δ₍ⱼ₎/Y)^k`. Runs without
/// jumps (possible only with finite activity) carry zero weight.
pub fn star_biased_estimate(
    w: &WeightSequence,
    gamma: f64,
    k: usize,
    statistic: StarStatistic,
    cutoff: Option<f64>,
    runs: usize,
    seed: u64,
) -> Result<BiasedEstimate> {
    if k == 0 {
        return Err(Error::Domain("sample size k must be at least 1".into()));
    }
    if let StarStatistic::DistinctEquals(p) = statistic {
        if p == 0 || p > k {
            return Err(Error::Domain(format!("need 1 ≤ p ≤ k, got p = {p}")));
        }
    }
    let cutoff = match cutoff {
        Some(t) => t,
        None => default_cutoff(w, gamma)?,
    };
    let draws = parallel_runs(runs, seed, |rng| {
        let path = sample_subordinator(w, gamma, cutoff, rng)?;
        if path.total <= 0.0 {
            return Ok((f64::NEG_INFINITY, 0.0));
        }
        let freqs = path.normalized();
        let f = match statistic {
            StarStatistic::AllSame => freqs.iter().map(|s| s.powi(k as i32)).sum(),
            StarStatistic::DistinctEquals(p) => {
                let mut cdf = Vec::with_capacity(freqs.len());
                let mut c = 0.0;
                for s in &freqs {
                    c += s;
                    cdf.push(c);
                }
                let mut seen: Vec<usize> = (0..k).map(|_| search_cdf(&cdf, rng.uniform() * c)).collect();
                seen.sort_unstable();
                seen.dedup();
                if seen.len() == p {
                    1.0
                } else {
                    0.0
                }
            }
        };
        Ok((k as f64 * path.total.ln(), f))
    })?;
    let max_ln = draws.iter().map(|d| d.0).fold(f64::NEG_INFINITY, f64::max);
    if max_ln == f64::NEG_INFINITY {
        return Err(Error::Diagnostic("no run produced any jump; increase N".into()));
    }
    let weights: Vec<f64> = draws.iter().map(|d| (d.0 - max_ln).exp()).collect();
    let sw: f64 = weights.iter().sum();
    let sw2: f64 = weights.iter().map(|x| x * x).sum();
    let ratio = weights.iter().zip(&draws).map(|(w, d)| w * d.1).sum::<f64>() / sw;
    let var = weights.iter().zip(&draws).map(|(w, d)| (w * (d.1 - ratio)).powi(2)).sum::<f64>() / (sw * sw);
    let ess = sw * sw / sw2;
    if ess < MIN_ESS {
        return Err(Error::Diagnostic(format!(
            "effective sample size {ess:.1} below {MIN_ESS}; use more runs or a smaller k"
        )));
    }
    let live: Vec<f64> = draws.iter().filter(|d| d.0 > f64::NEG_INFINITY).map(|d| d.1).collect();
    let (unweighted, unweighted_se) = crate::stats::mean_se(&live);
    Ok(BiasedEstimate {
        estimate: ratio,
        se: var.sqrt(),
        ess,
        unweighted,
        unweighted_se,
        truncation_bound: w.levy_truncation_bound(gamma, cutoff)?,
        cutoff,
        finite_activity: w.finite_activity(),
        runs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Param;

    #[test]
    fn streams_are_reproducible_and_distinct() {
        let a: Vec<u64> = {
            let mut r = RngStream::new(7, 3);
            (0..5).map(|_| r.next_u64()).collect()
        };
        let b: Vec<u64> = {
            let mut r = RngStream::new(7, 3);
            (0..5).map(|_| r.next_u64()).collect()
        };
        let c: Vec<u64> = {
            let mut r = RngStream::new(7, 4);
            (0..5).map(|_| r.next_u64()).collect()
        };
        assert_eq!(a, b);
        assert_ne!(a, c);
    }

    #[test]
    fn parallel_runs_are_ordered() {
        let v = parallel_runs(3 * CHUNK + 5, 1, |rng| Ok(rng.stream())).unwrap();
        assert_eq!(v.len(), 3 * CHUNK + 5);
        assert_eq!(v[0], 0);
        assert_eq!(v[CHUNK], 1);
        assert_eq!(*v.last().unwrap(), 3);
    }

    #[test]
    fn single_box() {
        let w = WeightSequence::log_series();
        let s = SequentialSampler::new(&w, 1.0, 1, 5).unwrap();
        let mut rng = RngStream::new(0, 0);
        assert_eq!(s.sample(&mut rng).counts, vec![5]);
        let r = RejectionSampler::new(&w, 1.0, 1, 5, None).unwrap();
        assert_eq!(r.sample(&mut rng).counts, vec![5]);
    }

    #[test]
    fn xi_domain() {
        let w = WeightSequence::log_series();
        assert!(XiSampler::new(&w, 1.0, 1.0).is_err());
        assert!(XiSampler::new(&w, 1.0, 0.0).is_err());
        assert!(XiSampler::new(&w, 1.0, 0.5).is_ok());
    }

    #[test]
    fn tuned_x_matches_target() {
        let w = WeightSequence::cayley();
        let x = tune_x(&w, 1.0, 4, 6).unwrap();
        let lhs = x * w.phi_prime_eval(x).unwrap();
        assert!((lhs - 1.5).abs() < 1e-9);
    }

    #[test]
    fn subordinator_structure() {
        let w = WeightSequence::log_series();
        let mut rng = RngStream::new(3, 0);
        let j = sample_subordinator(&w, 2.0, 1e-3, &mut rng).unwrap();
        assert!(j.jumps.windows(2).all(|p| p[0] >= p[1]));
        assert!(j.jumps.iter().all(|&d| d > 1e-3));
        assert!(j.gamma_points.windows(2).all(|p| p[0] < p[1]));
        assert!((j.total - j.jumps.iter().sum::<f64>()).abs() < 1e-15);
        let nb = WeightSequence::neg_bin(Param::int(1)).unwrap();
        assert_eq!(default_cutoff(&nb, 3.0).unwrap(), 0.0);
        assert!(sample_subordinator(&nb, 3.0, 0.0, &mut rng).is_ok());
        assert!(sample_subordinator(&w, 3.0, 0.0, &mut rng).is_err());
        assert!(matches!(
            sample_subordinator(&WeightSequence::cayley(), 1.0, 0.1, &mut rng),
            Err(Error::NoLevyTail(_))
        ));
    }

    #[test]
    fn default_cutoff_meets_budget() {
        let w = WeightSequence::log_series();
        let t = default_cutoff(&w, 2.0).unwrap();
        let b = w.levy_truncation_bound(2.0, t).unwrap();
        assert!(b < 1e-3 * 2.0);
        assert!((b / (5e-4 * 2.0) - 1.0).abs() < 1e-6);
    }

    #[test]
    fn ess_guard() {
        let w = WeightSequence::log_series();
        let r = star_biased_estimate(&w, 1.0, 3, StarStatistic::AllSame, Some(1e-3), 10, 0);
        assert!(matches!(r, Err(Error::Diagnostic(_))));
    }
}
