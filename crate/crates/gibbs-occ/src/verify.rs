//! Self-check suites behind the `verify` command.
//!
//! [`identities`] re-derives the same quantities along independent routes (σ by recurrence
//! versus Bell sums, three constructions of the σ-Bell triangle, the convolution law,
//! normalizations, moment/pmf relations) and compares them exactly in rational mode, or to
//! a relative tolerance when a family has irrational parameters. [`montecarlo`] runs the
//! seeded samplers against the analytic laws.

use serde_json::json;

use crate::bellpoly::{BellTriangle, SigmaTable, StirlingTable};
use crate::combinat::{Compositions, Partitions};
use crate::error::{Error, Result};
use crate::occupancy::{enumerate_oracle, Occupancy};
use crate::sample::{
    parallel_runs, sample_subordinator, star_biased_estimate, RejectionSampler, SequentialSampler,
    StarStatistic, XiSampler,
};
use crate::scalar::{Field, Param, Scalar};
use crate::starlimit::StarModel;
use crate::stats::{chi_square_two_sample, empirical_pmf, histogram, mean_se, tv_distance};
use crate::weights::{Membership, WeightSequence};
use crate::BigRational;

/// Tolerance for floating-point fallbacks of exact identities.
const FLOAT_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub suite: String,
    pub checks: Vec<Check>,
}

impl Report {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "suite": self.suite,
            "passed": self.passed(),
            "checks": self.checks.iter().map(|c| json!({
                "name": c.name, "passed": c.passed, "detail": c.detail
            })).collect::<Vec<_>>(),
        })
    }
}

fn check(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Check {
    Check { name: name.into(), passed, detail: detail.into() }
}

/// Families exercised when no family is given.
pub fn default_families() -> Vec<WeightSequence> {
    let half = || Param::ratio(1, 2);
    vec![
        WeightSequence::log_series(),
        WeightSequence::cayley(),
        WeightSequence::neg_bin(half()).expect("valid"),
        WeightSequence::engen(half()).expect("valid"),
        WeightSequence::new_engen(half()).expect("valid"),
        WeightSequence::gen_binomial_tree(Param::int(2), Param::int(1)).expect("valid"),
        WeightSequence::bell(),
        WeightSequence::linear(),
    ]
}

/// Run the identity suite on `families` for all `k ≤ k_max`.
pub fn identities(families: &[WeightSequence], k_max: usize) -> Result<Report> {
    let mut checks = Vec::new();
    for w in families {
        let exact = identity_checks::<BigRational>(w, k_max, true);
        let found = match exact {
            Err(Error::NotExact(_)) => identity_checks::<f64>(w, k_max, false)?,
            other => other?,
        };
        checks.extend(found);
        checks.push(log_convexity(w, k_max.max(2))?);
    }
    Ok(Report { suite: "identities".into(), checks })
}

fn same<S: Scalar>(a: &S, b: &S, exact: bool) -> bool {
    if exact {
        a == b
    } else {
        a.approx_eq(b, FLOAT_TOL)
    }
}

fn identity_checks<S: Field>(w: &WeightSequence, k_max: usize, exact: bool) -> Result<Vec<Check>> {
    let fam = w.spec();
    let theta = S::from_rational(&BigRational::new(3.into(), 2.into()))?;
    let theta2 = S::from_u64(2);
    let n = 3u64;
    let mut out = Vec::new();
    let tag = |name: &str| format!("{fam}: {name}");

    // σ by recurrence against Σ_l B_{k,l}(φ•) θ^l.
    let st = SigmaTable::new(w, theta.clone(), k_max)?;
    let bt_phi = BellTriangle::<S>::of_phi(w, k_max)?;
    let ok = (0..=k_max).all(|k| same(st.get(k), &bt_phi.sigma_at(k, &theta), exact));
    out.push(check(tag("sigma recurrence = Bell sum"), ok, format!("k ≤ {k_max}")));

    // Convolution σ_k(θ₁+θ₂) = Σ C(k,l) σ_l(θ₁) σ_{k−l}(θ₂).
    let st2 = SigmaTable::new(w, theta2.clone(), k_max)?;
    let st12 = SigmaTable::new(w, theta.clone() + theta2.clone(), k_max)?;
    let ok = (0..=k_max).all(|k| {
        let conv = S::sum_of((0..=k).map(|l| {
            S::binomial(k as u64, l as u64) * st.get(l).clone() * st2.get(k - l).clone()
        }));
        same(st12.get(k), &conv, exact)
    });
    out.push(check(tag("convolution of sigma"), ok, "theta = 3/2 + 2"));

    // Three constructions of B_{k,p}(σ•(θ)).
    let cor = BellTriangle::of_sigma(&st, &StirlingTable::new(k_max), &bt_phi)?;
    let series = BellTriangle::of_sigma_power_series(&st);
    let alt = BellTriangle::of_sigma_alternating(w, theta.clone(), k_max)?;
    let ok = (0..=k_max).all(|k| {
        (0..=k).all(|p| same(&cor.get(k, p), &series.get(k, p), exact) && same(&cor.get(k, p), &alt.get(k, p), exact))
    });
    out.push(check(tag("sigma-Bell triangle: three routes agree"), ok, format!("k ≤ {k_max}")));

    // Normalizations and moment relations on a finite-n model.
    let occ = Occupancy::new(w, theta.clone(), n, k_max)?;
    let pnk = occ.pnk_pmf();
    let ok = same(&S::sum_of(pnk.iter().cloned()), &S::one(), exact)
        && same(&S::sum_of(occ.component_pmf()), &S::one(), exact);
    out.push(check(tag("finite-n pmfs normalized"), ok, format!("n = {n}, k = {k_max}")));

    let comp = occ.component_pmf();
    let mut ok = true;
    for i in 1..=k_max {
        let mut r = vec![0u64; i];
        r[i - 1] = 1;
        let m = occ.aff_factorial_moments(&r)?;
        ok &= same(&m, &(S::from_u64(n) * comp[i].clone()), exact);
    }
    out.push(check(tag("E[A(i)] = n P(K(1) = i)"), ok, ""));

    let mut total = S::zero();
    let mut ok = true;
    for parts in Partitions::new(k_max as u64) {
        let aff = crate::combinat::aff_of(&parts, k_max);
        let pr = occ.aff_pmf(&aff)?;
        let p = parts.len() as u64;
        // E[Π{A(i)}_{a_i}] = {n}_p · P(K = (parts, 0, …, 0)).
        if p <= n {
            let mom = occ.aff_factorial_moments(&aff)?;
            ok &= same(&mom, &(S::falling(n, p) * occ.joint_pmf(&parts)?), exact);
        }
        total = total + pr;
    }
    out.push(check(tag("frequency-of-frequencies law normalized"), same(&total, &S::one(), exact), ""));
    out.push(check(tag("factorial moment = {n}_p x joint pmf"), ok, ""));

    let kk = k_max.min(6);
    let small = Occupancy::new(w, theta.clone(), n, kk)?;
    let joint_total = S::sum_of(Compositions::new(kk as u64, n as usize).map(|c| small.joint_pmf(&c).expect("valid counts")));
    out.push(check(tag("joint pmf normalized"), same(&joint_total, &S::one(), exact), format!("k = {kk}")));

    let star = StarModel::new(w, theta2, k_max)?;
    let ok = (1..=k_max).all(|k| same(&S::sum_of(star.star_pnk_pmf(k).expect("k ≤ K")), &S::one(), exact));
    out.push(check(tag("star-limit P_k law normalized"), ok, "gamma = 2"));
    Ok(out)
}

fn log_convexity(w: &WeightSequence, m_max: usize) -> Result<Check> {
    let name = format!("{}: log-convex weights", w.spec());
    if w.membership() != Membership::Yes {
        return Ok(check(name, true, "skipped (not in the subordinator class)"));
    }
    let mut ok = true;
    for m in 2..m_max {
        match (w.phi_exact(m - 1)?, w.phi_exact(m)?, w.phi_exact(m + 1)?) {
            (Some(a), Some(b), Some(c)) => {
                if a > BigRational::from_integer(0.into()) && c.clone() * a < b.clone() * b {
                    ok = false;
                }
            }
            _ => {
                let (a, b, c) = (w.phi_ln(m - 1)?, w.phi_ln(m)?, w.phi_ln(m + 1)?);
                if a.is_finite() && a + c < 2.0 * b - 1e-12 * b.abs().max(1.0) {
                    ok = false;
                }
            }
        }
    }
    Ok(check(name, ok, format!("m < {m_max}")))
}

/// Monte Carlo suite: every sampler against its analytic target, seeded by `seed`.
pub fn montecarlo(seed: u64, runs: usize) -> Result<Report> {
    let mut checks = Vec::new();
    let ls = WeightSequence::log_series();

    // Sequential sampler versus the enumeration oracle.
    let (n, k) = (3usize, 4usize);
    let oracle = enumerate_oracle::<f64>(&ls, 1.0, n, k)?;
    let sampler = SequentialSampler::new(&ls, 1.0, n, k)?;
    let index: std::collections::HashMap<Vec<u64>, usize> =
        oracle.iter().enumerate().map(|(i, (c, _))| (c.clone(), i)).collect();
    let draws = parallel_runs(runs, seed, |rng| Ok(index[&sampler.sample(rng).counts]))?;
    let mut hist = histogram(draws);
    hist.resize(oracle.len(), 0);
    let target: Vec<f64> = oracle.iter().map(|(_, p)| *p).collect();
    let tv = tv_distance(&empirical_pmf(&hist), &target);
    checks.push(check("sequential sampler vs enumeration (TV < 0.01)", tv < 0.01, format!("tv = {tv:.5}")));

    // Rejection versus sequential on P_{n,k}.
    let (n, k) = (4usize, 6usize);
    let seq = SequentialSampler::new(&ls, 1.0, n, k)?;
    let rej = RejectionSampler::new(&ls, 1.0, n, k, None)?;
    let a = histogram(parallel_runs(runs, seed ^ 0x5eed, |rng| Ok(seq.sample(rng).p()))?);
    let b = histogram(parallel_runs(runs, seed ^ 0xbeef, |rng| Ok(rej.sample(rng).p()))?);
    let t = chi_square_two_sample(&a, &b);
    checks.push(check(
        "rejection vs sequential on P (chi-square p > 0.001)",
        t.p_value > 1e-3,
        format!("p = {:.4}", t.p_value),
    ));

    // ξ against its analytic pmf.
    let (theta, x) = (1.0, 0.5);
    let xi = XiSampler::new(&ls, theta, x)?;
    let xs = histogram(parallel_runs(runs, seed ^ 0x11, |rng| Ok(xi.sample(rng) as usize))?);
    let st = SigmaTable::<f64>::new(&ls, theta, 60)?;
    let z = (theta * ls.phi_eval(x)?).exp();
    let pmf: Vec<f64> = (0..=60)
        .map(|j| st.get(j) * x.powi(j as i32) / (z * statrs::function::factorial::factorial(j as u64)))
        .collect();
    let tv = tv_distance(&empirical_pmf(&xs), &pmf);
    checks.push(check("xi sampler vs analytic pmf (TV < 0.01)", tv < 0.01, format!("tv = {tv:.5}")));

    // N₊(t) ~ Poisson(γπ̄(t)).
    let (gamma, t) = (2.0, 0.01);
    let paths = runs.min(20_000);
    let counts = parallel_runs(paths, seed ^ 0x22, |rng| Ok(sample_subordinator(&ls, gamma, t, rng)?.count() as f64))?;
    let (mean, se) = mean_se(&counts);
    let want = gamma * ls.levy_tail(t)?;
    checks.push(check(
        "subordinator jump count mean within 3 SE",
        (mean - want).abs() < 3.0 * se,
        format!("mean = {mean:.4}, target = {want:.4}, se = {se:.4}"),
    ));

    // Biased sampling of the all-same probability.
    for (w, gamma, k) in [(ls.clone(), 1.0, 3usize), (WeightSequence::neg_bin(Param::int(1))?, 2.0, 3)] {
        let est = star_biased_estimate(&w, gamma, k, StarStatistic::AllSame, None, runs.min(50_000), seed ^ 0x33)?;
        let model = StarModel::<f64>::new(&w, gamma, k)?;
        let want = model.star_pnk_pmf(k)?[1];
        checks.push(check(
            format!("{}: biased all-same estimate within 3 SE", w.spec()),
            (est.estimate - want).abs() < 3.0 * est.se,
            format!("estimate = {:.5}, target = {want:.5}, se = {:.5}", est.estimate, est.se),
        ));
    }
    Ok(Report { suite: "montecarlo".into(), checks })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_suite_passes() {
        let r = identities(&default_families(), 6).unwrap();
        for c in &r.checks {
            assert!(c.passed, "{} ({})", c.name, c.detail);
        }
        // Irrational parameters fall back to floating point.
        let w = WeightSequence::engen(Param::float(std::f64::consts::FRAC_1_PI)).unwrap();
        assert!(identities(&[w], 5).unwrap().passed());
    }
}
