//! Independent oracles shared by the integration tests.
//!
//! Nothing here calls into the library's combinatorial core: σ-values, Bell coefficients
//! and occupancy laws are rebuilt from their defining sums so that agreement with the
//! library is evidence rather than tautology.

#![allow(dead_code)]

use gibbs_occ::{Exact, Param, WeightSequence};
use num_bigint::BigInt;
use num_traits::{One, Zero};

pub fn q(n: i64, d: i64) -> Exact {
    Exact::new(BigInt::from(n), BigInt::from(d))
}

pub fn int(n: i64) -> Exact {
    Exact::from_integer(BigInt::from(n))
}

pub fn pow(x: &Exact, e: u64) -> Exact {
    (0..e).fold(Exact::one(), |acc, _| acc * x)
}

pub fn fact(n: u64) -> Exact {
    (1..=n).fold(Exact::one(), |acc, j| acc * int(j as i64))
}

/// Rising factorial `(x)_m`.
pub fn rising(x: &Exact, m: u64) -> Exact {
    (0..m).fold(Exact::one(), |acc, j| acc * (x + int(j as i64)))
}

/// Falling factorial `{x}_m` of a (possibly negative) rational.
pub fn falling(x: &Exact, m: u64) -> Exact {
    (0..m).fold(Exact::one(), |acc, j| acc * (x - int(j as i64)))
}

/// Binomial coefficient through Pascal's triangle.
pub fn binom(n: u64, k: u64) -> Exact {
    if k > n {
        return Exact::zero();
    }
    let mut row = vec![Exact::one()];
    for _ in 0..n {
        let mut next = vec![Exact::one(); row.len() + 1];
        for i in 1..row.len() {
            next[i] = &row[i - 1] + &row[i];
        }
        row = next;
    }
    row[k as usize].clone()
}

/// Unsigned first-kind Stirling numbers by `c(k+1,p) = c(k,p−1) + k·c(k,p)`.
pub fn stirling1(k_max: usize) -> Vec<Vec<Exact>> {
    let mut c = vec![vec![Exact::zero(); k_max + 1]; k_max + 1];
    c[0][0] = Exact::one();
    for k in 0..k_max {
        for p in 1..=k + 1 {
            c[k + 1][p] = &c[k][p - 1] + int(k as i64) * &c[k][p];
        }
    }
    c
}

/// All compositions of `total` into `parts` parts, each at least `min`.
pub fn compositions(total: u64, parts: usize, min: u64) -> Vec<Vec<u64>> {
    fn rec(total: u64, parts: usize, min: u64, prefix: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if parts == 0 {
            if total == 0 {
                out.push(prefix.clone());
            }
            return;
        }
        let mut x = min;
        while x <= total {
            prefix.push(x);
            rec(total - x, parts - 1, min, prefix, out);
            prefix.pop();
            x += 1;
        }
    }
    let mut out = Vec::new();
    rec(total, parts, min, &mut Vec::new(), &mut out);
    out
}

/// Integer partitions of `k` as frequency vectors `a` (entry `i−1` holds `a_i`).
pub fn partitions_aff(k: u64) -> Vec<Vec<u64>> {
    fn rec(rest: u64, max_part: u64, aff: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if rest == 0 {
            out.push(aff.clone());
            return;
        }
        for part in (1..=max_part.min(rest)).rev() {
            aff[part as usize - 1] += 1;
            rec(rest - part, part, aff, out);
            aff[part as usize - 1] -= 1;
        }
    }
    let mut out = Vec::new();
    rec(k, k, &mut vec![0; k as usize], &mut out);
    out
}

/// Exact weights `[0, φ₁, …, φ_K]` from the library's weight definitions.
pub fn phi_exact(w: &WeightSequence, k_max: usize) -> Vec<Exact> {
    let mut v = vec![Exact::zero()];
    for m in 1..=k_max {
        v.push(w.phi_exact(m).unwrap().expect("rational weights"));
    }
    v
}

/// `B_{k,l}(φ•) = (k!/l!) Σ_{m₁+…+m_l=k, m_i≥1} Π φ_{m_i}/m_i!` by brute force.
pub fn bell_brute(phi: &[Exact], k: usize, l: usize) -> Exact {
    if k == 0 && l == 0 {
        return Exact::one();
    }
    if l == 0 || l > k {
        return Exact::zero();
    }
    let mut total = Exact::zero();
    for comp in compositions(k as u64, l, 1) {
        let mut term = Exact::one();
        for &m in &comp {
            term = term * &phi[m as usize] / fact(m);
        }
        total += term;
    }
    total * fact(k as u64) / fact(l as u64)
}

/// `σ_k(θ) = Σ_l B_{k,l}(φ•) θ^l` with brute-force Bell coefficients.
pub fn sigma_brute(phi: &[Exact], theta: &Exact, k: usize) -> Exact {
    (0..=k).map(|l| bell_brute(phi, k, l) * pow(theta, l as u64)).sum()
}

/// Brute-force finite-n joint law: every weak composition of `k` into `n` boxes, weighted
/// by `multinomial · Π σ_{k_m}(θ)` and normalized by the total mass.
pub struct BruteLaw {
    pub n: usize,
    pub k: usize,
    pub entries: Vec<(Vec<u64>, Exact)>,
}

impl BruteLaw {
    pub fn new(phi: &[Exact], theta: &Exact, n: usize, k: usize) -> Self {
        let sigma: Vec<Exact> = (0..=k).map(|j| sigma_brute(phi, theta, j)).collect();
        let mut entries = Vec::new();
        let mut total = Exact::zero();
        for counts in compositions(k as u64, n, 0) {
            let mut mass = fact(k as u64);
            for &c in &counts {
                mass = mass * &sigma[c as usize] / fact(c);
            }
            total += &mass;
            entries.push((counts, mass));
        }
        for e in &mut entries {
            e.1 = &e.1 / &total;
        }
        BruteLaw { n, k, entries }
    }

    fn aggregate(&self, len: usize, key: impl Fn(&[u64]) -> usize) -> Vec<Exact> {
        let mut out = vec![Exact::zero(); len];
        for (c, p) in &self.entries {
            out[key(c)] += p;
        }
        out
    }

    pub fn component(&self) -> Vec<Exact> {
        self.aggregate(self.k + 1, |c| c[0] as usize)
    }

    pub fn partial(&self, m: usize) -> Vec<Exact> {
        self.aggregate(self.k + 1, |c| c[..m].iter().sum::<u64>() as usize)
    }

    pub fn distinct(&self) -> Vec<Exact> {
        self.aggregate(self.n.min(self.k) + 1, |c| c.iter().filter(|&&x| x > 0).count())
    }

    /// Probability of a frequency-of-frequencies vector.
    pub fn aff(&self, aff: &[u64]) -> Exact {
        self.entries
            .iter()
            .filter(|(c, _)| {
                let mut a = vec![0u64; self.k];
                for &x in c.iter().filter(|&&x| x > 0) {
                    a[x as usize - 1] += 1;
                }
                a == aff
            })
            .map(|(_, p)| p.clone())
            .sum()
    }

    /// `E[f(counts)]`.
    pub fn expect(&self, f: impl Fn(&[u64]) -> Exact) -> Exact {
        self.entries.iter().map(|(c, p)| f(c) * p).sum()
    }
}

/// The four families used for exhaustive oracle comparisons.
pub fn oracle_families() -> Vec<(&'static str, WeightSequence)> {
    vec![
        ("logseries", WeightSequence::log_series()),
        ("cayley", WeightSequence::cayley()),
        ("negbin(1/2)", WeightSequence::neg_bin(Param::ratio(1, 2)).unwrap()),
        ("engen(1/2)", WeightSequence::engen(Param::ratio(1, 2)).unwrap()),
    ]
}
