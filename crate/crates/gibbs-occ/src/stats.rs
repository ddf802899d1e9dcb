//! Small statistical toolkit for the Monte Carlo checks: distances between pmfs,
//! chi-square goodness-of-fit and two-sample tests, and the one-sample
//! Kolmogorov–Smirnov test.

use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::special::kolmogorov_survival;

/// Minimum pooled count (two-sample) or expected count (goodness of fit) per bin.
const MIN_BIN: f64 = 5.0;

/// Total-variation distance `½ Σ |p_i − q_i|`; the shorter input is zero-padded.
pub fn tv_distance(p: &[f64], q: &[f64]) -> f64 {
    let n = p.len().max(q.len());
    let at = |v: &[f64], i: usize| v.get(i).copied().unwrap_or(0.0);
    0.5 * (0..n).map(|i| (at(p, i) - at(q, i)).abs()).sum::<f64>()
}

/// Empirical pmf of `counts` (histogram of non-negative integers).
pub fn empirical_pmf(hist: &[u64]) -> Vec<f64> {
    let total: u64 = hist.iter().sum();
    hist.iter().map(|&c| c as f64 / total.max(1) as f64).collect()
}

/// Histogram of integer observations with bins `0..=max`.
pub fn histogram(values: impl IntoIterator<Item = usize>) -> Vec<u64> {
    let mut h: Vec<u64> = Vec::new();
    for v in values {
        if v >= h.len() {
            h.resize(v + 1, 0);
        }
        h[v] += 1;
    }
    h
}

/// Result of a chi-square test.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ChiSquareTest {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
}

fn chi_square_sf(statistic: f64, dof: usize) -> f64 {
    if dof == 0 {
        return 1.0;
    }
    ChiSquared::new(dof as f64).map(|d| d.sf(statistic)).unwrap_or(f64::NAN)
}

/// Greedily merges consecutive bins until each has `key(bin) ≥ MIN_BIN`; a short tail is
/// merged into the previous bin.
fn pool<T: Copy + std::ops::Add<Output = T>>(bins: &[T], key: impl Fn(&T) -> f64) -> Vec<T> {
    let mut out: Vec<T> = Vec::new();
    let mut acc: Option<T> = None;
    for &b in bins {
        let cur = match acc {
            Some(a) => a + b,
            None => b,
        };
        if key(&cur) >= MIN_BIN {
            out.push(cur);
            acc = None;
        } else {
            acc = Some(cur);
        }
    }
    if let Some(rest) = acc {
        match out.last_mut() {
            Some(last) => *last = *last + rest,
            None => out.push(rest),
        }
    }
    out
}

#[derive(Clone, Copy, Debug)]
struct Pair(f64, f64);

impl std::ops::Add for Pair {
    type Output = Pair;
    fn add(self, o: Pair) -> Pair {
        Pair(self.0 + o.0, self.1 + o.1)
    }
}

/// Two-sample chi-square homogeneity test on aligned histograms of possibly different
/// totals. Sparse bins are pooled with their neighbours first.
pub fn chi_square_two_sample(a: &[u64], b: &[u64]) -> ChiSquareTest {
    let n = a.len().max(b.len());
    let at = |v: &[u64], i: usize| v.get(i).copied().unwrap_or(0) as f64;
    let bins: Vec<Pair> = (0..n).map(|i| Pair(at(a, i), at(b, i))).collect();
    let pooled = pool(&bins, |p| p.0 + p.1);
    let na: f64 = pooled.iter().map(|p| p.0).sum();
    let nb: f64 = pooled.iter().map(|p| p.1).sum();
    let (ra, rb) = ((nb / na).sqrt(), (na / nb).sqrt());
    let statistic = pooled
        .iter()
        .filter(|p| p.0 + p.1 > 0.0)
        .map(|p| (ra * p.0 - rb * p.1).powi(2) / (p.0 + p.1))
        .sum();
    let dof = pooled.len().saturating_sub(1);
    ChiSquareTest { statistic, dof, p_value: chi_square_sf(statistic, dof) }
}

/// Chi-square goodness of fit of an observed histogram against probabilities `probs`.
pub fn chi_square_gof(observed: &[u64], probs: &[f64]) -> ChiSquareTest {
    let total: u64 = observed.iter().sum();
    let n = observed.len().max(probs.len());
    let bins: Vec<Pair> = (0..n)
        .map(|i| {
            let o = observed.get(i).copied().unwrap_or(0) as f64;
            let e = probs.get(i).copied().unwrap_or(0.0) * total as f64;
            Pair(o, e)
        })
        .collect();
    let pooled = pool(&bins, |p| p.1);
    let statistic = pooled.iter().filter(|p| p.1 > 0.0).map(|p| (p.0 - p.1).powi(2) / p.1).sum();
    let dof = pooled.len().saturating_sub(1);
    ChiSquareTest { statistic, dof, p_value: chi_square_sf(statistic, dof) }
}

/// One-sample Kolmogorov–Smirnov statistic and asymptotic p-value against `cdf`.
pub fn ks_one_sample(samples: &[f64], cdf: impl Fn(f64) -> f64) -> (f64, f64) {
    let mut xs = samples.to_vec();
    xs.sort_by(|a, b| a.total_cmp(b));
    let n = xs.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &x) in xs.iter().enumerate() {
        let f = cdf(x);
        d = d.max((i as f64 + 1.0) / n - f).max(f - i as f64 / n);
    }
    let sn = n.sqrt();
    (d, kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d))
}

/// Sample mean and its standard error.
pub fn mean_se(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0).max(1.0);
    (mean, (var / n).sqrt())
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.total_cmp(b));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Least-squares slope of `y` on `x`.
pub fn ols_slope(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let sxx: f64 = x.iter().map(|a| (a - mx).powi(2)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tv_basic() {
        assert_eq!(tv_distance(&[0.5, 0.5], &[1.0]), 0.5);
        assert_eq!(tv_distance(&[0.2, 0.8], &[0.2, 0.8]), 0.0);
    }

    #[test]
    fn chi_square_identical_samples() {
        let t = chi_square_two_sample(&[100, 200, 300], &[200, 400, 600]);
        assert!(t.statistic.abs() < 1e-12);
        assert_eq!(t.dof, 2);
        assert!((t.p_value - 1.0).abs() < 1e-12);
        let t = chi_square_two_sample(&[1000, 0], &[0, 1000]);
        assert!(t.p_value < 1e-100);
    }

    #[test]
    fn chi_square_gof_known_value() {
        // (45−50)²/50 + (55−50)²/50 = 1, one dof: p = 0.3173105078629141.
        let t = chi_square_gof(&[45, 55], &[0.5, 0.5]);
        assert!((t.statistic - 1.0).abs() < 1e-12);
        assert!((t.p_value - 0.317_310_507_862_914_1).abs() < 1e-9);
    }

    #[test]
    fn pooling_merges_sparse_tail() {
        let t = chi_square_gof(&[50, 48, 1, 1], &[0.5, 0.48, 0.01, 0.01]);
        assert_eq!(t.dof, 1);
    }

    #[test]
    fn ks_uniform_grid() {
        let xs: Vec<f64> = (0..1000).map(|i| (i as f64 + 0.5) / 1000.0).collect();
        let (d, p) = ks_one_sample(&xs, |x| x.clamp(0.0, 1.0));
        assert!(d <= 0.0005 + 1e-12);
        assert!(p > 0.99);
    }

    #[test]
    fn helpers() {
        assert_eq!(histogram([0, 2, 2]), vec![1, 0, 2]);
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert!((ols_slope(&[0.0, 1.0, 2.0], &[1.0, 3.0, 5.0]) - 2.0).abs() < 1e-12);
        let (m, se) = mean_se(&[1.0, 2.0, 3.0]);
        assert_eq!(m, 2.0);
        assert!((se - (1.0f64 / 3.0).sqrt()).abs() < 1e-12);
    }
}
