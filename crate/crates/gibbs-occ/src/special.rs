//! Special functions and small numerical utilities not covered by `statrs`.

use statrs::function::gamma::{gamma_lr, gamma_ur, ln_gamma};

const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
const FPMIN: f64 = 1e-300;
const EPS: f64 = 1e-16;

/// `ln Γ(a, x)` (unregularized upper incomplete gamma) by Lentz's continued fraction.
///
/// Valid for any real `a` when `x > max(1, a + 1)`; used for tails far from the origin,
/// where computing `Γ(a, x)` directly would underflow.
pub fn ln_upper_gamma_cf(a: f64, x: f64) -> f64 {
    let mut b = x + 1.0 - a;
    let mut c = 1.0 / FPMIN;
    let mut d = 1.0 / b;
    let mut h = d;
    for i in 1..10_000 {
        let an = -(i as f64) * (i as f64 - a);
        b += 2.0;
        d = an * d + b;
        if d.abs() < FPMIN {
            d = FPMIN;
        }
        c = b + an / c;
        if c.abs() < FPMIN {
            c = FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < EPS {
            break;
        }
    }
    -x + a * x.ln() + h.ln()
}

/// Exponential integral `E₁(x) = ∫_x^∞ e^{-s}/s ds` for `x > 0`.
pub fn exp_int_e1(x: f64) -> f64 {
    ln_exp_int_e1(x).exp()
}

/// `ln E₁(x)`, accurate far into the tail where `E₁` itself underflows.
pub fn ln_exp_int_e1(x: f64) -> f64 {
    if x.is_nan() || x < 0.0 {
        return f64::NAN;
    }
    if x == 0.0 {
        return f64::INFINITY;
    }
    if x > 1.0 {
        return ln_upper_gamma_cf(0.0, x);
    }
    let mut sum = -x.ln() - EULER_GAMMA;
    let mut fact = 1.0;
    for i in 1..200 {
        let fi = i as f64;
        fact *= -x / fi;
        let del = -fact / fi;
        sum += del;
        if del.abs() < sum.abs() * EPS {
            break;
        }
    }
    sum.ln()
}

/// `ln Q(a, x)`, the log of the regularized upper incomplete gamma function, `a > 0`.
pub fn ln_gamma_q(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x > (a + 1.0).max(1.0) {
        ln_upper_gamma_cf(a, x) - ln_gamma(a)
    } else {
        gamma_ur(a, x).ln()
    }
}

/// Regularized lower incomplete gamma `P(a, x)`, returning 0 at `x = 0`.
pub fn gamma_p(a: f64, x: f64) -> f64 {
    if x <= 0.0 {
        0.0
    } else {
        gamma_lr(a, x)
    }
}

/// Adaptive Simpson quadrature on `[a, b]` to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    fn step<F: Fn(f64) -> f64>(
        f: &F,
        a: f64,
        b: f64,
        fa: f64,
        fm: f64,
        fb: f64,
        whole: f64,
        tol: f64,
        depth: u32,
    ) -> f64 {
        let m = 0.5 * (a + b);
        let lm = 0.5 * (a + m);
        let rm = 0.5 * (m + b);
        let flm = f(lm);
        let frm = f(rm);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let delta = left + right - whole;
        if depth == 0 || delta.abs() <= 15.0 * tol {
            return left + right + delta / 15.0;
        }
        step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1)
            + step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1)
    }
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    step(f, a, b, fa, fm, fb, whole, tol, 50)
}

/// Polylogarithm `Li_s(z) = Σ z^m / m^s` for `s > 0` and real `z ≤ -1`, through the
/// Bose–Einstein integral `Li_s(z) = z/Γ(s) ∫₀^∞ t^{s-1}/(e^t - z) dt`.
pub fn polylog_negative(s: f64, z: f64) -> f64 {
    let t_max = 60.0 + z.abs().ln().max(0.0) + 10.0 * s;
    let integral = if s >= 1.0 {
        let f = |t: f64| if t == 0.0 { if s == 1.0 { 1.0 / (1.0 - z) } else { 0.0 } } else { t.powf(s - 1.0) / (t.exp() - z) };
        // Split at 1 so the (possibly non-smooth) behaviour at the origin is isolated.
        adaptive_simpson(&f, 0.0, 1.0, 1e-15) + adaptive_simpson(&f, 1.0, t_max, 1e-15)
    } else {
        // Substituting t = v^{1/s} removes the integrable singularity at the origin.
        let f = |v: f64| 1.0 / (s * ((v.powf(1.0 / s)).exp() - z));
        let v_max = t_max.powf(s);
        adaptive_simpson(&f, 0.0, 1.0, 1e-15) + adaptive_simpson(&f, 1.0, v_max, 1e-15)
    };
    z * integral / ln_gamma(s).exp()
}

/// Bisection for a root of a continuous `f` with `f(lo)` and `f(hi)` of opposite sign.
/// Stops when the bracket is below `x_tol` (absolute) or after 400 halvings.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, x_tol: f64) -> f64 {
    let flo = f(lo);
    let lo_negative = flo < 0.0;
    for _ in 0..400 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= x_tol || mid == lo || mid == hi {
            return mid;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm < 0.0) == lo_negative {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Upper-tail probability of the Kolmogorov distribution, `P(K > x)`.
pub fn kolmogorov_survival(x: f64) -> f64 {
    if x <= 0.0 {
        return 1.0;
    }
    if x < 0.3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for j in 1..=100 {
        let jf = j as f64;
        let term = 2.0 * (-2.0 * jf * jf * x * x).exp();
        sum += if j % 2 == 1 { term } else { -term };
        if term < 1e-17 {
            break;
        }
    }
    sum.clamp(0.0, 1.0)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e1_quadrature(x: f64) -> f64 {
        // ∫_x^∞ e^{-s}/s ds = ∫_0^1 e^{-x/u}/u du  (s = x/u)
        let f = |u: f64| if u == 0.0 { 0.0 } else { (-x / u).exp() / u };
        adaptive_simpson(&f, 0.0, 1.0, 1e-15)
    }

    #[test]
    fn e1_matches_quadrature() {
        for &x in &[0.01, 0.2, 0.9, 1.0, 1.5, 2.0, 5.0] {
            let a = exp_int_e1(x);
            let b = e1_quadrature(x);
            assert!((a - b).abs() <= 1e-11 * b, "x={x}: {a} vs {b}");
        }
        // Known value E₁(1) = 0.21938393439552027…
        assert!((exp_int_e1(1.0) - 0.219_383_934_395_520_27).abs() < 1e-15);
        // Tabulated E₁(20) = 9.8355252906498816904…e-11 (quadrature is too coarse there).
        assert!((exp_int_e1(20.0) / 9.835_525_290_649_882e-11 - 1.0).abs() < 1e-13);
    }

    #[test]
    fn upper_gamma_cf_agrees_with_statrs() {
        for &(a, x) in &[(0.5, 3.0), (1.0, 2.0), (2.5, 7.0), (3.0, 10.0)] {
            let q = gamma_ur(a, x);
            let cf = (ln_upper_gamma_cf(a, x) - ln_gamma(a)).exp();
            assert!((q - cf).abs() < 1e-13 * q, "a={a}, x={x}");
        }
    }

    #[test]
    fn polylog_at_minus_one() {
        let v = polylog_negative(2.0, -1.0);
        let want = -std::f64::consts::PI.powi(2) / 12.0;
        assert!((v - want).abs() < 1e-12, "{v} vs {want}");
        // Li_{1/2}(-1) = -(1 - √2) ζ(1/2) = -0.6048986434216304 …
        let eta_half = 0.604_898_643_421_630_4;
        assert!((polylog_negative(0.5, -1.0) + eta_half).abs() < 1e-9);
        // Li_1(z) = -ln(1-z)
        assert!((polylog_negative(1.0, -3.0) + 4f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn bisection_finds_sqrt_two() {
        let r = bisect(|x| x * x - 2.0, 0.0, 2.0, 1e-15);
        assert!((r - 2f64.sqrt()).abs() < 1e-14);
    }

    #[test]
    fn kolmogorov_tail_reference_values() {
        // Standard critical values: P(K > 1.358) ≈ 0.05, P(K > 1.628) ≈ 0.01.
        assert!((kolmogorov_survival(1.358) - 0.05).abs() < 1e-3);
        assert!((kolmogorov_survival(1.628) - 0.01).abs() < 1e-3);
    }
}
