//! Binomial interval estimates and special-function helpers for the
//! validation harness.
//!
//! The Clopper-Pearson interval for `k` successes out of `n` uses beta
//! quantiles, so the regularized incomplete beta function and its inverse are
//! implemented here (continued fraction plus bisection; the dependency-free
//! route keeps the crate `no_std`).

use crate::math;

const CF_MAX_ITER: usize = 300;
const CF_EPS: f64 = 3e-16;
const CF_FPMIN: f64 = 1e-300;

/// Continued fraction for the incomplete beta function (modified Lentz).
fn betacf(a: f64, b: f64, x: f64) -> f64 {
    let qab = a + b;
    let qap = a + 1.0;
    let qam = a - 1.0;
    let mut c = 1.0;
    let mut d = 1.0 - qab * x / qap;
    if d.abs() < CF_FPMIN {
        d = CF_FPMIN;
    }
    d = 1.0 / d;
    let mut h = d;
    for m in 1..=CF_MAX_ITER {
        let m = m as f64;
        let m2 = 2.0 * m;
        let aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if d.abs() < CF_FPMIN {
            d = CF_FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < CF_FPMIN {
            c = CF_FPMIN;
        }
        d = 1.0 / d;
        h *= d * c;
        let aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if d.abs() < CF_FPMIN {
            d = CF_FPMIN;
        }
        c = 1.0 + aa / c;
        if c.abs() < CF_FPMIN {
            c = CF_FPMIN;
        }
        d = 1.0 / d;
        let del = d * c;
        h *= del;
        if (del - 1.0).abs() < CF_EPS {
            break;
        }
    }
    h
}

/// Regularized incomplete beta function `I_x(a, b)` for `a, b > 0`.
pub fn reg_inc_beta(a: f64, b: f64, x: f64) -> f64 {
    if x <= 0.0 {
        return 0.0;
    }
    if x >= 1.0 {
        return 1.0;
    }
    let ln_bt = math::ln_gamma(a + b) - math::ln_gamma(a) - math::ln_gamma(b)
        + a * math::ln(x)
        + b * math::ln_1p(-x);
    let bt = math::exp(ln_bt);
    if x < (a + 1.0) / (a + b + 2.0) {
        bt * betacf(a, b, x) / a
    } else {
        1.0 - bt * betacf(b, a, 1.0 - x) / b
    }
}

/// Beta distribution quantile via bisection. Deterministic and accurate to
/// roughly f64 resolution; speed is irrelevant at harness call counts.
pub fn beta_quantile(p: f64, a: f64, b: f64) -> f64 {
    if p <= 0.0 {
        return 0.0;
    }
    if p >= 1.0 {
        return 1.0;
    }
    let mut lo = 0.0_f64;
    let mut hi = 1.0_f64;
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if reg_inc_beta(a, b, mid) < p {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= f64::EPSILON * mid {
            break;
        }
    }
    0.5 * (lo + hi)
}

/// Two-sided Clopper-Pearson interval at the given confidence level for `k`
/// successes in `n` trials. Endpoints are exact beta quantiles; `k = 0` and
/// `k = n` pin the respective endpoint at 0 or 1.
pub fn clopper_pearson(k: u64, n: u64, confidence: f64) -> (f64, f64) {
    assert!(n > 0, "clopper_pearson needs at least one trial");
    assert!(k <= n, "successes cannot exceed trials");
    assert!((0.0..1.0).contains(&confidence));
    let alpha = 1.0 - confidence;
    let kf = k as f64;
    let nf = n as f64;
    let lo = if k == 0 {
        0.0
    } else {
        beta_quantile(alpha / 2.0, kf, nf - kf + 1.0)
    };
    let hi = if k == n {
        1.0
    } else {
        beta_quantile(1.0 - alpha / 2.0, kf + 1.0, nf - kf)
    };
    (lo, hi)
}

/// Mean of the chi distribution with `d` degrees of freedom:
/// `sqrt(2) Gamma((d+1)/2) / Gamma(d/2)`.
pub fn chi_mean(d: usize) -> f64 {
    assert!(d > 0);
    let d = d as f64;
    core::f64::consts::SQRT_2
        * math::exp(math::ln_gamma((d + 1.0) / 2.0) - math::ln_gamma(d / 2.0))
}

/// `log C(n, k)` via log-gamma.
pub fn ln_choose(n: usize, k: usize) -> f64 {
    assert!(k <= n);
    math::ln_gamma(n as f64 + 1.0)
        - math::ln_gamma(k as f64 + 1.0)
        - math::ln_gamma((n - k) as f64 + 1.0)
}
