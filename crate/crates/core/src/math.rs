//! Float helpers for the `no_std` build. Transcendentals route through `libm`;
//! the methods stabilized in `core` (`abs`, `max`, `min`) are used directly.

#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

#[inline]
pub(crate) fn exp(x: f64) -> f64 {
    libm::exp(x)
}

#[inline]
pub(crate) fn ln(x: f64) -> f64 {
    libm::log(x)
}

#[inline]
pub(crate) fn ln_1p(x: f64) -> f64 {
    libm::log1p(x)
}

#[inline]
pub(crate) fn cos(x: f64) -> f64 {
    libm::cos(x)
}

#[inline]
pub(crate) fn sinh(x: f64) -> f64 {
    libm::sinh(x)
}

#[inline]
pub(crate) fn sin(x: f64) -> f64 {
    libm::sin(x)
}

#[inline]
pub(crate) fn powi(x: f64, n: i32) -> f64 {
    libm::pow(x, n as f64)
}

#[inline]
pub(crate) fn powf(x: f64, y: f64) -> f64 {
    libm::pow(x, y)
}

#[inline]
pub(crate) fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn libm_agrees_with_std() {
        for &x in &[0.1, 0.5, 1.0, 2.0, 10.0, 123.456] {
            assert!((sqrt(x) - f64::sqrt(x)).abs() < 1e-15 * (1.0 + f64::sqrt(x)));
            assert!((exp(x) - f64::exp(x)).abs() < 1e-12 * f64::exp(x));
            assert!((ln(x) - f64::ln(x)).abs() < 1e-14 * (1.0 + f64::ln(x).abs()));
        }
        assert!((ln_gamma(4.5) - 2.453736570842442).abs() < 1e-12);
    }
}
