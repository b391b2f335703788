use crate::error::{Error, Result};

/// Asymptotic chromatic number of `G(n, p)` with `d = 1/(1-p)`:
/// `n / r` and `n / r * (1 + 3 ln ln n / ln n)`, where
/// `r = 2 log_d n - log_d log_d n + 2 log_d(e/2) + 1`.
///
/// Errors when an iterated logarithm is undefined or `r` is not positive,
/// which happens for small `n`.
pub fn bollobas_bounds(n: f64, p: f64) -> Result<(f64, f64)> {
    let domain = || Error::Domain { n, p };
    if !(p > 0.0 && p < 1.0) || !n.is_finite() {
        return Err(domain());
    }
    let ln_d = -(1.0 - p).ln();
    let log_d = |x: f64| x.ln() / ln_d;
    let log_n = log_d(n);
    let ln_n = n.ln();
    if !(log_n > 1.0) || !(ln_n > 1.0) {
        return Err(domain());
    }
    let r = 2.0 * log_n - log_d(log_n) + 2.0 * log_d(std::f64::consts::E / 2.0) + 1.0;
    if !(r > 0.0) {
        return Err(domain());
    }
    let lower = n / r;
    let upper = lower * (1.0 + 3.0 * ln_n.ln() / ln_n);
    Ok((lower, upper))
}

/// Empirical fit of the chromatic number of planted keys, `round(1.13 n^0.54)`.
pub fn chi_power_law(n: usize) -> usize {
    (1.13 * (n as f64).powf(0.54)).round() as usize
}
