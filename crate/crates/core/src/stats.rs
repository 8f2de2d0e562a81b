//! Empirical transforms and simple moments of samples.

use num_complex::Complex64;

/// `(1/n) Σ e^{i s x_k}`.
pub fn empirical_cf(values: &[f64], s: f64) -> Complex64 {
    if values.is_empty() {
        return Complex64::new(1.0, 0.0);
    }
    let (mut re, mut im) = (0.0, 0.0);
    for &x in values {
        let (sin, cos) = libm::sincos(s * x);
        re += cos;
        im += sin;
    }
    let n = values.len() as f64;
    Complex64::new(re / n, im / n)
}

/// `(1/n) Σ s^{x_k}` for counts.
pub fn empirical_pgf(values: &[u64], s: f64) -> f64 {
    if values.is_empty() {
        return 1.0;
    }
    let total: f64 = values.iter().map(|&k| libm::pow(s, k as f64)).sum();
    total / values.len() as f64
}

pub fn mean(values: &[f64]) -> f64 {
    if values.is_empty() {
        return f64::NAN;
    }
    values.iter().sum::<f64>() / values.len() as f64
}

pub fn variance(values: &[f64]) -> f64 {
    let m = mean(values);
    values.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / values.len() as f64
}

/// Lag-one sample autocorrelation.
pub fn lag1_autocorrelation(values: &[f64]) -> f64 {
    let m = mean(values);
    let denom: f64 = values.iter().map(|x| (x - m) * (x - m)).sum();
    let num: f64 = values.windows(2).map(|w| (w[0] - m) * (w[1] - m)).sum();
    num / denom
}
