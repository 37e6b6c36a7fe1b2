//! Small statistics helpers shared by diagnostics and tests.

use num_complex::Complex64;

/// Kolmogorov–Smirnov distance between the empirical law of `samples` and
/// the uniform law on `[0, 1)`. Sorts `samples` in place.
pub fn ks_uniform(samples: &mut [f64]) -> f64 {
    samples.sort_by(|a, b| a.total_cmp(b));
    let n = samples.len() as f64;
    samples
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let lo = i as f64 / n;
            let hi = (i + 1) as f64 / n;
            (x - lo).abs().max((hi - x).abs())
        })
        .fold(0.0, f64::max)
}

/// Root-mean-square distance of complex values from their mean.
pub fn dispersion(values: &[Complex64]) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    let n = values.len() as f64;
    let mean: Complex64 = values.iter().sum::<Complex64>() / n;
    (values.iter().map(|v| (v - mean).norm_sqr()).sum::<f64>() / n).sqrt()
}

/// Mean of angles in turns, as a point of `[0, 1)`.
pub fn circular_mean(turns: impl IntoIterator<Item = f64>) -> f64 {
    let sum: Complex64 = turns
        .into_iter()
        .map(|t| Complex64::from_polar(1.0, std::f64::consts::TAU * t))
        .sum();
    (sum.arg() / std::f64::consts::TAU).rem_euclid(1.0)
}
