//! Sample statistics used by the Monte-Carlo experiments.

use crate::numeric::{pairwise_sum, sum_by};

pub fn mean(x: &[f64]) -> f64 {
    crate::numeric::mean(x)
}

/// Unbiased sample variance (`n - 1` denominator), computed about the mean.
pub fn sample_variance(x: &[f64]) -> f64 {
    let n = x.len();
    if n < 2 {
        return 0.0;
    }
    let m = mean(x);
    sum_by(n, &|i| (x[i] - m) * (x[i] - m)) / (n - 1) as f64
}

/// Jackknife standard error from leave-one-out replicates.
pub fn jackknife_se(replicates: &[f64]) -> f64 {
    let n = replicates.len();
    if n < 2 {
        return f64::NAN;
    }
    let m = mean(replicates);
    let ss = sum_by(n, &|i| (replicates[i] - m) * (replicates[i] - m));
    ((n - 1) as f64 / n as f64 * ss).sqrt()
}

/// Leave-one-out means of `x`.
pub fn leave_one_out_means(x: &[f64]) -> Vec<f64> {
    let n = x.len() as f64;
    let total = pairwise_sum(x);
    x.iter().map(|v| (total - v) / (n - 1.0)).collect()
}

/// Unbiased variance and its jackknife standard error.
pub fn variance_with_se(x: &[f64]) -> (f64, f64) {
    let n = x.len();
    let var = sample_variance(x);
    if n < 3 {
        return (var, f64::NAN);
    }
    // centred data keeps the leave-one-out updates free of cancellation
    let m = mean(x);
    let c: Vec<f64> = x.iter().map(|v| v - m).collect();
    let s1 = pairwise_sum(&c);
    let s2 = sum_by(n, &|i| c[i] * c[i]);
    let k = (n - 1) as f64;
    let reps: Vec<f64> = c
        .iter()
        .map(|v| {
            let t1 = s1 - v;
            let t2 = s2 - v * v;
            (t2 - t1 * t1 / k) / (k - 1.0)
        })
        .collect();
    (var, jackknife_se(&reps))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub slope_se: f64,
}

/// Weighted least squares `y = intercept + slope x`; the slope standard
/// error treats the weights as inverse variances.
pub fn weighted_line_fit(x: &[f64], y: &[f64], w: &[f64]) -> Option<LineFit> {
    if x.len() < 2 || x.len() != y.len() || x.len() != w.len() {
        return None;
    }
    if w.iter().any(|v| !v.is_finite() || *v <= 0.0) || y.iter().any(|v| !v.is_finite()) {
        return None;
    }
    let sw: f64 = w.iter().sum();
    let xm = x.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let ym = y.iter().zip(w).map(|(a, b)| a * b).sum::<f64>() / sw;
    let sxx: f64 = x.iter().zip(w).map(|(a, b)| b * (a - xm) * (a - xm)).sum();
    if sxx <= 0.0 {
        return None;
    }
    let sxy: f64 = x
        .iter()
        .zip(y)
        .zip(w)
        .map(|((a, c), b)| b * (a - xm) * (c - ym))
        .sum();
    let slope = sxy / sxx;
    Some(LineFit {
        slope,
        intercept: ym - slope * xm,
        slope_se: (1.0 / sxx).sqrt(),
    })
}

/// Ordinary least squares.
pub fn line_fit(x: &[f64], y: &[f64]) -> Option<LineFit> {
    weighted_line_fit(x, y, &vec![1.0; x.len()])
}
