//! Reductions with a fixed summation tree.
//!
//! Every inner product in the crate goes through these helpers so that the
//! rounding pattern depends only on the vector length, never on scheduling.

const LEAF: usize = 32;

/// Pairwise (cascade) summation with leaves of 32 sequential terms.
pub fn pairwise_sum(values: &[f64]) -> f64 {
    sum_by(values.len(), &|i| values[i])
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    sum_by(a.len(), &|i| a[i] * b[i])
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn norm1(a: &[f64]) -> f64 {
    sum_by(a.len(), &|i| a[i].abs())
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

pub fn mean(a: &[f64]) -> f64 {
    if a.is_empty() {
        return 0.0;
    }
    pairwise_sum(a) / a.len() as f64
}

/// Sum of `term(i)` for `i` in `0..n` over the same tree as [`pairwise_sum`].
pub fn sum_by(n: usize, term: &dyn Fn(usize) -> f64) -> f64 {
    fn rec(lo: usize, hi: usize, term: &dyn Fn(usize) -> f64) -> f64 {
        if hi - lo <= LEAF {
            let mut s = 0.0;
            for i in lo..hi {
                s += term(i);
            }
            s
        } else {
            let mid = lo + (hi - lo) / 2;
            rec(lo, mid, term) + rec(mid, hi, term)
        }
    }
    rec(0, n, term)
}

/// Subtracts the arithmetic mean in place.
pub fn remove_mean(a: &mut [f64]) {
    let m = mean(a);
    for v in a.iter_mut() {
        *v -= m;
    }
}
