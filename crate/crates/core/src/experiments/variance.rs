//! Variance of `e0 . A_hom e1` across system sizes, and its scaling exponent.

use rayon::prelude::*;
use serde::Serialize;

use crate::ensemble::{sample, EnsembleSpec, SeedContext};
use crate::error::{Error, Result};
use crate::homogenize::{averaged_flux, sample_checks};
use crate::lattice::{Direction, TorusLattice};
use crate::solver::{LatticeSolver, SolveOptions};
use crate::stats::{mean, variance_with_se, weighted_line_fit};

#[derive(Debug, Clone, Serialize)]
pub struct VarianceRow {
    pub side: usize,
    pub n_samples: usize,
    pub mean: f64,
    pub variance: f64,
    pub variance_se: f64,
    pub max_weak_form_gap: f64,
    pub bounds_violations: Option<usize>,
}

#[derive(Debug, Clone, Serialize)]
pub struct VarianceReport {
    pub dim: usize,
    pub rows: Vec<VarianceRow>,
    /// Slope of `ln Var` against `ln L`; `None` when any variance vanishes.
    pub slope: Option<f64>,
    pub slope_se: Option<f64>,
    pub intercept: Option<f64>,
}

/// Samples of `e0 . A_hom(a) e1` on one lattice, with the per-sample
/// weak-form gap and bound check of the `e1` corrector.
pub fn homogenized_samples(
    spec: &EnsembleSpec,
    lattice: &TorusLattice,
    e0: &Direction,
    e1: &Direction,
    n_samples: usize,
    seed: SeedContext,
    opts: &SolveOptions,
) -> Result<Vec<(f64, f64, Option<bool>)>> {
    let solver = LatticeSolver::new(lattice, *opts)?;
    (0..n_samples)
        .into_par_iter()
        .map(|k| {
            let a = sample(spec, lattice, seed.nth(k as u64))?;
            let phi = solver.solve_corrector(&a, e1)?;
            let flux = averaged_flux(&a, &phi);
            let zeta: f64 = flux.iter().zip(e0.components()).map(|(f, e)| f * e).sum();
            let checks = sample_checks(&a, &phi)?;
            Ok((zeta, checks.weak_form_gap, checks.bounds_hold))
        })
        .collect()
}

pub fn variance_scan(
    spec: &EnsembleSpec,
    dim: usize,
    sides: &[usize],
    e0: &Direction,
    e1: &Direction,
    n_samples: usize,
    seed: SeedContext,
    opts: &SolveOptions,
) -> Result<VarianceReport> {
    let mut distinct = sides.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    if distinct.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "variance scan needs at least 3 distinct side lengths, got {sides:?}"
        )));
    }
    if n_samples < 3 {
        return Err(Error::InvalidArgument(format!("need at least 3 samples per side, got {n_samples}")));
    }
    if e0.dim() != dim || e1.dim() != dim {
        return Err(Error::InvalidDirection(format!("e0 and e1 must have {dim} components")));
    }
    spec.validate()?;
    let mut rows = Vec::with_capacity(sides.len());
    for &side in sides {
        let lattice = TorusLattice::new(dim, side)?;
        // each side length draws from its own sample-index block
        let block = seed.nth((side as u64) << 32);
        let samples = homogenized_samples(spec, &lattice, e0, e1, n_samples, block, opts)?;
        let zeta: Vec<f64> = samples.iter().map(|s| s.0).collect();
        let (variance, variance_se) = variance_with_se(&zeta);
        let bounds_violations = if samples.iter().all(|s| s.2.is_some()) {
            Some(samples.iter().filter(|s| s.2 == Some(false)).count())
        } else {
            None
        };
        rows.push(VarianceRow {
            side,
            n_samples,
            mean: mean(&zeta),
            variance,
            variance_se,
            max_weak_form_gap: samples.iter().map(|s| s.1).fold(0.0, f64::max),
            bounds_violations,
        });
    }
    let fit = if rows.iter().all(|r| r.variance > 0.0 && r.variance_se > 0.0) {
        let x: Vec<f64> = rows.iter().map(|r| (r.side as f64).ln()).collect();
        let y: Vec<f64> = rows.iter().map(|r| r.variance.ln()).collect();
        let w: Vec<f64> = rows
            .iter()
            .map(|r| {
                let rel = r.variance_se / r.variance;
                1.0 / (rel * rel)
            })
            .collect();
        weighted_line_fit(&x, &y, &w)
    } else {
        None
    };
    Ok(VarianceReport {
        dim,
        rows,
        slope: fit.map(|f| f.slope),
        slope_se: fit.map(|f| f.slope_se),
        intercept: fit.map(|f| f.intercept),
    })
}
