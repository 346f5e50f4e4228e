//! Homogenized coefficients and corrector energy densities.

use serde::Serialize;

use crate::ensemble::CoefficientField;
use crate::error::{Error, Result};
use crate::lattice::{Direction, TorusLattice};
use crate::numeric::sum_by;
use crate::solver::{Corrector, LatticeSolver, SolveOptions};

/// The `d x d` effective matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct HomogenizedMatrix {
    pub dim: usize,
    pub entries: Vec<f64>,
}

impl HomogenizedMatrix {
    pub fn get(&self, row: usize, col: usize) -> f64 {
        self.entries[row * self.dim + col]
    }

    /// `e0 . A e1`.
    pub fn bilinear(&self, e0: &Direction, e1: &Direction) -> f64 {
        let (u, v) = (e0.components(), e1.components());
        let mut s = 0.0;
        for j in 0..self.dim {
            for i in 0..self.dim {
                s += u[j] * self.get(j, i) * v[i];
            }
        }
        s
    }

    pub fn max_asymmetry(&self) -> f64 {
        let mut m = 0.0_f64;
        for j in 0..self.dim {
            for i in 0..j {
                m = m.max((self.get(j, i) - self.get(i, j)).abs());
            }
        }
        m
    }
}

/// Averaged flux `A_hom xi = L^{-d} sum_x a (grad phi + xi)` along each axis.
pub fn averaged_flux(a: &CoefficientField, phi: &Corrector) -> Vec<f64> {
    let lat = a.lattice();
    let d = lat.dim();
    let n = lat.num_sites();
    let g = phi.shifted_gradient(lat);
    let av = a.values();
    (0..d)
        .map(|j| sum_by(n, &|x| av[x * d + j] * g[x * d + j]) / n as f64)
        .collect()
}

pub fn homogenized_matrix_with(solver: &LatticeSolver, a: &CoefficientField) -> Result<HomogenizedMatrix> {
    let d = a.lattice().dim();
    let mut entries = vec![0.0; d * d];
    for i in 0..d {
        let phi = solver.solve_corrector(a, &Direction::axis(d, i))?;
        for (j, f) in averaged_flux(a, &phi).into_iter().enumerate() {
            entries[j * d + i] = f;
        }
    }
    Ok(HomogenizedMatrix { dim: d, entries })
}

pub fn homogenized_matrix(a: &CoefficientField, opts: &SolveOptions) -> Result<HomogenizedMatrix> {
    homogenized_matrix_with(&LatticeSolver::new(a.lattice(), *opts)?, a)
}

/// `L^{-d} sum_b a(b) (grad phi + xi)(b)^2`.
pub fn energy_density(a: &CoefficientField, phi: &Corrector) -> Result<f64> {
    let lat = a.lattice();
    if phi.phi.len() != lat.num_sites() || phi.xi.dim() != lat.dim() {
        return Err(Error::InvalidArgument(
            "corrector does not belong to this coefficient field's lattice".into(),
        ));
    }
    let g = phi.shifted_gradient(lat);
    let av = a.values();
    Ok(sum_by(g.len(), &|k| av[k] * g[k] * g[k]) / lat.num_sites() as f64)
}

/// Harmonic and arithmetic means of the conductances on edges along `axis`.
pub fn axis_means(a: &CoefficientField, axis: usize) -> (f64, f64) {
    let lat: &TorusLattice = a.lattice();
    let d = lat.dim();
    let n = lat.num_sites();
    let av = a.values();
    let inv = sum_by(n, &|x| 1.0 / av[x * d + axis]) / n as f64;
    let arith = sum_by(n, &|x| av[x * d + axis]) / n as f64;
    (1.0 / inv, arith)
}

/// The axis of a unit coordinate vector, if `xi` is one.
pub fn as_axis(xi: &Direction) -> Option<usize> {
    let c = xi.components();
    let ones: Vec<usize> = (0..c.len()).filter(|&i| c[i] == 1.0).collect();
    if ones.len() == 1 && c.iter().filter(|&&v| v != 0.0).count() == 1 {
        Some(ones[0])
    } else {
        None
    }
}

/// Per-sample consistency of one solved corrector: the gap between
/// `xi . A_hom xi` and the energy density, and the series/parallel bounds
/// when `xi` is a coordinate axis.
#[derive(Debug, Clone, Copy, Serialize)]
pub struct SampleChecks {
    pub quadratic: f64,
    pub energy: f64,
    pub weak_form_gap: f64,
    pub bounds_hold: Option<bool>,
}

pub fn sample_checks(a: &CoefficientField, phi: &Corrector) -> Result<SampleChecks> {
    let flux = averaged_flux(a, phi);
    let xi = phi.xi.components();
    let quadratic: f64 = flux.iter().zip(xi).map(|(f, x)| f * x).sum();
    let energy = energy_density(a, phi)?;
    let weak_form_gap = (quadratic - energy).abs() / energy.abs().max(f64::MIN_POSITIVE);
    let bounds_hold = as_axis(&phi.xi).map(|axis| {
        let (harmonic, arith) = axis_means(a, axis);
        let slack = 1e-10 * arith;
        harmonic - slack <= quadratic && quadratic <= arith + slack
    });
    Ok(SampleChecks {
        quadratic,
        energy,
        weak_form_gap,
        bounds_hold,
    })
}
