//! Preconditioned conjugate gradients for `div* a grad u = f` on the
//! mean-free subspace of the torus.
//!
//! The preconditioner is the exact inverse of the unit-conductance Laplacian
//! (via FFT). Since `lambda <= a <= 1`, the preconditioned operator has
//! spectrum in `[lambda, 1]` on mean-free fields, so the iteration count is
//! bounded independently of `L`.

use rustfft::num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::ensemble::CoefficientField;
use crate::error::{Error, Result};
use crate::fft::LaplacianPreconditioner;
use crate::lattice::{apply_operator_into, divergence_star_into, gradient_into, Direction, SiteField, TorusLattice};
use crate::numeric::{self, dot, norm1, norm2, pairwise_sum};
use crate::rng::{counter_hash, unit_f64};

/// Iterations between re-projections of the iterate and residual onto the
/// mean-free subspace.
const PROJECT_EVERY: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SolveOptions {
    pub rel_tol: f64,
    /// `None` selects `ceil(50 sqrt(1/lambda) ln(1/rel_tol))`.
    pub max_iter: Option<usize>,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            max_iter: None,
        }
    }
}

impl SolveOptions {
    pub fn with_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            max_iter: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.rel_tol > 0.0 && self.rel_tol <= 1e-6) {
            return Err(Error::InvalidOptions(format!(
                "rel_tol = {} must lie in (0, 1e-6]",
                self.rel_tol
            )));
        }
        if self.max_iter == Some(0) {
            return Err(Error::InvalidOptions("max_iter must be >= 1".into()));
        }
        Ok(())
    }

    pub fn max_iter_for(&self, lambda: f64) -> usize {
        self.max_iter
            .unwrap_or_else(|| (50.0 * (1.0 / lambda).sqrt() * (1.0 / self.rel_tol).ln()).ceil() as usize)
    }
}

/// Solution of `div* a (grad phi + xi) = 0`, pinned so that `phi(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct Corrector {
    pub phi: SiteField,
    pub xi: Direction,
    /// `|div* a (grad phi + xi)| / |div* a xi|`, recomputed after the solve.
    pub residual: f64,
    pub iterations: usize,
}

impl Corrector {
    /// `(grad phi + xi)(b)` for every edge.
    pub fn shifted_gradient(&self, lattice: &TorusLattice) -> Vec<f64> {
        let d = lattice.dim();
        let mut g = vec![0.0; lattice.num_edges()];
        gradient_into(lattice, &self.phi.0, &mut g);
        for (k, v) in g.iter_mut().enumerate() {
            *v += self.xi.components()[k % d];
        }
        g
    }
}

/// Reusable solver state for one lattice: FFT plans and scratch buffers.
pub struct LatticeSolver {
    lattice: TorusLattice,
    pre: LaplacianPreconditioner,
    opts: SolveOptions,
}

#[derive(Debug, Clone, Copy)]
struct CgOutcome {
    iterations: usize,
    residual: f64,
}

impl LatticeSolver {
    pub fn new(lattice: &TorusLattice, opts: SolveOptions) -> Result<Self> {
        opts.validate()?;
        Ok(Self {
            lattice: *lattice,
            pre: LaplacianPreconditioner::new(lattice),
            opts,
        })
    }

    pub fn options(&self) -> &SolveOptions {
        &self.opts
    }

    fn check_field(&self, a: &CoefficientField) -> Result<()> {
        if a.lattice() != &self.lattice {
            return Err(Error::InvalidArgument(
                "coefficient field lives on a different lattice than the solver".into(),
            ));
        }
        Ok(())
    }

    pub fn solve_corrector(&self, a: &CoefficientField, xi: &Direction) -> Result<Corrector> {
        self.check_field(a)?;
        let lat = &self.lattice;
        let xi_edges = xi.edge_field(lat)?;
        let n = lat.num_sites();
        // div* a grad phi = -div* (a xi)
        let flux: Vec<f64> = a.values().iter().zip(&xi_edges.0).map(|(a, x)| a * x).collect();
        let mut rhs = vec![0.0; n];
        divergence_star_into(lat, &flux, &mut rhs);
        for v in rhs.iter_mut() {
            *v = -*v;
        }
        let rhs_norm = norm2(&rhs);
        if rhs_norm == 0.0 {
            return Ok(Corrector {
                phi: SiteField::zeros(lat),
                xi: xi.clone(),
                residual: 0.0,
                iterations: 0,
            });
        }
        let mut phi = vec![0.0; n];
        let out = self.cg(a, &rhs, &mut phi)?;
        let origin = phi[0];
        for v in phi.iter_mut() {
            *v -= origin;
        }
        Ok(Corrector {
            phi: SiteField(phi),
            xi: xi.clone(),
            residual: out.residual,
            iterations: out.iterations,
        })
    }

    pub fn solve_meanfree(&self, a: &CoefficientField, f: &SiteField) -> Result<SiteField> {
        self.check_field(a)?;
        self.lattice.check_sites(f.len())?;
        let sum = pairwise_sum(&f.0);
        let allowed = 1e-10 * norm1(&f.0);
        if sum.abs() > allowed {
            return Err(Error::Incompatible { sum, allowed });
        }
        let mut rhs = f.0.clone();
        numeric::remove_mean(&mut rhs);
        let mut u = vec![0.0; rhs.len()];
        if norm2(&rhs) == 0.0 {
            return Ok(SiteField(u));
        }
        self.cg(a, &rhs, &mut u)?;
        Ok(SiteField(u))
    }

    /// Restarted PCG: each restart recomputes the true residual, so the
    /// returned residual is never the recursively updated estimate.
    fn cg(&self, a: &CoefficientField, b: &[f64], x: &mut [f64]) -> Result<CgOutcome> {
        let lat = &self.lattice;
        let av = a.values();
        let n = b.len();
        let max_iter = self.opts.max_iter_for(a.lambda());
        let b_norm = norm2(b);
        let target = self.opts.rel_tol * b_norm;

        let mut r = vec![0.0; n];
        let mut z = vec![0.0; n];
        let mut p = vec![0.0; n];
        let mut ap = vec![0.0; n];
        let mut buf: Vec<Complex64> = Vec::with_capacity(n);
        let mut iterations = 0;

        loop {
            apply_operator_into(lat, av, x, &mut ap);
            for i in 0..n {
                r[i] = b[i] - ap[i];
            }
            numeric::remove_mean(&mut r);
            let true_res = norm2(&r);
            if true_res <= target {
                return Ok(CgOutcome {
                    iterations,
                    residual: true_res / b_norm,
                });
            }
            if iterations >= max_iter {
                return Err(Error::NotConverged {
                    iterations,
                    residual: true_res / b_norm,
                    target: self.opts.rel_tol,
                });
            }

            self.pre.apply(&r, &mut z, &mut buf);
            p.copy_from_slice(&z);
            let mut rz = dot(&r, &z);
            let mut since_projection = 0;
            let restart_at = iterations;
            while iterations < max_iter {
                apply_operator_into(lat, av, &p, &mut ap);
                let pap = dot(&p, &ap);
                if pap <= 0.0 {
                    break;
                }
                let alpha = rz / pap;
                for i in 0..n {
                    x[i] += alpha * p[i];
                    r[i] -= alpha * ap[i];
                }
                iterations += 1;
                since_projection += 1;
                if since_projection == PROJECT_EVERY {
                    numeric::remove_mean(x);
                    numeric::remove_mean(&mut r);
                    since_projection = 0;
                }
                if norm2(&r) <= target {
                    break;
                }
                self.pre.apply(&r, &mut z, &mut buf);
                let rz_new = dot(&r, &z);
                let beta = rz_new / rz;
                rz = rz_new;
                for i in 0..n {
                    p[i] = z[i] + beta * p[i];
                }
            }
            numeric::remove_mean(x);
            if iterations == restart_at {
                // breakdown with no progress; the true residual cannot improve
                return Err(Error::NotConverged {
                    iterations,
                    residual: true_res / b_norm,
                    target: self.opts.rel_tol,
                });
            }
        }
    }

    /// Rayleigh-quotient estimates of the extreme eigenvalues of `div* a grad`
    /// on mean-free fields: inverse power iteration for the smallest, power
    /// iteration for the largest.
    pub fn condition_probe(&self, a: &CoefficientField, power_iters: usize, inverse_iters: usize) -> Result<(f64, f64)> {
        self.check_field(a)?;
        let lat = &self.lattice;
        let n = lat.num_sites();
        let start = || {
            let mut v: Vec<f64> = (0..n)
                .map(|k| unit_f64(counter_hash(0x5eed, 0, k as u64, 7)) - 0.5)
                .collect();
            numeric::remove_mean(&mut v);
            let s = norm2(&v);
            v.iter_mut().for_each(|x| *x /= s);
            v
        };
        let mut av = vec![0.0; n];
        let rayleigh = |v: &[f64], av: &mut Vec<f64>| {
            apply_operator_into(lat, a.values(), v, av);
            dot(v, av) / dot(v, v)
        };

        let mut v = start();
        for _ in 0..power_iters {
            apply_operator_into(lat, a.values(), &v, &mut av);
            numeric::remove_mean(&mut av);
            let s = norm2(&av);
            v.iter_mut().zip(&av).for_each(|(x, y)| *x = y / s);
        }
        let lambda_max = rayleigh(&v, &mut av);

        let mut w = SiteField(start());
        for _ in 0..inverse_iters {
            let mut next = self.solve_meanfree(a, &w)?;
            let s = norm2(&next.0);
            next.0.iter_mut().for_each(|x| *x /= s);
            w = next;
        }
        let lambda_min = rayleigh(&w.0, &mut av);
        Ok((lambda_min, lambda_max))
    }
}

pub fn solve_corrector(a: &CoefficientField, xi: &Direction, opts: &SolveOptions) -> Result<Corrector> {
    LatticeSolver::new(a.lattice(), *opts)?.solve_corrector(a, xi)
}

pub fn solve_meanfree(a: &CoefficientField, f: &SiteField, opts: &SolveOptions) -> Result<SiteField> {
    LatticeSolver::new(a.lattice(), *opts)?.solve_meanfree(a, f)
}

/// `(lambda_min_est, lambda_max_est)` of the operator on the mean-free subspace.
pub fn operator_condition_probe(a: &CoefficientField) -> Result<(f64, f64)> {
    LatticeSolver::new(a.lattice(), SolveOptions::default())?.condition_probe(a, 400, 40)
}
