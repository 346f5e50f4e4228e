//! Exact inverse of the unit-conductance Laplacian on the torus, applied
//! through d-dimensional FFTs.

use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::lattice::TorusLattice;

/// Fourier symbol of the unit Laplacian: `sum_i 4 sin^2(pi k_i / L)`.
pub fn laplacian_symbol(lattice: &TorusLattice, k_site: usize) -> f64 {
    let l = lattice.side() as f64;
    (0..lattice.dim())
        .map(|i| {
            let s = (std::f64::consts::PI * lattice.coord(k_site, i) as f64 / l).sin();
            4.0 * s * s
        })
        .sum()
}

/// Smallest nonzero eigenvalue of the unit Laplacian on the torus.
pub fn laplacian_min_eigenvalue(lattice: &TorusLattice) -> f64 {
    let s = (std::f64::consts::PI / lattice.side() as f64).sin();
    4.0 * s * s
}

/// Largest eigenvalue of the unit Laplacian on the torus.
pub fn laplacian_max_eigenvalue(lattice: &TorusLattice) -> f64 {
    let l = lattice.side();
    let s = (std::f64::consts::PI * (l / 2) as f64 / l as f64).sin();
    lattice.dim() as f64 * 4.0 * s * s
}

pub struct LaplacianPreconditioner {
    lattice: TorusLattice,
    forward: Arc<dyn Fft<f64>>,
    inverse: Arc<dyn Fft<f64>>,
    inv_symbol: Vec<f64>,
}

impl LaplacianPreconditioner {
    pub fn new(lattice: &TorusLattice) -> Self {
        let mut planner = FftPlanner::new();
        let forward = planner.plan_fft_forward(lattice.side());
        let inverse = planner.plan_fft_inverse(lattice.side());
        let n = lattice.num_sites() as f64;
        let inv_symbol = (0..lattice.num_sites())
            .map(|k| {
                if k == 0 {
                    0.0
                } else {
                    1.0 / (laplacian_symbol(lattice, k) * n)
                }
            })
            .collect();
        Self {
            lattice: *lattice,
            forward,
            inverse,
            inv_symbol,
        }
    }

    /// `out = Delta^+ r`: the mean-free solution of the unit-conductance
    /// problem with right-hand side `r` minus its mean.
    pub fn apply(&self, r: &[f64], out: &mut [f64], buf: &mut Vec<Complex64>) {
        buf.clear();
        buf.extend(r.iter().map(|&v| Complex64::new(v, 0.0)));
        self.transform(buf, &*self.forward);
        for (c, &w) in buf.iter_mut().zip(&self.inv_symbol) {
            *c *= w;
        }
        self.transform(buf, &*self.inverse);
        for (o, c) in out.iter_mut().zip(buf.iter()) {
            *o = c.re;
        }
    }

    fn transform(&self, data: &mut [Complex64], plan: &dyn Fft<f64>) {
        let l = self.lattice.side();
        let n = data.len();
        let mut line = vec![Complex64::new(0.0, 0.0); l];
        let mut scratch = vec![Complex64::new(0.0, 0.0); plan.get_inplace_scratch_len()];
        for axis in 0..self.lattice.dim() {
            let stride = self.lattice.stride(axis);
            if stride == 1 {
                plan.process_with_scratch(data, &mut scratch);
                continue;
            }
            let block = stride * l;
            for outer in (0..n).step_by(block) {
                for inner in 0..stride {
                    let start = outer + inner;
                    for (j, v) in line.iter_mut().enumerate() {
                        *v = data[start + j * stride];
                    }
                    plan.process_with_scratch(&mut line, &mut scratch);
                    for (j, v) in line.iter().enumerate() {
                        data[start + j * stride] = *v;
                    }
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::apply_operator_into;

    #[test]
    fn inverts_unit_laplacian_on_mean_free_fields() {
        for (d, l) in [(1, 7), (2, 8), (3, 4), (2, 5)] {
            let lat = TorusLattice::new(d, l).unwrap();
            let n = lat.num_sites();
            let mut f: Vec<f64> = (0..n).map(|s| ((s * 37 + 11) % 17) as f64 - 8.0).collect();
            crate::numeric::remove_mean(&mut f);
            let pre = LaplacianPreconditioner::new(&lat);
            let mut u = vec![0.0; n];
            let mut buf = Vec::new();
            pre.apply(&f, &mut u, &mut buf);
            let ones = vec![1.0; lat.num_edges()];
            let mut back = vec![0.0; n];
            apply_operator_into(&lat, &ones, &u, &mut back);
            for (a, b) in back.iter().zip(&f) {
                assert!((a - b).abs() < 1e-10, "d={d} l={l}: {a} vs {b}");
            }
            assert!(crate::numeric::pairwise_sum(&u).abs() < 1e-10);
        }
    }

    #[test]
    fn symbol_extremes() {
        let lat = TorusLattice::new(2, 8).unwrap();
        let syms: Vec<f64> = (1..lat.num_sites()).map(|k| laplacian_symbol(&lat, k)).collect();
        let min = syms.iter().cloned().fold(f64::INFINITY, f64::min);
        let max = syms.iter().cloned().fold(0.0, f64::max);
        assert!((min - laplacian_min_eigenvalue(&lat)).abs() < 1e-14);
        assert!((max - laplacian_max_eigenvalue(&lat)).abs() < 1e-14);
    }
}
