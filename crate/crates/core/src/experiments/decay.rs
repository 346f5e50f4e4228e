//! Energy decay of an a-harmonic function on nested balls (hole filling).
//!
//! A dipole placed at the antipode of the origin produces `u` with
//! `grad* a grad u = 0` inside every ball `B_R(0)` with `R < L/2 * sqrt(d)`.
//! The Dirichlet energy on `B_{2^n rho0}` then grows geometrically in `n`.

use serde::Serialize;

use crate::ensemble::CoefficientField;
use crate::error::{Error, Result};
use crate::lattice::{gradient, SiteField, TorusLattice};
use crate::numeric::pairwise_sum;
use crate::solver::{LatticeSolver, SolveOptions};
use crate::stats::line_fit;

#[derive(Debug, Clone, Serialize)]
pub struct DecayReport {
    pub radii: Vec<usize>,
    /// `a_n = sum over edges inside B_{2^n rho0} of |grad u|^2`.
    pub energies: Vec<f64>,
    /// `a_n / a_{n+1}`.
    pub ratios: Vec<f64>,
    pub max_ratio: f64,
    /// Least-squares slope of `log2 a_n` against `n`.
    pub alpha_bar: Option<f64>,
    pub nondecreasing: bool,
}

/// The two dipole sources: the antipode of the origin and its `e_1` neighbour.
pub fn dipole_sources(lattice: &TorusLattice) -> (usize, usize) {
    let half = (lattice.side() / 2) as i64;
    let far = lattice.site_index(&vec![half; lattice.dim()]);
    (far, lattice.forward(far, 0))
}

pub fn decay_probe(a: &CoefficientField, rho0: usize, n_max: usize, opts: &SolveOptions) -> Result<DecayReport> {
    let lat = a.lattice();
    if rho0 == 0 {
        return Err(Error::Geometry("rho0 must be positive".into()));
    }
    let r_max = n_max
        .try_into()
        .ok()
        .and_then(|s: u32| 1usize.checked_shl(s))
        .and_then(|f| f.checked_mul(rho0))
        .ok_or_else(|| Error::Geometry(format!("2^{n_max} * {rho0} overflows")))?;
    if 2 * r_max > lat.side() {
        return Err(Error::Geometry(format!(
            "largest ball radius {r_max} exceeds half the side length {}",
            lat.side()
        )));
    }
    let origin = vec![0.0; lat.dim()];
    let r_max2 = (r_max * r_max) as f64;
    let (far, far2) = dipole_sources(lat);
    for s in [far, far2] {
        if lat.torus_dist2(s, &origin) <= r_max2 {
            return Err(Error::Geometry(format!(
                "source {:?} lies inside the ball of radius {r_max}",
                lat.coords(s)
            )));
        }
    }

    let mut f = SiteField::zeros(lat);
    f.0[far] = 1.0;
    f.0[far2] = -1.0;
    let u = LatticeSolver::new(lat, *opts)?.solve_meanfree(a, &f)?;
    let g = gradient(&u, lat)?;

    let dist2: Vec<f64> = (0..lat.num_sites()).map(|x| lat.torus_dist2(x, &origin)).collect();
    let radii: Vec<usize> = (0..=n_max).map(|n| rho0 << n).collect();
    let energies: Vec<f64> = radii
        .iter()
        .map(|&r| {
            let r2 = (r * r) as f64;
            let terms: Vec<f64> = (0..lat.num_edges())
                .filter_map(|k| {
                    let (x, y) = lat.endpoints(lat.edge_at(k));
                    (dist2[x] <= r2 && dist2[y] <= r2).then(|| g.0[k] * g.0[k])
                })
                .collect();
            pairwise_sum(&terms)
        })
        .collect();
    let ratios: Vec<f64> = energies.windows(2).map(|w| w[0] / w[1]).collect();
    let max_ratio = ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let nondecreasing = energies.windows(2).all(|w| w[0] <= w[1]);
    let alpha_bar = if energies.len() >= 2 && energies.iter().all(|e| *e > 0.0) {
        let n: Vec<f64> = (0..energies.len()).map(|i| i as f64).collect();
        let y: Vec<f64> = energies.iter().map(|e| e.log2()).collect();
        line_fit(&n, &y).map(|fit| fit.slope)
    } else {
        None
    };
    Ok(DecayReport {
        radii,
        energies,
        ratios,
        max_ratio,
        alpha_bar,
        nondecreasing,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn geometry_checks() {
        let lat = TorusLattice::new(2, 16).unwrap();
        let a = CoefficientField::constant(lat, 0.5, 1.0).unwrap();
        let o = SolveOptions::default();
        assert!(matches!(decay_probe(&a, 2, 3, &o), Err(Error::Geometry(_))));
        assert!(matches!(decay_probe(&a, 0, 1, &o), Err(Error::Geometry(_))));
        // 1-D: the antipode sits exactly on the boundary of B_{L/2}
        let lat1 = TorusLattice::new(1, 16).unwrap();
        let a1 = CoefficientField::constant(lat1, 0.5, 1.0).unwrap();
        assert!(matches!(decay_probe(&a1, 2, 2, &o), Err(Error::Geometry(_))));
    }

    #[test]
    fn constant_field_decays() {
        let lat = TorusLattice::new(2, 32).unwrap();
        let a = CoefficientField::constant(lat, 0.5, 1.0).unwrap();
        let r = decay_probe(&a, 2, 3, &SolveOptions::default()).unwrap();
        assert_eq!(r.radii, vec![2, 4, 8, 16]);
        assert!(r.nondecreasing);
        assert!(r.max_ratio < 1.0);
        assert!(r.alpha_bar.unwrap() > 0.0);
    }
}
