//! Torus Green functions, their mixed second differences, and the
//! sensitivity of the corrector gradient to a single conductance.
//!
//! On the torus the point source must be compatible, so the Green column for
//! source `y` solves `div* a grad G(., y) = delta_y - L^{-d}` with mean zero.
//! The constant background is annihilated by every gradient, which is why the
//! mixed differences below satisfy the same identities as on `Z^d`.

use rayon::prelude::*;
use serde::Serialize;

use crate::ensemble::CoefficientField;
use crate::error::{Error, Result};
use crate::lattice::{gradient_into, Direction, Edge, SiteField};
use crate::numeric::{dot, sum_by};
use crate::solver::{Corrector, LatticeSolver, SolveOptions};

#[derive(Debug, Clone, PartialEq)]
pub struct GreenColumn {
    pub source: usize,
    pub values: SiteField,
}

/// `grad_b [G(., y + e_i) - G(., y)]` over all edges `b`, for `e = [y, y + e_i]`.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedGradientRow {
    pub edge: Edge,
    pub values: Vec<f64>,
}

impl MixedGradientRow {
    pub fn norm_sq(&self) -> f64 {
        dot(&self.values, &self.values)
    }
}

fn source_rhs(n: usize, y: usize) -> SiteField {
    let background = 1.0 / n as f64;
    let mut f = vec![-background; n];
    f[y] += 1.0;
    SiteField(f)
}

fn green_column_with(solver: &LatticeSolver, a: &CoefficientField, y: usize) -> Result<GreenColumn> {
    let n = a.lattice().num_sites();
    if y >= n {
        return Err(Error::InvalidArgument(format!("source site {y} out of range (0..{n})")));
    }
    let values = solver.solve_meanfree(a, &source_rhs(n, y))?;
    Ok(GreenColumn { source: y, values })
}

pub fn green_column(a: &CoefficientField, y: usize, opts: &SolveOptions) -> Result<GreenColumn> {
    let solver = LatticeSolver::new(a.lattice(), *opts)?;
    green_column_with(&solver, a, y)
}

fn mixed_row_from_columns(a: &CoefficientField, e: Edge, g_y: &[f64], g_ye: &[f64]) -> MixedGradientRow {
    let lat = a.lattice();
    let diff: Vec<f64> = g_ye.iter().zip(g_y).map(|(p, q)| p - q).collect();
    let mut values = vec![0.0; lat.num_edges()];
    gradient_into(lat, &diff, &mut values);
    MixedGradientRow { edge: e, values }
}

fn check_edge(a: &CoefficientField, e: Edge) -> Result<()> {
    let lat = a.lattice();
    if e.base >= lat.num_sites() || e.dir >= lat.dim() {
        return Err(Error::InvalidArgument(format!("edge {e:?} is not on the lattice")));
    }
    Ok(())
}

pub fn mixed_gradient_row(a: &CoefficientField, e: Edge, opts: &SolveOptions) -> Result<MixedGradientRow> {
    check_edge(a, e)?;
    let solver = LatticeSolver::new(a.lattice(), *opts)?;
    let y = e.base;
    let ye = a.lattice().forward(y, e.dir);
    let g_y = green_column_with(&solver, a, y)?;
    let g_ye = green_column_with(&solver, a, ye)?;
    Ok(mixed_row_from_columns(a, e, &g_y.values.0, &g_ye.values.0))
}

/// `sum_b grad grad G(b, e) a(b) grad grad G(b, e)`; equals the diagonal
/// entry `grad grad G(e, e)` for an exact solve.
pub fn row_energy(a: &CoefficientField, row: &MixedGradientRow) -> f64 {
    let av = a.values();
    sum_by(row.values.len(), &|k| row.values[k] * av[k] * row.values[k])
}

#[derive(Debug, Clone, Serialize)]
pub struct MixedBoundsReport {
    pub lambda: f64,
    /// `lambda^{-2}`.
    pub bound: f64,
    /// Largest `sum_b (grad grad G(b, e))^2` over source edges `e`.
    pub max_row_sum: f64,
    /// Largest `sum_e (grad grad G(b, e))^2` over edges `b`.
    pub max_column_sum: f64,
    pub argmax_row: usize,
    pub argmax_column: usize,
    /// Largest `|T(b, e) - T(e, b)|` relative to the largest entry.
    pub max_asymmetry: f64,
    /// Largest relative gap in `sum_b T(b,e) a(b) T(b,e) = T(e,e)`.
    pub max_identity_gap: f64,
    pub row_sums: Vec<f64>,
    pub column_sums: Vec<f64>,
}

impl MixedBoundsReport {
    pub fn holds(&self, rel_slack: f64) -> bool {
        let limit = self.bound * (1.0 + rel_slack);
        self.max_row_sum <= limit && self.max_column_sum <= limit
    }
}

/// The full table `T(b, e) = grad grad G(a; b, e)`, row-major in the source edge `e`.
pub fn mixed_gradient_table(a: &CoefficientField, opts: &SolveOptions) -> Result<Vec<Vec<f64>>> {
    let lat = *a.lattice();
    let solver = LatticeSolver::new(&lat, *opts)?;
    let columns: Vec<Vec<f64>> = (0..lat.num_sites())
        .into_par_iter()
        .map(|y| green_column_with(&solver, a, y).map(|c| c.values.0))
        .collect::<Result<_>>()?;
    Ok((0..lat.num_edges())
        .map(|k| {
            let e = lat.edge_at(k);
            let ye = lat.forward(e.base, e.dir);
            mixed_row_from_columns(a, e, &columns[e.base], &columns[ye]).values
        })
        .collect())
}

/// Intended for `L <= 16` in two dimensions; the cost is one solve per site.
pub fn check_mixed_bounds(a: &CoefficientField, opts: &SolveOptions) -> Result<MixedBoundsReport> {
    let table = mixed_gradient_table(a, opts)?;
    let ne = table.len();
    let row_sums: Vec<f64> = table.iter().map(|r| dot(r, r)).collect();
    let column_sums: Vec<f64> = (0..ne)
        .map(|b| sum_by(ne, &|e| table[e][b] * table[e][b]))
        .collect();
    let argmax = |v: &[f64]| {
        v.iter()
            .enumerate()
            .fold((0, f64::NEG_INFINITY), |acc, (i, &x)| if x > acc.1 { (i, x) } else { acc })
    };
    let (argmax_row, max_row_sum) = argmax(&row_sums);
    let (argmax_column, max_column_sum) = argmax(&column_sums);
    let scale = table
        .iter()
        .flat_map(|r| r.iter())
        .fold(0.0_f64, |m, v| m.max(v.abs()));
    let mut max_asymmetry = 0.0_f64;
    for e in 0..ne {
        for b in (e + 1)..ne {
            max_asymmetry = max_asymmetry.max((table[e][b] - table[b][e]).abs());
        }
    }
    let av = a.values();
    let max_identity_gap = (0..ne)
        .map(|e| {
            let lhs = sum_by(ne, &|b| table[e][b] * av[b] * table[e][b]);
            let rhs = table[e][e];
            (lhs - rhs).abs() / rhs.abs().max(f64::MIN_POSITIVE)
        })
        .fold(0.0_f64, f64::max);
    let lambda = a.lambda();
    Ok(MixedBoundsReport {
        lambda,
        bound: lambda.powi(-2),
        max_row_sum,
        max_column_sum,
        argmax_row,
        argmax_column,
        max_asymmetry: if scale > 0.0 { max_asymmetry / scale } else { 0.0 },
        max_identity_gap,
        row_sums,
        column_sums,
    })
}

/// `-grad grad G(a; b, e) (grad phi + xi)(e)`: the derivative of
/// `(grad phi + xi)(b)` with respect to the conductance `a(e)`.
pub fn sensitivity_green(
    a: &CoefficientField,
    phi: &Corrector,
    e: Edge,
    b: Edge,
    opts: &SolveOptions,
) -> Result<f64> {
    check_edge(a, b)?;
    let lat = a.lattice();
    if phi.phi.len() != lat.num_sites() {
        return Err(Error::SizeMismatch {
            expected: lat.num_sites(),
            actual: phi.phi.len(),
        });
    }
    let row = mixed_gradient_row(a, e, opts)?;
    let shifted = phi.shifted_gradient(lat);
    Ok(-row.values[lat.edge_index(b)] * shifted[lat.edge_index(e)])
}

/// Forward difference of `(grad phi + xi)(b)` under `a -> a + delta 1_e`.
///
/// With `a' = a + delta 1_e`, the difference `psi = phi_{a'} - phi_a` solves
/// `div* a' grad psi = -div* (a' - a)(grad phi_a + xi)` exactly. The right-hand
/// side is a dipole across `e`, so `psi` is computed directly instead of
/// subtracting two nearly equal solves, and the base residual is never divided by `delta`.
pub fn finite_difference_sensitivity(
    a: &CoefficientField,
    xi: &Direction,
    e: Edge,
    b: Edge,
    delta: f64,
    opts: &SolveOptions,
) -> Result<f64> {
    check_edge(a, e)?;
    check_edge(a, b)?;
    if !(delta > 0.0) {
        return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
    }
    let lat = *a.lattice();
    let ke = lat.edge_index(e);
    let perturbed = a.perturbed(ke, delta)?;
    let solver = LatticeSolver::new(&lat, *opts)?;
    let base = solver.solve_corrector(a, xi)?;
    let flux = delta * base.shifted_gradient(&lat)[ke];
    let (x, y) = lat.endpoints(e);
    let mut rhs = vec![0.0; lat.num_sites()];
    rhs[x] += flux;
    rhs[y] -= flux;
    let psi = solver.solve_meanfree(&perturbed, &SiteField(rhs))?;
    let (xb, yb) = lat.endpoints(b);
    Ok((psi.0[yb] - psi.0[xb]) / delta)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensemble::{sample, EnsembleSpec, SeedContext};
    use crate::lattice::{apply_operator, TorusLattice};
    use crate::numeric::pairwise_sum;

    fn bernoulli(l: usize, seed: u64) -> CoefficientField {
        let lat = TorusLattice::new(2, l).unwrap();
        sample(&EnsembleSpec::bernoulli(0.25, 0.25, 1.0, 0.5), &lat, SeedContext::new(seed, 0)).unwrap()
    }

    #[test]
    fn green_column_invariants() {
        let a = bernoulli(8, 3);
        let opts = SolveOptions::default();
        let g = green_column(&a, 9, &opts).unwrap();
        assert!(pairwise_sum(&g.values.0).abs() < 1e-12);
        let ag = apply_operator(&a, &g.values).unwrap();
        for (x, v) in ag.0.iter().enumerate() {
            let expect = if x == 9 { 1.0 } else { 0.0 } - 1.0 / 64.0;
            assert!((v - expect).abs() < 1e-9);
        }
        assert!(green_column(&a, 64, &opts).is_err());
    }

    #[test]
    fn diagonal_identity_and_bound() {
        let a = bernoulli(8, 4);
        let opts = SolveOptions::default();
        for k in [0, 17, 63, 101] {
            let e = a.lattice().edge_at(k);
            let row = mixed_gradient_row(&a, e, &opts).unwrap();
            let diag = row.values[k];
            assert!(diag > 0.0 && diag <= 4.0);
            assert!((row_energy(&a, &row) - diag).abs() <= 1e-8 * diag);
            assert!(row.norm_sq() <= 16.0);
        }
    }

    #[test]
    fn zero_direction_has_zero_sensitivity() {
        let a = bernoulli(8, 5);
        let lat = *a.lattice();
        let xi = Direction::new(vec![0.0, 0.0]).unwrap();
        let fd = finite_difference_sensitivity(&a, &xi, lat.edge_at(3), lat.edge_at(40), 1e-6, &SolveOptions::default())
            .unwrap();
        assert_eq!(fd, 0.0);
    }

    #[test]
    fn finite_difference_rejects_out_of_range() {
        let lat = TorusLattice::new(2, 4).unwrap();
        let a = CoefficientField::constant(lat, 0.25, 1.0).unwrap();
        let xi = Direction::axis(2, 0);
        let r = finite_difference_sensitivity(&a, &xi, lat.edge_at(0), lat.edge_at(1), 1e-6, &SolveOptions::default());
        assert!(matches!(r, Err(Error::InvalidField(_))));
        let r = finite_difference_sensitivity(&a, &xi, lat.edge_at(0), lat.edge_at(1), 0.0, &SolveOptions::default());
        assert!(matches!(r, Err(Error::InvalidArgument(_))));
    }
}
