//! Exhaustive spectral-gap checks for two-point (Bernoulli) ensembles.
//!
//! Every configuration in `{alpha, beta}^E` is enumerated, so expectations
//! are exact sums. Bit `k` of a configuration index set means edge `k` takes
//! the low value `alpha` (probability `prob`). The oscillation of a statistic
//! with respect to edge `z` is `|zeta(.., z = beta, ..) - zeta(.., z = alpha, ..)|`,
//! the sup minus inf over the two admissible values with all other edges fixed.

use rayon::prelude::*;
use serde::Serialize;

use crate::ensemble::CoefficientField;
use crate::error::{Error, Result};
use crate::homogenize::{averaged_flux, energy_density};
use crate::lattice::{Direction, TorusLattice};
use crate::solver::{LatticeSolver, SolveOptions};

pub const MAX_ENUMERATED_EDGES: usize = 20;

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum Statistic {
    /// `e0 . A_hom e1`.
    HomogenizedEntry { e0: Direction, e1: Direction },
    /// `L^{-d} sum_b a (grad phi + xi)^2`.
    EnergyDensity { xi: Direction },
    /// `(grad phi + xi)([0, e_1]) = D_1 phi + xi_1`.
    GradientAtOrigin { xi: Direction },
}

impl Statistic {
    pub fn name(&self) -> &'static str {
        match self {
            Statistic::HomogenizedEntry { .. } => "homogenized_entry",
            Statistic::EnergyDensity { .. } => "energy_density",
            Statistic::GradientAtOrigin { .. } => "gradient_at_origin",
        }
    }

    fn evaluate(&self, solver: &LatticeSolver, a: &CoefficientField) -> Result<f64> {
        match self {
            Statistic::HomogenizedEntry { e0, e1 } => {
                let phi = solver.solve_corrector(a, e1)?;
                Ok(averaged_flux(a, &phi)
                    .iter()
                    .zip(e0.components())
                    .map(|(f, e)| f * e)
                    .sum())
            }
            Statistic::EnergyDensity { xi } => {
                let phi = solver.solve_corrector(a, xi)?;
                energy_density(a, &phi)
            }
            Statistic::GradientAtOrigin { xi } => {
                let phi = solver.solve_corrector(a, xi)?;
                Ok(phi.shifted_gradient(a.lattice())[0])
            }
        }
    }
}

/// Values of a statistic on every configuration of a two-point law.
#[derive(Debug, Clone)]
pub struct ConfigurationTable {
    pub edges: usize,
    pub prob: f64,
    pub values: Vec<f64>,
}

impl ConfigurationTable {
    pub fn from_values(edges: usize, prob: f64, values: Vec<f64>) -> Result<Self> {
        if values.len() != 1usize << edges {
            return Err(Error::SizeMismatch {
                expected: 1 << edges,
                actual: values.len(),
            });
        }
        Ok(Self { edges, prob, values })
    }

    pub fn enumerate(
        alpha: f64,
        beta: f64,
        prob: f64,
        lattice: &TorusLattice,
        lambda: f64,
        statistic: &Statistic,
        opts: &SolveOptions,
    ) -> Result<Self> {
        let edges = lattice.num_edges();
        if edges > MAX_ENUMERATED_EDGES {
            return Err(Error::TooLarge {
                edges,
                limit: MAX_ENUMERATED_EDGES,
            });
        }
        if !(0.0..=1.0).contains(&prob) {
            return Err(Error::InvalidArgument(format!("probability {prob} outside [0,1]")));
        }
        if !(alpha <= beta) {
            return Err(Error::InvalidArgument(format!("alpha = {alpha} must not exceed beta = {beta}")));
        }
        let solver = LatticeSolver::new(lattice, *opts)?;
        let values = (0..1usize << edges)
            .into_par_iter()
            .map(|config| {
                let a: Vec<f64> = (0..edges)
                    .map(|k| if config >> k & 1 == 1 { alpha } else { beta })
                    .collect();
                let field = CoefficientField::new(*lattice, lambda, a)?;
                statistic.evaluate(&solver, &field)
            })
            .collect::<Result<Vec<f64>>>()?;
        Ok(Self { edges, prob, values })
    }

    pub fn n_configurations(&self) -> usize {
        self.values.len()
    }

    fn weight(&self, config: usize) -> f64 {
        let low = config.count_ones() as i32;
        self.prob.powi(low) * (1.0 - self.prob).powi(self.edges as i32 - low)
    }

    /// `E[f(config)]` summed in configuration order.
    fn expect(&self, f: impl Fn(usize) -> f64) -> f64 {
        let mut s = 0.0;
        for c in 0..self.values.len() {
            let w = self.weight(c);
            if w != 0.0 {
                s += w * f(c);
            }
        }
        s
    }

    pub fn oscillation(&self, config: usize, edge: usize) -> f64 {
        (self.values[config] - self.values[config ^ (1 << edge)]).abs()
    }

    fn osc_power_sum(&self, config: usize, q: f64) -> f64 {
        (0..self.edges).map(|z| self.oscillation(config, z).powf(q)).sum()
    }

    pub fn mean(&self) -> f64 {
        self.expect(|c| self.values[c])
    }

    pub fn variance(&self) -> f64 {
        let m = self.mean();
        self.expect(|c| (self.values[c] - m).powi(2))
    }

    /// `(1/4) sum_z E[osc_z^2]`.
    pub fn efron_stein(&self) -> f64 {
        0.25 * self.expect(|c| self.osc_power_sum(c, 2.0))
    }

    /// `E[(sum_z osc_z^q)^{2/q}]`.
    pub fn sg_rhs(&self, q: f64) -> f64 {
        self.expect(|c| self.osc_power_sum(c, q).powf(2.0 / q))
    }

    /// `E[(zeta - E zeta)^{2p}]`.
    pub fn centered_moment(&self, p: u32) -> f64 {
        let m = self.mean();
        self.expect(|c| (self.values[c] - m).powi(2 * p as i32))
    }

    /// `E[(sum_z osc_z^q)^{2p/q}]`.
    pub fn sg_rhs_power(&self, q: f64, p: u32) -> f64 {
        self.expect(|c| self.osc_power_sum(c, q).powf(2.0 * p as f64 / q))
    }

    pub fn with_offset(&self, offset: f64) -> Self {
        Self {
            values: self.values.iter().map(|v| v + offset).collect(),
            ..self.clone()
        }
    }

    pub fn analyze(&self, q_list: &[f64]) -> Result<SgAnalysis> {
        if let Some(q) = q_list.iter().find(|q| !(**q > 1.0 && **q <= 2.0)) {
            return Err(Error::InvalidArgument(format!("q = {q} outside (1, 2]")));
        }
        let variance = self.variance();
        let per_q = q_list
            .iter()
            .map(|&q| {
                let rhs = self.sg_rhs(q);
                QValue {
                    q,
                    rhs,
                    rho_fit: if variance > 0.0 { Some(rhs / variance) } else { None },
                }
            })
            .collect();
        Ok(SgAnalysis {
            n_configurations: self.n_configurations(),
            edges: self.edges,
            prob: self.prob,
            mean: self.mean(),
            variance,
            efron_stein: self.efron_stein(),
            per_q,
        })
    }

    pub fn analyze_lp(&self, p: u32, q: f64) -> Result<LpCheck> {
        if p < 1 {
            return Err(Error::InvalidArgument("p must be >= 1".into()));
        }
        if !(q > 1.0 && q <= 2.0) {
            return Err(Error::InvalidArgument(format!("q = {q} outside (1, 2]")));
        }
        let centered_moment = self.centered_moment(p);
        let osc_moment = self.sg_rhs_power(q, p);
        Ok(LpCheck {
            p,
            q,
            centered_moment,
            osc_moment,
            ratio: if osc_moment > 0.0 { Some(centered_moment / osc_moment) } else { None },
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct QValue {
    pub q: f64,
    /// `E[(sum_z osc_z^q)^{2/q}]`.
    pub rhs: f64,
    /// Largest admissible constant `rho` in `Var <= rhs / rho`.
    pub rho_fit: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SgAnalysis {
    pub n_configurations: usize,
    pub edges: usize,
    pub prob: f64,
    pub mean: f64,
    pub variance: f64,
    pub efron_stein: f64,
    pub per_q: Vec<QValue>,
}

impl SgAnalysis {
    pub fn efron_stein_holds(&self) -> bool {
        self.variance <= self.efron_stein * (1.0 + 1e-12) + f64::MIN_POSITIVE
    }

    /// The right-hand side is non-increasing in `q` (checked in sorted `q` order).
    pub fn q_monotone(&self) -> bool {
        let mut v: Vec<&QValue> = self.per_q.iter().collect();
        v.sort_by(|a, b| a.q.total_cmp(&b.q));
        v.windows(2).all(|w| w[0].rhs * (1.0 + 1e-12) >= w[1].rhs)
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LpCheck {
    pub p: u32,
    pub q: f64,
    /// `E[(zeta - E zeta)^{2p}]`.
    pub centered_moment: f64,
    /// `E[(sum_z osc_z^q)^{2p/q}]`.
    pub osc_moment: f64,
    /// `centered_moment / osc_moment`: the empirical constant of the `L^{2p}` estimate.
    pub ratio: Option<f64>,
}

#[derive(Debug, Clone, Serialize)]
pub struct SgReport {
    pub alpha: f64,
    pub beta: f64,
    pub statistic: Statistic,
    #[serde(flatten)]
    pub analysis: SgAnalysis,
    pub lp: Option<LpCheck>,
}

#[allow(clippy::too_many_arguments)]
pub fn sg_bruteforce(
    alpha: f64,
    beta: f64,
    prob: f64,
    lattice: &TorusLattice,
    lambda: f64,
    statistic: &Statistic,
    q_list: &[f64],
    opts: &SolveOptions,
) -> Result<SgReport> {
    let table = ConfigurationTable::enumerate(alpha, beta, prob, lattice, lambda, statistic, opts)?;
    Ok(SgReport {
        alpha,
        beta,
        statistic: statistic.clone(),
        analysis: table.analyze(q_list)?,
        lp: None,
    })
}

#[allow(clippy::too_many_arguments)]
pub fn sg_p_check(
    alpha: f64,
    beta: f64,
    prob: f64,
    lattice: &TorusLattice,
    lambda: f64,
    statistic: &Statistic,
    p: u32,
    q: f64,
    opts: &SolveOptions,
) -> Result<SgReport> {
    let table = ConfigurationTable::enumerate(alpha, beta, prob, lattice, lambda, statistic, opts)?;
    Ok(SgReport {
        alpha,
        beta,
        statistic: statistic.clone(),
        analysis: table.analyze(&[q])?,
        lp: Some(table.analyze_lp(p, q)?),
    })
}
