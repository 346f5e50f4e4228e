//! Random conductance models on the periodic lattice `Z_L^d`.
//!
//! The crate solves corrector and Green-function problems for scalar edge
//! conductances `lambda <= a(e) <= 1`, assembles homogenized coefficients, and
//! runs the Monte-Carlo and exhaustive-enumeration experiments that probe
//! moment bounds, variance scaling and spectral-gap inequalities.

pub mod cli;
pub mod ensemble;
pub mod error;
pub mod experiments;
pub mod fft;
pub mod green;
pub mod homogenize;
pub mod io;
pub mod lattice;
pub mod numeric;
pub mod rng;
pub mod solver;
pub mod stats;

pub use ensemble::{sample, shift_field, stationarity_probe, CoefficientField, EnsembleKind, EnsembleSpec, SeedContext};
pub use error::{ConfigIssue, Error, Result};
pub use lattice::{apply_operator, dirichlet_energy, divergence_star, gradient, Direction, Edge, EdgeField, SiteField, TorusLattice};
pub use solver::{operator_condition_probe, solve_corrector, solve_meanfree, Corrector, LatticeSolver, SolveOptions};
pub use green::{check_mixed_bounds, finite_difference_sensitivity, green_column, mixed_gradient_row, sensitivity_green, MixedBoundsReport};
pub use homogenize::{energy_density, homogenized_matrix, HomogenizedMatrix};
