//! Subcommand dispatch for the `homlab` binary.

use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use crate::ensemble::{sample, stationarity_probe, CoefficientField, EnsembleKind, SeedContext};
use crate::error::{Error, Result};
use crate::experiments::{
    decay_probe, moment_estimate, sg_bruteforce, sg_p_check, variance_scan, DecayReport, Statistic,
};
use crate::green::{check_mixed_bounds, green_column, mixed_gradient_row, row_energy};
use crate::homogenize::{averaged_flux, axis_means, energy_density, homogenized_matrix};
use crate::io::config::{Command, RunConfig, StatisticName};
use crate::io::dump::{dump_field, load_field};
use crate::io::report::{cell, fmt_f64, to_json, write_atomic, Metadata, Table};
use crate::lattice::{gradient, TorusLattice};
use crate::numeric::norm2;
use crate::solver::solve_corrector;

/// A module error tagged with the pipeline stage that raised it.
#[derive(Debug, thiserror::Error)]
#[error("{stage}: {source}")]
pub struct StageError {
    pub stage: &'static str,
    #[source]
    pub source: Error,
}

trait Stage<T> {
    fn stage(self, stage: &'static str) -> std::result::Result<T, StageError>;
}

impl<T> Stage<T> for Result<T> {
    fn stage(self, stage: &'static str) -> std::result::Result<T, StageError> {
        self.map_err(|source| StageError { stage, source })
    }
}

impl StageError {
    /// Machine-readable error document written to stderr on failure.
    pub fn to_report(&self) -> Value {
        let mut err = json!({
            "stage": self.stage,
            "kind": self.source.kind(),
            "message": self.source.to_string(),
        });
        if let Error::Config(issues) = &self.source {
            err["issues"] = serde_json::to_value(issues).unwrap_or(Value::Null);
        }
        json!({ "error": err })
    }

    pub fn exit_code(&self) -> i32 {
        match self.source {
            Error::Config(_) => 2,
            _ => 1,
        }
    }
}

pub struct RunOutput {
    pub config: RunConfig,
    pub science: Value,
    pub table: Option<Table>,
}

#[derive(Serialize)]
struct Document<'a> {
    command: Command,
    config: &'a RunConfig,
    science: &'a Value,
    metadata: &'a Metadata,
}

impl RunOutput {
    /// The deterministic part of the report.
    pub fn science_json(&self) -> Result<String> {
        to_json(&self.science)
    }

    pub fn to_json(&self, metadata: &Metadata) -> Result<String> {
        to_json(&Document {
            command: self.config.command,
            config: &self.config,
            science: &self.science,
            metadata,
        })
    }

    /// The CSV companion of a JSON report path.
    pub fn csv_path(json_path: &Path) -> PathBuf {
        json_path.with_extension("csv")
    }

    /// Writes the JSON report (and CSV table, if any) next to each other, or
    /// returns the JSON text when no output path is configured.
    pub fn write(&self, metadata: &Metadata) -> Result<Option<String>> {
        let text = self.to_json(metadata)?;
        match &self.config.out {
            None => Ok(Some(text)),
            Some(path) => {
                if let Some(t) = &self.table {
                    write_atomic(&Self::csv_path(path), &t.to_csv()?)?;
                }
                write_atomic(path, text.as_bytes())?;
                Ok(None)
            }
        }
    }
}

fn to_value<T: Serialize>(v: &T) -> std::result::Result<Value, StageError> {
    serde_json::to_value(v).map_err(|e| StageError {
        stage: "report",
        source: Error::Report(e.to_string()),
    })
}

fn single_field(cfg: &RunConfig) -> std::result::Result<CoefficientField, StageError> {
    if let Some(path) = &cfg.field {
        return load_field(path).stage("load-field");
    }
    let lattice = cfg.lattice().stage("lattice")?;
    let a = sample(&cfg.ensemble, &lattice, SeedContext::new(cfg.seed, cfg.sample_index)).stage("sample")?;
    if let Some(path) = &cfg.dump {
        dump_field(&a, path).stage("dump-field")?;
    }
    Ok(a)
}

fn lattice_value(lat: &TorusLattice, lambda: f64) -> Value {
    json!({"d": lat.dim(), "L": lat.side(), "lambda": lambda})
}

fn statistic(cfg: &RunConfig) -> Statistic {
    match cfg.statistic {
        StatisticName::HomogenizedEntry => Statistic::HomogenizedEntry {
            e0: cfg.e0.clone(),
            e1: cfg.e1.clone(),
        },
        StatisticName::EnergyDensity => Statistic::EnergyDensity { xi: cfg.xi.clone() },
        StatisticName::GradientAtOrigin => Statistic::GradientAtOrigin { xi: cfg.xi.clone() },
    }
}

fn two_point(cfg: &RunConfig) -> std::result::Result<(f64, f64, f64), StageError> {
    match cfg.ensemble.kind {
        EnsembleKind::Bernoulli { alpha, beta, p_low } => Ok((alpha, beta, p_low)),
        _ => Err(StageError {
            stage: "config",
            source: Error::InvalidEnsemble("enumeration needs a bernoulli ensemble".into()),
        }),
    }
}

/// Seeds for side length `side` in multi-size sweeps: a disjoint block of sample indices.
pub fn side_seed(cfg: &RunConfig, side: usize) -> SeedContext {
    SeedContext::new(cfg.seed, cfg.sample_index).nth((side as u64) << 32)
}

pub fn run(cfg: &RunConfig) -> std::result::Result<RunOutput, StageError> {
    let opts = &cfg.solver;
    let (science, table) = match cfg.command {
        Command::Corrector => {
            let a = single_field(cfg)?;
            let lat = *a.lattice();
            let phi = solve_corrector(&a, &cfg.xi, opts).stage("solve")?;
            let grad = gradient(&phi.phi, &lat).stage("solve")?;
            let science = json!({
                "lattice": lattice_value(&lat, a.lambda()),
                "residual": phi.residual,
                "iterations": phi.iterations,
                "grad_phi_norm": norm2(&grad.0),
                "phi_max_abs": phi.phi.0.iter().fold(0.0_f64, |m, v| m.max(v.abs())),
                "flux": averaged_flux(&a, &phi),
                "energy_density": energy_density(&a, &phi).stage("solve")?,
            });
            (science, None)
        }
        Command::Green => {
            let a = single_field(cfg)?;
            let lat = *a.lattice();
            let y = lat.site_index(&cfg.source);
            let col = green_column(&a, y, opts).stage("solve")?;
            let edge = lat.edge(y, cfg.edge_dir);
            let row = mixed_gradient_row(&a, edge, opts).stage("solve")?;
            let mut t = Table::new(&["site", "coords", "green"]);
            for (x, v) in col.values.0.iter().enumerate() {
                let c: Vec<String> = lat.coords(x).iter().map(|c| c.to_string()).collect();
                t.push(vec![x.to_string(), c.join(" "), fmt_f64(*v)]);
            }
            let science = json!({
                "lattice": lattice_value(&lat, a.lambda()),
                "source_site": y,
                "green": col.values.0,
                "mixed_edge": edge,
                "mixed_row": row.values,
                "mixed_row_norm_sq": row.norm_sq(),
                "mixed_row_energy": row_energy(&a, &row),
            });
            (science, Some(t))
        }
        Command::CheckGreenBounds => {
            let a = single_field(cfg)?;
            let r = check_mixed_bounds(&a, opts).stage("solve")?;
            let mut t = Table::new(&["edge", "row_sum", "column_sum"]);
            for (k, (rs, cs)) in r.row_sums.iter().zip(&r.column_sums).enumerate() {
                t.push(vec![k.to_string(), fmt_f64(*rs), fmt_f64(*cs)]);
            }
            let mut science = to_value(&r)?;
            science["lattice"] = lattice_value(a.lattice(), a.lambda());
            science["holds"] = json!(r.holds(1e-6));
            (science, Some(t))
        }
        Command::Homogenize => {
            let a = single_field(cfg)?;
            let m = homogenized_matrix(&a, opts).stage("solve")?;
            let d = m.dim;
            let means: Vec<(f64, f64)> = (0..d).map(|i| axis_means(&a, i)).collect();
            let bounds_hold = (0..d).all(|i| {
                let slack = 1e-10 * means[i].1;
                means[i].0 - slack <= m.get(i, i) && m.get(i, i) <= means[i].1 + slack
            });
            let science = json!({
                "lattice": lattice_value(a.lattice(), a.lambda()),
                "matrix": m.entries,
                "max_asymmetry": m.max_asymmetry(),
                "harmonic_means": means.iter().map(|m| m.0).collect::<Vec<_>>(),
                "arithmetic_means": means.iter().map(|m| m.1).collect::<Vec<_>>(),
                "bounds_hold": bounds_hold,
            });
            (science, None)
        }
        Command::Moments => {
            let mut reports = Vec::new();
            let mut t = Table::new(&["L", "n_samples", "estimate", "standard_error", "f2", "ratio", "ratio_se"]);
            for &side in &cfg.sides {
                let lat = TorusLattice::new(cfg.d, side).stage("lattice")?;
                let r = moment_estimate(&cfg.ensemble, &lat, &cfg.xi, cfg.p, cfg.n_samples, side_seed(cfg, side), opts)
                    .stage("moments")?;
                t.push(vec![
                    side.to_string(),
                    r.n_samples.to_string(),
                    fmt_f64(r.estimate),
                    cell(Some(r.standard_error)),
                    fmt_f64(r.f2),
                    fmt_f64(r.ratio),
                    cell(Some(r.ratio_se)),
                ]);
                reports.push(r);
            }
            (json!({ "moments": to_value(&reports)? }), Some(t))
        }
        Command::VarianceScan => {
            let seed = SeedContext::new(cfg.seed, cfg.sample_index);
            let r = variance_scan(&cfg.ensemble, cfg.d, &cfg.sides, &cfg.e0, &cfg.e1, cfg.n_samples, seed, opts)
                .stage("variance-scan")?;
            let mut t = Table::new(&["L", "n_samples", "mean", "variance", "variance_se", "max_weak_form_gap"]);
            for row in &r.rows {
                t.push(vec![
                    row.side.to_string(),
                    row.n_samples.to_string(),
                    fmt_f64(row.mean),
                    fmt_f64(row.variance),
                    cell(Some(row.variance_se)),
                    fmt_f64(row.max_weak_form_gap),
                ]);
            }
            (to_value(&r)?, Some(t))
        }
        Command::SgCheck => {
            let (alpha, beta, prob) = two_point(cfg)?;
            let lat = cfg.lattice().stage("lattice")?;
            let r = sg_bruteforce(alpha, beta, prob, &lat, cfg.ensemble.lambda, &statistic(cfg), &cfg.q_list, opts)
                .stage("enumerate")?;
            let mut t = Table::new(&["q", "rhs", "rho_fit"]);
            for v in &r.analysis.per_q {
                t.push(vec![fmt_f64(v.q), fmt_f64(v.rhs), cell(v.rho_fit)]);
            }
            let mut science = to_value(&r)?;
            science["efron_stein_holds"] = json!(r.analysis.efron_stein_holds());
            science["q_monotone"] = json!(r.analysis.q_monotone());
            (science, Some(t))
        }
        Command::SgPCheck => {
            let (alpha, beta, prob) = two_point(cfg)?;
            let lat = cfg.lattice().stage("lattice")?;
            let stat = statistic(cfg);
            let mut t = Table::new(&["p", "q", "centered_moment", "osc_moment", "ratio"]);
            let mut reports = Vec::new();
            for &q in &cfg.q_list {
                let r = sg_p_check(alpha, beta, prob, &lat, cfg.ensemble.lambda, &stat, cfg.p as u32, q, opts)
                    .stage("enumerate")?;
                if let Some(lp) = &r.lp {
                    t.push(vec![
                        lp.p.to_string(),
                        fmt_f64(lp.q),
                        fmt_f64(lp.centered_moment),
                        fmt_f64(lp.osc_moment),
                        cell(lp.ratio),
                    ]);
                }
                reports.push(r);
            }
            (json!({ "checks": to_value(&reports)? }), Some(t))
        }
        Command::Decay => {
            let reports: Vec<DecayReport> = if cfg.field.is_some() {
                let a = single_field(cfg)?;
                vec![decay_probe(&a, cfg.rho0, cfg.n_max, opts).stage("decay")?]
            } else {
                let lat = cfg.lattice().stage("lattice")?;
                let base = SeedContext::new(cfg.seed, cfg.sample_index);
                (0..cfg.n_samples)
                    .into_par_iter()
                    .map(|k| {
                        let a = sample(&cfg.ensemble, &lat, base.nth(k as u64)).stage("sample")?;
                        decay_probe(&a, cfg.rho0, cfg.n_max, opts).stage("decay")
                    })
                    .collect::<std::result::Result<_, _>>()?
            };
            let mut t = Table::new(&["sample", "n", "radius", "energy", "ratio"]);
            for (k, r) in reports.iter().enumerate() {
                for (n, (radius, e)) in r.radii.iter().zip(&r.energies).enumerate() {
                    t.push(vec![
                        k.to_string(),
                        n.to_string(),
                        radius.to_string(),
                        fmt_f64(*e),
                        cell(r.ratios.get(n).copied()),
                    ]);
                }
            }
            let max_ratio = reports.iter().map(|r| r.max_ratio).fold(f64::NEG_INFINITY, f64::max);
            let min_alpha = reports
                .iter()
                .map(|r| r.alpha_bar)
                .try_fold(f64::INFINITY, |m, a| a.map(|a| m.min(a)));
            let science = json!({
                "samples": to_value(&reports)?,
                "max_ratio": max_ratio,
                "min_alpha_bar": min_alpha,
                "all_nondecreasing": reports.iter().all(|r| r.nondecreasing),
            });
            (science, Some(t))
        }
        Command::ProbeStationarity => {
            let lat = cfg.lattice().stage("lattice")?;
            let seed = SeedContext::new(cfg.seed, cfg.sample_index);
            let r = stationarity_probe(&cfg.ensemble, &lat, cfg.n_samples, seed).stage("probe")?;
            let mut t = Table::new(&["edge", "mean", "se"]);
            for (k, (m, s)) in r.per_edge_mean.iter().zip(&r.per_edge_se).enumerate() {
                t.push(vec![k.to_string(), fmt_f64(*m), fmt_f64(*s)]);
            }
            (to_value(&r)?, Some(t))
        }
    };
    Ok(RunOutput {
        config: cfg.clone(),
        science,
        table,
    })
}
