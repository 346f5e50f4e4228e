//! Coefficient fields and the stationary ensembles that generate them.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Poisson};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::lattice::{EdgeField, TorusLattice};
use crate::rng::{counter_hash, unit_f64};

/// One conductance per edge, each in `[lambda, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct CoefficientField {
    lattice: TorusLattice,
    lambda: f64,
    values: EdgeField,
}

impl CoefficientField {
    pub fn new(lattice: TorusLattice, lambda: f64, values: Vec<f64>) -> Result<Self> {
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::InvalidField(format!(
                "lambda = {lambda} must lie in the open interval (0, 1)"
            )));
        }
        lattice.check_edges(values.len())?;
        if let Some((k, v)) = values
            .iter()
            .enumerate()
            .find(|(_, &v)| !(v >= lambda && v <= 1.0))
        {
            return Err(Error::InvalidField(format!(
                "edge {k} has conductance {v}, outside [{lambda}, 1]"
            )));
        }
        Ok(Self {
            lattice,
            lambda,
            values: EdgeField(values),
        })
    }

    pub fn constant(lattice: TorusLattice, lambda: f64, c: f64) -> Result<Self> {
        Self::new(lattice, lambda, vec![c; lattice.num_edges()])
    }

    pub fn lattice(&self) -> &TorusLattice {
        &self.lattice
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn values(&self) -> &[f64] {
        &self.values.0
    }

    pub fn edge_field(&self) -> &EdgeField {
        &self.values
    }

    /// `a + delta 1_e`; fails if the result leaves `[lambda, 1]`.
    pub fn perturbed(&self, edge: usize, delta: f64) -> Result<Self> {
        let mut values = self.values.0.clone();
        let v = values
            .get_mut(edge)
            .ok_or_else(|| Error::InvalidArgument(format!("edge index {edge} out of range")))?;
        *v += delta;
        if !(*v >= self.lambda && *v <= 1.0) {
            return Err(Error::InvalidField(format!(
                "perturbed conductance {} on edge {edge} leaves [{}, 1]",
                *v, self.lambda
            )));
        }
        Ok(Self {
            values: EdgeField(values),
            ..*self
        })
    }

    pub fn with_edge_value(&self, edge: usize, value: f64) -> Result<Self> {
        let delta = value - self.values.0[edge];
        let mut out = self.perturbed(edge, delta)?;
        out.values.0[edge] = value;
        Ok(out)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EnsembleKind {
    /// i.i.d. uniform conductances on `[lambda, 1]`.
    IidUniform,
    /// i.i.d. two-point law: `alpha` with probability `p_low`, else `beta`.
    Bernoulli { alpha: f64, beta: f64, p_low: f64 },
    /// `alpha` on edges whose midpoint lies within `radius` of a Poisson
    /// point of the given `intensity` (points per unit volume), else `beta`.
    PoissonInclusions {
        intensity: f64,
        radius: f64,
        alpha: f64,
        beta: f64,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnsembleSpec {
    pub lambda: f64,
    #[serde(flatten)]
    pub kind: EnsembleKind,
}

impl EnsembleSpec {
    pub fn iid_uniform(lambda: f64) -> Self {
        Self {
            lambda,
            kind: EnsembleKind::IidUniform,
        }
    }

    pub fn bernoulli(lambda: f64, alpha: f64, beta: f64, p_low: f64) -> Self {
        Self {
            lambda,
            kind: EnsembleKind::Bernoulli { alpha, beta, p_low },
        }
    }

    pub fn poisson_inclusions(lambda: f64, intensity: f64, radius: f64, alpha: f64, beta: f64) -> Self {
        Self {
            lambda,
            kind: EnsembleKind::PoissonInclusions {
                intensity,
                radius,
                alpha,
                beta,
            },
        }
    }

    /// Every violated parameter constraint as `(field path, message)`.
    pub fn violations(&self) -> Vec<(String, String)> {
        let mut out = Vec::new();
        let lam = self.lambda;
        let lam_ok = lam > 0.0 && lam < 1.0;
        if !lam_ok {
            out.push(("lambda".into(), format!("{lam} is outside the admissible range (0,1)")));
        }
        let mut two_point = |alpha: f64, beta: f64, what: &str| {
            if lam_ok && !(alpha >= lam) {
                out.push((
                    "alpha".into(),
                    format!("{what}: alpha = {alpha} violates lambda <= alpha (lambda = {lam})"),
                ));
            }
            if !(beta <= 1.0) {
                out.push(("beta".into(), format!("{what}: beta = {beta} violates beta <= 1")));
            }
            if !(alpha <= beta) {
                out.push((
                    "beta".into(),
                    format!("{what}: requires alpha <= beta, got alpha = {alpha}, beta = {beta}"),
                ));
            }
        };
        match self.kind {
            EnsembleKind::IidUniform => {}
            EnsembleKind::Bernoulli { alpha, beta, p_low } => {
                two_point(alpha, beta, "bernoulli");
                if !(0.0..=1.0).contains(&p_low) {
                    out.push(("p_low".into(), format!("probability {p_low} is outside [0,1]")));
                }
            }
            EnsembleKind::PoissonInclusions {
                intensity,
                radius,
                alpha,
                beta,
            } => {
                two_point(alpha, beta, "poisson_inclusions");
                if !(intensity >= 0.0 && intensity.is_finite()) {
                    out.push(("intensity".into(), format!("intensity {intensity} must be finite and >= 0")));
                }
                if !(radius >= 1.0 && radius.is_finite()) {
                    out.push(("radius".into(), format!("radius {radius} must be >= 1")));
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let v = self.violations();
        if v.is_empty() {
            Ok(())
        } else {
            Err(Error::InvalidEnsemble(
                v.into_iter()
                    .map(|(f, m)| format!("{f}: {m}"))
                    .collect::<Vec<_>>()
                    .join("; "),
            ))
        }
    }

    /// True when every sample is the same constant field.
    pub fn is_degenerate(&self) -> bool {
        match self.kind {
            EnsembleKind::IidUniform => false,
            EnsembleKind::Bernoulli { alpha, beta, p_low } => alpha == beta || p_low == 0.0 || p_low == 1.0,
            EnsembleKind::PoissonInclusions { alpha, beta, intensity, .. } => alpha == beta || intensity == 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeedContext {
    pub master_seed: u64,
    pub sample_index: u64,
}

impl SeedContext {
    pub fn new(master_seed: u64, sample_index: u64) -> Self {
        Self {
            master_seed,
            sample_index,
        }
    }

    /// The context for the `k`-th sample after this one.
    pub fn nth(&self, k: u64) -> Self {
        Self {
            sample_index: self.sample_index.wrapping_add(k),
            ..*self
        }
    }
}

const STREAM_EDGE: u64 = 1;
const STREAM_CELL: u64 = 2;

pub fn sample(spec: &EnsembleSpec, lattice: &TorusLattice, seed: SeedContext) -> Result<CoefficientField> {
    spec.validate()?;
    let lam = spec.lambda;
    let edge_uniform =
        |k: usize| unit_f64(counter_hash(seed.master_seed, seed.sample_index, k as u64, STREAM_EDGE));
    let values: Vec<f64> = match spec.kind {
        EnsembleKind::IidUniform => (0..lattice.num_edges())
            .map(|k| (lam + (1.0 - lam) * edge_uniform(k)).min(1.0))
            .collect(),
        EnsembleKind::Bernoulli { alpha, beta, p_low } => (0..lattice.num_edges())
            .map(|k| if edge_uniform(k) < p_low { alpha } else { beta })
            .collect(),
        EnsembleKind::PoissonInclusions {
            intensity,
            radius,
            alpha,
            beta,
        } => poisson_inclusions(lattice, seed, intensity, radius, alpha, beta),
    };
    CoefficientField::new(*lattice, lam, values)
}

/// Points of a Poisson process of the given intensity on the continuous
/// torus, drawn cell by cell so that integer shifts of the torus permute
/// the cells' random streams.
pub fn poisson_points(lattice: &TorusLattice, seed: SeedContext, intensity: f64) -> Vec<Vec<f64>> {
    let mut points = Vec::new();
    if intensity <= 0.0 {
        return points;
    }
    let law = Poisson::new(intensity).expect("positive intensity");
    let d = lattice.dim();
    for cell in 0..lattice.num_sites() {
        let key = counter_hash(seed.master_seed, seed.sample_index, cell as u64, STREAM_CELL);
        let mut rng = ChaCha8Rng::seed_from_u64(key);
        let count = law.sample(&mut rng) as usize;
        for _ in 0..count {
            points.push(
                (0..d)
                    .map(|i| lattice.coord(cell, i) as f64 + rng.gen::<f64>())
                    .collect(),
            );
        }
    }
    points
}

fn poisson_inclusions(
    lattice: &TorusLattice,
    seed: SeedContext,
    intensity: f64,
    radius: f64,
    alpha: f64,
    beta: f64,
) -> Vec<f64> {
    let d = lattice.dim();
    let l = lattice.side() as i64;
    let r2 = radius * radius;
    let mut inside = vec![false; lattice.num_edges()];
    for p in poisson_points(lattice, seed, intensity) {
        // candidate base sites: a box around p wide enough for any midpoint within radius
        let ranges: Vec<Vec<i64>> = p
            .iter()
            .map(|&c| {
                let lo = (c - radius - 1.0).floor() as i64;
                let hi = (c + radius).ceil() as i64;
                if hi - lo + 1 >= l {
                    (0..l).collect()
                } else {
                    (lo..=hi).collect()
                }
            })
            .collect();
        let mut idx = vec![0usize; d];
        'walk: loop {
            let coords: Vec<i64> = (0..d).map(|i| ranges[i][idx[i]]).collect();
            let site = lattice.site_index(&coords);
            for dir in 0..d {
                let mut mid: Vec<f64> = coords.iter().map(|&c| c as f64).collect();
                mid[dir] += 0.5;
                if torus_dist2_points(lattice.side() as f64, &mid, &p) <= r2 {
                    inside[site * d + dir] = true;
                }
            }
            for i in 0..d {
                idx[i] += 1;
                if idx[i] < ranges[i].len() {
                    continue 'walk;
                }
                idx[i] = 0;
            }
            break;
        }
    }
    inside.into_iter().map(|b| if b { alpha } else { beta }).collect()
}

fn torus_dist2_points(l: f64, a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let mut t = (x - y).rem_euclid(l);
            if t > l / 2.0 {
                t = l - t;
            }
            t * t
        })
        .sum()
}

/// `x -> a(x + z)`: the edge `[x, x + e_i]` of the result carries the value
/// of `[x + z, x + z + e_i]` in the input.
pub fn shift_field(a: &CoefficientField, z: &[i64]) -> Result<CoefficientField> {
    let lat = *a.lattice();
    if z.len() != lat.dim() {
        return Err(Error::InvalidArgument(format!(
            "shift has {} components, lattice dimension is {}",
            z.len(),
            lat.dim()
        )));
    }
    let d = lat.dim();
    let src = a.values();
    let mut values = vec![0.0; lat.num_edges()];
    for x in 0..lat.num_sites() {
        let y = lat.translate(x, z);
        values[x * d..(x + 1) * d].copy_from_slice(&src[y * d..(y + 1) * d]);
    }
    Ok(CoefficientField {
        lattice: lat,
        lambda: a.lambda(),
        values: EdgeField(values),
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct StationarityReport {
    pub n_samples: usize,
    pub per_edge_mean: Vec<f64>,
    pub per_edge_se: Vec<f64>,
    /// Largest `|mean_i - mean_j|` over edge pairs.
    pub max_mean_gap: f64,
    /// Largest `|mean_i - mean_j| / sqrt(se_i^2 + se_j^2)` over edge pairs.
    pub max_discrepancy: f64,
    pub threshold: f64,
    pub flagged: bool,
}

pub const STATIONARITY_THRESHOLD_SE: f64 = 6.0;

pub fn stationarity_probe(
    spec: &EnsembleSpec,
    lattice: &TorusLattice,
    n_samples: usize,
    seed: SeedContext,
) -> Result<StationarityReport> {
    if n_samples < 100 {
        return Err(Error::InvalidArgument(format!(
            "stationarity probe needs at least 100 samples, got {n_samples}"
        )));
    }
    spec.validate()?;
    let ne = lattice.num_edges();
    let mut sum = vec![0.0; ne];
    let mut sum2 = vec![0.0; ne];
    const CHUNK: usize = 256;
    let mut start = 0;
    while start < n_samples {
        let end = (start + CHUNK).min(n_samples);
        let fields: Vec<CoefficientField> = (start..end)
            .into_par_iter()
            .map(|k| sample(spec, lattice, seed.nth(k as u64)))
            .collect::<Result<_>>()?;
        for f in &fields {
            for (k, &v) in f.values().iter().enumerate() {
                sum[k] += v;
                sum2[k] += v * v;
            }
        }
        start = end;
    }
    let n = n_samples as f64;
    let mean: Vec<f64> = sum.iter().map(|s| s / n).collect();
    let se: Vec<f64> = sum2
        .iter()
        .zip(&mean)
        .map(|(s2, m)| {
            let var = ((s2 - n * m * m) / (n - 1.0)).max(0.0);
            (var / n).sqrt()
        })
        .collect();
    let (max_gap, max_z) = (0..ne)
        .into_par_iter()
        .map(|i| {
            let mut gap = 0.0_f64;
            let mut z = 0.0_f64;
            for j in (i + 1)..ne {
                let diff = (mean[i] - mean[j]).abs();
                gap = gap.max(diff);
                let s = (se[i] * se[i] + se[j] * se[j]).sqrt();
                let zij = if diff == 0.0 {
                    0.0
                } else if s == 0.0 {
                    f64::INFINITY
                } else {
                    diff / s
                };
                z = z.max(zij);
            }
            (gap, z)
        })
        .reduce(|| (0.0, 0.0), |a, b| (a.0.max(b.0), a.1.max(b.1)));
    Ok(StationarityReport {
        n_samples,
        per_edge_mean: mean,
        per_edge_se: se,
        max_mean_gap: max_gap,
        max_discrepancy: max_z,
        threshold: STATIONARITY_THRESHOLD_SE,
        flagged: max_z > STATIONARITY_THRESHOLD_SE,
    })
}

/// Volume of the Euclidean ball of radius `r` in `d` dimensions.
pub fn ball_volume(d: usize, r: f64) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0 * r,
        _ => ball_volume(d - 2, r) * 2.0 * std::f64::consts::PI * r * r / d as f64,
    }
}
