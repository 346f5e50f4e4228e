//! Monte-Carlo, enumeration and decay experiments.

pub mod decay;
pub mod moments;
pub mod spectral_gap;
pub mod variance;

pub use decay::{decay_probe, dipole_sources, DecayReport};
pub use moments::{moment_estimate, MomentReport};
pub use spectral_gap::{
    sg_bruteforce, sg_p_check, ConfigurationTable, LpCheck, QValue, SgAnalysis, SgReport, Statistic,
    MAX_ENUMERATED_EDGES,
};
pub use variance::{homogenized_samples, variance_scan, VarianceReport, VarianceRow};
