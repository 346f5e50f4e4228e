//! Run configuration: JSON parsing, flag overrides and up-front validation.
//!
//! Every field has a default except `command`. Command-line flags are merged
//! into the document before validation, so precedence is flag > file > default
//! and flag values are checked by exactly the same rules.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Serialize, Serializer};
use serde_json::{json, Map, Value};

use crate::ensemble::{EnsembleKind, EnsembleSpec};
use crate::error::{ConfigIssue, Error, Result};
use crate::experiments::spectral_gap::MAX_ENUMERATED_EDGES;
use crate::lattice::{Direction, TorusLattice};
use crate::solver::SolveOptions;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Command {
    Corrector,
    Green,
    CheckGreenBounds,
    Homogenize,
    Moments,
    VarianceScan,
    SgCheck,
    SgPCheck,
    Decay,
    ProbeStationarity,
}

impl Command {
    pub const ALL: [Command; 10] = [
        Command::Corrector,
        Command::Green,
        Command::CheckGreenBounds,
        Command::Homogenize,
        Command::Moments,
        Command::VarianceScan,
        Command::SgCheck,
        Command::SgPCheck,
        Command::Decay,
        Command::ProbeStationarity,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Corrector => "corrector",
            Command::Green => "green",
            Command::CheckGreenBounds => "check-green-bounds",
            Command::Homogenize => "homogenize",
            Command::Moments => "moments",
            Command::VarianceScan => "variance-scan",
            Command::SgCheck => "sg-check",
            Command::SgPCheck => "sg-p-check",
            Command::Decay => "decay",
            Command::ProbeStationarity => "probe-stationarity",
        }
    }

    /// Commands that act on a single coefficient field, which may be loaded from a dump.
    pub fn single_field(self) -> bool {
        matches!(
            self,
            Command::Corrector | Command::Green | Command::CheckGreenBounds | Command::Homogenize | Command::Decay
        )
    }

    fn multi_side(self) -> bool {
        matches!(self, Command::Moments | Command::VarianceScan)
    }

    fn min_samples(self) -> usize {
        match self {
            Command::Moments => 2,
            Command::VarianceScan => 3,
            Command::ProbeStationarity => 100,
            _ => 1,
        }
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        Command::ALL.into_iter().find(|c| c.name() == s).ok_or_else(|| {
            let names: Vec<&str> = Command::ALL.iter().map(|c| c.name()).collect();
            format!("unknown command {s:?}; expected one of {}", names.join(", "))
        })
    }
}

impl Serialize for Command {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StatisticName {
    HomogenizedEntry,
    EnergyDensity,
    GradientAtOrigin,
}

impl FromStr for StatisticName {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "homogenized_entry" => Ok(Self::HomogenizedEntry),
            "energy_density" => Ok(Self::EnergyDensity),
            "gradient_at_origin" => Ok(Self::GradientAtOrigin),
            _ => Err(format!(
                "unknown statistic {s:?}; expected homogenized_entry, energy_density or gradient_at_origin"
            )),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub d: usize,
    #[serde(rename = "L")]
    pub sides: Vec<usize>,
    pub ensemble: EnsembleSpec,
    pub xi: Direction,
    pub e0: Direction,
    pub e1: Direction,
    pub p: f64,
    pub q_list: Vec<f64>,
    pub n_samples: usize,
    pub seed: u64,
    pub sample_index: u64,
    pub solver: SolveOptions,
    pub statistic: StatisticName,
    pub source: Vec<i64>,
    pub edge_dir: usize,
    pub rho0: usize,
    pub n_max: usize,
    pub field: Option<PathBuf>,
    pub dump: Option<PathBuf>,
    #[serde(skip)]
    pub out: Option<PathBuf>,
    #[serde(skip)]
    pub threads: Option<usize>,
}

impl RunConfig {
    /// The first (for single-lattice commands, the only) side length.
    pub fn side(&self) -> usize {
        self.sides[0]
    }

    pub fn lattice(&self) -> Result<TorusLattice> {
        TorusLattice::new(self.d, self.side())
    }
}

pub const DEFAULT_REL_TOL: f64 = 1e-10;
pub const DEFAULT_SAMPLES: usize = 100;
pub const DEFAULT_Q_LIST: [f64; 3] = [1.25, 1.5, 2.0];

fn default_ensemble() -> Value {
    json!({"kind": "bernoulli", "lambda": 0.25, "alpha": 0.25, "beta": 1.0, "p_low": 0.5})
}

const TOP_KEYS: [&str; 22] = [
    "command",
    "d",
    "L",
    "ensemble",
    "xi",
    "e0",
    "e1",
    "p",
    "q_list",
    "n_samples",
    "seed",
    "sample_index",
    "solver",
    "statistic",
    "source",
    "edge_dir",
    "rho0",
    "n_max",
    "field",
    "dump",
    "out",
    "threads",
];

/// Command-line values that replace the corresponding document fields.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub command: Option<String>,
    pub d: Option<usize>,
    pub sides: Option<Vec<usize>>,
    pub lambda: Option<f64>,
    pub seed: Option<u64>,
    pub samples: Option<usize>,
    pub p: Option<f64>,
    pub q: Option<Vec<f64>>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl Overrides {
    fn apply(&self, obj: &mut Map<String, Value>) {
        let mut set = |k: &str, v: Value| {
            obj.insert(k.to_string(), v);
        };
        if let Some(c) = &self.command {
            set("command", json!(c));
        }
        if let Some(d) = self.d {
            set("d", json!(d));
        }
        if let Some(l) = &self.sides {
            set("L", if l.len() == 1 { json!(l[0]) } else { json!(l) });
        }
        if let Some(s) = self.seed {
            set("seed", json!(s));
        }
        if let Some(n) = self.samples {
            set("n_samples", json!(n));
        }
        if let Some(p) = self.p {
            set("p", json!(p));
        }
        if let Some(q) = &self.q {
            set("q_list", json!(q));
        }
        if let Some(o) = &self.out {
            set("out", json!(o.to_string_lossy()));
        }
        if let Some(t) = self.threads {
            set("threads", json!(t));
        }
        if let Some(lam) = self.lambda {
            let ens = obj.entry("ensemble").or_insert_with(default_ensemble);
            if let Some(e) = ens.as_object_mut() {
                e.insert("lambda".into(), json!(lam));
            }
        }
    }
}

struct Issues(Vec<ConfigIssue>);

impl Issues {
    fn push(&mut self, path: &str, message: impl Into<String>) {
        self.0.push(ConfigIssue {
            path: path.to_string(),
            message: message.into(),
            line: None,
            column: None,
        });
    }
}

fn type_name(v: &Value) -> &'static str {
    match v {
        Value::Null => "null",
        Value::Bool(_) => "a boolean",
        Value::Number(_) => "a number",
        Value::String(_) => "a string",
        Value::Array(_) => "an array",
        Value::Object(_) => "an object",
    }
}

/// Reads `key` with `parse`, recording a type error and returning `None`
/// when it is present but malformed.
fn field<T>(
    obj: &Map<String, Value>,
    key: &str,
    path: &str,
    expected: &str,
    issues: &mut Issues,
    parse: impl Fn(&Value) -> Option<T>,
) -> Option<T> {
    let v = obj.get(key)?;
    let out = parse(v);
    if out.is_none() {
        issues.push(path, format!("expected {expected}, found {}", type_name(v)));
    }
    out
}

fn as_usize(v: &Value) -> Option<usize> {
    v.as_u64().and_then(|u| usize::try_from(u).ok())
}

fn as_f64_list(v: &Value) -> Option<Vec<f64>> {
    v.as_array()?.iter().map(Value::as_f64).collect()
}

fn as_usize_list(v: &Value) -> Option<Vec<usize>> {
    v.as_array()?.iter().map(as_usize).collect()
}

fn as_i64_list(v: &Value) -> Option<Vec<i64>> {
    v.as_array()?.iter().map(Value::as_i64).collect()
}

/// `null` is accepted as "unset" for optional fields.
fn optional<T>(parse: impl Fn(&Value) -> Option<T>) -> impl Fn(&Value) -> Option<Option<T>> {
    move |v| if v.is_null() { Some(None) } else { parse(v).map(Some) }
}

fn as_path(v: &Value) -> Option<PathBuf> {
    v.as_str().map(PathBuf::from)
}

pub fn parse_config(text: &str) -> Result<RunConfig> {
    parse_config_with(text, &Overrides::default())
}

pub fn parse_config_with(text: &str, overrides: &Overrides) -> Result<RunConfig> {
    let mut doc: Value = serde_json::from_str(text).map_err(|e| {
        Error::Config(vec![ConfigIssue {
            path: String::new(),
            message: format!("JSON syntax error: {e}"),
            line: Some(e.line()),
            column: Some(e.column()),
        }])
    })?;
    let Some(obj) = doc.as_object_mut() else {
        return Err(Error::Config(vec![ConfigIssue {
            path: String::new(),
            message: format!("expected a JSON object at the top level, found {}", type_name(&doc)),
            line: None,
            column: None,
        }]));
    };
    overrides.apply(obj);
    from_object(obj)
}

fn parse_ensemble(v: &Value, issues: &mut Issues) -> Option<EnsembleSpec> {
    let Some(obj) = v.as_object() else {
        issues.push("ensemble", format!("expected an object, found {}", type_name(v)));
        return None;
    };
    let kind = match obj.get("kind").and_then(Value::as_str) {
        Some(k) => k,
        None => {
            issues.push("ensemble.kind", "missing or non-string; expected iid_uniform, bernoulli or poisson_inclusions");
            return None;
        }
    };
    let allowed: &[&str] = match kind {
        "iid_uniform" => &["kind", "lambda"],
        "bernoulli" => &["kind", "lambda", "alpha", "beta", "p_low"],
        "poisson_inclusions" => &["kind", "lambda", "intensity", "radius", "alpha", "beta"],
        other => {
            issues.push(
                "ensemble.kind",
                format!("unknown ensemble kind {other:?}; expected iid_uniform, bernoulli or poisson_inclusions"),
            );
            return None;
        }
    };
    let before = issues.0.len();
    for key in obj.keys().filter(|k| !allowed.contains(&k.as_str())) {
        issues.push(&format!("ensemble.{key}"), format!("unknown field for ensemble kind {kind}"));
    }
    for key in allowed.iter().filter(|k| **k != "kind") {
        match obj.get(*key) {
            None => issues.push(&format!("ensemble.{key}"), "missing required field"),
            Some(x) if !x.is_number() => issues.push(
                &format!("ensemble.{key}"),
                format!("expected a number, found {}", type_name(x)),
            ),
            _ => {}
        }
    }
    if issues.0.len() > before {
        return None;
    }
    let spec: EnsembleSpec = match serde_json::from_value(v.clone()) {
        Ok(s) => s,
        Err(e) => {
            issues.push("ensemble", e.to_string());
            return None;
        }
    };
    let violations = spec.violations();
    for (f, m) in &violations {
        issues.push(&format!("ensemble.{f}"), m.clone());
    }
    violations.is_empty().then_some(spec)
}

fn parse_direction(obj: &Map<String, Value>, key: &str, d: Option<usize>, issues: &mut Issues) -> Option<Direction> {
    let raw = match obj.get(key) {
        None => return d.map(|d| Direction::axis(d, 0)),
        Some(_) => field(obj, key, key, "an array of numbers", issues, as_f64_list)?,
    };
    let d = d?;
    if raw.len() != d {
        issues.push(key, format!("expected {d} components, found {}", raw.len()));
        return None;
    }
    match Direction::new(raw) {
        Ok(x) => Some(x),
        Err(e) => {
            issues.push(key, e.to_string());
            None
        }
    }
}

fn from_object(obj: &Map<String, Value>) -> Result<RunConfig> {
    let mut issues = Issues(Vec::new());
    for key in obj.keys().filter(|k| !TOP_KEYS.contains(&k.as_str())) {
        issues.push(key, "unknown field");
    }

    let command = match obj.get("command") {
        None => {
            issues.push("command", "missing; give it in the document or as the first argument");
            None
        }
        Some(v) => match v.as_str() {
            Some(s) => match s.parse::<Command>() {
                Ok(c) => Some(c),
                Err(m) => {
                    issues.push("command", m);
                    None
                }
            },
            None => {
                issues.push("command", format!("expected a string, found {}", type_name(v)));
                None
            }
        },
    };

    let d = match field(obj, "d", "d", "a positive integer", &mut issues, as_usize) {
        Some(0) => {
            issues.push("d", "dimension must be >= 1");
            None
        }
        Some(d) => Some(d),
        None if obj.contains_key("d") => None,
        None => Some(2),
    };
    let sides = match obj.get("L") {
        None => Some(vec![8]),
        Some(v) if v.is_array() => field(obj, "L", "L", "an integer or an array of integers", &mut issues, as_usize_list),
        Some(_) => field(obj, "L", "L", "an integer or an array of integers", &mut issues, as_usize).map(|l| vec![l]),
    };
    let mut lattice_ok = d.is_some() && sides.is_some();
    if let (Some(d), Some(sides)) = (d, &sides) {
        if sides.is_empty() {
            issues.push("L", "at least one side length is required");
            lattice_ok = false;
        }
        for (i, &l) in sides.iter().enumerate() {
            if let Err(e) = TorusLattice::new(d, l) {
                let path = if obj.get("L").is_some_and(Value::is_array) { format!("L[{i}]") } else { "L".into() };
                issues.push(&path, e.to_string());
                lattice_ok = false;
            }
        }
    }

    let ensemble = parse_ensemble(obj.get("ensemble").unwrap_or(&default_ensemble()), &mut issues);
    let xi = parse_direction(obj, "xi", d, &mut issues);
    let e0 = parse_direction(obj, "e0", d, &mut issues);
    let e1 = parse_direction(obj, "e1", d, &mut issues);

    let p = field(obj, "p", "p", "a number", &mut issues, Value::as_f64).unwrap_or(2.0);
    if !(p >= 1.0 && p.is_finite()) {
        issues.push("p", format!("p = {p} must be a finite number >= 1"));
    }
    let q_list = field(obj, "q_list", "q_list", "an array of numbers", &mut issues, as_f64_list)
        .unwrap_or_else(|| DEFAULT_Q_LIST.to_vec());
    if q_list.is_empty() {
        issues.push("q_list", "at least one q is required");
    }
    for (i, q) in q_list.iter().enumerate() {
        if !(*q > 1.0 && *q <= 2.0) {
            issues.push(&format!("q_list[{i}]"), format!("q = {q} is outside the admissible range (1,2]"));
        }
    }
    let n_samples = field(obj, "n_samples", "n_samples", "a non-negative integer", &mut issues, as_usize)
        .unwrap_or(DEFAULT_SAMPLES);
    let seed = field(obj, "seed", "seed", "a non-negative integer", &mut issues, Value::as_u64).unwrap_or(0);
    let sample_index =
        field(obj, "sample_index", "sample_index", "a non-negative integer", &mut issues, Value::as_u64).unwrap_or(0);

    let mut solver = SolveOptions::default();
    match obj.get("solver") {
        None => {}
        Some(Value::Object(s)) => {
            for key in s.keys().filter(|k| !["rel_tol", "max_iter"].contains(&k.as_str())) {
                issues.push(&format!("solver.{key}"), "unknown field");
            }
            if let Some(t) = field(s, "rel_tol", "solver.rel_tol", "a number", &mut issues, Value::as_f64) {
                solver.rel_tol = t;
                if !(t > 0.0 && t <= 1e-6) {
                    issues.push("solver.rel_tol", format!("{t} is outside the admissible range (0, 1e-6]"));
                }
            }
            if let Some(m) = field(s, "max_iter", "solver.max_iter", "a positive integer or null", &mut issues, optional(as_usize)) {
                solver.max_iter = m;
                if m == Some(0) {
                    issues.push("solver.max_iter", "must be >= 1");
                }
            }
        }
        Some(v) => issues.push("solver", format!("expected an object, found {}", type_name(v))),
    }

    let statistic = match field(obj, "statistic", "statistic", "a string", &mut issues, |v| v.as_str().map(String::from)) {
        None => StatisticName::HomogenizedEntry,
        Some(s) => s.parse().unwrap_or_else(|m: String| {
            issues.push("statistic", m);
            StatisticName::HomogenizedEntry
        }),
    };
    let source = field(obj, "source", "source", "an array of integers", &mut issues, as_i64_list);
    if let (Some(src), Some(d)) = (&source, d) {
        if src.len() != d {
            issues.push("source", format!("expected {d} coordinates, found {}", src.len()));
        }
    }
    let edge_dir = field(obj, "edge_dir", "edge_dir", "a non-negative integer", &mut issues, as_usize).unwrap_or(0);
    if let Some(d) = d {
        if edge_dir >= d {
            issues.push("edge_dir", format!("direction {edge_dir} out of range for d = {d}"));
        }
    }
    let rho0 = field(obj, "rho0", "rho0", "a positive integer", &mut issues, as_usize).unwrap_or(2);
    if rho0 == 0 {
        issues.push("rho0", "must be >= 1");
    }
    let n_max = field(obj, "n_max", "n_max", "a non-negative integer", &mut issues, as_usize).unwrap_or(4);
    let field_path = field(obj, "field", "field", "a path string or null", &mut issues, optional(as_path)).flatten();
    let dump = field(obj, "dump", "dump", "a path string or null", &mut issues, optional(as_path)).flatten();
    let out = field(obj, "out", "out", "a path string or null", &mut issues, optional(as_path)).flatten();
    let threads = field(obj, "threads", "threads", "a positive integer or null", &mut issues, optional(as_usize)).flatten();
    if threads == Some(0) {
        issues.push("threads", "must be >= 1");
    }

    if let Some(cmd) = command {
        if n_samples < cmd.min_samples() {
            issues.push(
                "n_samples",
                format!("{cmd} needs at least {} samples, got {n_samples}", cmd.min_samples()),
            );
        }
        if let Some(sides) = &sides {
            if cmd == Command::VarianceScan {
                let mut distinct = sides.clone();
                distinct.sort_unstable();
                distinct.dedup();
                if distinct.len() < 3 {
                    issues.push("L", "variance-scan needs at least 3 distinct side lengths");
                }
            } else if !cmd.multi_side() && sides.len() > 1 {
                issues.push("L", format!("{cmd} takes a single side length"));
            }
        }
        if field_path.is_some() && !cmd.single_field() {
            issues.push("field", format!("{cmd} samples its own fields and cannot load one"));
        }
        if dump.is_some() && (!cmd.single_field() || field_path.is_some()) {
            issues.push("dump", format!("{cmd} has no single sampled field to dump"));
        }
        if matches!(cmd, Command::SgCheck | Command::SgPCheck) {
            if let Some(spec) = &ensemble {
                if !matches!(spec.kind, EnsembleKind::Bernoulli { .. }) {
                    issues.push("ensemble.kind", format!("{cmd} enumerates a two-point law and needs kind bernoulli"));
                }
            }
            if let (true, Some(d), Some(sides)) = (lattice_ok, d, &sides) {
                let edges = TorusLattice::new(d, sides[0]).map(|l| l.num_edges()).unwrap_or(usize::MAX);
                if edges > MAX_ENUMERATED_EDGES {
                    issues.push(
                        "L",
                        format!("{edges} edges exceed the enumeration limit of {MAX_ENUMERATED_EDGES}"),
                    );
                }
            }
        }
        if cmd == Command::SgPCheck && p.fract() != 0.0 {
            issues.push("p", format!("sg-p-check needs an integer p, got {p}"));
        }
        if cmd == Command::Decay && field_path.is_none() && rho0 > 0 {
            if let Some(sides) = &sides {
                let r = u32::try_from(n_max).ok().and_then(|s| 1usize.checked_shl(s)).and_then(|f| f.checked_mul(rho0));
                match r {
                    Some(r) if 2 * r <= sides[0] => {}
                    _ => issues.push(
                        "n_max",
                        format!("2^{n_max} * rho0 = 2^{n_max} * {rho0} exceeds L/2 = {}", sides[0] / 2),
                    ),
                }
            }
        }
    }

    if !issues.0.is_empty() {
        return Err(Error::Config(issues.0));
    }
    let d = d.expect("validated");
    Ok(RunConfig {
        command: command.expect("validated"),
        d,
        sides: sides.expect("validated"),
        ensemble: ensemble.expect("validated"),
        xi: xi.expect("validated"),
        e0: e0.expect("validated"),
        e1: e1.expect("validated"),
        p,
        q_list,
        n_samples,
        seed,
        sample_index,
        solver,
        statistic,
        source: source.unwrap_or_else(|| vec![0; d]),
        edge_dir,
        rho0,
        n_max,
        field: field_path,
        dump,
        out,
        threads,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn issues(text: &str) -> Vec<ConfigIssue> {
        match parse_config(text) {
            Err(Error::Config(v)) => v,
            other => panic!("expected config error, got {other:?}"),
        }
    }

    #[test]
    fn defaults() {
        let c = parse_config(r#"{"command": "moments"}"#).unwrap();
        assert_eq!(c.solver.rel_tol, 1e-10);
        assert_eq!(c.n_samples, 100);
        assert_eq!((c.d, c.sides.clone()), (2, vec![8]));
        assert_eq!(c.xi, Direction::axis(2, 0));
        assert_eq!(c.q_list, DEFAULT_Q_LIST.to_vec());
        assert_eq!(c.ensemble, EnsembleSpec::bernoulli(0.25, 0.25, 1.0, 0.5));
    }

    #[test]
    fn lambda_out_of_range_names_field_and_range() {
        let v = issues(r#"{"command": "homogenize", "ensemble": {"kind": "iid_uniform", "lambda": 1.5}}"#);
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].path, "ensemble.lambda");
        assert!(v[0].message.contains("(0,1)"));
    }

    #[test]
    fn alpha_below_lambda() {
        let v = issues(
            r#"{"command": "moments",
                "ensemble": {"kind": "bernoulli", "lambda": 0.5, "alpha": 0.25, "beta": 1.0, "p_low": 0.5}}"#,
        );
        assert!(v.iter().any(|i| i.path == "ensemble.alpha" && i.message.contains("lambda <= alpha")));
    }

    #[test]
    fn all_errors_are_collected() {
        let v = issues(r#"{"command": "nope", "d": 2, "L": 1, "p": 0.5, "q_list": [3], "bogus": 1, "solver": {"rel_tol": 1}}"#);
        let paths: Vec<&str> = v.iter().map(|i| i.path.as_str()).collect();
        for p in ["command", "L", "p", "q_list[0]", "bogus", "solver.rel_tol"] {
            assert!(paths.contains(&p), "{p} missing from {paths:?}");
        }
    }

    #[test]
    fn syntax_error_position() {
        let v = issues("{\n  \"command\": \"moments\",\n  \"d\": ,\n}");
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].line, Some(3));
        assert!(v[0].column.is_some());
    }

    #[test]
    fn flags_override_file() {
        let o = Overrides {
            command: Some("variance-scan".into()),
            sides: Some(vec![4, 6, 8]),
            lambda: Some(0.2),
            samples: Some(7),
            ..Default::default()
        };
        let c = parse_config_with(r#"{"command": "moments", "n_samples": 50, "L": 16}"#, &o).unwrap();
        assert_eq!(c.command, Command::VarianceScan);
        assert_eq!(c.sides, vec![4, 6, 8]);
        assert_eq!(c.n_samples, 7);
        assert_eq!(c.ensemble.lambda, 0.2);
    }

    #[test]
    fn command_specific_rules() {
        let v = issues(r#"{"command": "sg-check", "L": 4}"#);
        assert!(v.iter().any(|i| i.path == "L" && i.message.contains("enumeration")));
        let v = issues(r#"{"command": "decay", "L": 16, "rho0": 2, "n_max": 3}"#);
        assert!(v.iter().any(|i| i.path == "n_max"));
        let v = issues(r#"{"command": "corrector", "L": [4, 8]}"#);
        assert!(v.iter().any(|i| i.path == "L"));
        let v = issues(r#"{"command": "sg-p-check", "L": 2, "p": 1.5}"#);
        assert!(v.iter().any(|i| i.path == "p"));
    }
}
