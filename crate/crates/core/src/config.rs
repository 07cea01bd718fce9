//! Line-oriented `key = value` sweep configuration.
//!
//! ```text
//! # symmetric dimer, populations against T1
//! n_qubits = 2
//! epsilon = 1.5
//! coupling = 1
//! t2 = 0
//! axis = T1
//! grid = logspace(0.01, 20, 200)
//! approaches = global, local
//! outputs = populations, heat_flux
//! ```
//!
//! Keys: `n_qubits`, `epsilon` | `epsilons`, `coupling` | `couplings`, `t1`,
//! `t2`, `gamma1`, `gamma2`, `axis`, `grid`, `approaches`, `outputs`.
//! `epsilon`/`coupling` set every gap/coupling to one value. The key of the
//! swept axis may be omitted. Unknown or repeated keys are errors.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::error::SpecViolation;
use crate::model::Approach;
use crate::spec::{validate_spec, ChainSpec, DEFAULT_GAMMA};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("syntax error{}: {message}", line.map(|l| format!(" on line {l}")).unwrap_or_default())]
    Syntax {
        line: Option<usize>,
        message: String,
    },

    #[error("unknown key `{key}` on line {line}")]
    UnknownKey { line: usize, key: String },

    #[error("invalid spec{}: {}", at.map(|x| format!(" at axis value {x}")).unwrap_or_default(),
            violations.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    SpecInvalid {
        at: Option<f64>,
        violations: Vec<SpecViolation>,
    },
}

fn syntax(line: impl Into<Option<usize>>, message: impl Into<String>) -> ConfigError {
    ConfigError::Syntax {
        line: line.into(),
        message: message.into(),
    }
}

/// The swept parameter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Axis {
    T1,
    T2,
    /// Every coupling set to the axis value.
    K,
    /// Every gap set to the axis value.
    Eps,
}

impl Axis {
    pub fn name(self) -> &'static str {
        match self {
            Axis::T1 => "T1",
            Axis::T2 => "T2",
            Axis::K => "K",
            Axis::Eps => "eps",
        }
    }

    /// `spec` with this parameter set to `value`.
    pub fn apply(self, spec: &ChainSpec, value: f64) -> ChainSpec {
        let mut s = spec.clone();
        match self {
            Axis::T1 => s.baths[0].temperature = value,
            Axis::T2 => s.baths[1].temperature = value,
            Axis::K => s.couplings.iter_mut().for_each(|k| *k = value),
            Axis::Eps => s.epsilons.iter_mut().for_each(|e| *e = value),
        }
        s
    }

    fn config_key(self) -> &'static str {
        match self {
            Axis::T1 => "t1",
            Axis::T2 => "t2",
            Axis::K => "coupling",
            Axis::Eps => "epsilon",
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Axis {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "T1" | "t1" => Ok(Axis::T1),
            "T2" | "t2" => Ok(Axis::T2),
            "K" | "k" | "coupling" => Ok(Axis::K),
            "eps" | "epsilon" => Ok(Axis::Eps),
            other => Err(format!(
                "unknown axis `{other}` (expected T1, T2, K or eps)"
            )),
        }
    }
}

/// Grid of axis values, kept in the form it was written.
#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    Explicit(Vec<f64>),
    Linspace { start: f64, stop: f64, n: usize },
    Logspace { start: f64, stop: f64, n: usize },
}

impl Grid {
    /// Grid points; the endpoints of `linspace`/`logspace` are exact.
    pub fn points(&self) -> Vec<f64> {
        match *self {
            Grid::Explicit(ref v) => v.clone(),
            Grid::Linspace { start, stop, n } => spaced(n, start, stop, |x| x),
            Grid::Logspace { start, stop, n } => {
                let (a, b) = (start.log10(), stop.log10());
                let mut pts = spaced(n, a, b, |x| 10f64.powf(x));
                if let Some(first) = pts.first_mut() {
                    *first = start;
                }
                if let Some(last) = pts.last_mut() {
                    *last = stop;
                }
                pts
            }
        }
    }

    fn validate(&self) -> Result<(), String> {
        if let Grid::Logspace { start, .. } = self {
            if !(*start > 0.0) {
                return Err("logspace needs a positive start".into());
            }
        }
        let pts = self.points();
        if pts.is_empty() {
            return Err("grid is empty".into());
        }
        if pts.iter().any(|x| !x.is_finite()) {
            return Err("grid contains a non-finite value".into());
        }
        if pts.windows(2).any(|w| !(w[0] < w[1])) {
            return Err("grid must be strictly increasing".into());
        }
        Ok(())
    }
}

fn spaced(n: usize, a: f64, b: f64, map: impl Fn(f64) -> f64) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![map(a)],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    map(b)
                } else {
                    map(a + (b - a) * i as f64 / (n - 1) as f64)
                }
            })
            .collect(),
    }
}

impl fmt::Display for Grid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Grid::Explicit(v) => f.write_str(&join(v)),
            Grid::Linspace { start, stop, n } => write!(f, "linspace({start}, {stop}, {n})"),
            Grid::Logspace { start, stop, n } => write!(f, "logspace({start}, {stop}, {n})"),
        }
    }
}

impl FromStr for Grid {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        for (name, log) in [("linspace", false), ("logspace", true)] {
            if let Some(rest) = s.strip_prefix(name) {
                let inner = rest
                    .trim()
                    .strip_prefix('(')
                    .and_then(|r| r.strip_suffix(')'))
                    .ok_or_else(|| format!("expected {name}(start, stop, n)"))?;
                let parts: Vec<&str> = inner.split(',').map(str::trim).collect();
                if parts.len() != 3 {
                    return Err(format!("expected {name}(start, stop, n)"));
                }
                let start = parse_f64(parts[0])?;
                let stop = parse_f64(parts[1])?;
                let n = parts[2]
                    .parse::<usize>()
                    .map_err(|_| format!("bad point count `{}`", parts[2]))?;
                return Ok(if log {
                    Grid::Logspace { start, stop, n }
                } else {
                    Grid::Linspace { start, stop, n }
                });
            }
        }
        parse_list(s).map(Grid::Explicit)
    }
}

/// Which column groups a sweep emits.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Outputs {
    pub populations: bool,
    pub heat_flux: bool,
    pub rho_diagonals: bool,
}

impl Default for Outputs {
    fn default() -> Self {
        Self {
            populations: true,
            heat_flux: true,
            rho_diagonals: false,
        }
    }
}

impl fmt::Display for Outputs {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<&str> = [
            (self.populations, "populations"),
            (self.heat_flux, "heat_flux"),
            (self.rho_diagonals, "rho_diagonals"),
        ]
        .into_iter()
        .filter_map(|(on, name)| on.then_some(name))
        .collect();
        f.write_str(&names.join(", "))
    }
}

/// A validated sweep: base spec, swept axis and grid, approaches and outputs.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRequest {
    pub base: ChainSpec,
    pub axis: Axis,
    pub grid: Grid,
    pub approaches: Vec<Approach>,
    pub outputs: Outputs,
}

impl SweepRequest {
    /// Checks the grid and that every grid point gives a valid spec.
    pub fn validate(self) -> Result<Self, ConfigError> {
        self.grid.validate().map_err(|m| syntax(None, m))?;
        if self.approaches.is_empty() {
            return Err(syntax(None, "no approaches selected"));
        }
        if !(self.outputs.populations || self.outputs.heat_flux || self.outputs.rho_diagonals) {
            return Err(syntax(None, "no outputs selected"));
        }
        for x in self.grid.points() {
            let spec = self.axis.apply(&self.base, x);
            if let Err(crate::Error::InvalidSpec(violations)) = validate_spec(&spec) {
                return Err(ConfigError::SpecInvalid {
                    at: Some(x),
                    violations,
                });
            }
        }
        Ok(self)
    }

    /// Config text that parses back to an identical request.
    pub fn to_config_string(&self) -> String {
        let b = &self.base;
        let mut out = String::new();
        let mut line = |k: &str, v: String| out.push_str(&format!("{k} = {v}\n"));
        line("n_qubits", b.n_qubits.to_string());
        line("epsilons", join(&b.epsilons));
        if !b.couplings.is_empty() {
            line("couplings", join(&b.couplings));
        }
        line("t1", b.baths[0].temperature.to_string());
        line("t2", b.baths[1].temperature.to_string());
        line("gamma1", b.baths[0].gamma.to_string());
        line("gamma2", b.baths[1].gamma.to_string());
        line("axis", self.axis.to_string());
        line("grid", self.grid.to_string());
        line(
            "approaches",
            self.approaches
                .iter()
                .map(|a| a.as_str())
                .collect::<Vec<_>>()
                .join(", "),
        );
        line("outputs", self.outputs.to_string());
        out
    }
}

fn join(v: &[f64]) -> String {
    v.iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join(", ")
}

fn parse_f64(s: &str) -> Result<f64, String> {
    s.trim()
        .parse::<f64>()
        .map_err(|_| format!("`{}` is not a number", s.trim()))
}

fn parse_list(s: &str) -> Result<Vec<f64>, String> {
    if s.trim().is_empty() {
        return Ok(vec![]);
    }
    s.split(',').map(parse_f64).collect()
}

const KEYS: [&str; 13] = [
    "n_qubits",
    "epsilon",
    "epsilons",
    "coupling",
    "couplings",
    "t1",
    "t2",
    "gamma1",
    "gamma2",
    "axis",
    "grid",
    "approaches",
    "outputs",
];

type Entries<'a> = BTreeMap<&'static str, (usize, &'a str)>;

fn read_entries(text: &str) -> Result<Entries<'_>, ConfigError> {
    let mut entries: Entries<'_> = BTreeMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let (key, value) = content.split_once('=').ok_or_else(|| {
            syntax(
                line_no,
                format!("expected `key = value`, found `{content}`"),
            )
        })?;
        let key = key.trim();
        let value = value.trim();
        let known = KEYS
            .iter()
            .find(|k| **k == key)
            .ok_or_else(|| ConfigError::UnknownKey {
                line: line_no,
                key: key.to_string(),
            })?;
        if value.is_empty() {
            return Err(syntax(line_no, format!("`{key}` has no value")));
        }
        if entries.insert(known, (line_no, value)).is_some() {
            return Err(syntax(line_no, format!("`{key}` given twice")));
        }
    }
    Ok(entries)
}

/// Reads only the chain parameters of a configuration; sweep keys are
/// accepted and ignored. Used for single steady-state runs.
pub fn parse_spec(text: &str) -> Result<ChainSpec, ConfigError> {
    let entries = read_entries(text)?;
    let mut missing_keys: Vec<&str> = ["n_qubits", "t1", "t2"]
        .into_iter()
        .filter(|k| !entries.contains_key(k))
        .collect();
    if !entries.contains_key("epsilon") && !entries.contains_key("epsilons") {
        missing_keys.push("epsilon");
    }
    if !missing_keys.is_empty() {
        return Err(syntax(
            None,
            format!("missing required keys: {}", missing_keys.join(", ")),
        ));
    }
    let mut trimmed = entries.clone();
    trimmed.insert("axis", (0, "T1"));
    trimmed.insert("grid", (0, entries["t1"].1));
    trimmed.remove("approaches");
    trimmed.remove("outputs");
    Ok(request_from_entries(&trimmed)?.base)
}

/// Parses and validates a sweep configuration.
pub fn parse_config(text: &str) -> Result<SweepRequest, ConfigError> {
    request_from_entries(&read_entries(text)?)
}

fn request_from_entries(entries: &Entries<'_>) -> Result<SweepRequest, ConfigError> {
    for (a, b) in [("epsilon", "epsilons"), ("coupling", "couplings")] {
        if let (Some(_), Some((line, _))) = (entries.get(a), entries.get(b)) {
            return Err(syntax(
                *line,
                format!("`{a}` and `{b}` are mutually exclusive"),
            ));
        }
    }

    let axis = match entries.get("axis") {
        Some(&(line, v)) => v.parse::<Axis>().map_err(|m| syntax(line, m))?,
        None => return Err(missing(entries)),
    };
    let mut missing_keys: Vec<&str> = Vec::new();
    for key in ["n_qubits", "grid"] {
        if !entries.contains_key(key) {
            missing_keys.push(key);
        }
    }
    let swept = axis.config_key();
    if swept != "epsilon" && !entries.contains_key("epsilon") && !entries.contains_key("epsilons") {
        missing_keys.push("epsilon");
    }
    for key in ["t1", "t2"] {
        if key != swept && !entries.contains_key(key) {
            missing_keys.push(key);
        }
    }
    if !missing_keys.is_empty() {
        return Err(syntax(
            None,
            format!("missing required keys: {}", missing_keys.join(", ")),
        ));
    }

    let get = |key: &str| entries.get(key).copied();
    let number = |key: &str, default: f64| -> Result<f64, ConfigError> {
        match get(key) {
            Some((line, v)) => parse_f64(v).map_err(|m| syntax(line, m)),
            None => Ok(default),
        }
    };

    let (n_line, n_text) = get("n_qubits").expect("checked above");
    let n_qubits = n_text
        .parse::<usize>()
        .map_err(|_| syntax(n_line, format!("`{n_text}` is not a qubit count")))?;

    let uniform_or_list = |single: &str, list: &str, len: usize| -> Result<Vec<f64>, ConfigError> {
        if let Some((line, v)) = get(list) {
            parse_list(v).map_err(|m| syntax(line, m))
        } else if let Some((line, v)) = get(single) {
            Ok(vec![parse_f64(v).map_err(|m| syntax(line, m))?; len])
        } else {
            // the swept quantity fills in later; any positive placeholder works
            Ok(vec![1.0; len])
        }
    };
    let epsilons = uniform_or_list("epsilon", "epsilons", n_qubits)?;
    let n_couplings = n_qubits.saturating_sub(1);
    if n_couplings > 0
        && swept != "coupling"
        && get("coupling").is_none()
        && get("couplings").is_none()
    {
        return Err(syntax(None, "missing required keys: coupling"));
    }
    let couplings = uniform_or_list("coupling", "couplings", n_couplings)?;

    let base = ChainSpec::new(epsilons, couplings, number("t1", 0.0)?, number("t2", 0.0)?)
        .with_gammas(
            number("gamma1", DEFAULT_GAMMA)?,
            number("gamma2", DEFAULT_GAMMA)?,
        );
    if let Err(crate::Error::InvalidSpec(mut violations)) = validate_spec(&base) {
        // the base values of the swept parameter are placeholders
        violations.retain(|v| !violation_is_on_axis(v, axis));
        if !violations.is_empty() {
            return Err(ConfigError::SpecInvalid {
                at: None,
                violations,
            });
        }
    }
    let mut base = base;
    if n_qubits != base.n_qubits {
        // explicit lists with the wrong length
        base.n_qubits = n_qubits;
        base.baths[1].attached_site = n_qubits.saturating_sub(1);
        if let Err(crate::Error::InvalidSpec(violations)) = validate_spec(&base) {
            return Err(ConfigError::SpecInvalid {
                at: None,
                violations,
            });
        }
    }

    let grid = {
        let (line, v) = get("grid").expect("checked above");
        v.parse::<Grid>().map_err(|m| syntax(line, m))?
    };
    let approaches = match get("approaches") {
        Some((line, v)) => parse_approaches(v).map_err(|m| syntax(line, m))?,
        None => Approach::ALL.to_vec(),
    };
    let outputs = match get("outputs") {
        Some((line, v)) => parse_outputs(v).map_err(|m| syntax(line, m))?,
        None => Outputs::default(),
    };

    SweepRequest {
        base,
        axis,
        grid,
        approaches,
        outputs,
    }
    .validate()
}

fn violation_is_on_axis(v: &SpecViolation, axis: Axis) -> bool {
    matches!(
        (v, axis),
        (SpecViolation::NegativeTemperature { bath: 0, .. }, Axis::T1)
            | (SpecViolation::NegativeTemperature { bath: 1, .. }, Axis::T2)
            | (SpecViolation::NonPositiveGap { .. }, Axis::Eps)
    )
}

fn missing(entries: &Entries<'_>) -> ConfigError {
    let missing: Vec<&str> = ["n_qubits", "epsilon", "t1", "t2", "axis", "grid"]
        .into_iter()
        .filter(|k| {
            !entries.contains_key(k) && !(*k == "epsilon" && entries.contains_key("epsilons"))
        })
        .collect();
    syntax(
        None,
        format!("missing required keys: {}", missing.join(", ")),
    )
}

fn parse_approaches(v: &str) -> Result<Vec<Approach>, String> {
    let mut out = Vec::new();
    for item in v.split(',').map(str::trim) {
        let approaches: &[Approach] = match item {
            "both" => &Approach::ALL,
            other => &[other.parse::<Approach>()?],
        };
        for a in approaches {
            if !out.contains(a) {
                out.push(*a);
            }
        }
    }
    out.sort();
    Ok(out)
}

fn parse_outputs(v: &str) -> Result<Outputs, String> {
    let mut o = Outputs {
        populations: false,
        heat_flux: false,
        rho_diagonals: false,
    };
    for item in v.split(',').map(str::trim) {
        match item {
            "populations" => o.populations = true,
            "heat_flux" => o.heat_flux = true,
            "rho_diagonals" => o.rho_diagonals = true,
            other => return Err(format!("unknown output `{other}`")),
        }
    }
    Ok(o)
}
