//! Run configuration: a JSON document plus `key=value` overrides, validated
//! into a fully resolved [`RunConfig`].
//!
//! Angles (`theta`, and the bounds of any `theta` sweep) are given in degrees.
//! Frequencies, `gamma` and `beta` are in units of the coupling `g`; when a
//! document sets `g` explicitly, every frequency and `gamma` is divided by it.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::params::{Knob, SystemParams};
use crate::phase_diagram::{DEFAULT_LINE_POINTS, DEFAULT_OMEGA_M_RANGE};
use crate::spectral::EPSILON_REAL;
use crate::transmission::DEFAULT_BETA;

use super::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum Command {
    Spectrum,
    PhaseDiagram,
    Transmission,
    LineCut,
    GapMap,
    CriticalGamma,
    Verify,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Spectrum,
        Command::PhaseDiagram,
        Command::Transmission,
        Command::LineCut,
        Command::GapMap,
        Command::CriticalGamma,
        Command::Verify,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Spectrum => "spectrum",
            Command::PhaseDiagram => "phase-diagram",
            Command::Transmission => "transmission",
            Command::LineCut => "line-cut",
            Command::GapMap => "gap-map",
            Command::CriticalGamma => "critical-gamma",
            Command::Verify => "verify",
        }
    }

    /// File name of the data CSV this command writes.
    pub fn csv_name(self) -> String {
        format!("{}.csv", self.name())
    }
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Command {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Command::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| format!("unknown command `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub knob: Knob,
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RangeSpec {
    pub lo: f64,
    pub hi: f64,
    pub n: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    pub epsilon_real: f64,
    pub bracket_rel: f64,
    pub gamma_tol: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            epsilon_real: EPSILON_REAL,
            bracket_rel: 1e-6,
            gamma_tol: 1e-4,
        }
    }
}

/// The document as written; every field optional.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConfigDocument {
    command: Option<Command>,
    omega_c1: Option<f64>,
    omega_c2: Option<f64>,
    omega_m: Option<f64>,
    gamma: Option<f64>,
    theta: Option<f64>,
    g: Option<f64>,
    g_hz: Option<f64>,
    beta: Option<f64>,
    sweep: Option<SweepSpec>,
    sweep_y: Option<SweepSpec>,
    omega: Option<RangeSpec>,
    deltas: Option<Vec<f64>>,
    normalize: Option<bool>,
    seed: Option<u64>,
    trials: Option<usize>,
    gamma_max: Option<f64>,
    tolerances: Option<Tolerances>,
    threads: Option<usize>,
}

/// Fully resolved and validated run configuration. Sweep bounds stay in
/// config units (degrees for `theta`); `params` is in units of g, radians.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: Command,
    pub params: SystemParams,
    pub theta_deg: f64,
    /// Coupling given in the document before normalization (1 when absent).
    pub g_input: f64,
    pub g_hz: Option<f64>,
    pub beta: f64,
    pub sweep: SweepSpec,
    pub sweep_y: Option<SweepSpec>,
    pub omega: RangeSpec,
    pub deltas: Vec<f64>,
    pub normalize: bool,
    pub seed: u64,
    pub trials: usize,
    pub gamma_max: f64,
    pub tolerances: Tolerances,
    pub threads: Option<usize>,
    pub out_dir: PathBuf,
}

fn parse_error(err: &serde_json::Error, source: &str) -> CliError {
    CliError::Parse {
        source_name: source.to_string(),
        line: err.line(),
        column: err.column(),
        message: err.to_string(),
    }
}

/// Sets `path` (dot separated) in a JSON object tree.
fn set_path(root: &mut Value, path: &str, value: Value) -> Result<(), String> {
    let mut node = root;
    let parts: Vec<&str> = path.split('.').collect();
    for (i, part) in parts.iter().enumerate() {
        if part.is_empty() {
            return Err(format!("empty segment in key `{path}`"));
        }
        let obj = node
            .as_object_mut()
            .ok_or_else(|| format!("`{}` is not an object", parts[..i].join(".")))?;
        if i + 1 == parts.len() {
            obj.insert(part.to_string(), value);
            return Ok(());
        }
        node = obj
            .entry(part.to_string())
            .or_insert_with(|| Value::Object(Default::default()));
    }
    unreachable!("split yields at least one segment")
}

fn apply_override(root: &mut Value, spec: &str) -> Result<(), CliError> {
    let (key, raw) = spec.split_once('=').ok_or_else(|| CliError::Parse {
        source_name: "--set".into(),
        line: 0,
        column: 0,
        message: format!("override `{spec}` is not of the form key=value"),
    })?;
    let value = serde_json::from_str(raw).unwrap_or_else(|_| Value::String(raw.to_string()));
    set_path(root, key.trim(), value).map_err(|message| CliError::Parse {
        source_name: format!("--set {key}"),
        line: 0,
        column: 0,
        message,
    })
}

fn invalid(msg: impl Into<String>) -> CliError {
    CliError::Validation(msg.into())
}

fn check_finite(name: &str, v: f64) -> Result<(), CliError> {
    if v.is_finite() {
        Ok(())
    } else {
        Err(invalid(format!("{name} must be finite, got {v}")))
    }
}

fn check_range(name: &str, lo: f64, hi: f64, n: usize) -> Result<(), CliError> {
    check_finite(&format!("{name}.lo"), lo)?;
    check_finite(&format!("{name}.hi"), hi)?;
    if !(lo < hi) {
        return Err(invalid(format!("{name}: lo < hi violated ({lo} >= {hi})")));
    }
    if n < 2 {
        return Err(invalid(format!("{name}: count >= 2 violated (n = {n})")));
    }
    Ok(())
}

fn check_knob(name: &str, sweep: &SweepSpec, allowed: &[Knob]) -> Result<(), CliError> {
    if allowed.contains(&sweep.knob) {
        Ok(())
    } else {
        let ids: Vec<_> = allowed.iter().map(|k| k.id()).collect();
        Err(invalid(format!(
            "{name}.knob must be one of [{}] for this command, got {}",
            ids.join(", "),
            sweep.knob
        )))
    }
}

fn default_sweep(command: Command) -> SweepSpec {
    let (lo, hi) = DEFAULT_OMEGA_M_RANGE;
    let omega_m = |n| SweepSpec { knob: Knob::OmegaM, lo, hi, n };
    match command {
        Command::Spectrum => omega_m(1001),
        Command::PhaseDiagram | Command::Transmission => omega_m(201),
        Command::GapMap => SweepSpec { knob: Knob::Theta, lo: 0.0, hi: 360.0, n: 181 },
        Command::LineCut | Command::CriticalGamma | Command::Verify => omega_m(DEFAULT_LINE_POINTS),
    }
}

const DEFAULT_OMEGA: RangeSpec = RangeSpec { lo: 20.0, hi: 30.0, n: 1001 };

/// Default for a nested section, so `--set sweep.n=..` refines the default
/// sweep instead of replacing it.
fn default_section(command: Command, key: &str) -> Option<Value> {
    let v = match key {
        "sweep" => serde_json::to_value(default_sweep(command)),
        "sweep_y" => serde_json::to_value(default_sweep_y(command)?),
        "omega" => serde_json::to_value(DEFAULT_OMEGA),
        _ => return None,
    };
    Some(v.expect("defaults serialize"))
}

fn default_sweep_y(command: Command) -> Option<SweepSpec> {
    match command {
        Command::PhaseDiagram => Some(SweepSpec { knob: Knob::Gamma, lo: 0.0, hi: 2.0, n: 101 }),
        Command::GapMap => Some(SweepSpec { knob: Knob::Gamma, lo: 0.0, hi: 1.5, n: 151 }),
        _ => None,
    }
}

/// Parses `document` (JSON), applies `overrides` (`key=value`, dotted keys,
/// values parsed as JSON or else taken as strings) and validates the result.
///
/// `command` comes from the command line; a `command` field in the document
/// must agree with it.
pub fn parse_config(
    command: Command,
    document: &str,
    source_name: &str,
    overrides: &[String],
    out_dir: PathBuf,
) -> Result<RunConfig, CliError> {
    let text = if document.trim().is_empty() { "{}" } else { document };
    // deserialize the raw text first so errors carry line/column context
    let mut doc: ConfigDocument = serde_json::from_str(text).map_err(|e| parse_error(&e, source_name))?;
    if !overrides.is_empty() {
        let mut value: Value = serde_json::from_str(text).map_err(|e| parse_error(&e, source_name))?;
        for spec in overrides {
            if let Some((section, _)) = spec.split_once('=').and_then(|(k, _)| k.trim().split_once('.')) {
                if let (Some(obj), Some(d)) = (value.as_object_mut(), default_section(command, section)) {
                    obj.entry(section).or_insert(d);
                }
            }
            apply_override(&mut value, spec)?;
        }
        doc = serde_json::from_value(value).map_err(|e| CliError::Parse {
            source_name: format!("{source_name} (after --set overrides)"),
            line: 0,
            column: 0,
            message: e.to_string(),
        })?;
    }
    resolve(command, doc, out_dir)
}

fn resolve(command: Command, doc: ConfigDocument, out_dir: PathBuf) -> Result<RunConfig, CliError> {
    if let Some(c) = doc.command {
        if c != command {
            return Err(invalid(format!("document command `{c}` does not match `{command}`")));
        }
    }
    let g_input = doc.g.unwrap_or(1.0);
    check_finite("g", g_input)?;
    if !(g_input > 0.0) {
        return Err(invalid(format!("g > 0 violated (g = {g_input})")));
    }
    let omega_c1 = doc.omega_c1.unwrap_or(24.0 * g_input);
    let omega_c2 = doc.omega_c2.unwrap_or(26.0 * g_input);
    let omega_m = doc.omega_m.unwrap_or(0.5 * (omega_c1 + omega_c2));
    let gamma = doc.gamma.unwrap_or(0.0);
    let theta_deg = doc.theta.unwrap_or(0.0);
    for (name, v) in [
        ("omega_c1", omega_c1),
        ("omega_c2", omega_c2),
        ("omega_m", omega_m),
        ("gamma", gamma),
        ("theta", theta_deg),
    ] {
        check_finite(name, v)?;
    }
    if gamma < 0.0 {
        return Err(invalid(format!("gamma >= 0 violated (gamma = {gamma})")));
    }
    let params = SystemParams::new(omega_c1, omega_c2, omega_m, gamma, g_input, theta_deg.to_radians())
        .map_err(|e| invalid(e.to_string()))?
        .normalized();

    let beta = doc.beta.unwrap_or(DEFAULT_BETA);
    check_finite("beta", beta)?;
    if !(beta > 0.0) {
        return Err(invalid(format!("beta > 0 violated (beta = {beta})")));
    }
    if let Some(hz) = doc.g_hz {
        check_finite("g_hz", hz)?;
    }

    let sweep = doc.sweep.unwrap_or_else(|| default_sweep(command));
    check_range("sweep", sweep.lo, sweep.hi, sweep.n)?;
    let sweep_y = doc.sweep_y.or_else(|| default_sweep_y(command));
    if let Some(y) = &sweep_y {
        check_range("sweep_y", y.lo, y.hi, y.n)?;
    }
    match command {
        Command::Spectrum | Command::Transmission | Command::CriticalGamma => {
            check_knob("sweep", &sweep, &[Knob::OmegaM])?;
        }
        Command::GapMap => {
            check_knob("sweep", &sweep, &[Knob::Theta])?;
            check_knob("sweep_y", sweep_y.as_ref().expect("gap-map default"), &[Knob::Gamma])?;
        }
        Command::PhaseDiagram => {
            let y = sweep_y.as_ref().expect("phase-diagram default");
            let allowed = [Knob::OmegaC1, Knob::OmegaC2, Knob::OmegaM, Knob::Gamma, Knob::Theta];
            check_knob("sweep", &sweep, &allowed)?;
            check_knob("sweep_y", y, &allowed)?;
            if y.knob == sweep.knob {
                return Err(invalid(format!("sweep and sweep_y both vary {}", y.knob)));
            }
        }
        Command::LineCut | Command::Verify => {}
    }
    if command == Command::PhaseDiagram || command == Command::GapMap {
        for (name, s) in [("sweep", Some(&sweep)), ("sweep_y", sweep_y.as_ref())] {
            if let Some(s) = s {
                if s.knob == Knob::Gamma && s.lo < 0.0 {
                    return Err(invalid(format!("{name}: gamma >= 0 violated (lo = {})", s.lo)));
                }
            }
        }
    }
    if command == Command::CriticalGamma && sweep.n < 3 {
        return Err(invalid("sweep: critical-gamma needs n >= 3"));
    }

    let omega = doc.omega.unwrap_or(DEFAULT_OMEGA);
    check_range("omega", omega.lo, omega.hi, omega.n)?;
    let deltas = doc.deltas.unwrap_or_else(|| vec![0.0]);
    if deltas.is_empty() {
        return Err(invalid("deltas must not be empty"));
    }
    for d in &deltas {
        check_finite("deltas[]", *d)?;
    }

    let tolerances = doc.tolerances.unwrap_or_default();
    for (name, v) in [
        ("tolerances.epsilon_real", tolerances.epsilon_real),
        ("tolerances.bracket_rel", tolerances.bracket_rel),
        ("tolerances.gamma_tol", tolerances.gamma_tol),
    ] {
        if !(v > 0.0) || !v.is_finite() {
            return Err(invalid(format!("{name} > 0 violated ({v})")));
        }
    }
    let gamma_max = doc.gamma_max.unwrap_or(64.0);
    if !(gamma_max > 0.0) || !gamma_max.is_finite() {
        return Err(invalid(format!("gamma_max > 0 violated ({gamma_max})")));
    }
    let trials = doc.trials.unwrap_or(1000);
    if trials == 0 {
        return Err(invalid("trials >= 1 violated"));
    }
    if doc.threads == Some(0) {
        return Err(invalid("threads >= 1 violated"));
    }

    Ok(RunConfig {
        command,
        params,
        theta_deg,
        g_input,
        g_hz: doc.g_hz,
        beta,
        sweep,
        sweep_y,
        omega,
        deltas,
        normalize: doc.normalize.unwrap_or(false),
        seed: doc.seed.unwrap_or(42),
        trials,
        gamma_max,
        tolerances,
        threads: doc.threads,
        out_dir,
    })
}
