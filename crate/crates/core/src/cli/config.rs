//! Sweep configuration files.
//!
//! The file is TOML with four required sections, `[model]`, `[state]`,
//! `[sweep]` and `[outputs]`, plus an optional `[kinematics]` section for the
//! timescale table. Every dimensional key carries its unit as a suffix
//! (`_eV`, `_as`, `_invA`, `_K`, `_amu`, `_A`, `_A_per_s`, `_per_eV`); a
//! key written without its suffix is rejected with the expected name.

use std::path::Path;

use num_complex::Complex64;
use sha2::{Digest, Sha256};
use toml::{Table, Value};

use crate::error::{Error, Result};
use crate::linalg::{ComplexMatrix, DensityMatrix};
use crate::models::{
    build_custom, build_oscillator, thermal_state, LindbladCoupling, ModelSystem, OscillatorSpec,
};
use crate::units::{UnitsContext, BOLTZMANN_EV_K, PROTON_MASS_AMU};

pub const REQUIRED_SECTIONS: [&str; 4] = ["model", "state", "sweep", "outputs"];

/// Largest basis a config file may request.
pub const MAX_DIM: usize = 64;
/// Cap on the number of values in any one list.
pub const MAX_LIST_LEN: usize = 10_000;
/// Cap on `sqw_points`.
pub const MAX_SPECTRUM_POINTS: usize = 1 << 16;

const DEFAULT_DIM: usize = 40;
const DEFAULT_SPECTRUM_POINTS: usize = 512;
const DEFAULT_SPECTRUM_DT_AS: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputKind {
    Rates,
    Anomaly,
    Sqw,
    Correlation,
    Timescales,
}

impl OutputKind {
    pub fn name(self) -> &'static str {
        match self {
            OutputKind::Rates => "rates",
            OutputKind::Anomaly => "anomaly",
            OutputKind::Sqw => "sqw",
            OutputKind::Correlation => "correlation",
            OutputKind::Timescales => "timescales",
        }
    }

    fn parse(s: &str) -> Option<Self> {
        [
            OutputKind::Rates,
            OutputKind::Anomaly,
            OutputKind::Sqw,
            OutputKind::Correlation,
            OutputKind::Timescales,
        ]
        .into_iter()
        .find(|k| k.name() == s)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum ModelConfig {
    Oscillator {
        omega_ev: f64,
        mass_amu: f64,
        dim: usize,
        coupling: LindbladCoupling,
        lambda: f64,
    },
    Explicit {
        energies_ev: Vec<f64>,
        lindblad_values: Vec<f64>,
        densities: Vec<(f64, ComplexMatrix)>,
        lambda: f64,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub enum StateConfig {
    /// Canonical state; `beta_per_ev = ∞` is the ground state.
    Thermal {
        beta_per_ev: f64,
    },
    Diagonal {
        populations: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpectrumConfig {
    pub points: usize,
    pub dt_as: f64,
    pub window_sigma_as: Option<f64>,
    pub k_values: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct KinematicsConfig {
    pub q_inv_a: f64,
    pub delta_e_ev: f64,
    pub e_s_ev: f64,
    pub e0_ev: f64,
    pub range_a: f64,
    /// Manual override; otherwise derived from the oscillator model.
    pub v0_a_per_s: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub model: ModelConfig,
    pub state: StateConfig,
    /// Momentum transfers, 1/Å.
    pub q_values: Vec<f64>,
    /// Scattering times, attoseconds.
    pub tau_sc_values: Vec<f64>,
    /// Dephasing constants, eV.
    pub k_values: Vec<f64>,
    pub outputs: Vec<OutputKind>,
    pub spectrum: SpectrumConfig,
    pub kinematics: Option<KinematicsConfig>,
    /// `section.key = value` for every default that was filled in.
    pub defaults_applied: Vec<String>,
    /// SHA-256 of the source text, hex.
    pub source_hash: String,
}

pub fn parse_config(path: &Path) -> Result<SweepConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config_str(&text)
}

pub fn parse_config_str(text: &str) -> Result<SweepConfig> {
    let root: Table = text
        .parse()
        .map_err(|e: toml::de::Error| Error::Syntax(e.message().to_string()))?;

    let missing: Vec<String> = REQUIRED_SECTIONS
        .iter()
        .filter(|s| !root.contains_key(**s))
        .map(|s| format!("[{s}]"))
        .collect();
    if !missing.is_empty() {
        return Err(Error::MissingSections(missing));
    }
    for key in root.keys() {
        if !REQUIRED_SECTIONS.contains(&key.as_str()) && key != "kinematics" {
            return Err(Error::Config {
                section: key.clone(),
                message: "unknown section".into(),
            });
        }
    }

    let mut defaults = Vec::new();
    let model = parse_model(section(&root, "model")?, &mut defaults)?;
    let state = parse_state(section(&root, "state")?)?;
    let sweep = Section::new(
        "sweep",
        section(&root, "sweep")?,
        &["q_invA", "tau_sc_as", "K_eV", "K_log"],
    )?;
    let q_values = sweep.required_list("q_invA", Domain::Finite)?;
    let tau_sc_values = sweep.required_list("tau_sc_as", Domain::Positive)?;
    let k_values = parse_k_grid(&sweep, &mut defaults)?;

    let outputs_section = Section::new(
        "outputs",
        section(&root, "outputs")?,
        &[
            "series",
            "sqw_points",
            "sqw_dt_as",
            "sqw_window_sigma_as",
            "sqw_K_eV",
        ],
    )?;
    let outputs = parse_outputs(&outputs_section)?;
    let spectrum = parse_spectrum(&outputs_section, &mut defaults)?;

    let kinematics = match root.get("kinematics") {
        None => None,
        Some(_) => Some(parse_kinematics(section(&root, "kinematics")?)?),
    };
    if outputs.contains(&OutputKind::Timescales) && kinematics.is_none() {
        return Err(Error::MissingSections(vec![
            "[kinematics] (required by the timescales output)".into(),
        ]));
    }

    Ok(SweepConfig {
        model,
        state,
        q_values,
        tau_sc_values,
        k_values,
        outputs,
        spectrum,
        kinematics,
        defaults_applied: defaults,
        source_hash: hex::encode(Sha256::digest(text.as_bytes())),
    })
}

fn section<'a>(root: &'a Table, name: &str) -> Result<&'a Table> {
    match root.get(name) {
        Some(Value::Table(t)) => Ok(t),
        Some(_) => Err(Error::Config {
            section: name.into(),
            message: "must be a table".into(),
        }),
        None => Err(Error::MissingSections(vec![format!("[{name}]")])),
    }
}

#[derive(Clone, Copy)]
enum Domain {
    Finite,
    Positive,
    NonNegative,
}

impl Domain {
    fn check(self, v: f64) -> bool {
        v.is_finite()
            && match self {
                Domain::Finite => true,
                Domain::Positive => v > 0.0,
                Domain::NonNegative => v >= 0.0,
            }
    }

    fn describe(self) -> &'static str {
        match self {
            Domain::Finite => "finite",
            Domain::Positive => "finite and > 0",
            Domain::NonNegative => "finite and >= 0",
        }
    }
}

fn unit_of(key: &str) -> &'static str {
    const UNITS: [(&str, &str); 8] = [
        ("_A_per_s", "angstrom per second"),
        ("_per_eV", "1/eV"),
        ("_invA", "1/angstrom"),
        ("_amu", "atomic mass units"),
        ("_eV", "eV"),
        ("_as", "attoseconds"),
        ("_K", "kelvin"),
        ("_A", "angstrom"),
    ];
    UNITS
        .iter()
        .find(|(suffix, _)| key.ends_with(suffix))
        .map(|(_, unit)| *unit)
        .unwrap_or("dimensionless")
}

/// One config section with its allowed keys.
struct Section<'a> {
    name: &'static str,
    table: &'a Table,
}

impl<'a> Section<'a> {
    fn new(name: &'static str, table: &'a Table, allowed: &[&str]) -> Result<Self> {
        for key in table.keys() {
            if allowed.contains(&key.as_str()) {
                continue;
            }
            let prefix = format!("{key}_");
            if let Some(expected) = allowed.iter().find(|a| a.starts_with(&prefix)) {
                return Err(Error::UnitViolation {
                    section: name.into(),
                    key: key.clone(),
                    expected: (*expected).into(),
                    unit: unit_of(expected).into(),
                });
            }
            return Err(Error::Config {
                section: name.into(),
                message: format!("unknown key `{key}` (allowed: {})", allowed.join(", ")),
            });
        }
        Ok(Self { name, table })
    }

    fn err(&self, message: String) -> Error {
        Error::Config {
            section: self.name.into(),
            message,
        }
    }

    fn missing(&self, key: &str) -> Error {
        Error::MissingKey {
            section: self.name.into(),
            key: key.into(),
        }
    }

    fn number(&self, key: &str, value: &Value, domain: Domain) -> Result<f64> {
        let v = match value {
            Value::Float(f) => *f,
            Value::Integer(i) => *i as f64,
            _ => return Err(self.err(format!("`{key}` must be a number ({})", unit_of(key)))),
        };
        if !domain.check(v) {
            return Err(self.err(format!(
                "`{key}` = {v} must be {} ({})",
                domain.describe(),
                unit_of(key)
            )));
        }
        Ok(v)
    }

    fn optional_f64(&self, key: &str, domain: Domain) -> Result<Option<f64>> {
        self.table
            .get(key)
            .map(|v| self.number(key, v, domain))
            .transpose()
    }

    fn required_f64(&self, key: &str, domain: Domain) -> Result<f64> {
        self.optional_f64(key, domain)?
            .ok_or_else(|| self.missing(key))
    }

    fn optional_list(&self, key: &str, domain: Domain) -> Result<Option<Vec<f64>>> {
        let Some(value) = self.table.get(key) else {
            return Ok(None);
        };
        let Value::Array(items) = value else {
            return Err(self.err(format!(
                "`{key}` must be a list of numbers ({})",
                unit_of(key)
            )));
        };
        if items.is_empty() {
            return Err(self.err(format!("`{key}` must not be empty")));
        }
        if items.len() > MAX_LIST_LEN {
            return Err(self.err(format!("`{key}` has more than {MAX_LIST_LEN} entries")));
        }
        items
            .iter()
            .map(|v| self.number(key, v, domain))
            .collect::<Result<Vec<_>>>()
            .map(Some)
    }

    fn required_list(&self, key: &str, domain: Domain) -> Result<Vec<f64>> {
        self.optional_list(key, domain)?
            .ok_or_else(|| self.missing(key))
    }

    fn optional_str(&self, key: &str) -> Result<Option<&'a str>> {
        match self.table.get(key) {
            None => Ok(None),
            Some(Value::String(s)) => Ok(Some(s.as_str())),
            Some(_) => Err(self.err(format!("`{key}` must be a string"))),
        }
    }

    fn required_str(&self, key: &str) -> Result<&'a str> {
        self.optional_str(key)?.ok_or_else(|| self.missing(key))
    }

    fn optional_count(&self, key: &str, max: usize) -> Result<Option<usize>> {
        match self.table.get(key) {
            None => Ok(None),
            Some(Value::Integer(i)) if *i >= 1 && (*i as u64) <= max as u64 => {
                Ok(Some(*i as usize))
            }
            Some(_) => Err(self.err(format!("`{key}` must be an integer in 1..={max}"))),
        }
    }
}

fn parse_model(table: &Table, defaults: &mut Vec<String>) -> Result<ModelConfig> {
    let s = Section::new(
        "model",
        table,
        &[
            "kind",
            "omega_eV",
            "mass_amu",
            "dim",
            "lindblad_variable",
            "lambda",
            "energies_eV",
            "lindblad_values",
            "density",
        ],
    )?;
    let lambda = match s.optional_f64("lambda", Domain::Finite)? {
        Some(l) => l,
        None => {
            defaults.push("model.lambda = 1".into());
            1.0
        }
    };
    match s.required_str("kind")? {
        "oscillator" => {
            let omega_ev = s.required_f64("omega_eV", Domain::Positive)?;
            let mass_amu = match s.optional_f64("mass_amu", Domain::Positive)? {
                Some(m) => m,
                None => {
                    defaults.push(format!("model.mass_amu = {PROTON_MASS_AMU}"));
                    PROTON_MASS_AMU
                }
            };
            let dim = match s.optional_count("dim", MAX_DIM)? {
                Some(d) if d >= 2 => d,
                Some(_) => return Err(s.err("`dim` must be at least 2".into())),
                None => {
                    defaults.push(format!("model.dim = {DEFAULT_DIM}"));
                    DEFAULT_DIM
                }
            };
            let coupling = match s.optional_str("lindblad_variable")? {
                Some("index") => LindbladCoupling::EnergyIndex,
                Some("energy") => LindbladCoupling::EnergyValue,
                Some(other) => {
                    return Err(s.err(format!(
                        "`lindblad_variable` must be \"index\" or \"energy\", got \"{other}\""
                    )))
                }
                None => {
                    defaults.push("model.lindblad_variable = \"index\"".into());
                    LindbladCoupling::EnergyIndex
                }
            };
            Ok(ModelConfig::Oscillator {
                omega_ev,
                mass_amu,
                dim,
                coupling,
                lambda,
            })
        }
        "explicit" => {
            let energies_ev = s.required_list("energies_eV", Domain::Finite)?;
            let lindblad_values = s.required_list("lindblad_values", Domain::Finite)?;
            if energies_ev.len() > MAX_DIM {
                return Err(s.err(format!("at most {MAX_DIM} levels are supported")));
            }
            let densities = parse_densities(&s, energies_ev.len())?;
            Ok(ModelConfig::Explicit {
                energies_ev,
                lindblad_values,
                densities,
                lambda,
            })
        }
        other => Err(s.err(format!(
            "`kind` must be \"oscillator\" or \"explicit\", got \"{other}\""
        ))),
    }
}

/// `[[model.density]]` entries: `q_invA`, `re` and optional `im`, both
/// row-major lists of rows. A missing `-q` entry is filled with `n(q)†`.
fn parse_densities(model: &Section, dim: usize) -> Result<Vec<(f64, ComplexMatrix)>> {
    let entries = match model.table.get("density") {
        None => return Err(model.missing("density")),
        Some(Value::Array(a)) => a,
        Some(_) => return Err(model.err("`density` must be an array of tables".into())),
    };
    let mut out: Vec<(f64, ComplexMatrix)> = Vec::new();
    for entry in entries {
        let Value::Table(t) = entry else {
            return Err(model.err("`density` entries must be tables".into()));
        };
        let s = Section::new("model.density", t, &["q_invA", "re", "im"])?;
        let q = s.required_f64("q_invA", Domain::Finite)?;
        let re = matrix_rows(&s, "re", dim)?.ok_or_else(|| s.missing("re"))?;
        let im = matrix_rows(&s, "im", dim)?.unwrap_or_else(|| vec![0.0; dim * dim]);
        let entries: Vec<Complex64> = re
            .iter()
            .zip(&im)
            .map(|(&r, &i)| Complex64::new(r, i))
            .collect();
        out.push((q, ComplexMatrix::from_row_major(dim, &entries)?));
    }
    let mut partners = Vec::new();
    for (q, m) in &out {
        let has_partner = out
            .iter()
            .any(|(p, _)| (p + q).abs() <= 1e-12 * q.abs().max(1.0));
        if !has_partner {
            partners.push((-q, m.dagger()));
        }
    }
    out.extend(partners);
    Ok(out)
}

fn matrix_rows(s: &Section, key: &str, dim: usize) -> Result<Option<Vec<f64>>> {
    let Some(value) = s.table.get(key) else {
        return Ok(None);
    };
    let shape_err = || s.err(format!("`{key}` must be a {dim}x{dim} list of rows"));
    let Value::Array(rows) = value else {
        return Err(shape_err());
    };
    if rows.len() != dim {
        return Err(shape_err());
    }
    let mut flat = Vec::with_capacity(dim * dim);
    for row in rows {
        let Value::Array(cells) = row else {
            return Err(shape_err());
        };
        if cells.len() != dim {
            return Err(shape_err());
        }
        for cell in cells {
            flat.push(s.number(key, cell, Domain::Finite)?);
        }
    }
    Ok(Some(flat))
}

fn parse_state(table: &Table) -> Result<StateConfig> {
    let s = Section::new(
        "state",
        table,
        &["kind", "temperature_K", "beta_per_eV", "populations"],
    )?;
    match s.required_str("kind")? {
        "ground" => Ok(StateConfig::Thermal {
            beta_per_ev: f64::INFINITY,
        }),
        "thermal" => {
            let t = s.optional_f64("temperature_K", Domain::NonNegative)?;
            let beta = s.optional_f64("beta_per_eV", Domain::NonNegative)?;
            let beta_per_ev = match (t, beta) {
                (Some(_), Some(_)) => {
                    return Err(
                        s.err("give either `temperature_K` or `beta_per_eV`, not both".into())
                    )
                }
                (Some(0.0), None) => f64::INFINITY,
                (Some(t), None) => 1.0 / (BOLTZMANN_EV_K * t),
                (None, Some(b)) => b,
                (None, None) => return Err(s.missing("temperature_K")),
            };
            Ok(StateConfig::Thermal { beta_per_ev })
        }
        "diagonal" => Ok(StateConfig::Diagonal {
            populations: s.required_list("populations", Domain::NonNegative)?,
        }),
        other => Err(s.err(format!(
            "`kind` must be \"thermal\", \"ground\" or \"diagonal\", got \"{other}\""
        ))),
    }
}

fn parse_k_grid(sweep: &Section, defaults: &mut Vec<String>) -> Result<Vec<f64>> {
    let k_err = |v: f64| Error::Config {
        section: "sweep".into(),
        message: format!("K = {v} eV rejected: \"K is real and K>0\" (K = 0 is allowed)"),
    };
    let explicit = match sweep.table.get("K_eV") {
        None => None,
        Some(Value::Array(items)) => {
            let mut ks = Vec::with_capacity(items.len());
            for item in items {
                let v = sweep.number("K_eV", item, Domain::Finite)?;
                if v < 0.0 {
                    return Err(k_err(v));
                }
                ks.push(v);
            }
            Some(ks)
        }
        Some(_) => return Err(sweep.err("`K_eV` must be a list of numbers (eV)".into())),
    };
    let log = match sweep.table.get("K_log") {
        None => None,
        Some(Value::Table(t)) => {
            let s = Section::new(
                "sweep.K_log",
                t,
                &["min_eV", "max_eV", "points", "include_zero"],
            )?;
            let min = s.required_f64("min_eV", Domain::Finite)?;
            let max = s.required_f64("max_eV", Domain::Finite)?;
            if min < 0.0 {
                return Err(k_err(min));
            }
            if !(min > 0.0 && max > min) {
                return Err(s.err("need 0 < min_eV < max_eV".into()));
            }
            let points = s
                .optional_count("points", MAX_LIST_LEN)?
                .ok_or_else(|| s.missing("points"))?;
            if points < 2 {
                return Err(s.err("`points` must be at least 2".into()));
            }
            let include_zero = match t.get("include_zero") {
                None => {
                    defaults.push("sweep.K_log.include_zero = true".into());
                    true
                }
                Some(Value::Boolean(b)) => *b,
                Some(_) => return Err(s.err("`include_zero` must be a boolean".into())),
            };
            let ratio = (max / min).ln() / (points - 1) as f64;
            let mut ks: Vec<f64> = Vec::with_capacity(points + 1);
            if include_zero {
                ks.push(0.0);
            }
            ks.extend((0..points).map(|i| {
                if i == points - 1 {
                    max
                } else {
                    min * (ratio * i as f64).exp()
                }
            }));
            Some(ks)
        }
        Some(_) => return Err(sweep.err("`K_log` must be a table".into())),
    };
    let mut ks = match (explicit, log) {
        (Some(_), Some(_)) => {
            return Err(sweep.err("give either `K_eV` or `K_log`, not both".into()))
        }
        (Some(k), None) | (None, Some(k)) => k,
        (None, None) => return Err(sweep.missing("K_eV")),
    };
    if ks.is_empty() {
        return Err(sweep.err("`K_eV` must not be empty".into()));
    }
    ks.sort_by(f64::total_cmp);
    ks.dedup();
    Ok(ks)
}

fn parse_outputs(s: &Section) -> Result<Vec<OutputKind>> {
    let Some(value) = s.table.get("series") else {
        return Err(s.missing("series"));
    };
    let Value::Array(items) = value else {
        return Err(s.err("`series` must be a list of names".into()));
    };
    if items.is_empty() {
        return Err(s.err("`series` must not be empty".into()));
    }
    let mut kinds = Vec::new();
    for item in items {
        let name = item.as_str().unwrap_or("");
        let kind = OutputKind::parse(name).ok_or_else(|| {
            s.err(format!(
                "unknown series `{item}` (expected rates, anomaly, sqw, correlation, timescales)"
            ))
        })?;
        if !kinds.contains(&kind) {
            kinds.push(kind);
        }
    }
    Ok(kinds)
}

fn parse_spectrum(s: &Section, defaults: &mut Vec<String>) -> Result<SpectrumConfig> {
    let points = match s.optional_count("sqw_points", MAX_SPECTRUM_POINTS)? {
        Some(p) if p >= 2 => p,
        Some(_) => return Err(s.err("`sqw_points` must be at least 2".into())),
        None => {
            defaults.push(format!("outputs.sqw_points = {DEFAULT_SPECTRUM_POINTS}"));
            DEFAULT_SPECTRUM_POINTS
        }
    };
    let dt_as = match s.optional_f64("sqw_dt_as", Domain::Positive)? {
        Some(dt) => dt,
        None => {
            defaults.push(format!("outputs.sqw_dt_as = {DEFAULT_SPECTRUM_DT_AS}"));
            DEFAULT_SPECTRUM_DT_AS
        }
    };
    let window_sigma_as = s.optional_f64("sqw_window_sigma_as", Domain::Positive)?;
    let k_values = match s.optional_list("sqw_K_eV", Domain::NonNegative)? {
        Some(k) => k,
        None => {
            defaults.push("outputs.sqw_K_eV = [0]".into());
            vec![0.0]
        }
    };
    Ok(SpectrumConfig {
        points,
        dt_as,
        window_sigma_as,
        k_values,
    })
}

fn parse_kinematics(table: &Table) -> Result<KinematicsConfig> {
    let s = Section::new(
        "kinematics",
        table,
        &[
            "q_invA",
            "deltaE_eV",
            "Es_eV",
            "E0_eV",
            "range_A",
            "v0_A_per_s",
        ],
    )?;
    Ok(KinematicsConfig {
        q_inv_a: s.required_f64("q_invA", Domain::Positive)?,
        delta_e_ev: s.required_f64("deltaE_eV", Domain::Positive)?,
        e_s_ev: s.required_f64("Es_eV", Domain::Positive)?,
        e0_ev: s.required_f64("E0_eV", Domain::Positive)?,
        range_a: s.required_f64("range_A", Domain::Positive)?,
        v0_a_per_s: s.optional_f64("v0_A_per_s", Domain::Positive)?,
    })
}

impl SweepConfig {
    pub fn oscillator_spec(&self, units: &UnitsContext) -> Option<OscillatorSpec> {
        match self.model {
            ModelConfig::Oscillator {
                omega_ev,
                mass_amu,
                dim,
                coupling,
                ..
            } => Some(OscillatorSpec {
                omega: omega_ev,
                mass: units.amu_to_natural_mass(mass_amu),
                dim,
                x_coupling: coupling,
            }),
            ModelConfig::Explicit { .. } => None,
        }
    }

    /// Model with `n(±q)` for every swept `q`, at `K = 0`.
    pub fn build_model(&self, units: &UnitsContext) -> Result<ModelSystem> {
        match &self.model {
            ModelConfig::Oscillator { lambda, .. } => {
                let spec = self.oscillator_spec(units).expect("oscillator model");
                build_oscillator(&spec, &self.q_values)?.with_coupling(*lambda)
            }
            ModelConfig::Explicit {
                energies_ev,
                lindblad_values,
                densities,
                lambda,
            } => {
                let model = build_custom(
                    energies_ev.clone(),
                    lindblad_values.clone(),
                    0.0,
                    densities.clone(),
                    *lambda,
                )?;
                for &q in &self.q_values {
                    model.n_pair(q)?;
                }
                Ok(model)
            }
        }
    }

    pub fn build_state(&self, model: &ModelSystem) -> Result<DensityMatrix> {
        match &self.state {
            StateConfig::Thermal { beta_per_ev } => thermal_state(model, *beta_per_ev),
            StateConfig::Diagonal { populations } => {
                if populations.len() != model.dim() {
                    return Err(Error::Config {
                        section: "state".into(),
                        message: format!(
                            "`populations` has {} entries but the model has dim {}",
                            populations.len(),
                            model.dim()
                        ),
                    });
                }
                DensityMatrix::from_populations(populations)
            }
        }
    }

    /// RMS velocity in Å/s: the `[kinematics]` override, else the thermal
    /// oscillator value. `None` for explicit models without an override.
    pub fn rms_velocity(&self, units: &UnitsContext) -> Option<f64> {
        if let Some(v) = self.kinematics.as_ref().and_then(|k| k.v0_a_per_s) {
            return Some(v);
        }
        let spec = self.oscillator_spec(units)?;
        let beta = match self.state {
            StateConfig::Thermal { beta_per_ev } => beta_per_ev,
            StateConfig::Diagonal { .. } => return None,
        };
        Some(units.natural_velocity_to_angstrom_per_s(spec.rms_velocity(beta)))
    }
}
