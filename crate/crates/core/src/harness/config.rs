use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::closed::Scheme;
use crate::error::{Error, Result};
use crate::mapping::ModeRole;

/// Truncation used when the config gives none.
pub const DEFAULT_TRUNCATION: usize = 20;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Propagate,
    TrotterScan,
    CompareSchemes,
    OpenSystem,
    Map,
    Feasibility,
    Resources,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Self::Propagate => "propagate",
            Self::TrotterScan => "trotter-scan",
            Self::CompareSchemes => "compare-schemes",
            Self::OpenSystem => "open-system",
            Self::Map => "map",
            Self::Feasibility => "feasibility",
            Self::Resources => "resources",
        }
    }

    fn needs_model(self) -> bool {
        self != Self::Resources
    }
}

/// Seeded random LVC model used instead of a model file.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RandomModel {
    pub d: usize,
    pub modes: usize,
}

/// Electronic excitation plus optional per-mode displacements `β_k` of the
/// vibrational vacuum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InitialState {
    #[serde(default = "default_electronic")]
    pub electronic: usize,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub displacements: Vec<f64>,
}

fn default_electronic() -> usize {
    1
}

impl Default for InitialState {
    fn default() -> Self {
        Self {
            electronic: default_electronic(),
            displacements: Vec::new(),
        }
    }
}

/// Output grid in fs.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TimeGrid {
    #[serde(default = "default_t_final")]
    pub t_final: f64,
    #[serde(default = "default_dt")]
    pub dt: f64,
}

fn default_t_final() -> f64 {
    300.0
}

fn default_dt() -> f64 {
    1.0
}

impl Default for TimeGrid {
    fn default() -> Self {
        Self {
            t_final: default_t_final(),
            dt: default_dt(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TrotterSettings {
    #[serde(default = "default_scheme")]
    pub scheme: Scheme,
    /// Trotter step (fs).
    #[serde(default = "default_trotter_dt")]
    pub dt: f64,
    /// Steps for `trotter-scan` (fs).
    #[serde(default = "default_dt_list")]
    pub dt_list: Vec<f64>,
    /// Share of the traceless Stark term per part; equal when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stark_split: Option<Vec<f64>>,
}

fn default_scheme() -> Scheme {
    Scheme::Rescaling
}

fn default_trotter_dt() -> f64 {
    0.5
}

fn default_dt_list() -> Vec<f64> {
    vec![0.01, 0.02, 0.05, 0.1]
}

impl Default for TrotterSettings {
    fn default() -> Self {
        Self {
            scheme: default_scheme(),
            dt: default_trotter_dt(),
            dt_list: default_dt_list(),
            stark_split: None,
        }
    }
}

/// Ohmic bath `γ_j = γ0 ω_j exp(-ω_j/ω_c)` at temperature `T`, or explicit
/// rates. Each entry of `gamma0` is one sweep point.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BathSettings {
    /// 1/(fs·eV).
    #[serde(default)]
    pub gamma0: Vec<f64>,
    /// eV.
    #[serde(default = "default_omega_cut")]
    pub omega_cut: f64,
    /// Explicit per-mode rates (1/fs); replaces the ohmic profile.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<Vec<f64>>,
    /// K.
    #[serde(default)]
    pub temperature: f64,
    /// Also run the single-cooling-laser approximation.
    #[serde(default)]
    pub broadband: bool,
}

fn default_omega_cut() -> f64 {
    0.1
}

impl Default for BathSettings {
    fn default() -> Self {
        Self {
            gamma0: Vec::new(),
            omega_cut: default_omega_cut(),
            gamma: None,
            temperature: 0.0,
            broadband: false,
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MapSettings {
    /// Scale factor; the recommended bound when a hardware file is given and
    /// this is absent, else 1.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale_factor: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ResourceSettings {
    /// Mode counts to tabulate.
    #[serde(default = "default_resource_modes")]
    pub modes: Vec<usize>,
    /// Qudit dimension; the model's when a model is given.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<usize>,
    /// Fock basis size per mode for the classical memory estimate.
    #[serde(default = "default_basis")]
    pub basis: usize,
}

fn default_resource_modes() -> Vec<usize> {
    vec![1, 2, 3, 5, 10, 20, 40, 60, 100]
}

fn default_basis() -> usize {
    crate::mapping::DEFAULT_BASIS
}

impl Default for ResourceSettings {
    fn default() -> Self {
        Self {
            modes: default_resource_modes(),
            d: None,
            basis: default_basis(),
        }
    }
}

/// One experiment. Relative `model` and `hardware` paths resolve against the
/// config file's directory.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub experiment: Experiment,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub model: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub random_model: Option<RandomModel>,
    /// One entry per mode, or a single entry for all modes.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub truncations: Vec<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub roles: Option<Vec<ModeRole>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub hardware: Option<PathBuf>,
    #[serde(default = "default_output_dir")]
    pub output_dir: PathBuf,
    #[serde(default)]
    pub seed: u64,
    /// Times (fs) at which states are archived to a snapshot file.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub snapshots: Vec<f64>,
    #[serde(default)]
    pub initial: InitialState,
    #[serde(default)]
    pub time: TimeGrid,
    #[serde(default)]
    pub trotter: TrotterSettings,
    #[serde(default)]
    pub bath: BathSettings,
    #[serde(default)]
    pub map: MapSettings,
    #[serde(default)]
    pub resources: ResourceSettings,
    #[serde(skip)]
    pub base_dir: PathBuf,
}

fn default_output_dir() -> PathBuf {
    PathBuf::from("out")
}

impl RunConfig {
    /// Reads `path` and applies `KEY=VALUE` overrides.
    pub fn load(path: &Path, overrides: &[String]) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse {
            path: path.to_owned(),
            reason: e.to_string(),
        })?;
        let table: toml::Table = toml::from_str(&text).map_err(|e| Error::Parse {
            path: path.to_owned(),
            reason: e.message().to_string(),
        })?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        Self::from_table(table, overrides, base)
    }

    /// Builds a config from TOML text; relative paths resolve against `base_dir`.
    pub fn from_toml(text: &str, overrides: &[String], base_dir: impl Into<PathBuf>) -> Result<Self> {
        let table: toml::Table = toml::from_str(text).map_err(|e| Error::Config(e.message().to_string()))?;
        Self::from_table(table, overrides, base_dir.into())
    }

    pub fn from_table(mut table: toml::Table, overrides: &[String], base_dir: PathBuf) -> Result<Self> {
        for o in overrides {
            apply_override(&mut table, o)?;
        }
        let mut cfg: Self = toml::Value::Table(table)
            .try_into()
            .map_err(|e: toml::de::Error| Error::Config(e.message().to_string()))?;
        cfg.base_dir = base_dir;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        if self.experiment.needs_model() && self.model.is_none() && self.random_model.is_none() {
            return Err(Error::Config(format!(
                "experiment {} needs `model` or `random_model`",
                self.experiment.name()
            )));
        }
        if self.model.is_some() && self.random_model.is_some() {
            return Err(Error::Config("give either `model` or `random_model`, not both".into()));
        }
        if let Some(&bad) = self.truncations.iter().find(|&&n| n < 2) {
            return Err(Error::InvalidTruncation(bad));
        }
        for (name, v) in [("time.t_final", self.time.t_final), ("time.dt", self.time.dt), ("trotter.dt", self.trotter.dt)] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Config(format!("{name} must be positive, got {v}")));
            }
        }
        for p in [self.model_path(), self.hardware_path()].into_iter().flatten() {
            if !p.is_file() {
                return Err(Error::Config(format!("file not found: {}", p.display())));
            }
        }
        Ok(())
    }

    pub fn model_path(&self) -> Option<PathBuf> {
        self.model.as_ref().map(|p| self.base_dir.join(p))
    }

    pub fn hardware_path(&self) -> Option<PathBuf> {
        self.hardware.as_ref().map(|p| self.base_dir.join(p))
    }

    /// Per-mode truncations for `n_modes` modes.
    pub fn truncations_for(&self, n_modes: usize) -> Result<Vec<usize>> {
        match self.truncations.len() {
            0 => Ok(vec![DEFAULT_TRUNCATION; n_modes]),
            1 => Ok(vec![self.truncations[0]; n_modes]),
            k if k == n_modes => Ok(self.truncations.clone()),
            k => Err(Error::Config(format!("{k} truncations given for {n_modes} modes"))),
        }
    }

    /// Canonical TOML text (paths as written).
    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// SHA-256 of the canonical TOML text, hex encoded.
    pub fn hash(&self) -> String {
        Sha256::digest(self.to_toml().as_bytes())
            .iter()
            .map(|b| format!("{b:02x}"))
            .collect()
    }
}

/// Sets a dotted key, e.g. `trotter.dt=0.25`. The value is read as TOML,
/// falling back to a plain string.
pub fn apply_override(table: &mut toml::Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::Config(format!("override '{assignment}' is not KEY=VALUE")))?;
    let key = key.trim();
    let raw = raw.trim();
    if key.is_empty() || key.split('.').any(str::is_empty) {
        return Err(Error::Config(format!("override '{assignment}' has an empty key")));
    }
    let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let parts: Vec<&str> = key.split('.').collect();
    let (last, path) = parts.split_last().expect("nonempty key");
    let mut cur = table;
    for p in path {
        let entry = cur
            .entry(p.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        cur = entry
            .as_table_mut()
            .ok_or_else(|| Error::Config(format!("override '{assignment}': '{p}' is not a table")))?;
    }
    cur.insert(last.to_string(), value);
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = "experiment = \"resources\"\n";

    #[test]
    fn defaults_fill_in() {
        let c = RunConfig::from_toml(MINIMAL, &[], ".").unwrap();
        assert_eq!(c.trotter.scheme, Scheme::Rescaling);
        assert_eq!(c.initial.electronic, 1);
        assert_eq!(c.truncations_for(2).unwrap(), vec![20, 20]);
        assert_eq!(c.output_dir, PathBuf::from("out"));
    }

    #[test]
    fn overrides_set_nested_values() {
        let c = RunConfig::from_toml(
            MINIMAL,
            &["trotter.dt=0.25".into(), "trotter.scheme=rewinding".into(), "truncations=[4, 6]".into()],
            ".",
        )
        .unwrap();
        assert_eq!(c.trotter.dt, 0.25);
        assert_eq!(c.trotter.scheme, Scheme::Rewinding);
        assert_eq!(c.truncations_for(2).unwrap(), vec![4, 6]);
        assert!(c.truncations_for(3).is_err());
    }

    #[test]
    fn bad_inputs_rejected() {
        assert!(RunConfig::from_toml("experiment = \"dance\"", &[], ".").is_err());
        assert!(RunConfig::from_toml(MINIMAL, &["trotter.dt".into()], ".").is_err());
        assert!(RunConfig::from_toml(MINIMAL, &["truncations=[1]".into()], ".").is_err());
        assert!(RunConfig::from_toml(MINIMAL, &["bogus=1".into()], ".").is_err());
        assert!(RunConfig::from_toml("experiment = \"propagate\"", &[], ".").is_err());
        assert!(RunConfig::from_toml("experiment = \"map\"\nmodel = \"missing.toml\"", &[], ".").is_err());
    }

    #[test]
    fn hash_tracks_content() {
        let a = RunConfig::from_toml(MINIMAL, &[], ".").unwrap();
        let b = RunConfig::from_toml(MINIMAL, &[], "elsewhere").unwrap();
        let c = RunConfig::from_toml(MINIMAL, &["seed=3".into()], ".").unwrap();
        assert_eq!(a.hash(), b.hash());
        assert_ne!(a.hash(), c.hash());
        assert_eq!(a.hash().len(), 64);
        let again = RunConfig::from_toml(&a.to_toml(), &[], ".").unwrap();
        assert_eq!(again, a);
    }
}
