use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use rateflow::energy::{EnergyFunctional, FunctionalDescriptor, FunctionalRegistry};
use serde::{Deserialize, Serialize};
use std::sync::Arc;

use crate::exit::CliError;

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolverConfig {
    pub name: String,
    #[serde(default)]
    pub h: Option<f64>,
    pub horizon: f64,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default)]
    pub trajectory: Option<PathBuf>,
    #[serde(default)]
    pub report: Option<PathBuf>,
}

/// A single JSON document describing one run. Exactly one of `solver` (with
/// `initial`) or `input` (a trajectory or path CSV) is given.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub functional: FunctionalDescriptor,
    #[serde(default)]
    pub initial: Option<Vec<f64>>,
    #[serde(default)]
    pub solver: Option<SolverConfig>,
    #[serde(default)]
    pub input: Option<PathBuf>,
    #[serde(default)]
    pub checks: Vec<String>,
    /// Overrides keyed by check or component name.
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    #[serde(default)]
    pub output: OutputConfig,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_probes")]
    pub probes: usize,
    /// Directory of the config file; relative paths resolve against it.
    #[serde(skip)]
    pub base: PathBuf,
    #[serde(skip)]
    pub stem: String,
}

fn default_probes() -> usize {
    1000
}

impl ScenarioConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
        let mut cfg: ScenarioConfig = serde_json::from_str(&text)
            .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        cfg.base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        cfg.stem = path.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_else(|| "scenario".into());
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        match (&self.solver, &self.input) {
            (Some(_), Some(_)) => return Err(CliError::config("give either `solver` or `input`, not both")),
            (None, None) => return Err(CliError::config("one of `solver` or `input` is required")),
            (Some(s), None) => {
                if self.initial.is_none() {
                    return Err(CliError::config("`initial` is required with a solver"));
                }
                if let Some(h) = s.h {
                    if !(h > 0.0 && h.is_finite()) {
                        return Err(CliError::config(format!("step h must be positive, got {h}")));
                    }
                }
                if !(s.horizon > 0.0) {
                    return Err(CliError::config(format!("horizon must be positive, got {}", s.horizon)));
                }
            }
            (None, Some(_)) => {}
        }
        if let Some((name, t)) = self.tolerances.iter().find(|(_, t)| !(**t >= 0.0)) {
            return Err(CliError::config(format!("tolerance `{name}` must be nonnegative, got {t}")));
        }
        Ok(())
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base.join(p)
        }
    }

    pub fn trajectory_path(&self) -> PathBuf {
        match &self.output.trajectory {
            Some(p) => self.resolve(p),
            None => self.base.join(format!("{}.csv", self.stem)),
        }
    }

    pub fn report_path(&self) -> PathBuf {
        match &self.output.report {
            Some(p) => self.resolve(p),
            None => self.base.join(format!("{}.report.json", self.stem)),
        }
    }

    pub fn build_functional(&self) -> Result<Arc<dyn EnergyFunctional>, CliError> {
        build_functional(&self.functional)
    }
}

pub fn build_functional(desc: &FunctionalDescriptor) -> Result<Arc<dyn EnergyFunctional>, CliError> {
    FunctionalRegistry::default().build(desc).map_err(|e| CliError::Config(e.into()))
}

/// Reads only the functional descriptor from a config file.
pub fn load_functional(path: &Path) -> Result<Arc<dyn EnergyFunctional>, CliError> {
    #[derive(Deserialize)]
    struct Partial {
        functional: FunctionalDescriptor,
    }
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))?;
    let p: Partial =
        serde_json::from_str(&text).map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
    build_functional(&p.functional)
}
