use std::path::{Path, PathBuf};

use hm_core::config::MAX_TRUNCATION;
use hm_core::CheckConfig;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const OUTPUT_DIR_ENV: &str = "HM_OUTPUT_DIR";

/// Settings shared by every command. Embedded verbatim in each report.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    /// Starting truncation degree; `None` lets each check pick from `deg θ`.
    pub truncation: Option<usize>,
    pub tol_accept: f64,
    pub tol_reject: f64,
    pub samples: usize,
    pub seed: u64,
    pub output_dir: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self { truncation: None, tol_accept: 1e-8, tol_reject: 1e-3, samples: 512, seed: 0, output_dir: None }
    }
}

/// Values given on the command line; `None` leaves the lower layer alone.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub truncation: Option<usize>,
    pub tol_accept: Option<f64>,
    pub tol_reject: Option<f64>,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
    pub output_dir: Option<PathBuf>,
}

impl RunConfig {
    pub fn from_toml_file(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Input { field: format!("config {}", path.display()), message: e.to_string() })
    }

    /// Layers: defaults, then the config file, then `HM_OUTPUT_DIR`, then flags.
    pub fn resolve(file: Option<&Path>, env_output_dir: Option<PathBuf>, flags: &Overrides) -> Result<Self, CliError> {
        let mut cfg = match file {
            Some(p) => Self::from_toml_file(p)?,
            None => Self::default(),
        };
        if let Some(dir) = env_output_dir {
            cfg.output_dir = Some(dir);
        }
        if flags.truncation.is_some() {
            cfg.truncation = flags.truncation;
        }
        if let Some(x) = flags.tol_accept {
            cfg.tol_accept = x;
        }
        if let Some(x) = flags.tol_reject {
            cfg.tol_reject = x;
        }
        if let Some(x) = flags.samples {
            cfg.samples = x;
        }
        if let Some(x) = flags.seed {
            cfg.seed = x;
        }
        if flags.output_dir.is_some() {
            cfg.output_dir = flags.output_dir.clone();
        }
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |field: &str, message: String| Err(CliError::Input { field: field.into(), message });
        if !(self.tol_accept.is_finite() && self.tol_accept > 0.0) {
            return bad("tol_accept", format!("must be positive, got {}", self.tol_accept));
        }
        if !(self.tol_reject.is_finite() && self.tol_accept < self.tol_reject) {
            return bad("tol_reject", format!("must exceed tol_accept = {}, got {}", self.tol_accept, self.tol_reject));
        }
        match self.truncation {
            Some(0) => return bad("truncation", "must be positive".into()),
            Some(n) if n > MAX_TRUNCATION => return bad("truncation", format!("{n} exceeds {MAX_TRUNCATION}")),
            _ => {}
        }
        if self.samples < 8 {
            return bad("samples", format!("need at least 8 boundary samples, got {}", self.samples));
        }
        Ok(())
    }

    pub fn check_config(&self) -> CheckConfig {
        CheckConfig {
            tol_accept: self.tol_accept,
            tol_reject: self.tol_reject,
            truncation: self.truncation,
            max_truncation: MAX_TRUNCATION,
            samples: self.samples,
        }
    }
}
