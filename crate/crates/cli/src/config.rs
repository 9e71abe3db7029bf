//! Flat JSON config file mirroring the command-line flags. Flags override
//! file values; the file supplies defaults for anything not given.

use serde::Deserialize;
use std::path::Path;

use crate::CliError;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub dim: Option<u32>,
    pub rho: Option<f64>,
    #[serde(rename = "L")]
    pub l_list: Option<Vec<f64>>,
    #[serde(rename = "N")]
    pub n_list: Option<Vec<f64>>,
    pub n: Option<usize>,
    pub tau: Option<f64>,
    pub tol_energy: Option<f64>,
    pub tol_residual: Option<f64>,
    pub max_iter: Option<usize>,
    pub warm_start: Option<bool>,
    pub trunc: Option<f64>,
    pub margin: Option<f64>,
    pub init: Option<String>,
    pub out: Option<String>,
    pub format: Option<String>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Validation(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text)
            .map_err(|e| CliError::Validation(format!("malformed config {}: {e}", path.display())))
    }
}

/// Flag-over-file merge.
pub fn merge<T: Clone>(flag: Option<T>, file: Option<T>) -> Option<T> {
    flag.or(file)
}

pub fn require<T>(value: Option<T>, name: &str) -> Result<T, CliError> {
    value.ok_or_else(|| CliError::Validation(format!("missing required parameter --{name}")))
}
