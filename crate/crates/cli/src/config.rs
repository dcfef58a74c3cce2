//! Run configuration: JSON manifest merged with command-line overrides.

use std::path::PathBuf;

use orthoavg::asym::EConstVariant;
use orthoavg::symbols::EnsembleLabel;
use serde::Deserialize;

use crate::CliError;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

/// Fields accepted in a `--config` JSON file; every field is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub command: Option<String>,
    pub symbol_path: Option<PathBuf>,
    pub n_list: Option<Vec<usize>>,
    pub label: Option<String>,
    pub precision_bits: Option<u32>,
    pub tol: Option<f64>,
    pub seed: Option<u64>,
    pub output: Option<String>,
    pub e_const_variant: Option<String>,
    pub t0: Option<f64>,
    pub s: Option<f64>,
    pub beta: Option<u32>,
    pub samples: Option<usize>,
    pub out: Option<PathBuf>,
}

impl ConfigFile {
    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read config {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Usage(format!("bad config {}: {e}", path.display())))
    }
}

/// Fully resolved settings shared by all commands.
#[derive(Debug)]
pub struct RunConfig {
    pub command: String,
    pub symbol_path: Option<PathBuf>,
    pub n_list: Vec<usize>,
    /// `None` selects all four labels.
    pub label: Option<EnsembleLabel>,
    pub precision_bits: u32,
    pub tol: Option<f64>,
    pub seed: u64,
    pub output: OutputFormat,
    pub e_const_variant: EConstVariant,
    pub t0: Option<f64>,
    pub s: Option<f64>,
    pub beta: Option<u32>,
    pub samples: usize,
    pub out: Option<PathBuf>,
}

impl RunConfig {
    pub fn labels(&self) -> Vec<EnsembleLabel> {
        match self.label {
            Some(l) => vec![l],
            None => EnsembleLabel::ALL.to_vec(),
        }
    }

    pub fn require_n_list(&self) -> Result<&[usize], CliError> {
        if self.n_list.is_empty() {
            return Err(CliError::Usage("--n must list at least one value".into()));
        }
        Ok(&self.n_list)
    }
}

pub fn parse_output(s: &str) -> Result<OutputFormat, CliError> {
    match s {
        "csv" => Ok(OutputFormat::Csv),
        "json" => Ok(OutputFormat::Json),
        other => Err(CliError::Usage(format!("unknown output format {other:?}; expected csv or json"))),
    }
}

pub fn parse_label(s: &str) -> Result<Option<EnsembleLabel>, CliError> {
    if s == "all" {
        return Ok(None);
    }
    s.parse().map(Some).map_err(|e: orthoavg::Error| CliError::Usage(e.to_string()))
}

pub fn parse_n_list(s: &str) -> Result<Vec<usize>, CliError> {
    s.split(',')
        .filter(|p| !p.trim().is_empty())
        .map(|p| p.trim().parse::<usize>().map_err(|_| CliError::Usage(format!("bad value {p:?} in --n"))))
        .collect()
}
