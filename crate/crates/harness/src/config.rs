//! Flat TOML configuration. Keys match the long command-line flags with
//! `-` replaced by `_`; flags given on the command line win.
//!
//! ```toml
//! preset = "D3"
//! n = 100
//! seeds = [0, 1, 2]
//! methods = ["fern", "umeans"]
//! requirement = [2.0, 2.0]
//! gain_epsilon = 1e-4
//! ```

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::error::{HarnessError, Result};

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub preset: Option<String>,
    pub n: Option<usize>,
    pub groups: Option<usize>,
    pub skills: Option<usize>,
    pub noise: Option<String>,
    pub roster: Option<PathBuf>,
    pub seed: Option<u64>,
    pub seeds: Option<Vec<u64>>,
    pub runs: Option<usize>,
    pub requirement: Option<Vec<f64>>,
    pub gamma: Option<f64>,
    pub delta: Option<f64>,
    pub benefit_epsilon: Option<f64>,
    pub gain_epsilon: Option<f64>,
    pub max_passes: Option<usize>,
    pub method: Option<String>,
    pub methods: Option<Vec<String>>,
    pub reps: Option<usize>,
    pub ga_population: Option<usize>,
    pub ga_generations: Option<usize>,
    pub ga_mutation: Option<f64>,
    pub timing: Option<bool>,
    pub assignment: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub metrics: Option<PathBuf>,
}

impl FileConfig {
    pub fn parse(text: &str, path: &Path) -> Result<Self> {
        toml::from_str(text).map_err(|source| HarnessError::Config {
            path: path.to_path_buf(),
            source,
        })
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| HarnessError::io(path, e))?;
        Self::parse(&text, path)
    }
}
