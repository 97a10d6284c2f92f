//! `--config` file: flat TOML keys overriding built-in defaults. Explicit
//! flags override the file.

use std::path::Path;

use serde::Deserialize;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Config {
    pub max_n: Option<u32>,
    pub exhaustive_budget: Option<u64>,
    pub step_cap: Option<usize>,
    pub anneal_t0: Option<f64>,
    pub anneal_ratio: Option<f64>,
    pub anneal_steps: Option<u64>,
    pub jobs: Option<usize>,
}

impl Config {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::BadInput(format!("config: {e}")))
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::BadInput(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }
}
