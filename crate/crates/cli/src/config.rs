//! Optional JSON configuration. Command-line flags take precedence over it.

use std::path::{Path, PathBuf};

use lightstage::{ProjectionMode, ToneOperator};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    pub rig: Option<PathBuf>,
    pub env: Option<PathBuf>,
    pub stack: Option<PathBuf>,
    pub weights: Option<PathBuf>,
    pub mode: Option<ProjectionMode>,
    pub alpha_blend: Option<f64>,
    pub exposure: Option<f64>,
    pub tonemap: Option<ToneOperator>,
    pub yaw_sweep_deg: Option<Vec<f64>>,
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
    pub threads: Option<usize>,
}

impl PipelineConfig {
    /// Parses `text`; relative paths are resolved against `base`.
    pub fn from_json(text: &str, base: &Path) -> CliResult<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let mut cfg: PipelineConfig = serde_path_to_error::deserialize(de)
            .map_err(|e| CliError::parse(format!("config {}: {}", e.path(), e.inner())))?;
        for p in [
            &mut cfg.rig,
            &mut cfg.env,
            &mut cfg.stack,
            &mut cfg.weights,
            &mut cfg.output,
        ]
        .into_iter()
        .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::parse(format!("{}: {e}", path.display())))?;
        Self::from_json(&text, path.parent().unwrap_or(Path::new("")))
    }
}

/// Flag value, else config value, else a usage error naming both spellings.
pub(crate) fn required<T: Clone>(flag: Option<T>, cfg: &Option<T>, name: &str) -> CliResult<T> {
    flag.or_else(|| cfg.clone()).ok_or_else(|| {
        CliError::usage(format!(
            "missing --{} (or \"{}\" in the config file)",
            name,
            name.replace('-', "_")
        ))
    })
}

pub(crate) fn or_default<T: Clone>(flag: Option<T>, cfg: &Option<T>, default: T) -> T {
    flag.or_else(|| cfg.clone()).unwrap_or(default)
}
