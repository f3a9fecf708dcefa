use std::path::{Path, PathBuf};

use serde::Deserialize;

use strikebench::rsmf::{ElementWeights, RsmfConfig};
use strikebench::tkg::{FormatSpec, Split};
use strikebench::{Error, Result};

use crate::args::CommonArgs;

/// Defaults loadable from a TOML config file. Command-line flags take
/// precedence over these; built-in defaults fill whatever remains.
#[derive(Debug, Default, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileDefaults {
    pub time_divisor: Option<u64>,
    pub granularity: Option<String>,
    pub tau: Option<f64>,
    pub min_body_support: Option<u64>,
    pub sample_cap: Option<usize>,
    pub seed: Option<u64>,
    pub window: Option<toml::Value>,
    pub lambda: Option<f64>,
    pub alpha: Option<Vec<f64>>,
    pub history_scope: Option<String>,
    pub lambda_temp: Option<f64>,
    pub b: Option<f64>,
    pub tie_policy: Option<String>,
    pub group_width: Option<f64>,
    pub grid_step: Option<f64>,
    pub norm: Option<String>,
    pub jobs: Option<usize>,
}

impl FileDefaults {
    pub fn load(path: Option<&Path>) -> Result<Self> {
        match path {
            None => Ok(FileDefaults::default()),
            Some(path) => {
                let text = std::fs::read_to_string(path)?;
                toml::from_str(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
            }
        }
    }

    /// Window from the config file: an integer or the string "full".
    pub fn window(&self) -> Result<Option<Option<u64>>> {
        match &self.window {
            None => Ok(None),
            Some(toml::Value::Integer(w)) if *w >= 1 => Ok(Some(Some(*w as u64))),
            Some(toml::Value::String(s)) if s == "full" => Ok(Some(None)),
            Some(other) => Err(Error::Config(format!(
                "window must be a positive integer or \"full\", got {other}"
            ))),
        }
    }
}

/// Which facts are visible when grounding rules at query time.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum HistoryScope {
    TrainOnly,
    AllBeforeT,
}

impl HistoryScope {
    pub fn as_str(&self) -> &'static str {
        match self {
            HistoryScope::TrainOnly => "train-only",
            HistoryScope::AllBeforeT => "all-before-t",
        }
    }

    pub fn splits(&self) -> &'static [Split] {
        match self {
            HistoryScope::TrainOnly => &[Split::Train],
            HistoryScope::AllBeforeT => &[Split::Train, Split::Valid, Split::Test],
        }
    }
}

impl std::str::FromStr for HistoryScope {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "train-only" => Ok(HistoryScope::TrainOnly),
            "all-before-t" => Ok(HistoryScope::AllBeforeT),
            other => Err(Error::Config(format!(
                "unknown history scope {other:?} (expected train-only or all-before-t)"
            ))),
        }
    }
}

/// Resolve the dataset directory: flag, then $STRIKEBENCH_DATA_DIR.
pub fn data_dir(common: &CommonArgs) -> Result<PathBuf> {
    if let Some(dir) = &common.data_dir {
        return Ok(dir.clone());
    }
    match std::env::var_os("STRIKEBENCH_DATA_DIR") {
        Some(dir) => Ok(PathBuf::from(dir)),
        None => Err(Error::Config(
            "no dataset directory: pass --data-dir or set STRIKEBENCH_DATA_DIR".to_owned(),
        )),
    }
}

pub fn format_spec(common: &CommonArgs, file: &FileDefaults) -> FormatSpec {
    FormatSpec {
        time_divisor: common.time_divisor.or(file.time_divisor).unwrap_or(1),
        granularity: common
            .granularity
            .clone()
            .or_else(|| file.granularity.clone())
            .unwrap_or_else(|| "unspecified".to_owned()),
    }
}

/// Parse "a,b,c" into element weights.
pub fn parse_alpha(s: &str) -> Result<ElementWeights> {
    let parts: Vec<&str> = s.split(',').collect();
    if parts.len() != 3 {
        return Err(Error::Config(format!(
            "alpha needs three comma-separated values, got {s:?}"
        )));
    }
    let mut vals = [0.0f64; 3];
    for (slot, part) in vals.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse()
            .map_err(|_| Error::Config(format!("bad alpha component {part:?}")))?;
    }
    Ok(ElementWeights {
        subject: vals[0],
        object: vals[1],
        relation: vals[2],
    })
}

/// Parse a window flag value: integer or "full".
pub fn parse_window(s: &str) -> Result<Option<u64>> {
    if s == "full" {
        return Ok(None);
    }
    let w = s.parse::<u64>().map_err(|_| {
        Error::Config(format!(
            "window must be a positive integer or \"full\", got {s:?}"
        ))
    })?;
    if w == 0 {
        return Err(Error::Config("window must be ≥ 1".to_owned()));
    }
    Ok(Some(w))
}

/// Parse a comma-separated list of floats.
pub fn parse_float_list(s: &str) -> Result<Vec<f64>> {
    s.split(',')
        .map(|part| {
            part.trim()
                .parse::<f64>()
                .map_err(|_| Error::Config(format!("bad number {part:?} in list")))
        })
        .collect()
}

/// Assemble the full RSMF configuration from flags, file defaults, and
/// built-ins.
pub fn rsmf_config(
    window_flag: Option<&str>,
    lambda_flag: Option<f64>,
    alpha_flag: Option<&str>,
    file: &FileDefaults,
) -> Result<RsmfConfig> {
    let builtin = RsmfConfig::default();
    let window = match window_flag {
        Some(s) => parse_window(s)?,
        None => file.window()?.unwrap_or(builtin.window),
    };
    let lambda = lambda_flag.or(file.lambda).unwrap_or(builtin.lambda);
    let alpha = match alpha_flag {
        Some(s) => parse_alpha(s)?,
        None => match &file.alpha {
            Some(v) if v.len() == 3 => ElementWeights {
                subject: v[0],
                object: v[1],
                relation: v[2],
            },
            Some(v) => {
                return Err(Error::Config(format!(
                    "alpha in config file needs three values, got {}",
                    v.len()
                )))
            }
            None => builtin.alpha,
        },
    };
    let cfg = RsmfConfig {
        window,
        lambda,
        alpha,
    };
    cfg.validate()?;
    Ok(cfg)
}
