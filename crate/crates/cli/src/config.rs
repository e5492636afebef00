use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use robin_lab::geometry::DomainSpec;
use serde::Serialize;
use sha2::{Digest, Sha256};

use crate::domain::{parse_domain, parse_family};
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Experiment {
    Solve,
    Compare,
    Convergence,
    RigiditySweep,
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Experiment::Solve => "solve",
            Experiment::Compare => "compare",
            Experiment::Convergence => "convergence",
            Experiment::RigiditySweep => "rigidity-sweep",
        })
    }
}

/// Keys accepted in a config file; each also exists as a `--flag`.
pub const KEYS: [&str; 10] = ["domain", "family", "beta", "h", "levels", "t_grid", "s_grid", "out", "tol_scale", "seed"];

pub const MIN_GRID: usize = 16;
pub const MAX_LEVELS: usize = 6;

/// A fully validated experiment description.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    /// Set for every experiment except `rigidity-sweep`.
    pub domain: Option<DomainSpec>,
    /// Set for `rigidity-sweep`.
    pub family: Vec<DomainSpec>,
    pub beta: f64,
    pub h: f64,
    pub levels: usize,
    pub t_grid: usize,
    pub s_grid: usize,
    #[serde(skip)]
    pub out: PathBuf,
    pub tol_scale: f64,
    /// Reserved; no stage is randomized.
    pub seed: Option<u64>,
}

impl ExperimentConfig {
    /// SHA-256 of the configuration (output directory excluded).
    pub fn hash(&self) -> String {
        let text = serde_json::to_string(self).expect("config is serializable");
        Sha256::digest(text.as_bytes()).iter().map(|b| format!("{b:02x}")).collect()
    }
}

/// A raw value together with the directory relative paths resolve against.
#[derive(Debug, Clone)]
struct Raw {
    value: String,
    base: PathBuf,
    origin: String,
}

fn parse_file(path: &Path) -> Result<BTreeMap<String, Raw>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let at = format!("{}:{}", path.display(), i + 1);
        let (k, v) = line
            .split_once('=')
            .ok_or_else(|| CliError::usage(format!("{at}: expected `key = value`, got `{line}`")))?;
        let key = k.trim();
        if !KEYS.contains(&key) {
            return Err(CliError::usage(format!("{at}: unknown key `{key}`")));
        }
        let raw = Raw {
            value: v.trim().to_string(),
            base: base.clone(),
            origin: at.clone(),
        };
        if map.insert(key.to_string(), raw).is_some() {
            return Err(CliError::usage(format!("{at}: duplicate key `{key}`")));
        }
    }
    Ok(map)
}

fn number<T: FromStr>(raw: &Raw, key: &str) -> Result<T, CliError> {
    raw.value
        .parse()
        .map_err(|_| CliError::usage(format!("{}: malformed number `{}` for `{key}`", raw.origin, raw.value)))
}

/// Builds a config: `flags` (key, value) pairs override values from the
/// optional `key = value` file.
pub fn parse_config(
    experiment: Experiment,
    flags: &[(&str, Option<String>)],
    file: Option<&Path>,
) -> Result<ExperimentConfig, CliError> {
    let mut map = match file {
        Some(p) => parse_file(p)?,
        None => BTreeMap::new(),
    };
    for (key, value) in flags {
        if !KEYS.contains(key) {
            return Err(CliError::usage(format!("unknown key `{key}`")));
        }
        if let Some(v) = value {
            map.insert(
                key.to_string(),
                Raw {
                    value: v.trim().to_string(),
                    base: PathBuf::from("."),
                    origin: format!("--{}", key.replace('_', "-")),
                },
            );
        }
    }
    let required = |key: &str| {
        map.get(key)
            .ok_or_else(|| CliError::usage(format!("missing required key `{key}` for `{experiment}`")))
    };
    let optional = |key: &str| map.get(key);

    let (domain, family) = if experiment == Experiment::RigiditySweep {
        let raw = required("family")?;
        let fam = parse_family(&raw.value, &raw.base).map_err(|e| CliError::usage(format!("{}: {e}", raw.origin)))?;
        (None, fam)
    } else {
        let raw = required("domain")?;
        let d = parse_domain(&raw.value, &raw.base).map_err(|e| CliError::usage(format!("{}: {e}", raw.origin)))?;
        (Some(d), Vec::new())
    };
    let beta: f64 = number(required("beta")?, "beta")?;
    let h: f64 = number(required("h")?, "h")?;
    let out = PathBuf::from(&required("out")?.value);
    let levels: usize = optional("levels").map(|r| number(r, "levels")).transpose()?.unwrap_or(3);
    let t_grid: usize = optional("t_grid").map(|r| number(r, "t_grid")).transpose()?.unwrap_or(200);
    let s_grid: usize = optional("s_grid").map(|r| number(r, "s_grid")).transpose()?.unwrap_or(1000);
    let tol_scale: f64 = optional("tol_scale").map(|r| number(r, "tol_scale")).transpose()?.unwrap_or(1.0);
    let seed: Option<u64> = optional("seed").map(|r| number(r, "seed")).transpose()?;

    let invalid = |key: &str, why: &str| {
        let raw = &map[key];
        CliError::usage(format!("{}: `{}` for `{key}` {why}", raw.origin, raw.value))
    };
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(invalid("beta", "must be positive"));
    }
    if !(h > 0.0 && h.is_finite()) {
        return Err(invalid("h", "must be positive"));
    }
    if !(tol_scale > 0.0 && tol_scale.is_finite()) {
        return Err(invalid("tol_scale", "must be positive"));
    }
    if levels > MAX_LEVELS {
        return Err(invalid("levels", "must be at most 6"));
    }
    for key in ["t_grid", "s_grid"] {
        if map.contains_key(key) && [t_grid, s_grid][(key == "s_grid") as usize] < MIN_GRID {
            return Err(invalid(key, "must be at least 16"));
        }
    }
    Ok(ExperimentConfig {
        experiment,
        domain,
        family,
        beta,
        h,
        levels,
        t_grid,
        s_grid,
        out,
        tol_scale,
        seed,
    })
}
