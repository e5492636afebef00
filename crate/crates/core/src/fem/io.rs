//! Field file (`nv` then one value per line) and its `key=value` manifest.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;
use std::sync::Arc;

use super::ScalarField;
use crate::geometry::TriangleMesh;
use crate::{Error, Result};

pub fn field_to_string(field: &ScalarField) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "{}", field.values().len());
    for v in field.values() {
        let _ = writeln!(s, "{v:.16e}");
    }
    s
}

pub fn field_values_from_str(text: &str) -> Result<Vec<f64>> {
    let bad = |line: usize, reason: String| Error::Format {
        kind: "field",
        line,
        reason,
    };
    let mut lines = text.lines();
    let header = lines.next().ok_or_else(|| bad(1, "empty file".into()))?;
    let n: usize = header
        .trim()
        .parse()
        .map_err(|_| bad(1, format!("cannot parse count `{}`", header.trim())))?;
    let values: Vec<f64> = lines
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            l.trim()
                .parse::<f64>()
                .map_err(|_| bad(i + 2, format!("cannot parse `{}`", l.trim())))
        })
        .collect::<Result<_>>()?;
    if values.len() != n {
        return Err(bad(1, format!("header announces {n} values, found {}", values.len())));
    }
    Ok(values)
}

pub fn write_field(field: &ScalarField, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, field_to_string(field))?;
    Ok(())
}

pub fn read_field(mesh: Arc<TriangleMesh>, path: impl AsRef<Path>) -> Result<ScalarField> {
    ScalarField::new(mesh, field_values_from_str(&std::fs::read_to_string(path)?)?)
}

/// `key=value` manifest tying a field file to its mesh and solve parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldManifest {
    pub mesh: String,
    pub beta: f64,
    pub tol: f64,
}

impl FieldManifest {
    pub fn to_text(&self) -> String {
        format!("mesh={}\nbeta={:.16e}\ntol={:.16e}\n", self.mesh, self.beta, self.tol)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut kv = BTreeMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| Error::Format {
                kind: "manifest",
                line: i + 1,
                reason: format!("expected key=value, got `{line}`"),
            })?;
            kv.insert(k.trim().to_string(), (i + 1, v.trim().to_string()));
        }
        let get = |key: &str| {
            kv.get(key).cloned().ok_or_else(|| Error::Format {
                kind: "manifest",
                line: 0,
                reason: format!("missing key `{key}`"),
            })
        };
        let num = |key: &str| -> Result<f64> {
            let (line, v) = get(key)?;
            v.parse().map_err(|_| Error::Format {
                kind: "manifest",
                line,
                reason: format!("cannot parse `{v}` for `{key}`"),
            })
        };
        Ok(FieldManifest {
            mesh: get("mesh")?.1,
            beta: num("beta")?,
            tol: num("tol")?,
        })
    }
}
