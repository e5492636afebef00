//! Text grammar for domains and domain families.
//!
//! ```text
//! disk:R | ellipse:a,b | rect:w,h | polygon:@file | perturbed_disk:R,eps,k
//! ```
//!
//! In a family any numeric argument may be a range `lo:hi:n` (n evenly
//! spaced values, ends included), arguments may be written `name=value`,
//! and several terms are separated by `;`.

use std::path::Path;

use robin_lab::geometry::DomainSpec;
use robin_lab::Point;

use crate::CliError;

fn param_names(kind: &str) -> Option<&'static [&'static str]> {
    Some(match kind {
        "disk" => &["R"],
        "ellipse" => &["a", "b"],
        "rect" => &["w", "h"],
        "perturbed_disk" => &["R", "eps", "k"],
        _ => return None,
    })
}

fn number(token: &str, term: &str) -> Result<f64, CliError> {
    token
        .trim()
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| CliError::usage(format!("malformed number `{}` in domain `{term}`", token.trim())))
}

fn range(token: &str, term: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = token.split(':').collect();
    match parts[..] {
        [single] => Ok(vec![number(single, term)?]),
        [lo, hi, n] => {
            let (lo, hi) = (number(lo, term)?, number(hi, term)?);
            let n: usize = n
                .trim()
                .parse()
                .ok()
                .filter(|&n| n >= 1)
                .ok_or_else(|| CliError::usage(format!("malformed count `{}` in domain `{term}`", n.trim())))?;
            Ok((0..n)
                .map(|i| if n == 1 { lo } else { lo + (hi - lo) * i as f64 / (n - 1) as f64 })
                .collect())
        }
        _ => Err(CliError::usage(format!("malformed range `{token}` in domain `{term}`"))),
    }
}

fn build(kind: &str, v: &[f64], term: &str) -> Result<DomainSpec, CliError> {
    let spec = match kind {
        "disk" => DomainSpec::disk(v[0]),
        "ellipse" => DomainSpec::ellipse(v[0], v[1]),
        "rect" => DomainSpec::rectangle(v[0], v[1]),
        "perturbed_disk" => {
            if v[2].fract() != 0.0 || v[2] < 0.0 || v[2] > u32::MAX as f64 {
                return Err(CliError::usage(format!("mode `{}` in domain `{term}` must be a whole number", v[2])));
            }
            DomainSpec::perturbed_disk(v[0], v[1], v[2] as u32)
        }
        _ => unreachable!(),
    };
    spec.validate().map_err(|e| CliError::usage(format!("domain `{term}`: {e}")))?;
    Ok(spec)
}

/// Reads a polygon file: one `x y` (or `x,y`) vertex per line, `#` comments.
pub fn read_polygon(path: &Path) -> Result<Vec<Point>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let mut pts = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap().trim();
        if line.is_empty() {
            continue;
        }
        let nums: Vec<&str> = line.split(|c: char| c == ',' || c.is_whitespace()).filter(|s| !s.is_empty()).collect();
        let bad = || CliError::usage(format!("{}:{}: expected `x y`, got `{line}`", path.display(), i + 1));
        if nums.len() != 2 {
            return Err(bad());
        }
        let x = nums[0].parse::<f64>().map_err(|_| bad())?;
        let y = nums[1].parse::<f64>().map_err(|_| bad())?;
        pts.push([x, y]);
    }
    Ok(pts)
}

fn split_term(term: &str) -> Result<(&str, &str), CliError> {
    term.trim()
        .split_once(':')
        .map(|(k, a)| (k.trim(), a.trim()))
        .ok_or_else(|| CliError::usage(format!("malformed domain `{term}`: expected kind:args")))
}

fn polygon(args: &str, term: &str, base: &Path) -> Result<DomainSpec, CliError> {
    let file = args
        .strip_prefix('@')
        .ok_or_else(|| CliError::usage(format!("polygon domain `{term}` must name a file as polygon:@path")))?;
    let spec = DomainSpec::polygon(read_polygon(&base.join(file))?);
    spec.validate().map_err(|e| CliError::usage(format!("domain `{term}`: {e}")))?;
    Ok(spec)
}

/// Parses one term into the list of values for each parameter.
fn term_values(kind: &str, args: &str, term: &str) -> Result<Vec<Vec<f64>>, CliError> {
    let names = param_names(kind).ok_or_else(|| CliError::usage(format!("unknown domain kind `{kind}` in `{term}`")))?;
    let raw: Vec<&str> = args.split(',').collect();
    if raw.len() != names.len() {
        return Err(CliError::usage(format!(
            "domain `{term}` needs {} argument(s) ({}), got {}",
            names.len(),
            names.join(","),
            raw.len()
        )));
    }
    raw.iter()
        .zip(names.iter())
        .map(|(tok, name)| {
            let value = match tok.split_once('=') {
                Some((n, v)) if n.trim() == *name => v,
                Some((n, _)) => {
                    return Err(CliError::usage(format!("unexpected parameter name `{}` in domain `{term}`", n.trim())))
                }
                None => tok,
            };
            range(value, term)
        })
        .collect()
}

/// Parses a single domain. Relative polygon paths are resolved against `base`.
pub fn parse_domain(text: &str, base: &Path) -> Result<DomainSpec, CliError> {
    let (kind, args) = split_term(text)?;
    if kind == "polygon" {
        return polygon(args, text, base);
    }
    let values = term_values(kind, args, text)?;
    if values.iter().any(|v| v.len() != 1) {
        return Err(CliError::usage(format!("ranges are only allowed in a family, got `{text}`")));
    }
    let flat: Vec<f64> = values.into_iter().map(|v| v[0]).collect();
    build(kind, &flat, text)
}

/// Parses a `;`-separated family; ranges expand to every combination.
pub fn parse_family(text: &str, base: &Path) -> Result<Vec<DomainSpec>, CliError> {
    let mut out = Vec::new();
    for term in text.split(';').map(str::trim).filter(|t| !t.is_empty()) {
        let (kind, args) = split_term(term)?;
        if kind == "polygon" {
            out.push(polygon(args, term, base)?);
            continue;
        }
        let values = term_values(kind, args, term)?;
        let mut combos: Vec<Vec<f64>> = vec![Vec::new()];
        for choices in &values {
            combos = combos
                .into_iter()
                .flat_map(|c| {
                    choices.iter().map(move |&v| {
                        let mut c = c.clone();
                        c.push(v);
                        c
                    })
                })
                .collect();
        }
        for c in combos {
            out.push(build(kind, &c, term)?);
        }
    }
    if out.is_empty() {
        return Err(CliError::usage("empty family"));
    }
    Ok(out)
}
