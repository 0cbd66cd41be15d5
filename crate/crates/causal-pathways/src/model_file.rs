//! Model spec files, `key = value` per line:
//!
//! ```text
//! variables = X, W, Y
//! noise = gaussian
//! noise_std.X = 1.0
//! linear = Y, X, 2, 0.5          # target, parent, lag, coefficient
//! product = Y, X, 2, W, 1, 0.25  # target, factor, lag, factor, lag, coefficient
//! correlation = X, W, 0.3        # equal-time innovation correlation
//! ```
//!
//! Unlisted noise scales default to 1. Numbers are written in their shortest
//! exact form, so formatting and parsing round-trip losslessly.

use std::fmt::Write as _;

use causal_pathways_core::simulate::{NoiseKind, StructuralModel, Term};
use causal_pathways_core::NodeRef;

use crate::error::{AppError, Result};

pub fn format_model(m: &StructuralModel) -> String {
    let names = m.names();
    let mut s = String::new();
    let _ = writeln!(s, "variables = {}", names.join(", "));
    match m.noise_kind() {
        NoiseKind::Gaussian => {
            let _ = writeln!(s, "noise = gaussian");
        }
    }
    for (name, sd) in names.iter().zip(m.noise_std()) {
        let _ = writeln!(s, "noise_std.{name} = {sd}");
    }
    for (target, name) in names.iter().enumerate() {
        for term in m.terms(target) {
            match *term {
                Term::Linear { parent, lag, coeff } => {
                    let _ = writeln!(s, "linear = {name}, {}, {lag}, {coeff}", names[parent]);
                }
                Term::Product { first, second, coeff } => {
                    let _ = writeln!(
                        s,
                        "product = {name}, {}, {}, {}, {}, {coeff}",
                        names[first.variable], first.lag, names[second.variable], second.lag
                    );
                }
            }
        }
    }
    for &(i, j, rho) in m.correlations() {
        let _ = writeln!(s, "correlation = {}, {}, {rho}", names[i], names[j]);
    }
    s
}

pub fn parse_model(text: &str, origin: &str) -> Result<StructuralModel> {
    let mut names: Option<Vec<String>> = None;
    let mut sigmas: Vec<(usize, String, String)> = Vec::new();
    let mut body: Vec<(usize, String, String)> = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| AppError::parse(origin, line_no, "expected `key = value`"))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "variables" => {
                if names.is_some() {
                    return Err(AppError::parse(origin, line_no, "variables listed twice"));
                }
                names = Some(value.split(',').map(|n| n.trim().to_string()).collect());
            }
            "noise" => {
                if value != "gaussian" {
                    return Err(AppError::parse(origin, line_no, format!("unsupported noise `{value}`")));
                }
            }
            _ => {
                if let Some(var) = key.strip_prefix("noise_std.") {
                    sigmas.push((line_no, var.trim().to_string(), value.to_string()));
                } else if matches!(key, "linear" | "product" | "correlation") {
                    body.push((line_no, key.to_string(), value.to_string()));
                } else {
                    return Err(AppError::parse(origin, line_no, format!("unknown key `{key}`")));
                }
            }
        }
    }
    let names = names.ok_or_else(|| AppError::parse(origin, 1, "missing `variables = ...` line"))?;
    if names.iter().any(String::is_empty) {
        return Err(AppError::parse(origin, 1, "empty variable name"));
    }
    let lookup = |name: &str, line: usize| -> Result<usize> {
        names
            .iter()
            .position(|n| n == name)
            .ok_or_else(|| AppError::parse(origin, line, format!("unknown variable `{name}`")))
    };
    let number = |v: &str, line: usize| -> Result<f64> {
        v.parse::<f64>()
            .map_err(|_| AppError::parse(origin, line, format!("bad number `{v}`")))
    };
    let lag = |v: &str, line: usize| -> Result<usize> {
        v.parse::<usize>()
            .map_err(|_| AppError::parse(origin, line, format!("bad lag `{v}`")))
    };
    let mut noise = vec![1.0; names.len()];
    for (line, var, value) in &sigmas {
        noise[lookup(var, *line)?] = number(value, *line)?;
    }
    let mut m = StructuralModel::new(names.clone(), noise).map_err(|e| AppError::parse(origin, 1, e.to_string()))?;
    for (line, key, value) in body {
        let f: Vec<&str> = value.split(',').map(str::trim).collect();
        let expected = match key.as_str() {
            "linear" => 4,
            "product" => 6,
            _ => 3,
        };
        if f.len() != expected {
            return Err(AppError::parse(
                origin,
                line,
                format!("`{key}` needs {expected} fields, found {}", f.len()),
            ));
        }
        let r = match key.as_str() {
            "linear" => m.add_linear(lookup(f[0], line)?, lookup(f[1], line)?, lag(f[2], line)?, number(f[3], line)?),
            "product" => m.add_product(
                lookup(f[0], line)?,
                NodeRef::new(lookup(f[1], line)?, lag(f[2], line)?),
                NodeRef::new(lookup(f[3], line)?, lag(f[4], line)?),
                number(f[5], line)?,
            ),
            _ => m.add_correlation(lookup(f[0], line)?, lookup(f[1], line)?, number(f[2], line)?),
        };
        r.map_err(|e| AppError::parse(origin, line, e.to_string()))?;
    }
    Ok(m)
}
