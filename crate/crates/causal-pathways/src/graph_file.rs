//! Graph files: one link per line as `source, target, lag, type` with type
//! `dir`, `cont_solid` or `cont_dashed` (lag 0 for the contemporaneous
//! types). Lines starting with `#` are comments, except the header comments
//! `# variables: ...`, `# tau_max: ...` and `# dashed: yes`, which carry
//! variables without links, the lag window and an empty dashed set.

use std::fmt::Write as _;

use causal_pathways_core::TimeSeriesGraph;

use crate::error::{AppError, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct GraphFile {
    pub names: Vec<String>,
    pub graph: TimeSeriesGraph,
}

pub fn format_graph(g: &TimeSeriesGraph, names: &[String]) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "# variables: {}", names.join(", "));
    let _ = writeln!(s, "# tau_max: {}", g.tau_max());
    let dashed = g.contemporaneous_dashed();
    if dashed.is_some_and(|d| d.is_empty()) {
        let _ = writeln!(s, "# dashed: yes");
    }
    for l in g.directed_links() {
        let _ = writeln!(s, "{}, {}, {}, dir", names[l.source], names[l.target], l.lag);
    }
    for &(i, j) in g.contemporaneous_solid() {
        let _ = writeln!(s, "{}, {}, 0, cont_solid", names[i], names[j]);
    }
    for &(i, j) in dashed.into_iter().flatten() {
        let _ = writeln!(s, "{}, {}, 0, cont_dashed", names[i], names[j]);
    }
    s
}

enum Kind {
    Directed,
    Solid,
    Dashed,
}

/// Parses a graph file. `known` fixes the variable order (e.g. a dataset's
/// header); otherwise the `# variables:` header is used, then order of first
/// appearance. The lag window defaults to the largest link lag (at least 1).
pub fn parse_graph(text: &str, origin: &str, known: Option<&[String]>) -> Result<GraphFile> {
    let mut names: Vec<String> = known.map(<[String]>::to_vec).unwrap_or_default();
    let fixed = known.is_some();
    let mut tau_max = None;
    let mut dashed_header = false;
    let mut links = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.trim();
        if line.is_empty() {
            continue;
        }
        if let Some(comment) = line.strip_prefix('#') {
            let Some((key, value)) = comment.split_once(':') else {
                continue;
            };
            let value = value.trim();
            match key.trim() {
                "variables" if !fixed => {
                    let listed: Vec<&str> = value.split(',').map(str::trim).filter(|n| !n.is_empty()).collect();
                    for (i, name) in listed.iter().enumerate() {
                        if listed[..i].contains(name) {
                            return Err(AppError::parse(origin, line_no, format!("duplicate variable `{name}`")));
                        }
                        if !names.iter().any(|n| n == name) {
                            names.push(name.to_string());
                        }
                    }
                }
                "tau_max" => {
                    let t = value
                        .parse::<usize>()
                        .map_err(|_| AppError::parse(origin, line_no, format!("bad tau_max `{value}`")))?;
                    tau_max = Some(t);
                }
                "dashed" => dashed_header = value == "yes",
                _ => {}
            }
            continue;
        }
        let fields: Vec<&str> = line.split(',').map(str::trim).collect();
        if fields.len() != 4 {
            return Err(AppError::parse(
                origin,
                line_no,
                format!("expected `source, target, lag, type`, found {} fields", fields.len()),
            ));
        }
        let lag: usize = fields[2]
            .parse()
            .map_err(|_| AppError::parse(origin, line_no, format!("bad lag `{}`", fields[2])))?;
        let kind = match fields[3] {
            "dir" => Kind::Directed,
            "cont_solid" => Kind::Solid,
            "cont_dashed" => Kind::Dashed,
            other => {
                return Err(AppError::parse(
                    origin,
                    line_no,
                    format!("unknown link type `{other}` (dir, cont_solid, cont_dashed)"),
                ))
            }
        };
        match kind {
            Kind::Directed if lag == 0 => {
                return Err(AppError::parse(origin, line_no, "directed links need lag >= 1"));
            }
            Kind::Solid | Kind::Dashed if lag != 0 => {
                return Err(AppError::parse(origin, line_no, "contemporaneous links need lag 0"));
            }
            _ => {}
        }
        let mut index = |name: &str| -> Result<usize> {
            if let Some(i) = names.iter().position(|n| n == name) {
                return Ok(i);
            }
            if fixed {
                return Err(AppError::parse(origin, line_no, format!("unknown variable `{name}`")));
            }
            names.push(name.to_string());
            Ok(names.len() - 1)
        };
        let s = index(fields[0])?;
        let t = index(fields[1])?;
        links.push((line_no, s, t, lag, kind));
    }
    if names.is_empty() {
        return Err(AppError::parse(origin, 1, "graph names no variables"));
    }
    let max_lag = links.iter().map(|l| l.3).max().unwrap_or(0);
    let tau_max = tau_max.unwrap_or(max_lag.max(1));
    if max_lag > tau_max {
        return Err(AppError::parse(origin, 1, format!("link lag {max_lag} exceeds tau_max {tau_max}")));
    }
    let mut graph = TimeSeriesGraph::new(names.len(), tau_max).map_err(|e| AppError::parse(origin, 1, e.to_string()))?;
    if dashed_header {
        graph.enable_dashed();
    }
    for (line_no, s, t, lag, kind) in links {
        let r = match kind {
            Kind::Directed => graph.add_directed(s, lag, t),
            Kind::Solid => graph.add_contemporaneous(s, t),
            Kind::Dashed => graph.add_dashed(s, t),
        };
        r.map_err(|e| AppError::parse(origin, line_no, e.to_string()))?;
    }
    Ok(GraphFile { names, graph })
}
