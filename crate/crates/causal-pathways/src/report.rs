//! CSV tables written by the pipeline.

use std::io::Write;

use causal_pathways_core::discovery::TestRecord;
use causal_pathways_core::linear_effects::LinearEffectResult;
use causal_pathways_core::measures::MeasureResult;
use causal_pathways_core::netmetrics::BetweennessResult;
use causal_pathways_core::NodeRef;

pub const MEASURE_HEADER: [&str; 13] = [
    "kind",
    "source",
    "lag",
    "target",
    "mediators",
    "value_nats",
    "rescaled",
    "n_samples",
    "ci_low",
    "ci_high",
    "p_value",
    "conditions",
    "note",
];

/// One row of the measures table. Undefined measures keep the identifying
/// columns and explain themselves in `note`.
#[derive(Debug, Clone, PartialEq)]
pub struct MeasureRow {
    pub kind: String,
    pub source: String,
    pub lag: usize,
    pub target: String,
    pub mediators: String,
    pub value: Option<f64>,
    pub rescaled: Option<f64>,
    pub n_samples: Option<usize>,
    pub ci: Option<(f64, f64)>,
    pub p_value: Option<f64>,
    pub conditions: String,
    pub note: String,
}

pub fn join_nodes<'a>(nodes: impl IntoIterator<Item = &'a NodeRef>, names: &[String]) -> String {
    nodes.into_iter().map(|n| n.label(names)).collect::<Vec<_>>().join(";")
}

impl MeasureRow {
    pub fn from_result(r: &MeasureResult, names: &[String]) -> Self {
        Self {
            kind: r.kind.name().to_string(),
            source: names[r.source.variable].clone(),
            lag: r.lag(),
            target: names[r.target.variable].clone(),
            mediators: join_nodes(&r.mediators, names),
            value: Some(r.value),
            rescaled: Some(r.rescaled),
            n_samples: Some(r.n_samples),
            ci: r.ci,
            p_value: r.p_value,
            conditions: join_nodes(&r.conditions, names),
            note: r.warnings.join("; "),
        }
    }

    /// Linear effects share the schema; the interval is one standard error
    /// either side and `rescaled` stays empty.
    pub fn from_linear(r: &LinearEffectResult, names: &[String]) -> Self {
        Self {
            kind: r.kind.name().to_string(),
            source: names[r.source.variable].clone(),
            lag: r.source.lag - r.target.lag,
            target: names[r.target.variable].clone(),
            mediators: join_nodes(&r.mediators, names),
            value: Some(r.value),
            rescaled: None,
            n_samples: (r.n_samples > 0).then_some(r.n_samples),
            ci: r.std_error.map(|se| (r.value - se, r.value + se)),
            p_value: None,
            conditions: join_nodes(&r.regressors, names),
            note: String::new(),
        }
    }

    pub fn undefined(kind: &str, source: String, lag: usize, target: String, note: String) -> Self {
        Self {
            kind: kind.to_string(),
            source,
            lag,
            target,
            mediators: String::new(),
            value: None,
            rescaled: None,
            n_samples: None,
            ci: None,
            p_value: None,
            conditions: String::new(),
            note,
        }
    }
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

pub fn write_measures<W: Write>(rows: &[MeasureRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(MEASURE_HEADER)?;
    for r in rows {
        w.write_record([
            r.kind.clone(),
            r.source.clone(),
            r.lag.to_string(),
            r.target.clone(),
            r.mediators.clone(),
            opt(r.value),
            opt(r.rescaled),
            opt(r.n_samples),
            opt(r.ci.map(|c| c.0)),
            opt(r.ci.map(|c| c.1)),
            opt(r.p_value),
            r.conditions.clone(),
            r.note.clone(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub const DISCOVERY_HEADER: [&str; 8] = [
    "stage",
    "source",
    "lag",
    "target",
    "value_nats",
    "p_value",
    "conditions",
    "decision",
];

pub fn write_discovery<W: Write>(records: &[TestRecord], names: &[String], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(DISCOVERY_HEADER)?;
    for r in records {
        w.write_record([
            r.stage.name().to_string(),
            names[r.source.variable].clone(),
            (r.source.lag - r.target.lag).to_string(),
            names[r.target.variable].clone(),
            r.value.to_string(),
            opt(r.p_value),
            join_nodes(&r.conditions, names),
            if r.kept { "kept" } else { "removed" }.to_string(),
        ])?;
    }
    w.flush()?;
    Ok(())
}

pub const CIB_HEADER: [&str; 7] = [
    "variable",
    "cib",
    "cib_normalized",
    "n_triples",
    "n_skipped",
    "mean_positive",
    "mean_negative",
];

/// Betweenness of one variable in absolute and normalized form; either may
/// be missing (no mediated interaction, or all triples skipped).
#[derive(Debug, Clone, PartialEq)]
pub struct CibRow {
    pub variable: String,
    pub absolute: Option<BetweennessResult>,
    pub normalized: Option<BetweennessResult>,
}

pub fn write_cib<W: Write>(rows: &[CibRow], out: W) -> csv::Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(CIB_HEADER)?;
    for r in rows {
        let a = r.absolute.as_ref();
        let n = r.normalized.as_ref();
        w.write_record([
            r.variable.clone(),
            opt(a.map(|b| b.value)),
            opt(n.map(|b| b.value)),
            opt(a.map(|b| b.cardinality())),
            opt(n.map(|b| b.n_skipped)),
            opt(a.and_then(|b| b.mean_positive)),
            opt(a.and_then(|b| b.mean_negative)),
        ])?;
    }
    w.flush()?;
    Ok(())
}
