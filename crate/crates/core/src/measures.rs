//! Transfer and interaction measures between lagged nodes of a time series
//! graph.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;
use core::str::FromStr;

use crate::dataset::TimeSeriesDataset;
use crate::error::{Error, Result};
use crate::estimators::{self, EstimatorConfig};
use crate::tsgraph::{ConditionKind, NodeRef, TimeSeriesGraph};

/// Total conditioning dimension above which estimates are flagged as biased.
pub const DIMENSION_WARNING: usize = 20;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum MeasureKind {
    /// Transfer entropy over all source lags.
    Te,
    /// Transfer conditioned on the target's parents.
    Ity,
    /// Momentary information transfer of a single link.
    Mit,
    /// Transfer of the source's own innovation along any causal path.
    Itx,
    /// Momentary transfer along causal paths.
    Mitp,
    /// Interaction information of a mediator on ITX.
    Iix,
    /// Momentary interaction information of a mediator on MITP.
    Mii,
}

impl MeasureKind {
    pub const ALL: [MeasureKind; 7] = [
        MeasureKind::Te,
        MeasureKind::Ity,
        MeasureKind::Mit,
        MeasureKind::Itx,
        MeasureKind::Mitp,
        MeasureKind::Iix,
        MeasureKind::Mii,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MeasureKind::Te => "TE",
            MeasureKind::Ity => "ITY",
            MeasureKind::Mit => "MIT",
            MeasureKind::Itx => "ITX",
            MeasureKind::Mitp => "MITP",
            MeasureKind::Iix => "IIX",
            MeasureKind::Mii => "MII",
        }
    }

    /// Conditioning rule of the measure (of its base measure for IIX/MII).
    pub fn conditions(self) -> ConditionKind {
        match self {
            MeasureKind::Te => ConditionKind::Te,
            MeasureKind::Ity => ConditionKind::Ity,
            MeasureKind::Mit => ConditionKind::Mit,
            MeasureKind::Itx | MeasureKind::Iix => ConditionKind::Itx,
            MeasureKind::Mitp | MeasureKind::Mii => ConditionKind::Mitp,
        }
    }

    pub fn is_interaction(self) -> bool {
        matches!(self, MeasureKind::Iix | MeasureKind::Mii)
    }
}

impl fmt::Display for MeasureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MeasureKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MeasureKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::InvalidConfig(format!("unknown measure `{s}`")))
    }
}

/// Nodes entering one measure: I(X;Y|Z), minus I(X;Y|W,Z) for interactions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MeasurePlan {
    pub kind: MeasureKind,
    pub source: NodeRef,
    pub target: NodeRef,
    pub x: Vec<NodeRef>,
    pub mediators: Vec<NodeRef>,
    pub conditions: BTreeSet<NodeRef>,
}

impl MeasurePlan {
    /// Sets up a measure on the graph without touching data.
    pub fn new(
        g: &TimeSeriesGraph,
        kind: MeasureKind,
        source: NodeRef,
        target: NodeRef,
        mediator_variables: &[usize],
    ) -> Result<Self> {
        if source.lag <= target.lag {
            return Err(Error::InvalidConfig(format!(
                "{kind} needs a source before the target, got {source} -> {target}"
            )));
        }
        let mut conditions = g.condition_set(kind.conditions(), source, target)?;
        let x = if kind == MeasureKind::Te {
            (1..=g.tau_max())
                .map(|l| NodeRef::new(source.variable, target.lag + l))
                .collect()
        } else {
            alloc::vec![source]
        };
        let mut mediators = Vec::new();
        if kind.is_interaction() {
            if mediator_variables.is_empty() {
                return Err(Error::InvalidConfig(format!("{kind} needs a mediator")));
            }
            let paths = g.causal_paths(source, target);
            for &v in mediator_variables {
                if v >= g.n_vars() {
                    return Err(Error::VariableOutOfRange {
                        index: v,
                        n_vars: g.n_vars(),
                    });
                }
                let occ = paths.occurrences_of(v, source);
                if occ.is_empty() {
                    return Err(Error::MediatorNotOnPath { variable: v });
                }
                mediators.extend(occ);
            }
            mediators.sort();
            mediators.dedup();
            for w in &mediators {
                conditions.remove(w);
            }
        }
        for n in &x {
            conditions.remove(n);
        }
        Ok(Self {
            kind,
            source,
            target,
            x,
            mediators,
            conditions,
        })
    }

    /// Conditioning dimension of the larger of the estimated CMIs.
    pub fn dimension(&self) -> usize {
        self.x.len() + 1 + self.mediators.len() + self.conditions.len()
    }

    /// All nodes in column order: x, target, mediators, conditions.
    pub fn nodes(&self) -> Vec<NodeRef> {
        let mut v = self.x.clone();
        v.push(self.target);
        v.extend(self.mediators.iter().copied());
        v.extend(self.conditions.iter().copied());
        v
    }

    /// Estimates the measure on `ds`, starting no earlier than `min_start`.
    pub fn estimate(&self, ds: &TimeSeriesDataset, cfg: &EstimatorConfig, min_start: usize) -> Result<MeasureResult> {
        let nodes = self.nodes();
        let samples = ds.lagged_matrix_from(&nodes, min_start)?;
        let cols: Vec<&[f64]> = samples.columns.iter().map(Vec::as_slice).collect();
        let nx = self.x.len();
        let nw = self.mediators.len();
        let (x, rest) = cols.split_at(nx);
        let (y, rest) = rest.split_at(1);
        let (w, z) = rest.split_at(nw);
        let est = if self.kind.is_interaction() {
            estimators::estimate_interaction_information(x, y, w, z, cfg)?
        } else {
            estimators::estimate_cmi_multi(x, y, z, cfg)?
        };
        let mut warnings = Vec::new();
        if self.dimension() > DIMENSION_WARNING {
            warnings.push(format!(
                "estimation dimension {} exceeds {DIMENSION_WARNING}; expect strong bias",
                self.dimension()
            ));
        }
        Ok(MeasureResult {
            kind: self.kind,
            source: self.source,
            target: self.target,
            mediators: self.mediators.clone(),
            value: est.value,
            rescaled: estimators::rescale_to_correlation(est.value),
            conditions: self.conditions.clone(),
            n_samples: est.n_samples,
            ci: est.ci,
            p_value: est.p_value,
            max_lag: samples.max_lag,
            warnings,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MeasureResult {
    pub kind: MeasureKind,
    pub source: NodeRef,
    pub target: NodeRef,
    /// Mediator nodes (interaction measures only).
    pub mediators: Vec<NodeRef>,
    /// Value in nats.
    pub value: f64,
    /// Value on the correlation scale.
    pub rescaled: f64,
    pub conditions: BTreeSet<NodeRef>,
    pub n_samples: usize,
    /// Bootstrap interval in nats.
    pub ci: Option<(f64, f64)>,
    pub p_value: Option<f64>,
    /// Deepest lag touched by the sample alignment.
    pub max_lag: usize,
    pub warnings: Vec<String>,
}

impl MeasureResult {
    pub fn lag(&self) -> usize {
        self.source.lag - self.target.lag
    }

    /// Bootstrap interval on the correlation scale.
    pub fn rescaled_ci(&self) -> Option<(f64, f64)> {
        self.ci.map(|(lo, hi)| {
            (
                estimators::rescale_to_correlation(lo),
                estimators::rescale_to_correlation(hi),
            )
        })
    }
}

/// TE, ITY, MIT, ITX or MITP from `source` to `target`.
pub fn transfer_measure(
    ds: &TimeSeriesDataset,
    g: &TimeSeriesGraph,
    kind: MeasureKind,
    source: NodeRef,
    target: NodeRef,
    cfg: &EstimatorConfig,
) -> Result<MeasureResult> {
    if kind.is_interaction() {
        return Err(Error::InvalidConfig(format!("{kind} is an interaction measure")));
    }
    check_graph(ds, g)?;
    MeasurePlan::new(g, kind, source, target, &[])?.estimate(ds, cfg, 0)
}

/// IIX or MII: the base measure minus the same measure conditioned also on
/// every path occurrence of the mediator variables.
pub fn interaction_measure(
    ds: &TimeSeriesDataset,
    g: &TimeSeriesGraph,
    kind: MeasureKind,
    source: NodeRef,
    target: NodeRef,
    mediator_variables: &[usize],
    cfg: &EstimatorConfig,
) -> Result<MeasureResult> {
    if !kind.is_interaction() {
        return Err(Error::InvalidConfig(format!("{kind} is not an interaction measure")));
    }
    check_graph(ds, g)?;
    MeasurePlan::new(g, kind, source, target, mediator_variables)?.estimate(ds, cfg, 0)
}

fn check_graph(ds: &TimeSeriesDataset, g: &TimeSeriesGraph) -> Result<()> {
    if ds.n_vars() != g.n_vars() {
        return Err(Error::InvalidGraph(format!(
            "graph has {} variables, dataset {}",
            g.n_vars(),
            ds.n_vars()
        )));
    }
    Ok(())
}

/// Outcome of one lag of a lag function.
#[derive(Debug, Clone, PartialEq)]
pub enum LagValue {
    Defined(MeasureResult),
    /// Aggregate over all lags, repeated for every lag.
    NotLagSpecific(MeasureResult),
    /// The measure is undefined or failed at this lag.
    Undefined(Error),
}

/// A transfer measure at every lag `1..=max_lag`.
pub fn lag_function(
    ds: &TimeSeriesDataset,
    g: &TimeSeriesGraph,
    kind: MeasureKind,
    source_variable: usize,
    target_variable: usize,
    max_lag: usize,
    cfg: &EstimatorConfig,
) -> Result<Vec<(usize, LagValue)>> {
    if kind.is_interaction() {
        return Err(Error::InvalidConfig(format!("{kind} has no lag function")));
    }
    check_graph(ds, g)?;
    let target = NodeRef::new(target_variable, 0);
    if kind == MeasureKind::Te {
        let r = transfer_measure(ds, g, kind, NodeRef::new(source_variable, 1), target, cfg);
        return Ok((1..=max_lag)
            .map(|l| {
                let v = match &r {
                    Ok(m) => LagValue::NotLagSpecific(m.clone()),
                    Err(e) => LagValue::Undefined(e.clone()),
                };
                (l, v)
            })
            .collect());
    }
    let values = crate::par::map(max_lag, |i| {
        let source = NodeRef::new(source_variable, i + 1);
        match transfer_measure(ds, g, kind, source, target, cfg) {
            Ok(m) => LagValue::Defined(m),
            Err(e) => LagValue::Undefined(e),
        }
    });
    Ok(values.into_iter().enumerate().map(|(i, v)| (i + 1, v)).collect())
}

/// Contemporaneous MIT between `i(t)` and `j(t)` conditioned on both nodes'
/// parents and their other contemporaneous neighbors.
pub fn contemporaneous_mit(
    ds: &TimeSeriesDataset,
    g: &TimeSeriesGraph,
    i: usize,
    j: usize,
    cfg: &EstimatorConfig,
) -> Result<MeasureResult> {
    check_graph(ds, g)?;
    let (a, b) = (NodeRef::new(i, 0), NodeRef::new(j, 0));
    if i == j {
        return Err(Error::InvalidConfig("contemporaneous MIT needs two variables".into()));
    }
    let mut conditions = g.parents(a)?;
    conditions.extend(g.parents(b)?);
    conditions.extend(g.neighbors(a)?);
    conditions.extend(g.neighbors(b)?);
    conditions.remove(&a);
    conditions.remove(&b);
    let plan = MeasurePlan {
        kind: MeasureKind::Mit,
        source: a,
        target: b,
        x: alloc::vec![a],
        mediators: Vec::new(),
        conditions,
    };
    plan.estimate(ds, cfg, 0)
}

/// Variables whose lagged occurrences lie on a causal path from `source` to
/// `target`, excluding the source node itself.
pub fn mediator_variables(g: &TimeSeriesGraph, source: NodeRef, target: NodeRef) -> BTreeSet<usize> {
    let paths = g.causal_paths(source, target);
    paths
        .path_nodes
        .iter()
        .filter(|n| **n != source)
        .map(|n| n.variable)
        .collect()
}
