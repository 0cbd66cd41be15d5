//! Two-step graph reconstruction: preliminary parents and neighbors by
//! iterative conditional independence testing, then MIT thresholding.
//!
//! The candidate ordering and stopping rule are a stand-in for the
//! algorithm the method builds on. Each level `p = 0, 1, ...` tests every
//! remaining candidate conditioned on the `p` strongest other candidates and
//! drops those at or below the threshold. Strength is the smallest CMI seen
//! so far, ties broken by (variable, lag). Iteration stops once no candidate
//! has `p` others to condition on, or at `max_conds`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::cmp::Ordering;

use crate::dataset::TimeSeriesDataset;
use crate::error::{Error, Result};
use crate::estimators::{self, EstimatorConfig};
use crate::rng;
use crate::tsgraph::{NodeRef, TimeSeriesGraph};

/// Samples per lagged dimension below which discovery warns.
pub const SAMPLES_PER_LAG: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiscoveryConfig {
    pub tau_max: usize,
    /// Links need a CMI strictly above this many nats.
    pub threshold_nats: f64,
    pub estimator: EstimatorConfig,
    /// Largest conditioning set used while pruning parents.
    pub max_conds: Option<usize>,
    /// Shuffle-test level, used only when the estimator runs shuffle tests.
    pub significance: f64,
}

impl DiscoveryConfig {
    pub fn new(tau_max: usize, threshold_nats: f64) -> Self {
        Self {
            tau_max,
            threshold_nats,
            estimator: EstimatorConfig::independence_testing(),
            max_conds: None,
            significance: 0.05,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.tau_max == 0 {
            return Err(Error::InvalidConfig("tau_max must be at least 1".into()));
        }
        if !(self.threshold_nats >= 0.0) {
            return Err(Error::InvalidConfig("threshold must be >= 0".into()));
        }
        if !(self.significance > 0.0 && self.significance <= 1.0) {
            return Err(Error::InvalidConfig("significance must lie in (0, 1]".into()));
        }
        self.estimator.validate()
    }

    fn passes(&self, est: &estimators::CmiEstimate) -> bool {
        est.value > self.threshold_nats && est.p_value.map_or(true, |p| p <= self.significance)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum Stage {
    /// Preliminary parent pruning.
    Parents,
    /// Preliminary neighbor test.
    Neighbors,
    /// Lagged MIT of a candidate link.
    Mit,
    /// Contemporaneous MIT with parents and neighbors.
    Solid,
    /// Contemporaneous MIT with parents only.
    Dashed,
}

impl Stage {
    pub fn name(self) -> &'static str {
        match self {
            Stage::Parents => "parents",
            Stage::Neighbors => "neighbors",
            Stage::Mit => "mit",
            Stage::Solid => "contemporaneous",
            Stage::Dashed => "contemporaneous_dashed",
        }
    }
}

/// One conditional independence test and its outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct TestRecord {
    pub stage: Stage,
    pub source: NodeRef,
    pub target: NodeRef,
    pub conditions: Vec<NodeRef>,
    pub value: f64,
    pub p_value: Option<f64>,
    pub kept: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Preliminary {
    /// Lagged parents of each variable at lag 0.
    pub parents: Vec<BTreeSet<NodeRef>>,
    /// Contemporaneous neighbor variables of each variable.
    pub neighbors: Vec<BTreeSet<usize>>,
    pub records: Vec<TestRecord>,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Discovery {
    pub graph: TimeSeriesGraph,
    pub preliminary: Preliminary,
    /// Tests of the final step.
    pub records: Vec<TestRecord>,
    pub warnings: Vec<String>,
}

fn test(
    ds: &TimeSeriesDataset,
    x: NodeRef,
    y: NodeRef,
    conditions: &[NodeRef],
    min_start: usize,
    est: &EstimatorConfig,
) -> Result<estimators::CmiEstimate> {
    let mut nodes = Vec::with_capacity(conditions.len() + 2);
    nodes.push(x);
    nodes.push(y);
    nodes.extend_from_slice(conditions);
    let s = ds.lagged_matrix_from(&nodes, min_start)?;
    let cols: Vec<&[f64]> = s.columns.iter().map(Vec::as_slice).collect();
    estimators::estimate_cmi(cols[0], cols[1], &cols[2..], est)
}

struct Candidate {
    node: NodeRef,
    strength: f64,
}

fn by_strength(a: &Candidate, b: &Candidate) -> Ordering {
    b.strength
        .partial_cmp(&a.strength)
        .unwrap_or(Ordering::Equal)
        .then(a.node.cmp(&b.node))
}

fn parents_of(
    ds: &TimeSeriesDataset,
    target: usize,
    cfg: &DiscoveryConfig,
) -> Result<(BTreeSet<NodeRef>, Vec<TestRecord>)> {
    let y = NodeRef::new(target, 0);
    let mut candidates: Vec<Candidate> = (0..ds.n_vars())
        .flat_map(|v| (1..=cfg.tau_max).map(move |l| NodeRef::new(v, l)))
        .map(|node| Candidate {
            node,
            strength: f64::INFINITY,
        })
        .collect();
    let mut records = Vec::new();
    let mut p = 0;
    loop {
        if cfg.max_conds.is_some_and(|m| p > m) || (p > 0 && candidates.len() <= p) {
            break;
        }
        candidates.sort_by(by_strength);
        let mut est = cfg.estimator;
        est.seed = rng::combine(cfg.estimator.seed, (target as u64) << 32 | p as u64);
        let cand = &candidates;
        let results = crate::par::map(cand.len(), |i| {
            let conds: Vec<NodeRef> = cand
                .iter()
                .filter(|c| c.node != cand[i].node)
                .take(p)
                .map(|c| c.node)
                .collect();
            let r = test(ds, cand[i].node, y, &conds, cfg.tau_max, &est);
            (conds, r)
        });
        let mut next = Vec::with_capacity(candidates.len());
        for (mut c, (conds, r)) in candidates.into_iter().zip(results) {
            let r = r?;
            let kept = cfg.passes(&r);
            c.strength = c.strength.min(r.value);
            records.push(TestRecord {
                stage: Stage::Parents,
                source: c.node,
                target: y,
                conditions: conds,
                value: r.value,
                p_value: r.p_value,
                kept,
            });
            if kept {
                next.push(c);
            }
        }
        candidates = next;
        if candidates.is_empty() {
            break;
        }
        p += 1;
    }
    Ok((candidates.into_iter().map(|c| c.node).collect(), records))
}

fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
}

/// Conditions for the contemporaneous test of `i(t)` and `j(t)`.
fn contemporaneous_conditions(
    parents: &[BTreeSet<NodeRef>],
    neighbors: Option<&[BTreeSet<usize>]>,
    i: usize,
    j: usize,
) -> Vec<NodeRef> {
    let mut c: BTreeSet<NodeRef> = parents[i].union(&parents[j]).copied().collect();
    if let Some(nb) = neighbors {
        c.extend(
            nb[i]
                .iter()
                .chain(&nb[j])
                .filter(|&&v| v != i && v != j)
                .map(|&v| NodeRef::new(v, 0)),
        );
    }
    c.into_iter().collect()
}

fn contemporaneous_tests(
    ds: &TimeSeriesDataset,
    cfg: &DiscoveryConfig,
    stage: Stage,
    candidates: &[(usize, usize)],
    parents: &[BTreeSet<NodeRef>],
    neighbors: Option<&[BTreeSet<usize>]>,
    min_start: usize,
) -> Result<Vec<TestRecord>> {
    let results = crate::par::map(candidates.len(), |k| {
        let (i, j) = candidates[k];
        let conds = contemporaneous_conditions(parents, neighbors, i, j);
        let r = test(ds, NodeRef::new(i, 0), NodeRef::new(j, 0), &conds, min_start, &cfg.estimator);
        (conds, r)
    });
    let mut records = Vec::with_capacity(candidates.len());
    for (&(i, j), (conds, r)) in candidates.iter().zip(results) {
        let r = r?;
        records.push(TestRecord {
            stage,
            source: NodeRef::new(i, 0),
            target: NodeRef::new(j, 0),
            conditions: conds,
            value: r.value,
            p_value: r.p_value,
            kept: cfg.passes(&r),
        });
    }
    Ok(records)
}

fn check_inputs(ds: &TimeSeriesDataset, cfg: &DiscoveryConfig) -> Result<Vec<String>> {
    cfg.validate()?;
    let mut warnings = Vec::new();
    let recommended = SAMPLES_PER_LAG * (cfg.tau_max + 1);
    if ds.n_usable() < recommended {
        warnings.push(format!(
            "{} usable samples; at least {recommended} recommended for tau_max = {}",
            ds.n_usable(),
            cfg.tau_max
        ));
    }
    Ok(warnings)
}

/// Preliminary parents (lags `1..=tau_max`) and contemporaneous neighbors of
/// every variable.
pub fn estimate_parents_neighbors(ds: &TimeSeriesDataset, cfg: &DiscoveryConfig) -> Result<Preliminary> {
    let warnings = check_inputs(ds, cfg)?;
    let n = ds.n_vars();
    let mut parents = Vec::with_capacity(n);
    let mut records = Vec::new();
    for target in 0..n {
        let (p, r) = parents_of(ds, target, cfg)?;
        parents.push(p);
        records.extend(r);
    }
    let nb = contemporaneous_tests(ds, cfg, Stage::Neighbors, &pairs(n), &parents, None, cfg.tau_max)?;
    let mut neighbors = alloc::vec![BTreeSet::new(); n];
    for r in &nb {
        if r.kept {
            neighbors[r.source.variable].insert(r.target.variable);
            neighbors[r.target.variable].insert(r.source.variable);
        }
    }
    records.extend(nb);
    Ok(Preliminary {
        parents,
        neighbors,
        records,
        warnings,
    })
}

/// Reconstructs the time series graph: every preliminary parent link is kept
/// when its MIT exceeds the threshold; neighbor pairs become solid links by
/// contemporaneous MIT given parents and neighbors and dashed links by the
/// same test given parents only. The dashed set is only attached when
/// nonempty.
pub fn build_graph(ds: &TimeSeriesDataset, cfg: &DiscoveryConfig) -> Result<Discovery> {
    let pre = estimate_parents_neighbors(ds, cfg)?;
    graph_from_preliminary(ds, pre, cfg)
}

/// Second step of [`build_graph`] on given preliminary sets. For fixed
/// preliminary sets the directed links only shrink as the threshold rises;
/// across full runs this need not hold, since pruning changes the
/// conditioning sets.
pub fn graph_from_preliminary(ds: &TimeSeriesDataset, pre: Preliminary, cfg: &DiscoveryConfig) -> Result<Discovery> {
    cfg.validate()?;
    let n = ds.n_vars();
    if pre.parents.len() != n || pre.neighbors.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: pre.parents.len(),
        });
    }
    if let Some(p) = pre.parents.iter().flatten().find(|p| p.lag == 0 || p.lag > cfg.tau_max) {
        return Err(Error::InvalidConfig(format!("preliminary parent {p} outside lags 1..={}", cfg.tau_max)));
    }
    let mut graph = TimeSeriesGraph::new(n, cfg.tau_max)?;
    let links: Vec<(NodeRef, usize)> = pre
        .parents
        .iter()
        .enumerate()
        .flat_map(|(j, ps)| ps.iter().map(move |&p| (p, j)))
        .collect();
    let min_start = 2 * cfg.tau_max;
    let results = crate::par::map(links.len(), |k| {
        let (src, j) = links[k];
        let y = NodeRef::new(j, 0);
        let mut conds: BTreeSet<NodeRef> = pre.parents[j].iter().copied().filter(|&p| p != src).collect();
        conds.extend(pre.parents[src.variable].iter().map(|p| p.shifted(src.lag)));
        conds.remove(&src);
        let conds: Vec<NodeRef> = conds.into_iter().collect();
        let r = test(ds, src, y, &conds, min_start, &cfg.estimator);
        (conds, r)
    });
    let mut records = Vec::new();
    for (&(src, j), (conds, r)) in links.iter().zip(results) {
        let r = r?;
        let kept = cfg.passes(&r);
        if kept {
            graph.add_directed(src.variable, src.lag, j)?;
        }
        records.push(TestRecord {
            stage: Stage::Mit,
            source: src,
            target: NodeRef::new(j, 0),
            conditions: conds,
            value: r.value,
            p_value: r.p_value,
            kept,
        });
    }
    let final_parents: Vec<BTreeSet<NodeRef>> = (0..n)
        .map(|j| graph.parents_unchecked(NodeRef::new(j, 0)))
        .collect();
    let candidates: Vec<(usize, usize)> = pairs(n)
        .into_iter()
        .filter(|&(i, j)| pre.neighbors[i].contains(&j))
        .collect();
    let solid = contemporaneous_tests(
        ds,
        cfg,
        Stage::Solid,
        &candidates,
        &final_parents,
        Some(&pre.neighbors),
        cfg.tau_max,
    )?;
    let dashed = contemporaneous_tests(ds, cfg, Stage::Dashed, &candidates, &final_parents, None, cfg.tau_max)?;
    for r in &solid {
        if r.kept {
            graph.add_contemporaneous(r.source.variable, r.target.variable)?;
        }
    }
    for r in &dashed {
        if r.kept {
            graph.add_dashed(r.source.variable, r.target.variable)?;
        }
    }
    records.extend(solid);
    records.extend(dashed);
    let warnings = pre.warnings.clone();
    Ok(Discovery {
        graph,
        preliminary: pre,
        records,
        warnings,
    })
}
