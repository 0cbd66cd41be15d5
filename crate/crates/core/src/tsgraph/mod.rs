//! Time series graphs: lagged directed links and contemporaneous links over
//! `n_vars` variables, stored once per pattern and repeated at every time step.
//!
//! Nodes are addressed relative to a reference time `t` by [`NodeRef`]; a
//! node with `lag = 2` stands for the variable at time `t - 2`.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};

mod conditions;
mod paths;
mod separation;

pub use conditions::ConditionKind;
pub use paths::CausalPaths;

/// One node of the unrolled graph: `variable` at time `t - lag`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeRef {
    pub variable: usize,
    pub lag: usize,
}

impl NodeRef {
    pub const fn new(variable: usize, lag: usize) -> Self {
        Self { variable, lag }
    }

    /// The same variable `extra` steps further in the past.
    pub const fn shifted(self, extra: usize) -> Self {
        Self {
            variable: self.variable,
            lag: self.lag + extra,
        }
    }

    /// Renders the node as `name(t-lag)` using the given variable names.
    pub fn label(&self, names: &[String]) -> String {
        let name = names
            .get(self.variable)
            .cloned()
            .unwrap_or_else(|| format!("v{}", self.variable));
        if self.lag == 0 {
            format!("{name}(t)")
        } else {
            format!("{name}(t-{})", self.lag)
        }
    }
}

impl fmt::Display for NodeRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.lag == 0 {
            write!(f, "v{}(t)", self.variable)
        } else {
            write!(f, "v{}(t-{})", self.variable, self.lag)
        }
    }
}

/// A directed lagged link `source(t - lag) -> target(t)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Link {
    pub source: usize,
    pub lag: usize,
    pub target: usize,
}

impl Link {
    pub const fn new(source: usize, lag: usize, target: usize) -> Self {
        Self { source, lag, target }
    }
}

/// Endpoint mark of an edge at one of its nodes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub(crate) enum Mark {
    Tail,
    Head,
    Line,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TimeSeriesGraph {
    n_vars: usize,
    tau_max: usize,
    directed: BTreeSet<Link>,
    solid: BTreeSet<(usize, usize)>,
    dashed: Option<BTreeSet<(usize, usize)>>,
}

fn ordered(i: usize, j: usize) -> (usize, usize) {
    if i < j {
        (i, j)
    } else {
        (j, i)
    }
}

impl TimeSeriesGraph {
    pub fn new(n_vars: usize, tau_max: usize) -> Result<Self> {
        if n_vars == 0 {
            return Err(Error::InvalidGraph("graph needs at least one variable".into()));
        }
        if tau_max == 0 {
            return Err(Error::InvalidGraph("tau_max must be at least 1".into()));
        }
        Ok(Self {
            n_vars,
            tau_max,
            directed: BTreeSet::new(),
            solid: BTreeSet::new(),
            dashed: None,
        })
    }

    pub fn n_vars(&self) -> usize {
        self.n_vars
    }

    pub fn tau_max(&self) -> usize {
        self.tau_max
    }

    pub fn directed_links(&self) -> impl Iterator<Item = &Link> + '_ {
        self.directed.iter()
    }

    pub fn contemporaneous_solid(&self) -> impl Iterator<Item = &(usize, usize)> + '_ {
        self.solid.iter()
    }

    pub fn contemporaneous_dashed(&self) -> Option<&BTreeSet<(usize, usize)>> {
        self.dashed.as_ref()
    }

    pub fn has_link(&self, link: &Link) -> bool {
        self.directed.contains(link)
    }

    pub fn is_empty(&self) -> bool {
        self.directed.is_empty()
            && self.solid.is_empty()
            && self.dashed.as_ref().map_or(true, BTreeSet::is_empty)
    }

    fn check_var(&self, index: usize) -> Result<()> {
        if index >= self.n_vars {
            Err(Error::VariableOutOfRange {
                index,
                n_vars: self.n_vars,
            })
        } else {
            Ok(())
        }
    }

    pub fn add_directed(&mut self, source: usize, lag: usize, target: usize) -> Result<()> {
        self.check_var(source)?;
        self.check_var(target)?;
        if lag == 0 || lag > self.tau_max {
            return Err(Error::InvalidGraph(format!(
                "directed link lag {lag} outside [1, {}]",
                self.tau_max
            )));
        }
        self.directed.insert(Link::new(source, lag, target));
        Ok(())
    }

    pub fn remove_directed(&mut self, link: &Link) -> bool {
        self.directed.remove(link)
    }

    pub fn add_contemporaneous(&mut self, i: usize, j: usize) -> Result<()> {
        self.check_var(i)?;
        self.check_var(j)?;
        if i == j {
            return Err(Error::InvalidGraph(format!(
                "contemporaneous link with identical endpoints ({i})"
            )));
        }
        self.solid.insert(ordered(i, j));
        Ok(())
    }

    /// Adds a dashed contemporaneous link; the first call switches the graph
    /// into dual-definition mode.
    pub fn add_dashed(&mut self, i: usize, j: usize) -> Result<()> {
        self.check_var(i)?;
        self.check_var(j)?;
        if i == j {
            return Err(Error::InvalidGraph(format!(
                "contemporaneous link with identical endpoints ({i})"
            )));
        }
        self.dashed.get_or_insert_with(BTreeSet::new).insert(ordered(i, j));
        Ok(())
    }

    /// Marks the dashed set as supplied (possibly empty).
    pub fn enable_dashed(&mut self) {
        self.dashed.get_or_insert_with(BTreeSet::new);
    }

    pub fn is_solid(&self, i: usize, j: usize) -> bool {
        self.solid.contains(&ordered(i, j))
    }

    pub fn is_dashed(&self, i: usize, j: usize) -> bool {
        self.dashed
            .as_ref()
            .is_some_and(|d| d.contains(&ordered(i, j)))
    }

    /// Contemporaneous link used for sidepath purposes: solid, and also dashed
    /// when a dashed set was supplied.
    pub(crate) fn is_effective_contemporaneous(&self, i: usize, j: usize) -> bool {
        self.is_solid(i, j) && self.dashed.as_ref().map_or(true, |d| d.contains(&ordered(i, j)))
    }

    /// Largest lag of a directed link, or 0 for graphs without directed links.
    pub fn max_link_lag(&self) -> usize {
        self.directed.iter().map(|l| l.lag).max().unwrap_or(0)
    }

    /// Parents of `node`: stored links into its variable shifted by its lag.
    pub fn parents(&self, node: NodeRef) -> Result<BTreeSet<NodeRef>> {
        self.check_var(node.variable)?;
        Ok(self.parents_unchecked(node))
    }

    pub(crate) fn parents_unchecked(&self, node: NodeRef) -> BTreeSet<NodeRef> {
        self.directed
            .iter()
            .filter(|l| l.target == node.variable)
            .map(|l| NodeRef::new(l.source, node.lag + l.lag))
            .collect()
    }

    /// Union of the parents of every node in `nodes`.
    pub fn parents_of_set<'a>(
        &self,
        nodes: impl IntoIterator<Item = &'a NodeRef>,
    ) -> Result<BTreeSet<NodeRef>> {
        let mut out = BTreeSet::new();
        for n in nodes {
            out.extend(self.parents(*n)?);
        }
        Ok(out)
    }

    /// Solid contemporaneous neighbors of `node` at the same lag.
    pub fn neighbors(&self, node: NodeRef) -> Result<BTreeSet<NodeRef>> {
        self.check_var(node.variable)?;
        Ok(self
            .solid
            .iter()
            .filter_map(|&(i, j)| {
                if i == node.variable {
                    Some(NodeRef::new(j, node.lag))
                } else if j == node.variable {
                    Some(NodeRef::new(i, node.lag))
                } else {
                    None
                }
            })
            .collect())
    }

    /// Children of `node` that stay at lag >= `min_lag`.
    pub(crate) fn children(&self, node: NodeRef, min_lag: usize) -> impl Iterator<Item = NodeRef> + '_ {
        self.directed.iter().filter_map(move |l| {
            (l.source == node.variable && node.lag >= l.lag + min_lag)
                .then(|| NodeRef::new(l.target, node.lag - l.lag))
        })
    }

    /// Every edge incident to `node` inside the unrolled window `[0, window]`,
    /// as `(mark at node, neighbor, mark at neighbor)`.
    pub(crate) fn incident_edges(&self, node: NodeRef, window: usize) -> Vec<(Mark, NodeRef, Mark)> {
        let mut out = Vec::new();
        for l in &self.directed {
            if l.target == node.variable && node.lag + l.lag <= window {
                out.push((Mark::Head, NodeRef::new(l.source, node.lag + l.lag), Mark::Tail));
            }
            if l.source == node.variable && node.lag >= l.lag {
                out.push((Mark::Tail, NodeRef::new(l.target, node.lag - l.lag), Mark::Head));
            }
        }
        for &(i, j) in &self.solid {
            if i == node.variable {
                out.push((Mark::Line, NodeRef::new(j, node.lag), Mark::Line));
            } else if j == node.variable {
                out.push((Mark::Line, NodeRef::new(i, node.lag), Mark::Line));
            }
        }
        if let Some(dashed) = &self.dashed {
            // Dashed links carry arrowhead semantics at both ends.
            for &(i, j) in dashed {
                if i == node.variable {
                    out.push((Mark::Head, NodeRef::new(j, node.lag), Mark::Head));
                } else if j == node.variable {
                    out.push((Mark::Head, NodeRef::new(i, node.lag), Mark::Head));
                }
            }
        }
        out
    }

    /// Default unrolling window for queries involving a source at `source_lag`.
    pub fn default_window(&self, source_lag: usize) -> usize {
        3 * (self.tau_max + source_lag)
    }
}
