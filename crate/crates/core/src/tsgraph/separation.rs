use alloc::collections::{BTreeSet, VecDeque};

use super::{Mark, NodeRef, TimeSeriesGraph};
use crate::error::{Error, Result};

/// Motifs where two arrowheads, or an arrowhead and a line, meet.
fn collider_like(a: Mark, b: Mark) -> bool {
    matches!(
        (a, b),
        (Mark::Head, Mark::Head) | (Mark::Head, Mark::Line) | (Mark::Line, Mark::Head)
    )
}

impl TimeSeriesGraph {
    /// Whether every path between `u` and `v` in the graph unrolled over lags
    /// `0..=window` is blocked given `conditions`.
    ///
    /// Searches walks over `(node, mark of the arriving edge)` states; a
    /// collider-like motif is passable only at a conditioned node, every other
    /// motif only at an unconditioned one. Walks that descend to a conditioned
    /// node and come back reproduce the descendant rule for colliders.
    pub fn is_separated(
        &self,
        u: NodeRef,
        v: NodeRef,
        conditions: &BTreeSet<NodeRef>,
        window: usize,
    ) -> Result<bool> {
        for n in [u, v].iter().chain(conditions.iter()) {
            if n.variable >= self.n_vars {
                return Err(Error::VariableOutOfRange {
                    index: n.variable,
                    n_vars: self.n_vars,
                });
            }
        }
        let max_lag = [u, v]
            .iter()
            .chain(conditions.iter())
            .map(|n| n.lag)
            .max()
            .unwrap_or(0);
        if window < max_lag {
            return Err(Error::WindowTooSmall { window, max_lag });
        }
        for n in [u, v] {
            if conditions.contains(&n) {
                return Err(Error::NodeInConditioningSet(n));
            }
        }
        if u == v {
            return Ok(false);
        }

        let mut seen: BTreeSet<(NodeRef, Mark)> = BTreeSet::new();
        let mut queue: VecDeque<(NodeRef, Mark)> = VecDeque::new();
        for (_, next, arrive) in self.incident_edges(u, window) {
            if next == v {
                return Ok(false);
            }
            if seen.insert((next, arrive)) {
                queue.push_back((next, arrive));
            }
        }
        while let Some((node, arrived)) = queue.pop_front() {
            let conditioned = conditions.contains(&node);
            for (leave, next, arrive) in self.incident_edges(node, window) {
                if collider_like(arrived, leave) != conditioned {
                    continue;
                }
                if next == v {
                    return Ok(false);
                }
                if next != u && seen.insert((next, arrive)) {
                    queue.push_back((next, arrive));
                }
            }
        }
        Ok(true)
    }
}
