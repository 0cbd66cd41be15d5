use alloc::collections::{BTreeMap, BTreeSet, VecDeque};
use alloc::vec;
use alloc::vec::Vec;

use super::{NodeRef, TimeSeriesGraph};

/// All causal paths between two nodes together with the path nodes.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct CausalPaths {
    /// Node sequences, each starting at the source and ending at the target.
    pub paths: Vec<Vec<NodeRef>>,
    /// Source plus every intermediate node, target excluded.
    pub path_nodes: BTreeSet<NodeRef>,
}

impl CausalPaths {
    pub fn is_empty(&self) -> bool {
        self.paths.is_empty()
    }

    /// Occurrences of `variable` on the paths, source and target excluded.
    pub fn occurrences_of(&self, variable: usize, source: NodeRef) -> BTreeSet<NodeRef> {
        self.path_nodes
            .iter()
            .filter(|n| n.variable == variable && **n != source)
            .copied()
            .collect()
    }
}

impl TimeSeriesGraph {
    fn reaches(
        &self,
        node: NodeRef,
        target: NodeRef,
        memo: &mut BTreeMap<NodeRef, bool>,
    ) -> bool {
        if node == target {
            return true;
        }
        if node.lag <= target.lag {
            return false;
        }
        if let Some(&known) = memo.get(&node) {
            return known;
        }
        let children: Vec<NodeRef> = self.children(node, target.lag).collect();
        let mut hit = false;
        for child in children {
            if self.reaches(child, target, memo) {
                hit = true;
            }
        }
        memo.insert(node, hit);
        hit
    }

    /// Enumerates every directed path from `source` down to `target`.
    pub fn causal_paths(&self, source: NodeRef, target: NodeRef) -> CausalPaths {
        let mut out = CausalPaths::default();
        if source == target
            || source.lag <= target.lag
            || source.variable >= self.n_vars
            || target.variable >= self.n_vars
        {
            return out;
        }
        let mut memo = BTreeMap::new();
        if !self.reaches(source, target, &mut memo) {
            return out;
        }
        let mut stack = vec![source];
        self.extend_paths(target, &mut memo, &mut stack, &mut out.paths);
        out.paths.sort();
        for path in &out.paths {
            out.path_nodes.extend(path[..path.len() - 1].iter().copied());
        }
        out
    }

    fn extend_paths(
        &self,
        target: NodeRef,
        memo: &mut BTreeMap<NodeRef, bool>,
        stack: &mut Vec<NodeRef>,
        paths: &mut Vec<Vec<NodeRef>>,
    ) {
        let last = *stack.last().expect("path stack is never empty");
        if last == target {
            paths.push(stack.clone());
            return;
        }
        let children: Vec<NodeRef> = self.children(last, target.lag).collect();
        for child in children {
            if self.reaches(child, target, memo) {
                stack.push(child);
                self.extend_paths(target, memo, stack, paths);
                stack.pop();
            }
        }
    }

    /// Contemporaneous neighbors of `source` that start a sidepath to `target`:
    /// one or more contemporaneous links followed by a directed path, never
    /// passing through `source`.
    pub fn sidepath_neighbors(&self, source: NodeRef, target: NodeRef) -> BTreeSet<NodeRef> {
        let mut out = BTreeSet::new();
        if source == target
            || source.lag <= target.lag
            || source.variable >= self.n_vars
            || target.variable >= self.n_vars
        {
            return out;
        }
        let mut memo = BTreeMap::new();
        let first: Vec<usize> = (0..self.n_vars)
            .filter(|&w| w != source.variable && self.is_effective_contemporaneous(source.variable, w))
            .collect();
        for w in first {
            let mut seen = BTreeSet::from([source.variable, w]);
            let mut queue = VecDeque::from([w]);
            let mut found = false;
            while let Some(v) = queue.pop_front() {
                if self.reaches(NodeRef::new(v, source.lag), target, &mut memo) {
                    found = true;
                    break;
                }
                for u in 0..self.n_vars {
                    if !seen.contains(&u) && self.is_effective_contemporaneous(v, u) {
                        seen.insert(u);
                        queue.push_back(u);
                    }
                }
            }
            if found {
                out.insert(NodeRef::new(w, source.lag));
            }
        }
        out
    }
}
