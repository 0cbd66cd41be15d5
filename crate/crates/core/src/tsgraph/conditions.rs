use alloc::collections::BTreeSet;
use alloc::format;

use super::{NodeRef, TimeSeriesGraph};
use crate::error::{Error, Result};

/// Which conditioning set to assemble for a lagged source/target pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum ConditionKind {
    Te,
    Ity,
    Mit,
    Itx,
    Mitp,
}

impl TimeSeriesGraph {
    /// Conditioning set of a transfer measure between `source` and `target`.
    /// The source and target themselves are never part of the result.
    pub fn condition_set(
        &self,
        kind: ConditionKind,
        source: NodeRef,
        target: NodeRef,
    ) -> Result<BTreeSet<NodeRef>> {
        self.parents(source)?;
        self.parents(target)?;
        if source.lag <= target.lag {
            return Err(Error::InvalidConfig(format!(
                "source {source} must lie strictly before target {target}"
            )));
        }
        let mut set = match kind {
            ConditionKind::Te => {
                let mut s = BTreeSet::new();
                for var in (0..self.n_vars).filter(|&v| v != source.variable) {
                    for lag in 1..=self.tau_max {
                        s.insert(NodeRef::new(var, target.lag + lag));
                    }
                }
                s
            }
            ConditionKind::Ity => self.parents_unchecked(target),
            ConditionKind::Mit => {
                let mut s = self.parents_unchecked(target);
                s.extend(self.parents_unchecked(source));
                self.add_sidepath_terms(source, target, &mut s);
                s
            }
            ConditionKind::Itx => {
                let mut s = self.parents_unchecked(source);
                self.add_sidepath_terms(source, target, &mut s);
                s
            }
            ConditionKind::Mitp => {
                let paths = self.causal_paths(source, target);
                if paths.is_empty() {
                    return Err(Error::NoCausalPath { from: source, to: target });
                }
                let on_path = &paths.path_nodes;
                let mut s: BTreeSet<NodeRef> = self
                    .parents_unchecked(target)
                    .into_iter()
                    .filter(|n| !on_path.contains(n))
                    .collect();
                for n in on_path {
                    s.extend(
                        self.parents_unchecked(*n)
                            .into_iter()
                            .filter(|p| !on_path.contains(p)),
                    );
                }
                self.add_sidepath_terms(source, target, &mut s);
                s
            }
        };
        set.remove(&source);
        set.remove(&target);
        Ok(set)
    }

    fn add_sidepath_terms(&self, source: NodeRef, target: NodeRef, set: &mut BTreeSet<NodeRef>) {
        let side = self.sidepath_neighbors(source, target);
        for n in &side {
            set.extend(self.parents_unchecked(*n));
        }
        set.extend(side);
    }
}
