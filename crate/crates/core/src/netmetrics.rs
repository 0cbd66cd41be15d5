//! Causal interaction betweenness: how much of the transfer between other
//! pairs of variables runs through a given variable.

use alloc::vec::Vec;

use crate::dataset::TimeSeriesDataset;
use crate::error::{Error, Result};
use crate::estimators::EstimatorConfig;
use crate::measures::{mediator_variables, MeasureKind, MeasurePlan};
use crate::tsgraph::{NodeRef, TimeSeriesGraph};

/// Normalized mode skips triples whose base transfer is below this many nats.
pub const BASE_FLOOR: f64 = 0.01;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CibOptions {
    /// Divide each interaction by the transfer it interacts with.
    pub normalized: bool,
    /// Use MII (and MITP) instead of IIX (and ITX).
    pub use_mii: bool,
    pub base_floor: f64,
}

impl Default for CibOptions {
    fn default() -> Self {
        Self {
            normalized: false,
            use_mii: false,
            base_floor: BASE_FLOOR,
        }
    }
}

/// One source-target-lag interaction with the candidate mediator on a
/// causal path.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Triple {
    pub source: usize,
    pub target: usize,
    pub lag: usize,
    /// IIX or MII in nats.
    pub interaction: f64,
    /// ITX or MITP in nats.
    pub base: f64,
}

impl Triple {
    pub fn ratio(&self) -> f64 {
        self.interaction / self.base
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BetweennessResult {
    pub variable: usize,
    /// Mean of the absolute contributing entries.
    pub value: f64,
    /// Contributing triples with their signed entry (interaction or ratio).
    pub contributing: Vec<(Triple, f64)>,
    /// Triples left out for a base transfer below the floor.
    pub n_skipped: usize,
    /// Mean of the positive (mediating) entries.
    pub mean_positive: Option<f64>,
    /// Mean of the negative (counteracting) entries.
    pub mean_negative: Option<f64>,
    pub normalized: bool,
}

impl BetweennessResult {
    pub fn cardinality(&self) -> usize {
        self.contributing.len()
    }
}

/// Source-target-lag combinations with `k` on a causal path, in sorted order.
pub fn mediated_interactions(g: &TimeSeriesGraph, k: usize, tau_max: usize) -> Result<Vec<(usize, usize, usize)>> {
    if k >= g.n_vars() {
        return Err(Error::VariableOutOfRange {
            index: k,
            n_vars: g.n_vars(),
        });
    }
    if tau_max == 0 {
        return Err(Error::InvalidConfig("tau_max must be at least 1".into()));
    }
    let n = g.n_vars();
    let mut out = Vec::new();
    for i in (0..n).filter(|&i| i != k) {
        for j in (0..n).filter(|&j| j != k && j != i) {
            for lag in 1..=tau_max {
                if mediator_variables(g, NodeRef::new(i, lag), NodeRef::new(j, 0)).contains(&k) {
                    out.push((i, j, lag));
                }
            }
        }
    }
    Ok(out)
}

/// Estimates interaction and base transfer for every triple mediated by `k`.
pub fn interaction_triples(
    ds: &TimeSeriesDataset,
    g: &TimeSeriesGraph,
    k: usize,
    tau_max: usize,
    cfg: &EstimatorConfig,
    use_mii: bool,
) -> Result<Vec<Triple>> {
    if ds.n_vars() != g.n_vars() {
        return Err(Error::InvalidGraph(alloc::format!(
            "graph has {} variables, dataset {}",
            g.n_vars(),
            ds.n_vars()
        )));
    }
    let combos = mediated_interactions(g, k, tau_max)?;
    if combos.is_empty() {
        return Err(Error::NoMediatedInteraction { variable: k });
    }
    let (kind, base_kind) = if use_mii {
        (MeasureKind::Mii, MeasureKind::Mitp)
    } else {
        (MeasureKind::Iix, MeasureKind::Itx)
    };
    let results = crate::par::map(combos.len(), |c| -> Result<Triple> {
        let (i, j, lag) = combos[c];
        let (s, t) = (NodeRef::new(i, lag), NodeRef::new(j, 0));
        let interaction = MeasurePlan::new(g, kind, s, t, &[k])?.estimate(ds, cfg, 0)?.value;
        let base = MeasurePlan::new(g, base_kind, s, t, &[])?.estimate(ds, cfg, 0)?.value;
        Ok(Triple {
            source: i,
            target: j,
            lag,
            interaction,
            base,
        })
    });
    results.into_iter().collect()
}

/// Aggregates estimated triples of variable `k` into its betweenness.
pub fn betweenness_from_triples(k: usize, triples: &[Triple], options: &CibOptions) -> Result<BetweennessResult> {
    let mut contributing = Vec::with_capacity(triples.len());
    let mut n_skipped = 0;
    for t in triples {
        if options.normalized {
            if !(t.base >= options.base_floor) {
                n_skipped += 1;
                continue;
            }
            contributing.push((*t, t.ratio()));
        } else {
            contributing.push((*t, t.interaction));
        }
    }
    if contributing.is_empty() {
        return Err(Error::NoMediatedInteraction { variable: k });
    }
    let mean = |it: &mut dyn Iterator<Item = f64>| {
        let (sum, count) = it.fold((0.0, 0usize), |(s, c), v| (s + v, c + 1));
        (count > 0).then(|| sum / count as f64)
    };
    let entries = || contributing.iter().map(|c| c.1);
    let value = mean(&mut entries().map(f64::abs)).unwrap_or(0.0);
    let mean_positive = mean(&mut entries().filter(|v| *v > 0.0));
    let mean_negative = mean(&mut entries().filter(|v| *v < 0.0));
    Ok(BetweennessResult {
        variable: k,
        value,
        contributing,
        n_skipped,
        mean_positive,
        mean_negative,
        normalized: options.normalized,
    })
}

/// Causal interaction betweenness of variable `k`: the mean absolute
/// interaction information of `k` over all ordered pairs of other variables
/// and lags `1..=tau_max` where `k` lies on a causal path. Fails with
/// [`Error::NoMediatedInteraction`] when there is no such triple, or when
/// normalization skips all of them.
pub fn cib(
    ds: &TimeSeriesDataset,
    g: &TimeSeriesGraph,
    k: usize,
    tau_max: usize,
    cfg: &EstimatorConfig,
    options: &CibOptions,
) -> Result<BetweennessResult> {
    let triples = interaction_triples(ds, g, k, tau_max, cfg, options.use_mii)?;
    betweenness_from_triples(k, &triples, options)
}
