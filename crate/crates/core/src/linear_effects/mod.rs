//! Linear causal effects from standardized regressions, path sums, and
//! closed-form Gaussian values for the triple model.

use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::vec::Vec;
use core::fmt;

use crate::dataset::TimeSeriesDataset;
use crate::error::{Error, Result};
use crate::math;
use crate::simulate::StructuralModel;
use crate::tsgraph::{Link, NodeRef, TimeSeriesGraph};

mod population;
mod regression;

pub use population::StationaryCovariance;
pub use regression::{standardized_ols, OlsFit, SINGULAR_TOLERANCE};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum LinearEffectKind {
    PathCoefficient,
    Ce,
    Mce,
    PathSum,
}

impl LinearEffectKind {
    pub fn name(self) -> &'static str {
        match self {
            LinearEffectKind::PathCoefficient => "linear_path_coefficient",
            LinearEffectKind::Ce => "linear_CE",
            LinearEffectKind::Mce => "linear_MCE",
            LinearEffectKind::PathSum => "linear_path_sum",
        }
    }
}

impl fmt::Display for LinearEffectKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinearEffectResult {
    pub kind: LinearEffectKind,
    pub source: NodeRef,
    pub target: NodeRef,
    pub mediators: Vec<NodeRef>,
    /// Standardized, dimensionless effect.
    pub value: f64,
    /// Regression standard error, where one applies.
    pub std_error: Option<f64>,
    pub regressors: Vec<NodeRef>,
    pub n_samples: usize,
}

struct Fit {
    coefficient: f64,
    std_error: f64,
    n_samples: usize,
}

/// Standardized coefficient of `of` when regressing `target` on `regressors`
/// (which must contain `of`).
fn regress(ds: &TimeSeriesDataset, target: NodeRef, regressors: &[NodeRef], of: NodeRef) -> Result<Fit> {
    let mut nodes = alloc::vec![target];
    nodes.extend_from_slice(regressors);
    let samples = ds.lagged_matrix(&nodes)?;
    let cols: Vec<&[f64]> = samples.columns[1..].iter().map(Vec::as_slice).collect();
    let fit = standardized_ols(&samples.columns[0], &cols).map_err(|bad| Error::SingularRegression {
        regressors: bad.into_iter().map(|j| regressors[j]).collect(),
    })?;
    let j = regressors
        .iter()
        .position(|n| *n == of)
        .expect("regressor list contains the queried node");
    Ok(Fit {
        coefficient: fit.coefficients[j],
        std_error: fit.std_errors[j],
        n_samples: samples.n_samples(),
    })
}

fn check_lagged(source: NodeRef, target: NodeRef) -> Result<()> {
    if source.lag <= target.lag {
        return Err(Error::InvalidConfig(format!(
            "source {source} must lie strictly before target {target}"
        )));
    }
    Ok(())
}

/// Standardized coefficient of a link in the regression of its target on all
/// of the target's parents.
pub fn path_coefficient(ds: &TimeSeriesDataset, g: &TimeSeriesGraph, link: Link) -> Result<LinearEffectResult> {
    if !g.has_link(&link) {
        return Err(Error::InvalidGraph(format!(
            "link {} -> {} at lag {} is not in the graph",
            link.source, link.target, link.lag
        )));
    }
    let target = NodeRef::new(link.target, 0);
    let source = NodeRef::new(link.source, link.lag);
    let regressors: Vec<NodeRef> = g.parents(target)?.into_iter().collect();
    let fit = regress(ds, target, &regressors, source)?;
    Ok(LinearEffectResult {
        kind: LinearEffectKind::PathCoefficient,
        source,
        target,
        mediators: Vec::new(),
        value: fit.coefficient,
        std_error: Some(fit.std_error),
        regressors,
        n_samples: fit.n_samples,
    })
}

fn ce_regressors(g: &TimeSeriesGraph, source: NodeRef, target: NodeRef) -> Result<Vec<NodeRef>> {
    check_lagged(source, target)?;
    if !g.sidepath_neighbors(source, target).is_empty() {
        return Err(Error::SidepathsPresent);
    }
    let mut set = g.parents(source)?;
    set.insert(source);
    set.remove(&target);
    Ok(set.into_iter().collect())
}

/// Total standardized effect of `source` on `target`: coefficient of the
/// source when regressing the target on the source and its parents.
pub fn causal_effect(
    ds: &TimeSeriesDataset,
    g: &TimeSeriesGraph,
    source: NodeRef,
    target: NodeRef,
) -> Result<LinearEffectResult> {
    let regressors = ce_regressors(g, source, target)?;
    let fit = regress(ds, target, &regressors, source)?;
    Ok(LinearEffectResult {
        kind: LinearEffectKind::Ce,
        source,
        target,
        mediators: Vec::new(),
        value: fit.coefficient,
        std_error: Some(fit.std_error),
        regressors,
        n_samples: fit.n_samples,
    })
}

/// Part of the causal effect that passes through the mediator variables:
/// CE minus the source coefficient once all path occurrences of the
/// mediators and their parents are added to the regression.
pub fn mediated_causal_effect(
    ds: &TimeSeriesDataset,
    g: &TimeSeriesGraph,
    source: NodeRef,
    target: NodeRef,
    mediator_variables: &[usize],
) -> Result<LinearEffectResult> {
    let base = ce_regressors(g, source, target)?;
    let paths = g.causal_paths(source, target);
    let mut mediators = BTreeSet::new();
    for &v in mediator_variables {
        let occ = paths.occurrences_of(v, source);
        if occ.is_empty() {
            return Err(Error::MediatorNotOnPath { variable: v });
        }
        mediators.extend(occ);
    }
    if mediators.is_empty() {
        return Err(Error::InvalidConfig("no mediator given".into()));
    }
    let ce = regress(ds, target, &base, source)?;
    let mut extended: BTreeSet<NodeRef> = base.iter().copied().collect();
    extended.extend(mediators.iter().copied());
    extended.extend(g.parents_of_set(&mediators)?);
    extended.remove(&target);
    let regressors: Vec<NodeRef> = extended.into_iter().collect();
    let direct = regress(ds, target, &regressors, source)?;
    Ok(LinearEffectResult {
        kind: LinearEffectKind::Mce,
        source,
        target,
        mediators: mediators.into_iter().collect(),
        value: ce.coefficient - direct.coefficient,
        std_error: None,
        regressors,
        n_samples: direct.n_samples,
    })
}

/// Sum over causal paths of the product of link coefficients.
pub fn path_sum_effect(
    g: &TimeSeriesGraph,
    coefficients: &BTreeMap<Link, f64>,
    source: NodeRef,
    target: NodeRef,
) -> Result<LinearEffectResult> {
    let paths = g.causal_paths(source, target);
    let mut total = 0.0;
    for p in &paths.paths {
        let mut prod = 1.0;
        for w in p.windows(2) {
            let link = Link::new(w[0].variable, w[0].lag - w[1].lag, w[1].variable);
            let c = coefficients.get(&link).ok_or_else(|| {
                Error::InvalidConfig(format!(
                    "missing coefficient for link {} -> {} at lag {}",
                    link.source, link.target, link.lag
                ))
            })?;
            prod *= c;
        }
        total += prod;
    }
    Ok(LinearEffectResult {
        kind: LinearEffectKind::PathSum,
        source,
        target,
        mediators: Vec::new(),
        value: total,
        std_error: None,
        regressors: Vec::new(),
        n_samples: 0,
    })
}

/// Population standardized path coefficients of a linear model:
/// `coeff * sqrt(Gamma_parent / Gamma_target)`.
pub fn standardized_coefficients(m: &StructuralModel) -> Result<BTreeMap<Link, f64>> {
    let cov = StationaryCovariance::new(m, 0)?;
    let g0 = cov.gamma(0);
    let mut out = BTreeMap::new();
    for (l, a) in m.coefficient_matrices().iter().enumerate() {
        for target in 0..m.n_vars() {
            for parent in 0..m.n_vars() {
                let c = a[(target, parent)];
                if c != 0.0 {
                    out.insert(
                        Link::new(parent, l + 1, target),
                        c * math::sqrt(g0[(parent, parent)] / g0[(target, target)]),
                    );
                }
            }
        }
    }
    Ok(out)
}

/// Stationary variance of one variable of a stable linear model.
pub fn stationary_variance(m: &StructuralModel, variable: usize) -> Result<f64> {
    if variable >= m.n_vars() {
        return Err(Error::VariableOutOfRange {
            index: variable,
            n_vars: m.n_vars(),
        });
    }
    Ok(StationaryCovariance::new(m, 0)?.gamma(0)[(variable, variable)])
}

/// MITP from X(t-2) to Y(t) in the linear triple with innovation scales
/// `sx`, `sw`, `sy`.
pub fn analytic_mitp_triple(a: f64, b: f64, c: f64, sx: f64, sw: f64, sy: f64) -> f64 {
    let total = c + a * b;
    0.5 * math::ln1p(total * total * sx * sx / (b * b * sw * sw + sy * sy))
}

/// MII of W on the same interaction: MITP minus the part left once W is
/// conditioned out.
pub fn analytic_mii_triple(a: f64, b: f64, c: f64, sx: f64, sw: f64, sy: f64) -> f64 {
    let direct = 0.5 * math::ln1p(c * c * sx * sx * sw * sw / ((sw * sw + a * a * sx * sx) * sy * sy));
    analytic_mitp_triple(a, b, c, sx, sw, sy) - direct
}

#[cfg(test)]
mod tests;
