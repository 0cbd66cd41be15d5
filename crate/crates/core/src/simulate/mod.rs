//! Structural causal models: definition, simulation, implied graphs and
//! ensembles.

use alloc::boxed::Box;
use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};

use crate::dataset::TimeSeriesDataset;
use crate::error::{Error, Result};
use crate::tsgraph::{NodeRef, TimeSeriesGraph};
use crate::{math, par, rng};

/// Values beyond this magnitude count as a diverging trajectory.
const OVERFLOW_LIMIT: f64 = 1e150;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Term {
    /// `coeff * parent(t - lag)`
    Linear { parent: usize, lag: usize, coeff: f64 },
    /// `coeff * first * second`, each factor a lagged node
    Product {
        first: NodeRef,
        second: NodeRef,
        coeff: f64,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum NoiseKind {
    #[default]
    Gaussian,
}

/// Per-variable structural equations with additive innovations. Innovations
/// may be correlated at equal times, which yields contemporaneous links.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuralModel {
    names: Vec<String>,
    terms: Vec<Vec<Term>>,
    noise_std: Vec<f64>,
    noise_kind: NoiseKind,
    correlations: Vec<(usize, usize, f64)>,
}

impl StructuralModel {
    /// Model without terms: independent innovations with the given scales.
    pub fn new(names: Vec<String>, noise_std: Vec<f64>) -> Result<Self> {
        if names.is_empty() {
            return Err(Error::InvalidModel("no variables".into()));
        }
        if names.len() != noise_std.len() {
            return Err(Error::InvalidModel(format!(
                "{} noise scales for {} variables",
                noise_std.len(),
                names.len()
            )));
        }
        for (i, name) in names.iter().enumerate() {
            if names[..i].contains(name) {
                return Err(Error::DuplicateName(name.clone()));
            }
        }
        if let Some(i) = noise_std.iter().position(|s| !(*s > 0.0 && s.is_finite())) {
            return Err(Error::InvalidModel(format!(
                "noise scale of `{}` must be positive",
                names[i]
            )));
        }
        let n = names.len();
        Ok(Self {
            names,
            terms: vec![Vec::new(); n],
            noise_std,
            noise_kind: NoiseKind::Gaussian,
            correlations: Vec::new(),
        })
    }

    fn check_var(&self, v: usize) -> Result<()> {
        if v >= self.names.len() {
            Err(Error::VariableOutOfRange {
                index: v,
                n_vars: self.names.len(),
            })
        } else {
            Ok(())
        }
    }

    pub fn add_linear(&mut self, target: usize, parent: usize, lag: usize, coeff: f64) -> Result<()> {
        self.check_var(target)?;
        self.check_var(parent)?;
        if lag == 0 {
            return Err(Error::InvalidModel("term lags must be at least 1".into()));
        }
        if !coeff.is_finite() {
            return Err(Error::InvalidModel("non-finite coefficient".into()));
        }
        self.terms[target].push(Term::Linear { parent, lag, coeff });
        Ok(())
    }

    pub fn add_product(&mut self, target: usize, first: NodeRef, second: NodeRef, coeff: f64) -> Result<()> {
        self.check_var(target)?;
        self.check_var(first.variable)?;
        self.check_var(second.variable)?;
        if first.lag == 0 || second.lag == 0 {
            return Err(Error::InvalidModel("term lags must be at least 1".into()));
        }
        if first == second {
            return Err(Error::InvalidModel("product factors must be distinct nodes".into()));
        }
        if !coeff.is_finite() {
            return Err(Error::InvalidModel("non-finite coefficient".into()));
        }
        self.terms[target].push(Term::Product { first, second, coeff });
        Ok(())
    }

    /// Sets the equal-time correlation of two innovations.
    pub fn add_correlation(&mut self, i: usize, j: usize, rho: f64) -> Result<()> {
        self.check_var(i)?;
        self.check_var(j)?;
        if i == j {
            return Err(Error::InvalidModel("correlation needs two distinct variables".into()));
        }
        if !(rho.abs() < 1.0) {
            return Err(Error::InvalidModel(format!("correlation {rho} outside (-1, 1)")));
        }
        let (a, b) = if i < j { (i, j) } else { (j, i) };
        self.correlations.retain(|&(x, y, _)| (x, y) != (a, b));
        self.correlations.push((a, b, rho));
        self.correlations.sort_by(|p, q| (p.0, p.1).cmp(&(q.0, q.1)));
        Ok(())
    }

    pub fn n_vars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn terms(&self, target: usize) -> &[Term] {
        &self.terms[target]
    }

    pub fn noise_std(&self) -> &[f64] {
        &self.noise_std
    }

    pub fn noise_kind(&self) -> NoiseKind {
        self.noise_kind
    }

    pub fn correlations(&self) -> &[(usize, usize, f64)] {
        &self.correlations
    }

    pub fn is_linear(&self) -> bool {
        self.terms
            .iter()
            .flatten()
            .all(|t| matches!(t, Term::Linear { .. }))
    }

    /// Largest lag of any term (0 without terms).
    pub fn max_lag(&self) -> usize {
        self.terms
            .iter()
            .flatten()
            .map(|t| match t {
                Term::Linear { lag, .. } => *lag,
                Term::Product { first, second, .. } => first.lag.max(second.lag),
            })
            .max()
            .unwrap_or(0)
    }

    /// Coefficient matrices `A_1..A_L` of the linear terms, `A_l[(target, parent)]`.
    pub fn coefficient_matrices(&self) -> Vec<DMatrix<f64>> {
        let n = self.n_vars();
        let mut mats = vec![DMatrix::zeros(n, n); self.max_lag()];
        for (target, terms) in self.terms.iter().enumerate() {
            for t in terms {
                if let Term::Linear { parent, lag, coeff } = *t {
                    mats[lag - 1][(target, parent)] += coeff;
                }
            }
        }
        mats
    }

    /// Equal-time covariance of the innovations.
    pub fn innovation_covariance(&self) -> DMatrix<f64> {
        let n = self.n_vars();
        let mut cov = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
            n,
            self.noise_std.iter().map(|s| s * s),
        ));
        for &(i, j, rho) in &self.correlations {
            let c = rho * self.noise_std[i] * self.noise_std[j];
            cov[(i, j)] = c;
            cov[(j, i)] = c;
        }
        cov
    }

    /// Spectral radius of the companion matrix of the linear part.
    pub fn spectral_radius(&self) -> f64 {
        let mats = self.coefficient_matrices();
        let n = self.n_vars();
        let l = mats.len();
        if l == 0 {
            return 0.0;
        }
        let mut comp = DMatrix::zeros(n * l, n * l);
        for (k, a) in mats.iter().enumerate() {
            comp.view_mut((0, k * n), (n, n)).copy_from(a);
        }
        for k in 1..l {
            for i in 0..n {
                comp[(k * n + i, (k - 1) * n + i)] = 1.0;
            }
        }
        // the unbounded QR iteration behind complex_eigenvalues can cycle on
        // sparse companion matrices, so cap it and fall back to Gelfand
        match nalgebra::linalg::Schur::try_new(comp.clone(), f64::EPSILON, 10_000) {
            Some(schur) => schur
                .complex_eigenvalues()
                .iter()
                .map(|z| math::sqrt(z.re * z.re + z.im * z.im))
                .fold(0.0, f64::max),
            None => gelfand_radius(comp),
        }
    }

    fn innovation_factor(&self) -> Result<DMatrix<f64>> {
        self.innovation_covariance()
            .cholesky()
            .map(|c| c.unpack())
            .ok_or_else(|| Error::InvalidModel("innovation correlations are not positive definite".into()))
    }
}

/// Spectral radius as the limit of `|F^(2^k)|^(1 / 2^k)`, renormalizing at
/// each squaring.
fn gelfand_radius(mut m: DMatrix<f64>) -> f64 {
    let mut log_scale = 0.0;
    let mut power = 1.0;
    for _ in 0..60 {
        let c = m.amax();
        if c == 0.0 {
            return 0.0;
        }
        m /= c;
        log_scale = 2.0 * (log_scale + math::ln(c));
        power *= 2.0;
        m = &m * &m;
    }
    let c = m.amax();
    if c == 0.0 {
        return 0.0;
    }
    math::exp((log_scale + math::ln(c)) / power)
}

/// Simulates `t_len` steps after discarding `burn_in` steps; starts from zero.
pub fn simulate(m: &StructuralModel, t_len: usize, seed: u64, burn_in: usize) -> Result<TimeSeriesDataset> {
    if t_len == 0 {
        return Err(Error::InvalidConfig("sample length must be at least 1".into()));
    }
    let radius = m.spectral_radius();
    if !(radius < 1.0) {
        return Err(Error::Unstable {
            spectral_radius: radius,
        });
    }
    let chol = m.innovation_factor()?;
    let n = m.n_vars();
    let total = burn_in + t_len;
    let mut x = vec![0.0; total * n];
    let mut g = rng::stream(seed, 0);
    let mut e = vec![0.0; n];
    let at = |x: &[f64], t: usize, node: NodeRef| -> f64 {
        if t >= node.lag {
            x[(t - node.lag) * n + node.variable]
        } else {
            0.0
        }
    };
    for t in 0..total {
        for v in e.iter_mut() {
            *v = StandardNormal.sample(&mut g);
        }
        for i in 0..n {
            let mut v: f64 = (0..=i).map(|j| chol[(i, j)] * e[j]).sum();
            for term in &m.terms[i] {
                v += match *term {
                    Term::Linear { parent, lag, coeff } => coeff * at(&x, t, NodeRef::new(parent, lag)),
                    Term::Product { first, second, coeff } => coeff * at(&x, t, first) * at(&x, t, second),
                };
            }
            if !v.is_finite() || v.abs() > OVERFLOW_LIMIT {
                return Err(Error::Overflow { step: t });
            }
            x[t * n + i] = v;
        }
    }
    TimeSeriesDataset::new(m.names.clone(), x.split_off(burn_in * n))
}

/// Time series graph of the nonzero structural dependencies. Correlated
/// innovations give dashed links where the innovation covariance is nonzero
/// and solid links where its inverse is nonzero.
pub fn implied_graph(m: &StructuralModel) -> Result<TimeSeriesGraph> {
    let mut g = TimeSeriesGraph::new(m.n_vars(), m.max_lag().max(1))?;
    for (target, terms) in m.terms.iter().enumerate() {
        for t in terms {
            match *t {
                Term::Linear { parent, lag, coeff } => {
                    if coeff != 0.0 {
                        g.add_directed(parent, lag, target)?;
                    }
                }
                Term::Product { first, second, coeff } => {
                    if coeff != 0.0 {
                        g.add_directed(first.variable, first.lag, target)?;
                        g.add_directed(second.variable, second.lag, target)?;
                    }
                }
            }
        }
    }
    if m.correlations.iter().any(|c| c.2 != 0.0) {
        let cov = m.innovation_covariance();
        let prec = cov
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::InvalidModel("singular innovation covariance".into()))?;
        g.enable_dashed();
        let n = m.n_vars();
        for i in 0..n {
            for j in i + 1..n {
                if cov[(i, j)] != 0.0 {
                    g.add_dashed(i, j)?;
                }
                if prec[(i, j)].abs() > 1e-12 * math::sqrt(prec[(i, i)] * prec[(j, j)]) {
                    g.add_contemporaneous(i, j)?;
                }
            }
        }
    }
    Ok(g)
}

/// Per-replica measure values over `n_ens` independent simulations; replica
/// `r` uses seed `combine(seed, r)`.
pub fn ensemble_values<F>(
    m: &StructuralModel,
    n_ens: usize,
    t_len: usize,
    seed: u64,
    burn_in: usize,
    measure: F,
) -> Result<Vec<Vec<f64>>>
where
    F: Fn(&TimeSeriesDataset, usize) -> Result<Vec<f64>> + Sync + Send,
{
    let results = par::map(n_ens, |r| {
        simulate(m, t_len, replica_seed(seed, r), burn_in)
            .and_then(|ds| measure(&ds, r))
            .map_err(|e| Error::Replica {
                index: r,
                source: Box::new(e),
            })
    });
    results.into_iter().collect()
}

pub fn replica_seed(seed: u64, replica: usize) -> u64 {
    rng::combine(seed, replica as u64)
}

/// Mean and sample standard deviation of every measure over an ensemble.
pub fn ensemble_stats<F>(
    m: &StructuralModel,
    n_ens: usize,
    t_len: usize,
    seed: u64,
    burn_in: usize,
    measure: F,
) -> Result<Vec<(f64, f64)>>
where
    F: Fn(&TimeSeriesDataset, usize) -> Result<Vec<f64>> + Sync + Send,
{
    if n_ens < 2 {
        return Err(Error::InvalidConfig("ensemble needs at least 2 replicas".into()));
    }
    let values = ensemble_values(m, n_ens, t_len, seed, burn_in, measure)?;
    let width = values[0].len();
    if let Some((r, v)) = values.iter().enumerate().find(|(_, v)| v.len() != width) {
        return Err(Error::Replica {
            index: r,
            source: Box::new(Error::DimensionMismatch {
                expected: width,
                found: v.len(),
            }),
        });
    }
    Ok((0..width)
        .map(|j| {
            let col: Vec<f64> = values.iter().map(|v| v[j]).collect();
            math::mean_std(&col)
        })
        .collect())
}

pub const DEFAULT_BURN_IN: usize = 1000;

fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| String::from(*s)).collect()
}

/// Linear triple X -> W -> Y with a direct X -> Y link at lag 2 and a common
/// autodependency `alpha`. `sigmas` are the innovation scales of X, W, Y.
pub fn model_xwy(alpha: f64, a: f64, b: f64, c: f64, sigmas: [f64; 3]) -> Result<StructuralModel> {
    let mut m = StructuralModel::new(names(&["X", "W", "Y"]), sigmas.to_vec())?;
    m.add_linear(0, 0, 1, alpha)?;
    m.add_linear(1, 1, 1, alpha)?;
    m.add_linear(1, 0, 1, a)?;
    m.add_linear(2, 2, 1, alpha)?;
    m.add_linear(2, 0, 2, c)?;
    m.add_linear(2, 1, 1, b)?;
    Ok(m)
}

/// As [`model_xwy`] but Y depends on the product `X(t-2) W(t-1)` with
/// coefficient `c * b` instead of on linear X and W terms.
pub fn model_xwy_nonlinear(alpha: f64, a: f64, b: f64, c: f64, sigmas: [f64; 3]) -> Result<StructuralModel> {
    let mut m = StructuralModel::new(names(&["X", "W", "Y"]), sigmas.to_vec())?;
    m.add_linear(0, 0, 1, alpha)?;
    m.add_linear(1, 1, 1, alpha)?;
    m.add_linear(1, 0, 1, a)?;
    m.add_linear(2, 2, 1, alpha)?;
    m.add_product(2, NodeRef::new(0, 2), NodeRef::new(1, 1), c * b)?;
    Ok(m)
}

/// Four interacting regions A, B, C, D: D drives B and C, B drives A, A
/// drives C; innovations of A and C, and of B and D, are correlated.
pub fn model_four_region() -> Result<StructuralModel> {
    let (a, b, c, d) = (0, 1, 2, 3);
    let mut m = StructuralModel::new(names(&["A", "B", "C", "D"]), vec![1.0; 4])?;
    m.add_linear(a, a, 1, 0.6)?;
    m.add_linear(a, b, 1, 0.4)?;
    m.add_linear(b, b, 1, 0.5)?;
    m.add_linear(b, d, 1, 0.5)?;
    m.add_linear(c, c, 1, 0.5)?;
    m.add_linear(c, d, 1, 0.4)?;
    m.add_linear(c, a, 1, 0.3)?;
    m.add_linear(d, d, 1, 0.7)?;
    m.add_correlation(a, c, 0.4)?;
    m.add_correlation(b, d, 0.4)?;
    Ok(m)
}
