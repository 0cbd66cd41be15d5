//! Conditional mutual information estimation: nearest-neighbor and Gaussian
//! estimators, shuffle significance and bootstrap intervals.

use alloc::format;
use alloc::vec::Vec;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::{math, par, rng};

mod digamma;
mod gaussian;
mod kdtree;
mod knn;

pub use digamma::digamma;
pub use gaussian::cmi_from_covariance;

const SHUFFLE_STREAM: u64 = 0x5348_5546;
const BOOTSTRAP_STREAM: u64 = 0x424f_4f54;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EstimatorKind {
    /// Nearest-neighbor counting in the max norm.
    Knn,
    /// Plug-in Gaussian estimate from sample covariances.
    Gaussian,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EstimatorConfig {
    pub kind: EstimatorKind,
    pub k: usize,
    /// Tie-breaking noise amplitude relative to each column's standard deviation.
    pub tie_noise: f64,
    pub seed: u64,
    pub shuffle_count: usize,
    pub bootstrap_count: usize,
    /// Coverage of bootstrap intervals.
    pub ci_level: f64,
}

impl Default for EstimatorConfig {
    fn default() -> Self {
        Self::value_estimation()
    }
}

impl EstimatorConfig {
    fn with_k(k: usize) -> Self {
        Self {
            kind: EstimatorKind::Knn,
            k,
            tie_noise: 1e-8,
            seed: 0,
            shuffle_count: 0,
            bootstrap_count: 0,
            ci_level: 0.68,
        }
    }

    /// k = 100, for independence decisions.
    pub fn independence_testing() -> Self {
        Self::with_k(100)
    }

    /// k = 10, for estimating values.
    pub fn value_estimation() -> Self {
        Self::with_k(10)
    }

    /// k = 1, smallest bias.
    pub fn minimal_bias() -> Self {
        Self::with_k(1)
    }

    pub fn gaussian() -> Self {
        Self {
            kind: EstimatorKind::Gaussian,
            ..Self::with_k(10)
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k == 0 {
            return Err(Error::InvalidConfig("k must be at least 1".into()));
        }
        if !(self.tie_noise >= 0.0 && self.tie_noise.is_finite()) {
            return Err(Error::InvalidConfig("tie noise must be finite and >= 0".into()));
        }
        if !(self.ci_level > 0.0 && self.ci_level < 1.0) {
            return Err(Error::InvalidConfig("ci level must lie in (0, 1)".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CmiEstimate {
    /// Estimate in nats; may be slightly negative.
    pub value: f64,
    pub n_samples: usize,
    /// Neighbor count used; 0 for the Gaussian estimator.
    pub k_used: usize,
    pub p_value: Option<f64>,
    pub ci: Option<(f64, f64)>,
}

/// Maps nats onto a partial-correlation-like scale, `sqrt(1 - exp(-2 I))`;
/// negative inputs map to 0.
pub fn rescale_to_correlation(i_nats: f64) -> f64 {
    if !(i_nats > 0.0) {
        return 0.0;
    }
    math::sqrt(-math::expm1(-2.0 * i_nats))
}

/// Estimation problem with tie noise already applied.
struct Prepared {
    x: Vec<Vec<f64>>,
    y: Vec<Vec<f64>>,
    w: Vec<Vec<f64>>,
    z: Vec<Vec<f64>>,
    cfg: EstimatorConfig,
    n: usize,
}

fn jitter(column: &[f64], cfg: &EstimatorConfig) -> Vec<f64> {
    if cfg.kind == EstimatorKind::Gaussian || cfg.tie_noise == 0.0 {
        return column.to_vec();
    }
    let (_, std) = math::mean_pop_std(column.iter().copied());
    let amp = if std > 0.0 { cfg.tie_noise * std } else { cfg.tie_noise };
    let mut r = rng::stream(rng::combine(cfg.seed, rng::column_hash(column)), 0);
    column.iter().map(|v| v + amp * r.random::<f64>()).collect()
}

impl Prepared {
    fn new(x: &[&[f64]], y: &[&[f64]], w: &[&[f64]], z: &[&[f64]], cfg: &EstimatorConfig) -> Result<Self> {
        cfg.validate()?;
        if x.is_empty() || y.is_empty() {
            return Err(Error::InvalidConfig("x and y need at least one column".into()));
        }
        let n = x[0].len();
        for c in x.iter().chain(y).chain(w).chain(z) {
            if c.len() != n {
                return Err(Error::DimensionMismatch {
                    expected: n,
                    found: c.len(),
                });
            }
            if c.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidDataset("non-finite sample".into()));
            }
        }
        if cfg.kind == EstimatorKind::Knn && n <= cfg.k {
            return Err(Error::TooFewSamples { n, k: cfg.k });
        }
        if n < 2 {
            return Err(Error::TooFewSamples { n, k: cfg.k });
        }
        let prep = |cols: &[&[f64]]| -> Vec<Vec<f64>> { cols.iter().map(|c| jitter(c, cfg)).collect() };
        Ok(Self {
            x: prep(x),
            y: prep(y),
            w: prep(w),
            z: prep(z),
            cfg: *cfg,
            n,
        })
    }

    /// I(X;Y|Z), or I(X;Y|W,Z) with `with_w`, optionally on resampled rows
    /// and with a row permutation applied to X.
    fn cmi(&self, rows: Option<&[usize]>, x_perm: Option<&[usize]>, with_w: bool) -> Result<f64> {
        let gather = |cols: &[Vec<f64>], perm: Option<&[usize]>| -> Vec<Vec<f64>> {
            cols.iter()
                .map(|c| {
                    let pick = |r: usize| perm.map_or(r, |p| p[r]);
                    match rows {
                        Some(rs) => rs.iter().map(|&r| c[pick(r)]).collect(),
                        None if perm.is_some() => (0..c.len()).map(|r| c[pick(r)]).collect(),
                        None => c.clone(),
                    }
                })
                .collect()
        };
        let xs = gather(&self.x, x_perm);
        let ys = gather(&self.y, None);
        let mut zs = gather(&self.z, None);
        if with_w {
            let ws = gather(&self.w, None);
            zs.splice(0..0, ws);
        }
        let xr: Vec<&[f64]> = xs.iter().map(Vec::as_slice).collect();
        let yr: Vec<&[f64]> = ys.iter().map(Vec::as_slice).collect();
        let zr: Vec<&[f64]> = zs.iter().map(Vec::as_slice).collect();
        match self.cfg.kind {
            EstimatorKind::Knn => knn::cmi(&xr, &yr, &zr, self.cfg.k, rows),
            EstimatorKind::Gaussian => gaussian::cmi(&xr, &yr, &zr),
        }
    }

    fn interaction(&self, rows: Option<&[usize]>) -> Result<f64> {
        Ok(self.cmi(rows, None, false)? - self.cmi(rows, None, true)?)
    }

    fn shuffle_p(&self, observed: f64) -> Result<f64> {
        let count = self.cfg.shuffle_count;
        if count < 19 {
            return Err(Error::InvalidConfig(format!(
                "shuffle test needs at least 19 surrogates, got {count}"
            )));
        }
        let seed = rng::combine(self.cfg.seed, SHUFFLE_STREAM);
        let surrogates = par::map(count, |r| {
            let mut perm: Vec<usize> = (0..self.n).collect();
            perm.shuffle(&mut rng::stream(seed, r as u64));
            self.cmi(None, Some(&perm), false)
        });
        let mut exceed = 0usize;
        for s in surrogates {
            if s? >= observed {
                exceed += 1;
            }
        }
        Ok((1 + exceed) as f64 / (count + 1) as f64)
    }

    fn interval(&self, value: f64, interaction: bool) -> Result<(f64, f64)> {
        let reps = bootstrap_replicates(
            |rows| {
                if interaction {
                    self.interaction(Some(rows))
                } else {
                    self.cmi(Some(rows), None, false)
                }
            },
            self.n,
            self.cfg.bootstrap_count,
            self.cfg.seed,
        )?;
        Ok(centered_interval(value, &reps, self.cfg.ci_level))
    }
}

fn finish(prep: &Prepared, value: f64, p_value: Option<f64>, interaction: bool) -> Result<CmiEstimate> {
    let ci = if prep.cfg.bootstrap_count > 0 {
        Some(prep.interval(value, interaction)?)
    } else {
        None
    };
    Ok(CmiEstimate {
        value,
        n_samples: prep.n,
        k_used: match prep.cfg.kind {
            EstimatorKind::Knn => prep.cfg.k,
            EstimatorKind::Gaussian => 0,
        },
        p_value,
        ci,
    })
}

/// I(X;Y|Z) in nats for univariate `x` and `y`; an empty `z` gives I(X;Y).
pub fn estimate_cmi(x: &[f64], y: &[f64], z: &[&[f64]], cfg: &EstimatorConfig) -> Result<CmiEstimate> {
    estimate_cmi_multi(&[x], &[y], z, cfg)
}

/// I(X;Y|Z) in nats for multivariate `x` and `y`. Runs a shuffle test and a
/// bootstrap interval when the corresponding counts in `cfg` are nonzero.
pub fn estimate_cmi_multi(
    x: &[&[f64]],
    y: &[&[f64]],
    z: &[&[f64]],
    cfg: &EstimatorConfig,
) -> Result<CmiEstimate> {
    let prep = Prepared::new(x, y, &[], z, cfg)?;
    let value = prep.cmi(None, None, false)?;
    let p = if cfg.shuffle_count > 0 {
        Some(prep.shuffle_p(value)?)
    } else {
        None
    };
    finish(&prep, value, p, false)
}

/// I(X;Y|Z) - I(X;Y|W,Z), both terms on the same samples and tie noise.
pub fn estimate_interaction_information(
    x: &[&[f64]],
    y: &[&[f64]],
    w: &[&[f64]],
    z: &[&[f64]],
    cfg: &EstimatorConfig,
) -> Result<CmiEstimate> {
    if w.is_empty() {
        return Err(Error::InvalidConfig("interaction information needs a nonempty W".into()));
    }
    let prep = Prepared::new(x, y, w, z, cfg)?;
    let value = prep.interaction(None)?;
    finish(&prep, value, None, true)
}

/// Shuffle-test p-value of I(X;Y|Z): X is permuted across rows for each of
/// `cfg.shuffle_count` surrogates; p = (1 + #{surrogate >= observed}) / (count + 1).
pub fn shuffle_significance(
    x: &[&[f64]],
    y: &[&[f64]],
    z: &[&[f64]],
    cfg: &EstimatorConfig,
) -> Result<f64> {
    let prep = Prepared::new(x, y, &[], z, cfg)?;
    let observed = prep.cmi(None, None, false)?;
    prep.shuffle_p(observed)
}

/// Values of `measure` over `n` resamples (with replacement) of `n_rows` rows.
/// Replica `r` draws from its own stream, so results do not depend on threads.
pub fn bootstrap_replicates<F>(measure: F, n_rows: usize, n: usize, seed: u64) -> Result<Vec<f64>>
where
    F: Fn(&[usize]) -> Result<f64> + Sync + Send,
{
    if n_rows == 0 {
        return Err(Error::NoUsableSamples);
    }
    let seed = rng::combine(seed, BOOTSTRAP_STREAM);
    let values = par::map(n, |r| {
        let mut g = rng::stream(seed, r as u64);
        let mut rows: Vec<usize> = (0..n_rows).map(|_| g.random_range(0..n_rows)).collect();
        rows.sort_unstable();
        measure(&rows).map_err(|e| Error::Resample {
            index: r,
            source: alloc::boxed::Box::new(e),
        })
    });
    values.into_iter().collect()
}

/// Percentile bootstrap interval of `measure` at coverage `level`.
pub fn bootstrap_ci<F>(measure: F, n_rows: usize, n: usize, level: f64, seed: u64) -> Result<(f64, f64)>
where
    F: Fn(&[usize]) -> Result<f64> + Sync + Send,
{
    if n < 100 {
        return Err(Error::InvalidConfig(format!("bootstrap needs at least 100 resamples, got {n}")));
    }
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidConfig("ci level must lie in (0, 1)".into()));
    }
    let mut reps = bootstrap_replicates(measure, n_rows, n, seed)?;
    reps.sort_by(f64::total_cmp);
    let tail = (1.0 - level) / 2.0;
    Ok((quantile_sorted(&reps, tail), quantile_sorted(&reps, 1.0 - tail)))
}

/// Percentile interval of `replicates` shifted so that its median sits on
/// `value`; keeps the bootstrap spread while always containing the estimate.
pub fn centered_interval(value: f64, replicates: &[f64], level: f64) -> (f64, f64) {
    let mut reps = replicates.to_vec();
    reps.sort_by(f64::total_cmp);
    let tail = (1.0 - level) / 2.0;
    let lo = quantile_sorted(&reps, tail);
    let mid = quantile_sorted(&reps, 0.5);
    let hi = quantile_sorted(&reps, 1.0 - tail);
    (value - (mid - lo), value + (hi - mid))
}

/// Linear-interpolation quantile of sorted data.
pub fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let n = sorted.len();
    if n == 0 {
        return f64::NAN;
    }
    let h = (n - 1) as f64 * q.clamp(0.0, 1.0);
    let lo = h as usize;
    let hi = (lo + 1).min(n - 1);
    sorted[lo] + (h - lo as f64) * (sorted[hi] - sorted[lo])
}

#[cfg(test)]
mod tests;
