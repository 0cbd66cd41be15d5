//! Multivariate time series storage and lag-aligned sample extraction.

use alloc::collections::BTreeSet;
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::math;
use crate::tsgraph::NodeRef;

/// A T x N matrix of samples (row = time step) with variable names and an
/// optional per-row usability mask.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeSeriesDataset {
    values: Vec<f64>,
    n_rows: usize,
    names: Vec<String>,
    mask: Option<Vec<bool>>,
    time_step: f64,
}

impl TimeSeriesDataset {
    /// Builds a dataset from row-major values.
    pub fn new(names: Vec<String>, values: Vec<f64>) -> Result<Self> {
        Self::new_masked(names, values, None)
    }

    /// As [`Self::new`] with a row mask; masked rows may hold non-finite
    /// values.
    pub fn new_masked(names: Vec<String>, values: Vec<f64>, mask: Option<Vec<bool>>) -> Result<Self> {
        let n_vars = names.len();
        if n_vars == 0 {
            return Err(Error::InvalidDataset("no variables".into()));
        }
        if values.is_empty() {
            return Err(Error::InvalidDataset("no rows".into()));
        }
        if values.len() % n_vars != 0 {
            return Err(Error::InvalidDataset(format!(
                "{} values do not fill rows of {n_vars} columns",
                values.len()
            )));
        }
        let mut seen = BTreeSet::new();
        for name in &names {
            if !seen.insert(name.as_str()) {
                return Err(Error::DuplicateName(name.clone()));
            }
        }
        let n_rows = values.len() / n_vars;
        let ds = Self {
            values,
            n_rows,
            names,
            mask: None,
            time_step: 1.0,
        };
        match mask {
            Some(m) => ds.with_mask(m),
            None => {
                ds.check_finite()?;
                Ok(ds)
            }
        }
    }

    /// Builds a dataset from equally long columns.
    pub fn from_columns(names: Vec<String>, columns: &[Vec<f64>]) -> Result<Self> {
        if columns.len() != names.len() {
            return Err(Error::InvalidDataset(format!(
                "{} names for {} columns",
                names.len(),
                columns.len()
            )));
        }
        let n_rows = columns.first().map_or(0, Vec::len);
        if let Some(bad) = columns.iter().position(|c| c.len() != n_rows) {
            return Err(Error::InvalidDataset(format!(
                "column `{}` has {} rows, expected {n_rows}",
                names[bad],
                columns[bad].len()
            )));
        }
        let mut values = Vec::with_capacity(n_rows * columns.len());
        for t in 0..n_rows {
            values.extend(columns.iter().map(|c| c[t]));
        }
        Self::new(names, values)
    }

    pub fn with_mask(mut self, mask: Vec<bool>) -> Result<Self> {
        if mask.len() != self.n_rows {
            return Err(Error::InvalidDataset(format!(
                "mask has {} entries for {} rows",
                mask.len(),
                self.n_rows
            )));
        }
        self.mask = Some(mask);
        self.check_finite()?;
        Ok(self)
    }

    pub fn with_time_step(mut self, time_step: f64) -> Self {
        self.time_step = time_step;
        self
    }

    fn check_finite(&self) -> Result<()> {
        for t in 0..self.n_rows {
            if !self.is_usable(t) {
                continue;
            }
            for (j, v) in self.row(t).iter().enumerate() {
                if !v.is_finite() {
                    return Err(Error::InvalidDataset(format!(
                        "non-finite value in row {t}, column `{}`",
                        self.names[j]
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn n_vars(&self) -> usize {
        self.names.len()
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.names.iter().position(|n| n == name)
    }

    pub fn mask(&self) -> Option<&[bool]> {
        self.mask.as_deref()
    }

    pub fn time_step(&self) -> f64 {
        self.time_step
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn row(&self, t: usize) -> &[f64] {
        let n = self.n_vars();
        &self.values[t * n..(t + 1) * n]
    }

    pub fn value(&self, t: usize, variable: usize) -> f64 {
        self.values[t * self.n_vars() + variable]
    }

    pub fn column(&self, variable: usize) -> Vec<f64> {
        (0..self.n_rows).map(|t| self.value(t, variable)).collect()
    }

    pub fn is_usable(&self, t: usize) -> bool {
        self.mask.as_ref().map_or(true, |m| m[t])
    }

    /// Number of unmasked rows.
    pub fn n_usable(&self) -> usize {
        (0..self.n_rows).filter(|&t| self.is_usable(t)).count()
    }

    /// Rescales every column to zero mean and unit (population) variance over
    /// the unmasked rows.
    pub fn standardize(&self) -> Result<Self> {
        let n = self.n_vars();
        let usable: Vec<usize> = (0..self.n_rows).filter(|&t| self.is_usable(t)).collect();
        if usable.is_empty() {
            return Err(Error::NoUsableSamples);
        }
        let mut out = self.clone();
        for j in 0..n {
            let (mean, std) = math::mean_pop_std(usable.iter().map(|&t| self.value(t, j)));
            if !(std > 0.0) || std <= f64::EPSILON * mean.abs() {
                return Err(Error::ZeroVariance {
                    column: self.names[j].clone(),
                });
            }
            for t in 0..self.n_rows {
                out.values[t * n + j] = (self.values[t * n + j] - mean) / std;
            }
        }
        Ok(out)
    }

    /// Keeps only the listed variables, in the given order.
    pub fn select(&self, variables: &[usize]) -> Result<Self> {
        let n = self.n_vars();
        if let Some(&bad) = variables.iter().find(|&&v| v >= n) {
            return Err(Error::VariableOutOfRange { index: bad, n_vars: n });
        }
        let names = variables.iter().map(|&v| self.names[v].clone()).collect();
        let mut values = Vec::with_capacity(self.n_rows * variables.len());
        for t in 0..self.n_rows {
            values.extend(variables.iter().map(|&v| self.value(t, v)));
        }
        Ok(Self::new_masked(names, values, self.mask.clone())?.with_time_step(self.time_step))
    }

    /// Lag-aligned samples of `nodes`: row `s` holds each node's variable at
    /// time `t - lag` for the `s`-th usable reference time `t`.
    pub fn lagged_matrix(&self, nodes: &[NodeRef]) -> Result<LaggedSamples> {
        self.lagged_matrix_from(nodes, 0)
    }

    /// As [`Self::lagged_matrix`] but never starting before reference time
    /// `min_start`, so that several node sets can share one alignment.
    pub fn lagged_matrix_from(&self, nodes: &[NodeRef], min_start: usize) -> Result<LaggedSamples> {
        let n = self.n_vars();
        if let Some(bad) = nodes.iter().find(|nd| nd.variable >= n) {
            return Err(Error::VariableOutOfRange {
                index: bad.variable,
                n_vars: n,
            });
        }
        let max_lag = nodes.iter().map(|nd| nd.lag).max().unwrap_or(0);
        let start = max_lag.max(min_start);
        let mut times = Vec::new();
        if start < self.n_rows {
            for t in start..self.n_rows {
                if nodes.iter().all(|nd| self.is_usable(t - nd.lag)) && self.is_usable(t) {
                    times.push(t);
                }
            }
        }
        if times.is_empty() {
            return Err(Error::NoUsableSamples);
        }
        let columns = nodes
            .iter()
            .map(|nd| times.iter().map(|&t| self.value(t - nd.lag, nd.variable)).collect())
            .collect();
        Ok(LaggedSamples {
            columns,
            times,
            max_lag: start,
        })
    }
}

/// Column-major lag-aligned samples.
#[derive(Debug, Clone, PartialEq)]
pub struct LaggedSamples {
    /// One column per requested node.
    pub columns: Vec<Vec<f64>>,
    /// Reference time of every row.
    pub times: Vec<usize>,
    /// Earliest admissible reference time used for the alignment.
    pub max_lag: usize,
}

impl LaggedSamples {
    pub fn n_samples(&self) -> usize {
        self.times.len()
    }

    /// Rows picked by index, with repetition allowed.
    pub fn resample(&self, rows: &[usize]) -> Self {
        Self {
            columns: self
                .columns
                .iter()
                .map(|c| rows.iter().map(|&r| c[r]).collect())
                .collect(),
            times: rows.iter().map(|&r| self.times[r]).collect(),
            max_lag: self.max_lag,
        }
    }
}
