//! Run options shared by the command line and TOML config files. Every flag
//! given on the command line overrides the file.

use std::path::{Path, PathBuf};

use clap::Args;
use serde::{Deserialize, Serialize};

use crate::error::{AppError, Result};

#[derive(Debug, Clone, Default, PartialEq, Args, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Options {
    /// Dataset CSV (header row, optional 0/1 `mask` column).
    #[arg(long, global = true)]
    pub data: Option<PathBuf>,
    /// Graph file (`source, target, lag, type` per line).
    #[arg(long, global = true)]
    pub graph: Option<PathBuf>,
    /// Model spec file (`key = value` lines).
    #[arg(long, global = true)]
    pub model: Option<PathBuf>,
    /// Largest lag considered.
    #[arg(long, global = true)]
    pub tau_max: Option<usize>,
    /// Nearest neighbors of the CMI estimator.
    #[arg(long, global = true)]
    pub k: Option<usize>,
    /// Use the Gaussian plug-in estimator instead of nearest neighbors.
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gaussian: Option<bool>,
    /// Link threshold I* in nats.
    #[arg(long, global = true)]
    pub threshold: Option<f64>,
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Ensemble size.
    #[arg(long, global = true)]
    pub ensemble: Option<usize>,
    /// Bootstrap replicates for confidence intervals (0 = none).
    #[arg(long, global = true)]
    pub bootstrap: Option<usize>,
    /// Output directory.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Measure kind (TE, ITY, MIT, ITX, MITP, IIX, MII, linear_CE, ...).
    #[arg(long, global = true)]
    pub kind: Option<String>,
    #[arg(long, global = true)]
    pub source: Option<String>,
    #[arg(long, global = true)]
    pub target: Option<String>,
    /// Lags to evaluate; all lags up to tau_max when omitted.
    #[arg(long, global = true, value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub lag: Vec<usize>,
    /// Mediator variables (repeat or comma-separate).
    #[arg(long, global = true, value_delimiter = ',')]
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub mediator: Vec<String>,
    /// Report normalized betweenness.
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub normalized: Option<bool>,
    /// Reduced workload.
    #[arg(long, global = true, num_args = 0..=1, default_missing_value = "true")]
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quick: Option<bool>,
}

impl Options {
    /// Fills every unset field from `file`.
    pub fn merged(self, file: Options) -> Options {
        fn vec<T>(a: Vec<T>, b: Vec<T>) -> Vec<T> {
            if a.is_empty() {
                b
            } else {
                a
            }
        }
        Options {
            data: self.data.or(file.data),
            graph: self.graph.or(file.graph),
            model: self.model.or(file.model),
            tau_max: self.tau_max.or(file.tau_max),
            k: self.k.or(file.k),
            gaussian: self.gaussian.or(file.gaussian),
            threshold: self.threshold.or(file.threshold),
            seed: self.seed.or(file.seed),
            ensemble: self.ensemble.or(file.ensemble),
            bootstrap: self.bootstrap.or(file.bootstrap),
            out: self.out.or(file.out),
            kind: self.kind.or(file.kind),
            source: self.source.or(file.source),
            target: self.target.or(file.target),
            lag: vec(self.lag, file.lag),
            mediator: vec(self.mediator, file.mediator),
            normalized: self.normalized.or(file.normalized),
            quick: self.quick.or(file.quick),
        }
    }

    pub fn quick(&self) -> bool {
        self.quick.unwrap_or(false)
    }

    pub fn normalized(&self) -> bool {
        self.normalized.unwrap_or(false)
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(0)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("."))
    }
}

pub fn load_config(path: &Path) -> Result<Options> {
    let text = std::fs::read_to_string(path).map_err(|e| AppError::io(path, e))?;
    parse_config(&text, &path.display().to_string())
}

pub fn parse_config(text: &str, origin: &str) -> Result<Options> {
    toml::from_str(text).map_err(|e| {
        let line = e
            .span()
            .map_or(1, |s| text[..s.start.min(text.len())].matches('\n').count() + 1);
        AppError::parse(origin, line, e.message().to_string())
    })
}
