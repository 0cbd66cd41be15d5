//! Exact stationary covariances of stable linear models.

use alloc::vec::Vec;
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::estimators::cmi_from_covariance;
use crate::measures::MeasurePlan;
use crate::simulate::StructuralModel;
use crate::tsgraph::NodeRef;

/// Lag covariances `Gamma(h) = Cov(x(t + h), x(t))` of a stable linear model.
#[derive(Debug, Clone)]
pub struct StationaryCovariance {
    gammas: Vec<DMatrix<f64>>,
}

impl StationaryCovariance {
    /// Solves the stationary covariance equations and tabulates lag
    /// covariances up to `max_lag`.
    pub fn new(m: &StructuralModel, max_lag: usize) -> Result<Self> {
        if !m.is_linear() {
            return Err(Error::LinearModelsOnly);
        }
        let radius = m.spectral_radius();
        if !(radius < 1.0) {
            return Err(Error::Unstable {
                spectral_radius: radius,
            });
        }
        let n = m.n_vars();
        let mats = m.coefficient_matrices();
        let l = mats.len().max(1);
        let dim = n * l;
        let mut f = DMatrix::zeros(dim, dim);
        for (k, a) in mats.iter().enumerate() {
            f.view_mut((0, k * n), (n, n)).copy_from(a);
        }
        for k in 1..l {
            for i in 0..n {
                f[(k * n + i, (k - 1) * n + i)] = 1.0;
            }
        }
        let mut p = DMatrix::zeros(dim, dim);
        p.view_mut((0, 0), (n, n)).copy_from(&m.innovation_covariance());
        // P = sum_k F^k Q F^k' by repeated doubling
        let mut a = f.clone();
        for _ in 0..64 {
            let next = &p + &a * &p * a.transpose();
            let done = (&next - &p).amax() <= 1e-17 * next.amax();
            p = next;
            a = &a * &a;
            if done || a.amax() < 1e-300 {
                break;
            }
        }
        let mut gammas = Vec::with_capacity(max_lag + 1);
        let mut fh = p;
        for _ in 0..=max_lag {
            gammas.push(fh.view((0, 0), (n, n)).into_owned());
            fh = &f * fh;
        }
        Ok(Self { gammas })
    }

    pub fn max_lag(&self) -> usize {
        self.gammas.len() - 1
    }

    pub fn gamma(&self, h: usize) -> &DMatrix<f64> {
        &self.gammas[h]
    }

    /// Covariance of two lagged nodes.
    pub fn cov(&self, a: NodeRef, b: NodeRef) -> f64 {
        if a.lag <= b.lag {
            self.gammas[b.lag - a.lag][(a.variable, b.variable)]
        } else {
            self.gammas[a.lag - b.lag][(b.variable, a.variable)]
        }
    }

    pub fn node_covariance(&self, nodes: &[NodeRef]) -> Result<DMatrix<f64>> {
        let lo = nodes.iter().map(|n| n.lag).min().unwrap_or(0);
        let hi = nodes.iter().map(|n| n.lag).max().unwrap_or(0);
        if hi - lo > self.max_lag() {
            return Err(Error::WindowTooSmall {
                window: self.max_lag(),
                max_lag: hi - lo,
            });
        }
        Ok(DMatrix::from_fn(nodes.len(), nodes.len(), |r, c| self.cov(nodes[r], nodes[c])))
    }

    /// Exact value of a measure for the Gaussian process.
    pub fn evaluate(&self, plan: &MeasurePlan) -> Result<f64> {
        let nodes = plan.nodes();
        let cov = self.node_covariance(&nodes)?;
        let nx = plan.x.len();
        let nw = plan.mediators.len();
        let x: Vec<usize> = (0..nx).collect();
        let y = [nx];
        let w: Vec<usize> = (nx + 1..nx + 1 + nw).collect();
        let z: Vec<usize> = (nx + 1 + nw..nodes.len()).collect();
        let base = cmi_from_covariance(&cov, &x, &y, &z)?;
        if plan.kind.is_interaction() {
            let wz: Vec<usize> = w.iter().chain(&z).copied().collect();
            Ok(base - cmi_from_covariance(&cov, &x, &y, &wz)?)
        } else {
            Ok(base)
        }
    }
}
