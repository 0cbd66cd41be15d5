//! Conditional mutual information of jointly Gaussian variables from a
//! covariance matrix.

use alloc::vec::Vec;
use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::math;

fn log_det(cov: &DMatrix<f64>, idx: &[usize]) -> Result<f64> {
    if idx.is_empty() {
        return Ok(0.0);
    }
    let sub = DMatrix::from_fn(idx.len(), idx.len(), |r, c| cov[(idx[r], idx[c])]);
    let chol = sub.cholesky().ok_or(Error::SingularCovariance)?;
    let l = chol.l_dirty();
    Ok(2.0 * (0..idx.len()).map(|i| math::ln(l[(i, i)])).sum::<f64>())
}

/// I(X;Y|Z) = 1/2 [ln|S_xz| + ln|S_yz| - ln|S_z| - ln|S_xyz|] for index sets
/// into a covariance matrix.
pub fn cmi_from_covariance(cov: &DMatrix<f64>, x: &[usize], y: &[usize], z: &[usize]) -> Result<f64> {
    let cat = |a: &[usize], b: &[usize]| -> Vec<usize> { a.iter().chain(b).copied().collect() };
    let xz = cat(x, z);
    let yz = cat(y, z);
    let xyz = cat(&cat(x, y), z);
    Ok(0.5 * (log_det(cov, &xz)? + log_det(cov, &yz)? - log_det(cov, z)? - log_det(cov, &xyz)?))
}

/// Sample covariance (divides by n) of the given columns.
pub(crate) fn covariance(columns: &[&[f64]]) -> DMatrix<f64> {
    let d = columns.len();
    let n = columns.first().map_or(0, |c| c.len());
    let means: Vec<f64> = columns.iter().map(|c| c.iter().sum::<f64>() / n as f64).collect();
    let mut cov = DMatrix::zeros(d, d);
    for a in 0..d {
        for b in a..d {
            let s: f64 = columns[a]
                .iter()
                .zip(columns[b])
                .map(|(u, v)| (u - means[a]) * (v - means[b]))
                .sum();
            cov[(a, b)] = s / n as f64;
            cov[(b, a)] = cov[(a, b)];
        }
    }
    cov
}

/// Gaussian CMI of sample columns.
pub(crate) fn cmi(x: &[&[f64]], y: &[&[f64]], z: &[&[f64]]) -> Result<f64> {
    let all: Vec<&[f64]> = x.iter().chain(y).chain(z).copied().collect();
    let cov = covariance(&all);
    let (dx, dy) = (x.len(), y.len());
    let xi: Vec<usize> = (0..dx).collect();
    let yi: Vec<usize> = (dx..dx + dy).collect();
    let zi: Vec<usize> = (dx + dy..all.len()).collect();
    cmi_from_covariance(&cov, &xi, &yi, &zi)
}
