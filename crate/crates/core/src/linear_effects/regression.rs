//! Ordinary least squares on standardized columns.

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};

use crate::math;

/// Relative singular value below which a design counts as singular.
pub const SINGULAR_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct OlsFit {
    /// Standardized coefficients, one per regressor.
    pub coefficients: Vec<f64>,
    pub std_errors: Vec<f64>,
}

/// Regresses `y` on `regressors` after standardizing all columns. `Err`
/// carries the indices of regressors involved in the rank deficiency.
pub fn standardized_ols(y: &[f64], regressors: &[&[f64]]) -> core::result::Result<OlsFit, Vec<usize>> {
    let n = y.len();
    let p = regressors.len();
    let standardize = |c: &[f64]| -> Option<Vec<f64>> {
        let (mean, std) = math::mean_pop_std(c.iter().copied());
        (std > 0.0).then(|| c.iter().map(|v| (v - mean) / std).collect())
    };
    let ys = standardize(y).ok_or_else(Vec::new)?;
    if p == 0 {
        return Ok(OlsFit {
            coefficients: Vec::new(),
            std_errors: Vec::new(),
        });
    }
    let mut cols = Vec::with_capacity(p);
    for (j, c) in regressors.iter().enumerate() {
        cols.push(standardize(c).ok_or_else(|| alloc::vec![j])?);
    }
    if n <= p + 1 {
        return Err((0..p).collect());
    }
    let x = DMatrix::from_fn(n, p, |r, c| cols[c][r]);
    let svd = x.clone().svd(true, true);
    let s = &svd.singular_values;
    let s_max = s.max();
    let s_min = s.min();
    let v_t = svd.v_t.as_ref().expect("requested V");
    if !(s_min > SINGULAR_TOLERANCE * s_max) {
        // regressors loading on the null direction
        let k = s.imin();
        let dir = v_t.row(k);
        let culprits = (0..p).filter(|&j| dir[j].abs() > 1e-6).collect();
        return Err(culprits);
    }
    let u = svd.u.as_ref().expect("requested U");
    let yv = DVector::from_vec(ys);
    let uty = u.transpose() * &yv;
    let scaled = DVector::from_fn(p, |i, _| uty[i] / s[i]);
    let beta = v_t.transpose() * scaled;
    let resid = &yv - &x * &beta;
    let sigma2 = resid.norm_squared() / (n - p - 1) as f64;
    let std_errors = (0..p)
        .map(|j| {
            let var: f64 = (0..p)
                .map(|i| {
                    let r = v_t[(i, j)] / s[i];
                    r * r
                })
                .sum();
            math::sqrt(sigma2 * var)
        })
        .collect();
    Ok(OlsFit {
        coefficients: beta.iter().copied().collect(),
        std_errors,
    })
}
