//! Nearest-neighbor conditional mutual information in the max norm.

use alloc::vec::Vec;

use super::digamma::digamma;
use super::kdtree::PointSet;
use crate::error::{Error, Result};

/// Multiplicity of every point's origin; all ones without resampling.
fn origin_counts(origins: Option<&[usize]>, n: usize) -> Vec<usize> {
    match origins {
        None => alloc::vec![1; n],
        Some(o) => {
            let top = o.iter().copied().max().map_or(0, |m| m + 1);
            let mut hist = alloc::vec![0usize; top];
            for &v in o {
                hist[v] += 1;
            }
            o.iter().map(|&v| hist[v]).collect()
        }
    }
}

/// I(X;Y|Z) = psi(k) - < psi(k_xz + 1) + psi(k_yz + 1) - psi(k_z + 1) >.
///
/// With `origins`, rows sharing an origin are copies of one sample (bootstrap
/// resampling); copies never count as each other's neighbors.
pub(crate) fn cmi(
    x: &[&[f64]],
    y: &[&[f64]],
    z: &[&[f64]],
    k: usize,
    origins: Option<&[usize]>,
) -> Result<f64> {
    let n = x[0].len();
    let joint: Vec<&[f64]> = x.iter().chain(y).chain(z).copied().collect();
    let xz: Vec<&[f64]> = x.iter().chain(z).copied().collect();
    let yz: Vec<&[f64]> = y.iter().chain(z).copied().collect();
    let joint_set = PointSet::new(&joint);
    let xz_set = PointSet::new(&xz);
    let yz_set = PointSet::new(&yz);
    let z_set = (!z.is_empty()).then(|| PointSet::new(z));
    let mult = origin_counts(origins, n);
    if let Some(&m) = mult.iter().max() {
        if n - m < k {
            return Err(Error::TooFewSamples { n: n - m + 1, k });
        }
    }

    let term = |i: usize| -> f64 {
        let q: Vec<f64> = joint.iter().map(|c| c[i]).collect();
        let eps = match origins {
            None => joint_set.kth_distance(&q, k, &|j| j == i),
            Some(o) => joint_set.kth_distance(&q, k, &|j| o[j] == o[i]),
        }
        .expect("enough neighbors checked above");
        // Copies of the query sit at distance zero and are inside every
        // nonzero radius.
        let own = if eps > 0.0 { mult[i] } else { 0 };
        let dx = x.len();
        let qxz: Vec<f64> = q[..dx].iter().chain(&q[dx + y.len()..]).copied().collect();
        let n_xz = xz_set.count_within(&qxz, eps) - own;
        let n_yz = yz_set.count_within(&q[dx..], eps) - own;
        let n_z = match &z_set {
            Some(s) => s.count_within(&q[dx + y.len()..], eps) - own,
            None => n - mult[i],
        };
        digamma((n_xz + 1) as f64) + digamma((n_yz + 1) as f64) - digamma((n_z + 1) as f64)
    };

    let terms = per_point(n, term);
    let mean = terms.iter().sum::<f64>() / n as f64;
    Ok(digamma(k as f64) - mean)
}

#[cfg(feature = "parallel")]
fn per_point(n: usize, f: impl Fn(usize) -> f64 + Sync + Send) -> Vec<f64> {
    use rayon::prelude::*;
    (0..n).into_par_iter().with_min_len(64).map(f).collect()
}

#[cfg(not(feature = "parallel"))]
fn per_point(n: usize, f: impl Fn(usize) -> f64) -> Vec<f64> {
    (0..n).map(f).collect()
}
