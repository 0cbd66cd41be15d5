use super::*;
use alloc::vec;
use rand::SeedableRng;
use rand_distr::{Distribution, StandardNormal};

fn normals(n: usize, seed: u64) -> Vec<f64> {
    let mut r = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| StandardNormal.sample(&mut r)).collect()
}

fn correlated(n: usize, rho: f64, seed: u64) -> (Vec<f64>, Vec<f64>) {
    let a = normals(n, seed);
    let b = normals(n, seed + 1000);
    let s = math::sqrt(1.0 - rho * rho);
    let y = a.iter().zip(&b).map(|(u, v)| rho * u + s * v).collect();
    (a, y)
}

#[test]
fn mi_of_correlated_gaussians() {
    let (x, y) = correlated(10_000, 0.6, 1);
    let est = estimate_cmi(&x, &y, &[], &EstimatorConfig::value_estimation()).unwrap();
    let exact = -0.5 * math::ln(1.0 - 0.36);
    assert!((est.value - exact).abs() < 0.02, "{} vs {exact}", est.value);
    assert_eq!(est.n_samples, 10_000);
    assert_eq!(est.k_used, 10);
}

#[test]
fn independent_gaussians_near_zero() {
    let x = normals(10_000, 2);
    let y = normals(10_000, 3);
    let est = estimate_cmi(&x, &y, &[], &EstimatorConfig::value_estimation()).unwrap();
    assert!(est.value.abs() < 0.01, "{}", est.value);
}

#[test]
fn conditioning_removes_common_driver() {
    let z = normals(10_000, 4);
    let noise = normals(10_000, 5);
    let x = z.clone();
    let y: Vec<f64> = z.iter().zip(&noise).map(|(a, b)| 0.8 * a + b).collect();
    let est = estimate_cmi(&x, &y, &[&z], &EstimatorConfig::value_estimation()).unwrap();
    assert!(est.value.abs() < 0.02, "{}", est.value);
}

#[test]
fn symmetric_in_x_and_y_bit_exact() {
    let (x, y) = correlated(3000, 0.4, 6);
    let z = normals(3000, 7);
    for cfg in [EstimatorConfig::minimal_bias(), EstimatorConfig::value_estimation()] {
        let a = estimate_cmi(&x, &y, &[&z], &cfg).unwrap().value;
        let b = estimate_cmi(&y, &x, &[&z], &cfg).unwrap().value;
        assert_eq!(a.to_bits(), b.to_bits());
    }
    // brute-force path
    let a = estimate_cmi(&x[..200], &y[..200], &[], &EstimatorConfig::minimal_bias()).unwrap();
    let b = estimate_cmi(&y[..200], &x[..200], &[], &EstimatorConfig::minimal_bias()).unwrap();
    assert_eq!(a.value.to_bits(), b.value.to_bits());
}

/// Partial correlation of x and y given one z from pairwise correlations.
fn partial_corr(x: &[f64], y: &[f64], z: &[f64]) -> f64 {
    let corr = |a: &[f64], b: &[f64]| {
        let n = a.len() as f64;
        let ma = a.iter().sum::<f64>() / n;
        let mb = b.iter().sum::<f64>() / n;
        let sab: f64 = a.iter().zip(b).map(|(u, v)| (u - ma) * (v - mb)).sum();
        let saa: f64 = a.iter().map(|u| (u - ma) * (u - ma)).sum();
        let sbb: f64 = b.iter().map(|v| (v - mb) * (v - mb)).sum();
        sab / math::sqrt(saa * sbb)
    };
    let (rxy, rxz, ryz) = (corr(x, y), corr(x, z), corr(y, z));
    (rxy - rxz * ryz) / math::sqrt((1.0 - rxz * rxz) * (1.0 - ryz * ryz))
}

#[test]
fn gaussian_kind_matches_partial_correlation() {
    let z = normals(5000, 8);
    let a = normals(5000, 9);
    let b = normals(5000, 10);
    let x: Vec<f64> = z.iter().zip(&a).map(|(z, a)| 0.7 * z + a).collect();
    let y: Vec<f64> = z.iter().zip(&b).zip(&x).map(|((z, b), x)| 0.5 * z + b + 0.3 * x).collect();
    let rho = partial_corr(&x, &y, &z);
    let expected = -0.5 * math::ln(1.0 - rho * rho);
    let est = estimate_cmi(&x, &y, &[&z], &EstimatorConfig::gaussian()).unwrap();
    assert!((est.value - expected).abs() < 1e-12, "{} vs {expected}", est.value);
    assert_eq!(est.k_used, 0);
}

#[test]
fn knn_close_to_gaussian_oracle_with_conditioning() {
    let z = normals(10_000, 11);
    let a = normals(10_000, 12);
    let b = normals(10_000, 13);
    let x: Vec<f64> = z.iter().zip(&a).map(|(z, a)| 0.7 * z + a).collect();
    let y: Vec<f64> = z.iter().zip(&b).zip(&x).map(|((z, b), x)| 0.5 * z + b + 0.4 * x).collect();
    let rho = partial_corr(&x, &y, &z);
    let expected = -0.5 * math::ln(1.0 - rho * rho);
    let est = estimate_cmi(&x, &y, &[&z], &EstimatorConfig::value_estimation()).unwrap();
    assert!((est.value - expected).abs() < 0.02, "{} vs {expected}", est.value);
}

#[test]
fn collider_gives_negative_interaction_information() {
    let x = normals(5000, 14);
    let y = normals(5000, 15);
    let w: Vec<f64> = x.iter().zip(&y).map(|(a, b)| a + b).collect();
    let est = estimate_interaction_information(&[&x], &[&y], &[&w], &[], &EstimatorConfig::value_estimation())
        .unwrap();
    assert!(est.value < -0.2, "{}", est.value);
}

#[test]
fn chain_interaction_equals_mutual_information() {
    let x = normals(10_000, 16);
    let e1 = normals(10_000, 17);
    let e2 = normals(10_000, 18);
    let w: Vec<f64> = x.iter().zip(&e1).map(|(a, b)| 0.5 * a + b).collect();
    let y: Vec<f64> = w.iter().zip(&e2).map(|(a, b)| 0.5 * a + b).collect();
    let cfg = EstimatorConfig::value_estimation();
    let ii = estimate_interaction_information(&[&x], &[&y], &[&w], &[], &cfg).unwrap();
    let mi = estimate_cmi(&x, &y, &[], &cfg).unwrap();
    assert!(ii.value > 0.0);
    assert!((ii.value - mi.value).abs() < 0.02, "{} vs {}", ii.value, mi.value);
    // Gaussian oracle: corr(x, y) = 0.25 / sqrt(1.25 * 1.3125)
    let rho2 = 0.0625 / (1.25 * 1.3125);
    assert!((mi.value + 0.5 * math::ln(1.0 - rho2)).abs() < 0.02);
}

#[test]
fn independent_interaction_near_zero() {
    let x = normals(5000, 19);
    let y = normals(5000, 20);
    let w = normals(5000, 21);
    let est = estimate_interaction_information(&[&x], &[&y], &[&w], &[], &EstimatorConfig::value_estimation())
        .unwrap();
    assert!(est.value.abs() < 0.02, "{}", est.value);
}

#[test]
fn strong_coupling_hits_lower_p_bound() {
    let y = normals(500, 22);
    let e = normals(500, 23);
    let x: Vec<f64> = y.iter().zip(&e).map(|(a, b)| a + 1e-3 * b).collect();
    let cfg = EstimatorConfig {
        shuffle_count: 49,
        ..EstimatorConfig::value_estimation()
    };
    let p = shuffle_significance(&[&x], &[&y], &[], &cfg).unwrap();
    assert_eq!(p, 1.0 / 50.0);
}

#[test]
fn shuffle_requires_enough_surrogates() {
    let x = normals(100, 24);
    let cfg = EstimatorConfig {
        shuffle_count: 10,
        ..EstimatorConfig::value_estimation()
    };
    assert!(matches!(
        shuffle_significance(&[&x], &[&x], &[], &cfg),
        Err(Error::InvalidConfig(_))
    ));
}

#[test]
fn constant_column_does_not_crash() {
    let x = vec![3.0; 300];
    let y = normals(300, 25);
    let cfg = EstimatorConfig {
        shuffle_count: 19,
        ..EstimatorConfig::value_estimation()
    };
    let p = shuffle_significance(&[&x], &[&y], &[], &cfg).unwrap();
    assert!(p > 0.0 && p <= 1.0);
}

#[test]
fn too_few_samples_and_mismatch() {
    let x = normals(10, 26);
    let y = normals(10, 27);
    assert_eq!(
        estimate_cmi(&x, &y, &[], &EstimatorConfig::value_estimation()),
        Err(Error::TooFewSamples { n: 10, k: 10 })
    );
    assert_eq!(
        estimate_cmi(&x, &y[..9], &[], &EstimatorConfig::minimal_bias()),
        Err(Error::DimensionMismatch { expected: 10, found: 9 })
    );
}

#[test]
fn rescaling() {
    assert_eq!(rescale_to_correlation(0.0), 0.0);
    assert_eq!(rescale_to_correlation(-0.01), 0.0);
    let i = -0.5 * math::ln(1.0 - 0.36);
    assert!((rescale_to_correlation(i) - 0.6).abs() < 1e-12);
    assert!(rescale_to_correlation(0.3) > rescale_to_correlation(0.2));
}

#[test]
fn bootstrap_of_constant_is_degenerate() {
    let (lo, hi) = bootstrap_ci(|_| Ok(1.5), 50, 100, 0.68, 1).unwrap();
    assert_eq!((lo, hi), (1.5, 1.5));
}

#[test]
fn bootstrap_reports_failing_resample() {
    let err = bootstrap_ci(
        |rows| if rows[0] == rows[1] { Err(Error::NoUsableSamples) } else { Ok(0.0) },
        3,
        100,
        0.68,
        2,
    )
    .unwrap_err();
    assert!(matches!(err, Error::Resample { .. }));
}

#[test]
fn bootstrap_interval_of_mean() {
    let x = normals(400, 28);
    let mean = |rows: &[usize]| Ok(rows.iter().map(|&r| x[r]).sum::<f64>() / rows.len() as f64);
    let (lo, hi) = bootstrap_ci(mean, 400, 1000, 0.68, 3).unwrap();
    // standard error of the mean is 1 / 20
    assert!(((hi - lo) / 2.0 - 0.05).abs() < 0.01, "{lo} {hi}");
}

#[test]
fn estimate_interval_contains_value() {
    let (x, y) = correlated(800, 0.6, 29);
    let cfg = EstimatorConfig {
        bootstrap_count: 200,
        ..EstimatorConfig::value_estimation()
    };
    let est = estimate_cmi(&x, &y, &[], &cfg).unwrap();
    let (lo, hi) = est.ci.unwrap();
    assert!(lo <= est.value && est.value <= hi);
    assert!(hi - lo > 0.005 && hi - lo < 0.2, "{lo} {hi}");
}

#[test]
fn quantiles_interpolate() {
    let v = [1.0, 2.0, 3.0, 4.0];
    assert_eq!(quantile_sorted(&v, 0.0), 1.0);
    assert_eq!(quantile_sorted(&v, 1.0), 4.0);
    assert!((quantile_sorted(&v, 0.5) - 2.5).abs() < 1e-15);
}
