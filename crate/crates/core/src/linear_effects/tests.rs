use super::*;
use crate::measures::{MeasureKind, MeasurePlan};
use crate::simulate::{implied_graph, model_xwy, model_xwy_nonlinear, simulate, DEFAULT_BURN_IN};
use alloc::string::String;
use alloc::vec;

const X: usize = 0;
const W: usize = 1;
const Y: usize = 2;

fn n(v: usize, l: usize) -> NodeRef {
    NodeRef::new(v, l)
}

#[test]
fn stationary_variances() {
    let ar = model_xwy(0.5, 0.0, 0.0, 0.0, [1.0; 3]).unwrap();
    assert!((stationary_variance(&ar, X).unwrap() - 4.0 / 3.0).abs() < 1e-12);
    let white = StructuralModel::new(vec![String::from("A")], vec![2.0]).unwrap();
    assert!((stationary_variance(&white, 0).unwrap() - 4.0).abs() < 1e-12);
    let nl = model_xwy_nonlinear(0.5, 0.5, 0.5, 0.5, [1.0; 3]).unwrap();
    assert_eq!(stationary_variance(&nl, 0), Err(Error::LinearModelsOnly));
}

#[test]
fn lag_covariances_of_ar1() {
    let ar = model_xwy(0.6, 0.0, 0.0, 0.0, [1.0; 3]).unwrap();
    let cov = StationaryCovariance::new(&ar, 5).unwrap();
    let g0 = 1.0 / (1.0 - 0.36);
    for h in 0..=5 {
        let expected = g0 * libm::pow(0.6, h as f64);
        assert!((cov.cov(n(X, 0), n(X, h)) - expected).abs() < 1e-12);
        assert!((cov.cov(n(X, h), n(X, 0)) - expected).abs() < 1e-12);
    }
}

#[test]
fn closed_forms() {
    assert!((analytic_mitp_triple(0.5, 0.5, 0.5, 1.0, 1.0, 1.0) - 0.5 * math::ln(1.45)).abs() < 1e-15);
    assert_eq!(analytic_mitp_triple(0.5, 0.5, -0.25, 1.0, 1.0, 1.0), 0.0);
    for (a, b) in [(0.5, 0.5), (0.3, -0.8), (1.2, 0.1)] {
        assert_eq!(
            analytic_mii_triple(a, b, 0.0, 1.3, 0.7, 1.1),
            analytic_mitp_triple(a, b, 0.0, 1.3, 0.7, 1.1)
        );
    }
    let mii = analytic_mii_triple(0.5, 0.5, -0.75, 1.0, 1.0, 1.0);
    assert!((mii - (0.5 * math::ln(1.2) - 0.5 * math::ln(1.45))).abs() < 1e-15);
}

#[test]
fn closed_forms_match_population_covariance() {
    // the closed forms hold for any autodependency strength
    for &(alpha, a, b, c, sx, sw, sy) in &[
        (0.5, 0.5, 0.5, 0.5, 1.0, 1.0, 1.0),
        (0.0, 0.5, 0.5, -0.25, 1.0, 1.0, 1.0),
        (0.75, -0.4, 0.9, 0.3, 1.5, 0.6, 1.2),
        (0.3, 1.0, -0.5, -0.75, 0.8, 1.1, 0.9),
    ] {
        let m = model_xwy(alpha, a, b, c, [sx, sw, sy]).unwrap();
        let g = implied_graph(&m).unwrap();
        let cov = StationaryCovariance::new(&m, 8).unwrap();
        let (s, t) = (n(X, 2), n(Y, 0));
        let mitp = cov
            .evaluate(&MeasurePlan::new(&g, MeasureKind::Mitp, s, t, &[]).unwrap())
            .unwrap();
        assert!((mitp - analytic_mitp_triple(a, b, c, sx, sw, sy)).abs() < 1e-10, "{alpha} {mitp}");
        let mii = cov
            .evaluate(&MeasurePlan::new(&g, MeasureKind::Mii, s, t, &[W]).unwrap())
            .unwrap();
        assert!((mii - analytic_mii_triple(a, b, c, sx, sw, sy)).abs() < 1e-10, "{alpha} {mii}");
    }
}

#[test]
fn simulated_covariances_match_stationary_solution() {
    let m = model_xwy(0.5, 0.5, 0.5, 0.5, [1.0; 3]).unwrap();
    let cov = StationaryCovariance::new(&m, 2).unwrap();
    let ds = simulate(&m, 20_000, 3, DEFAULT_BURN_IN).unwrap();
    for (p, q) in [(n(X, 0), n(X, 0)), (n(Y, 0), n(Y, 0)), (n(Y, 0), n(X, 2)), (n(W, 0), n(X, 1))] {
        let s = ds.lagged_matrix(&[p, q]).unwrap();
        let prod: alloc::vec::Vec<f64> = s.columns[0].iter().zip(&s.columns[1]).map(|(u, v)| u * v).collect();
        let (mean, sd) = math::mean_std(&prod);
        // autocorrelated products: allow for an effective sample size of 1/10
        let se = sd / math::sqrt(prod.len() as f64 / 10.0);
        assert!((mean - cov.cov(p, q)).abs() < 3.0 * se, "{p} {q}: {mean} vs {}", cov.cov(p, q));
    }
}

#[test]
fn regression_recovers_coefficients() {
    let m = model_xwy(0.5, 0.5, 0.5, 0.5, [1.0; 3]).unwrap();
    let g = implied_graph(&m).unwrap();
    let ds = simulate(&m, 10_000, 4, DEFAULT_BURN_IN).unwrap();
    let truth = standardized_coefficients(&m).unwrap();
    let wy = Link::new(W, 1, Y);
    let pc = path_coefficient(&ds, &g, wy).unwrap();
    assert!((pc.value - truth[&wy]).abs() < 0.02, "{} vs {}", pc.value, truth[&wy]);

    let gx = stationary_variance(&m, X).unwrap();
    let gy = stationary_variance(&m, Y).unwrap();
    let ce = causal_effect(&ds, &g, n(X, 2), n(Y, 0)).unwrap();
    assert!((ce.value - math::sqrt(gx / gy) * 0.75).abs() < 0.02);
    let sum = path_sum_effect(&g, &truth, n(X, 2), n(Y, 0)).unwrap();
    assert!((sum.value - math::sqrt(gx / gy) * 0.75).abs() < 1e-12);
    let mce = mediated_causal_effect(&ds, &g, n(X, 2), n(Y, 0), &[W]).unwrap();
    assert!((mce.value / ce.value - 1.0 / 3.0).abs() < 0.05, "{}", mce.value / ce.value);
}

#[test]
fn forced_zero_link_and_cancellation() {
    let m = model_xwy(0.5, 0.5, 0.5, -0.25, [1.0; 3]).unwrap();
    let mut g = implied_graph(&m).unwrap();
    let ds = simulate(&m, 10_000, 5, DEFAULT_BURN_IN).unwrap();
    let ce = causal_effect(&ds, &g, n(X, 2), n(Y, 0)).unwrap();
    assert!(ce.value.abs() < 0.02, "{}", ce.value);
    g.add_directed(Y, 1, X).unwrap();
    let forced = path_coefficient(&ds, &g, Link::new(Y, 1, X)).unwrap();
    assert!(forced.value.abs() < 0.02);
}

#[test]
fn mce_equals_ce_when_fully_mediated() {
    let m = model_xwy(0.5, 0.5, 0.5, 0.0, [1.0; 3]).unwrap();
    let g = implied_graph(&m).unwrap();
    let ds = simulate(&m, 10_000, 6, DEFAULT_BURN_IN).unwrap();
    let ce = causal_effect(&ds, &g, n(X, 2), n(Y, 0)).unwrap();
    let mce = mediated_causal_effect(&ds, &g, n(X, 2), n(Y, 0), &[W]).unwrap();
    assert!((ce.value - mce.value).abs() < 0.02);
}

#[test]
fn error_cases() {
    let m = model_xwy(0.5, 0.0, 0.5, 0.5, [1.0; 3]).unwrap();
    let g = implied_graph(&m).unwrap();
    let ds = simulate(&m, 500, 7, 100).unwrap();
    assert_eq!(
        mediated_causal_effect(&ds, &g, n(X, 2), n(Y, 0), &[W]),
        Err(Error::MediatorNotOnPath { variable: W })
    );
    let mut side = g.clone();
    side.add_contemporaneous(X, W).unwrap();
    assert_eq!(causal_effect(&ds, &side, n(X, 2), n(Y, 0)), Err(Error::SidepathsPresent));
    let missing = path_sum_effect(&g, &BTreeMap::new(), n(X, 2), n(Y, 0));
    assert!(matches!(missing, Err(Error::InvalidConfig(_))));
    let none = path_sum_effect(&g, &BTreeMap::new(), n(Y, 2), n(X, 0)).unwrap();
    assert_eq!(none.value, 0.0);
}

#[test]
fn duplicate_columns_are_singular() {
    let m = model_xwy(0.5, 0.5, 0.5, 0.5, [1.0; 3]).unwrap();
    let ds = simulate(&m, 300, 8, 100).unwrap();
    let y = ds.column(Y);
    let x = ds.column(X);
    let err = standardized_ols(&y, &[&x, &x]).unwrap_err();
    assert_eq!(err, vec![0, 1]);
}

#[test]
fn ols_against_normal_equations() {
    // y = 2 a - b + noise, exact standardized coefficients from the
    // normal equations of a two-regressor design
    let m = model_xwy(0.0, 0.0, 0.0, 0.0, [1.0; 3]).unwrap();
    let ds = simulate(&m, 2000, 9, 0).unwrap();
    let a = ds.column(0);
    let b: alloc::vec::Vec<f64> = ds.column(1).iter().zip(&a).map(|(u, v)| u + 0.5 * v).collect();
    let e = ds.column(2);
    let y: alloc::vec::Vec<f64> = (0..2000).map(|i| 2.0 * a[i] - b[i] + 0.3 * e[i]).collect();
    let z = |c: &[f64]| {
        let (mu, sd) = math::mean_pop_std(c.iter().copied());
        c.iter().map(|v| (v - mu) / sd).collect::<alloc::vec::Vec<f64>>()
    };
    let (za, zb, zy) = (z(&a), z(&b), z(&y));
    let dot = |p: &[f64], q: &[f64]| p.iter().zip(q).map(|(u, v)| u * v).sum::<f64>();
    let (saa, sab, sbb) = (dot(&za, &za), dot(&za, &zb), dot(&zb, &zb));
    let (say, sby) = (dot(&za, &zy), dot(&zb, &zy));
    let det = saa * sbb - sab * sab;
    let beta_a = (sbb * say - sab * sby) / det;
    let beta_b = (saa * sby - sab * say) / det;
    let fit = standardized_ols(&y, &[&a, &b]).unwrap();
    assert!((fit.coefficients[0] - beta_a).abs() < 1e-10);
    assert!((fit.coefficients[1] - beta_b).abs() < 1e-10);
}
