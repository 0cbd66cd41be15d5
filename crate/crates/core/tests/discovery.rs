mod common;

use std::collections::BTreeSet;

use causal_pathways_core::discovery::{build_graph, estimate_parents_neighbors, graph_from_preliminary, DiscoveryConfig};
use causal_pathways_core::simulate::{implied_graph, model_four_region, model_xwy, simulate, StructuralModel, DEFAULT_BURN_IN};
use causal_pathways_core::{EstimatorConfig, Link, TimeSeriesGraph};
use common::{node, random_linear_model, seeded};

fn links(g: &TimeSeriesGraph) -> BTreeSet<Link> {
    g.directed_links().copied().collect()
}

fn knn(tau_max: usize) -> DiscoveryConfig {
    DiscoveryConfig {
        estimator: EstimatorConfig::value_estimation(),
        ..DiscoveryConfig::new(tau_max, 0.015)
    }
}

fn gaussian(tau_max: usize, threshold: f64) -> DiscoveryConfig {
    DiscoveryConfig {
        estimator: EstimatorConfig::gaussian(),
        ..DiscoveryConfig::new(tau_max, threshold)
    }
}

#[test]
fn triple_model_recovery_rate() {
    let m = model_xwy(0.5, 0.5, 0.5, 0.5, [1.0; 3]).unwrap();
    let truth = links(&implied_graph(&m).unwrap());
    let mut exact = 0;
    let mut parents_ok = 0;
    for seed in 0..10 {
        let ds = simulate(&m, 10_000, 100 + seed, DEFAULT_BURN_IN).unwrap();
        let d = build_graph(&ds, &knn(3)).unwrap();
        let y = &d.preliminary.parents[2];
        if [node(2, 1), node(0, 2), node(1, 1)].iter().all(|p| y.contains(p)) && !y.contains(&node(0, 1)) {
            parents_ok += 1;
        }
        if links(&d.graph) == truth && d.graph.contemporaneous_solid().count() == 0 {
            exact += 1;
        }
    }
    assert!(parents_ok >= 9, "{parents_ok}/10");
    assert!(exact >= 9, "{exact}/10");
}

#[test]
fn noise_gives_empty_sets() {
    // default independence-testing estimator (k = 100)
    let m = StructuralModel::new(vec!["A".into(), "B".into(), "C".into()], vec![1.0; 3]).unwrap();
    let mut empty = 0;
    for seed in 0..10 {
        let ds = simulate(&m, 2000, 200 + seed, 0).unwrap();
        let d = build_graph(&ds, &DiscoveryConfig::new(2, 0.015)).unwrap();
        if d.preliminary.parents.iter().all(BTreeSet::is_empty)
            && d.preliminary.neighbors.iter().all(BTreeSet::is_empty)
        {
            empty += 1;
        }
    }
    assert!(empty >= 9, "{empty}/10");
}

#[test]
fn four_region_parent_listing() {
    let m = model_four_region().unwrap();
    let ds = simulate(&m, 1268, 300, DEFAULT_BURN_IN).unwrap();
    let d = build_graph(&ds, &knn(4)).unwrap();
    let a: Vec<_> = d.preliminary.parents[0].iter().copied().collect();
    assert_eq!(a, vec![node(0, 1), node(1, 1)]);
}

#[test]
fn raising_threshold_never_adds_links_given_preliminary_sets() {
    let mut rng = seeded(400);
    for case in 0..8 {
        let m = random_linear_model(&mut rng, 4, 2, 0.3, 0.1);
        let ds = simulate(&m, 1000, 400 + case, DEFAULT_BURN_IN).unwrap();
        let pre = estimate_parents_neighbors(&ds, &gaussian(2, 0.005)).unwrap();
        let mut previous: Option<BTreeSet<Link>> = None;
        for threshold in [0.005, 0.015, 0.03, 0.06, 0.12, f64::INFINITY] {
            let g = graph_from_preliminary(&ds, pre.clone(), &gaussian(2, threshold)).unwrap().graph;
            let now = links(&g);
            if let Some(prev) = &previous {
                assert!(now.is_subset(prev), "case {case} at {threshold}");
            }
            previous = Some(now);
        }
    }
}

#[test]
fn raising_threshold_never_adds_links_on_reference_models() {
    let models = [model_xwy(0.5, 0.5, 0.5, 0.5, [1.0; 3]).unwrap(), model_four_region().unwrap()];
    for (i, m) in models.iter().enumerate() {
        let ds = simulate(m, 2000, 450 + i as u64, DEFAULT_BURN_IN).unwrap();
        let mut previous: Option<BTreeSet<Link>> = None;
        for threshold in [0.0, 0.005, 0.015, 0.03, 0.06, f64::INFINITY] {
            let now = links(&build_graph(&ds, &gaussian(3, threshold)).unwrap().graph);
            if let Some(prev) = &previous {
                assert!(now.is_subset(prev), "model {i} at {threshold}");
            }
            previous = Some(now);
        }
    }
}

#[test]
fn error_rates_fall_with_sample_size() {
    let mut rng = seeded(500);
    let (mut false_links, mut missed) = ([0usize; 2], [0usize; 2]);
    for case in 0..10 {
        let m = random_linear_model(&mut rng, 4, 2, 0.25, 0.3);
        let truth = links(&implied_graph(&m).unwrap());
        for (i, t) in [1000, 10_000].into_iter().enumerate() {
            let ds = simulate(&m, t, 500 + case, DEFAULT_BURN_IN).unwrap();
            let found = links(&build_graph(&ds, &gaussian(2, 0.005)).unwrap().graph);
            false_links[i] += found.difference(&truth).count();
            missed[i] += truth.difference(&found).count();
        }
    }
    assert!(false_links[1] <= false_links[0], "{false_links:?}");
    assert!(missed[1] <= missed[0], "{missed:?}");
    assert!(false_links[1] + missed[1] < false_links[0] + missed[0], "{false_links:?} {missed:?}");
}
