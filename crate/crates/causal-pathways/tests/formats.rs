use causal_pathways::config::{parse_config, Options};
use causal_pathways::csv_io::{read_csv, write_csv};
use causal_pathways::graph_file::{format_graph, parse_graph};
use causal_pathways::model_file::{format_model, parse_model};
use causal_pathways::AppError;
use causal_pathways_core::simulate::{model_four_region, model_xwy_nonlinear, StructuralModel};
use causal_pathways_core::{NodeRef, TimeSeriesDataset, TimeSeriesGraph};
use proptest::prelude::*;

fn parse_line(e: AppError) -> usize {
    match e {
        AppError::Parse { line, .. } => line,
        other => panic!("expected a parse error, got {other}"),
    }
}

#[test]
fn csv_reads_header_and_rows() {
    let ds = read_csv("X, W ,Y\n1,2,3\n4,5,6\n".as_bytes(), "t").unwrap();
    assert_eq!(ds.names(), ["X", "W", "Y"]);
    assert_eq!(ds.n_rows(), 2);
    assert_eq!(ds.row(1), [4.0, 5.0, 6.0]);
    assert!(ds.mask().is_none());
}

#[test]
fn csv_mask_column_and_empty_masked_cells() {
    let ds = read_csv("X,mask,Y\n1,1,2\n,0,\n3,1,4\n".as_bytes(), "t").unwrap();
    assert_eq!(ds.names(), ["X", "Y"]);
    assert_eq!(ds.mask().unwrap(), [true, false, true]);
    assert!(ds.value(1, 0).is_nan());
    assert_eq!(ds.n_usable(), 2);
}

#[test]
fn csv_errors_carry_line_numbers() {
    let cases = [
        ("X,Y\n1,2\n3,abc\n", 3),
        ("X,Y\n1,2\n3\n", 3),
        ("X,X\n1,2\n", 1),
        ("X,mask\n1,2\n", 2),
        ("X,Y\n1,2\n,4\n", 3),
        ("X,Y\n", 2),
    ];
    for (text, line) in cases {
        let e = read_csv(text.as_bytes(), "t").unwrap_err();
        assert_eq!(e.exit_code(), 3, "{text:?}");
        assert_eq!(parse_line(e), line, "{text:?}");
    }
}

#[test]
fn csv_roundtrip_preserves_mask() {
    let ds = TimeSeriesDataset::new_masked(
        vec!["a".into(), "b".into()],
        vec![0.1, -2.5, f64::NAN, f64::NAN, 1e-300, 7.0],
        Some(vec![true, false, true]),
    )
    .unwrap();
    let mut buf = Vec::new();
    write_csv(&ds, &mut buf).unwrap();
    let back = read_csv(buf.as_slice(), "t").unwrap();
    assert_eq!(back.mask(), ds.mask());
    assert_eq!(back.row(0), ds.row(0));
    assert_eq!(back.row(2), ds.row(2));
}

proptest! {
    #[test]
    fn csv_roundtrip_is_lossless(cols in proptest::collection::vec(
        proptest::collection::vec(-1e6f64..1e6, 5), 1..4)) {
        let names: Vec<String> = (0..cols.len()).map(|i| format!("v{i}")).collect();
        let ds = TimeSeriesDataset::from_columns(names, &cols).unwrap();
        let mut buf = Vec::new();
        write_csv(&ds, &mut buf).unwrap();
        let back = read_csv(buf.as_slice(), "t").unwrap();
        prop_assert_eq!(back.values(), ds.values());
        prop_assert_eq!(back.names(), ds.names());
    }
}

#[test]
fn graph_file_parses_all_link_types() {
    let text = "# a comment\nX, Y, 2, dir\nW, Y, 1, dir\nX, W, 0, cont_solid\nW, Y, 0, cont_dashed\n";
    let gf = parse_graph(text, "g", None).unwrap();
    assert_eq!(gf.names, ["X", "Y", "W"]);
    assert_eq!(gf.graph.tau_max(), 2);
    assert_eq!(gf.graph.directed_links().count(), 2);
    assert!(gf.graph.is_solid(0, 2));
    assert!(gf.graph.is_dashed(2, 1));
}

#[test]
fn graph_file_errors() {
    let cases = [
        ("X, Y, 0, dir\n", 1),
        ("X, Y, 1, cont_solid\n", 1),
        ("X, Y, 1, sideways\n", 1),
        ("X, Y\n", 1),
        ("\nX, Y, one, dir\n", 2),
    ];
    for (text, line) in cases {
        assert_eq!(parse_line(parse_graph(text, "g", None).unwrap_err()), line, "{text:?}");
    }
    let known = ["X".to_string(), "Y".to_string()];
    let e = parse_graph("X, Q, 1, dir\n", "g", Some(&known)).unwrap_err();
    assert!(e.to_string().contains("unknown variable `Q`"));
    assert!(parse_graph("# tau_max: 1\nX, Y, 2, dir\n", "g", None).is_err());
}

#[test]
fn graph_file_uses_known_order() {
    let known = ["Y".to_string(), "Q".to_string(), "X".to_string()];
    let gf = parse_graph("X, Y, 1, dir\n", "g", Some(&known)).unwrap();
    assert_eq!(gf.names, known);
    assert!(gf.graph.has_link(&causal_pathways_core::Link::new(2, 1, 0)));
}

fn arb_graph() -> impl Strategy<Value = TimeSeriesGraph> {
    (2usize..5, 1usize..4).prop_flat_map(|(n, tau)| {
        let directed = proptest::collection::vec((0..n, 1..=tau, 0..n), 0..10);
        let cont = proptest::collection::vec((0..n, 0..n, any::<bool>()), 0..4);
        (Just(n), Just(tau), directed, cont, any::<bool>()).prop_map(|(n, tau, d, c, dashed)| {
            let mut g = TimeSeriesGraph::new(n, tau).unwrap();
            for (s, l, t) in d {
                g.add_directed(s, l, t).unwrap();
            }
            if dashed {
                g.enable_dashed();
            }
            for (i, j, solid) in c {
                if i == j {
                    continue;
                }
                if solid {
                    g.add_contemporaneous(i, j).unwrap();
                } else if dashed {
                    g.add_dashed(i, j).unwrap();
                }
            }
            g
        })
    })
}

proptest! {
    #[test]
    fn graph_file_roundtrip(g in arb_graph()) {
        let names: Vec<String> = (0..g.n_vars()).map(|i| format!("V{i}")).collect();
        let text = format_graph(&g, &names);
        let back = parse_graph(&text, "g", None).unwrap();
        prop_assert_eq!(back.names, names);
        prop_assert_eq!(back.graph, g);
    }
}

#[test]
fn model_file_example() {
    let text = "variables = X, W, Y\nnoise = gaussian\nnoise_std.W = 2\n\
                linear = Y, X, 2, 0.5  # direct\nproduct = Y, X, 2, W, 1, 0.25\ncorrelation = X, W, 0.3\n";
    let m = parse_model(text, "m").unwrap();
    assert_eq!(m.names(), ["X", "W", "Y"]);
    assert_eq!(m.noise_std(), [1.0, 2.0, 1.0]);
    assert_eq!(m.terms(2).len(), 2);
    assert_eq!(m.correlations(), [(0, 1, 0.3)]);
}

#[test]
fn model_file_errors() {
    let cases = [
        ("variables = X\nspeed = 3\n", 2),
        ("variables = X\nlinear = X, Q, 1, 0.5\n", 2),
        ("variables = X\nlinear = X, X, 1\n", 2),
        ("variables = X\n\nlinear = X, X, one, 0.5\n", 3),
        ("variables = X\nnoise = uniform\n", 2),
        ("linear = X, X, 1, 0.5\n", 1),
    ];
    for (text, line) in cases {
        assert_eq!(parse_line(parse_model(text, "m").unwrap_err()), line, "{text:?}");
    }
}

#[test]
fn builtin_models_roundtrip() {
    for m in [model_four_region().unwrap(), model_xwy_nonlinear(0.3, 0.5, 0.4, -0.2, [1.0, 0.5, 2.0]).unwrap()] {
        assert_eq!(parse_model(&format_model(&m), "m").unwrap(), m);
    }
}

proptest! {
    #[test]
    fn model_file_roundtrip(
        sigmas in proptest::collection::vec(0.1f64..3.0, 3),
        links in proptest::collection::vec((0usize..3, 0usize..3, 1usize..4, -1.0f64..1.0), 0..8),
        products in proptest::collection::vec((0usize..3, 0usize..3, 1usize..3, 0usize..3, 1usize..3, -1.0f64..1.0), 0..3),
        rho in -0.9f64..0.9,
    ) {
        let mut m = StructuralModel::new(vec!["A".into(), "B".into(), "C".into()], sigmas).unwrap();
        for (t, p, l, c) in links {
            m.add_linear(t, p, l, c).unwrap();
        }
        for (t, f1, l1, f2, l2, c) in products {
            if (f1, l1) == (f2, l2) {
                continue;
            }
            m.add_product(t, NodeRef::new(f1, l1), NodeRef::new(f2, l2), c).unwrap();
        }
        m.add_correlation(0, 2, rho).unwrap();
        let back = parse_model(&format_model(&m), "m").unwrap();
        prop_assert_eq!(back, m);
    }
}

#[test]
fn config_file_fields_and_errors() {
    let o = parse_config("data = \"d.csv\"\ntau_max = 3\nk = 5\nlag = [1, 2]\nquick = true\n", "c").unwrap();
    assert_eq!(o.tau_max, Some(3));
    assert_eq!(o.lag, [1, 2]);
    assert!(o.quick());
    let e = parse_config("k = 5\nbogus = 1\n", "c").unwrap_err();
    assert_eq!(parse_line(e), 2);
    let e = parse_config("k = \"five\"\n", "c").unwrap_err();
    assert_eq!(parse_line(e), 1);
}

#[test]
fn command_line_overrides_config() {
    let file = parse_config("k = 5\nseed = 9\nmediator = [\"W\"]\nthreshold = 0.02\n", "c").unwrap();
    let cli = Options {
        k: Some(20),
        mediator: vec!["Z".into()],
        ..Options::default()
    };
    let o = cli.merged(file);
    assert_eq!(o.k, Some(20));
    assert_eq!(o.seed(), 9);
    assert_eq!(o.mediator, ["Z"]);
    assert_eq!(o.threshold, Some(0.02));
}
