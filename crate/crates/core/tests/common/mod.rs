#![allow(dead_code)]

use std::collections::BTreeSet;

use causal_pathways_core::{NodeRef, TimeSeriesGraph};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn node(v: usize, l: usize) -> NodeRef {
    NodeRef::new(v, l)
}

pub const X: usize = 0;
pub const W1: usize = 1;
pub const W2: usize = 2;
pub const Y: usize = 3;
pub const Z1: usize = 4;
pub const Z3: usize = 5;

/// Graph with three causal paths from X(t-3) to Y(t) and a contemporaneous
/// sidepath through W1.
pub fn three_path_graph() -> TimeSeriesGraph {
    let mut g = TimeSeriesGraph::new(6, 3).unwrap();
    for (s, l, t) in [
        (X, 1, X),
        (Z1, 1, Z1),
        (Z1, 1, X),
        (X, 1, W1),
        (X, 2, W2),
        (W1, 1, W2),
        (W1, 2, Y),
        (W2, 1, Y),
        (Z3, 1, Z3),
        (Z3, 1, W1),
        (Z3, 1, Y),
        (Y, 1, Y),
    ] {
        g.add_directed(s, l, t).unwrap();
    }
    g.add_contemporaneous(X, W1).unwrap();
    g
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum End {
    Tail,
    Head,
    Line,
}

/// Edges of the unrolled graph as (a, mark at a, b, mark at b).
fn unrolled_edges(g: &TimeSeriesGraph, window: usize) -> Vec<(NodeRef, End, NodeRef, End)> {
    let mut edges = Vec::new();
    for lag in 0..=window {
        for l in g.directed_links() {
            if lag + l.lag <= window {
                edges.push((node(l.source, lag + l.lag), End::Tail, node(l.target, lag), End::Head));
            }
        }
        for &(i, j) in g.contemporaneous_solid() {
            edges.push((node(i, lag), End::Line, node(j, lag), End::Line));
        }
        if let Some(d) = g.contemporaneous_dashed() {
            for &(i, j) in d {
                edges.push((node(i, lag), End::Head, node(j, lag), End::Head));
            }
        }
    }
    edges
}

fn has_descendant_in(g: &TimeSeriesGraph, start: NodeRef, s: &BTreeSet<NodeRef>) -> bool {
    let mut stack = vec![start];
    let mut seen = BTreeSet::new();
    while let Some(m) = stack.pop() {
        if !seen.insert(m) {
            continue;
        }
        if m != start && s.contains(&m) {
            return true;
        }
        for l in g.directed_links() {
            if l.source == m.variable && m.lag >= l.lag {
                stack.push(node(l.target, m.lag - l.lag));
            }
        }
    }
    false
}

/// Separation by enumerating every simple path between `u` and `v` and
/// applying the motif rules node by node.
pub fn brute_force_separated(
    g: &TimeSeriesGraph,
    u: NodeRef,
    v: NodeRef,
    s: &BTreeSet<NodeRef>,
    window: usize,
) -> bool {
    let edges = unrolled_edges(g, window);
    let mut adj: std::collections::BTreeMap<NodeRef, Vec<(End, NodeRef, End)>> = Default::default();
    for &(a, ma, b, mb) in &edges {
        adj.entry(a).or_default().push((ma, b, mb));
        adj.entry(b).or_default().push((mb, a, ma));
    }
    let collider = |a: End, b: End| {
        matches!(
            (a, b),
            (End::Head, End::Head) | (End::Head, End::Line) | (End::Line, End::Head)
        )
    };
    // depth-first over simple paths; state: current node, mark at current
    // node of the arriving edge, visited set
    fn dfs(
        cur: NodeRef,
        arrived: Option<End>,
        v: NodeRef,
        visited: &mut BTreeSet<NodeRef>,
        adj: &std::collections::BTreeMap<NodeRef, Vec<(End, NodeRef, End)>>,
        open_at: &dyn Fn(NodeRef, End, End) -> bool,
    ) -> bool {
        for &(leave, next, arrive) in adj.get(&cur).map(Vec::as_slice).unwrap_or(&[]) {
            if let Some(a) = arrived {
                if !open_at(cur, a, leave) {
                    continue;
                }
            }
            if next == v {
                return true;
            }
            if visited.contains(&next) {
                continue;
            }
            visited.insert(next);
            if dfs(next, Some(arrive), v, visited, adj, open_at) {
                return true;
            }
            visited.remove(&next);
        }
        false
    }
    let open_at = |m: NodeRef, a: End, b: End| {
        if collider(a, b) {
            s.contains(&m) || has_descendant_in(g, m, s)
        } else {
            !s.contains(&m)
        }
    };
    let mut visited = BTreeSet::from([u]);
    !dfs(u, None, v, &mut visited, &adj, &open_at)
}

/// Random sparse graph with optional contemporaneous links.
pub fn random_graph(rng: &mut ChaCha8Rng, n_vars: usize, tau_max: usize, p: f64, with_dashed: bool) -> TimeSeriesGraph {
    let mut g = TimeSeriesGraph::new(n_vars, tau_max).unwrap();
    for s in 0..n_vars {
        for t in 0..n_vars {
            for lag in 1..=tau_max {
                if rng.random::<f64>() < p {
                    g.add_directed(s, lag, t).unwrap();
                }
            }
            if s < t && rng.random::<f64>() < p / 2.0 {
                g.add_contemporaneous(s, t).unwrap();
            }
            if with_dashed && s < t && rng.random::<f64>() < p / 2.0 {
                g.add_dashed(s, t).unwrap();
            }
        }
    }
    g
}

pub fn seeded(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Random stable linear model: autodependencies on every variable, each
/// cross link present with probability `p`, coefficient magnitudes in
/// [min_coeff, 0.6] with random sign.
pub fn random_linear_model(
    rng: &mut ChaCha8Rng,
    n_vars: usize,
    tau_max: usize,
    p: f64,
    min_coeff: f64,
) -> causal_pathways_core::simulate::StructuralModel {
    use causal_pathways_core::simulate::StructuralModel;
    loop {
        let names = (0..n_vars).map(|i| format!("V{i}")).collect();
        let sigmas = (0..n_vars).map(|_| rng.random_range(0.5..1.5)).collect();
        let mut m = StructuralModel::new(names, sigmas).unwrap();
        for t in 0..n_vars {
            m.add_linear(t, t, 1, rng.random_range(0.2..0.6)).unwrap();
            for s in 0..n_vars {
                for lag in 1..=tau_max {
                    if (s != t || lag > 1) && rng.random_bool(p) {
                        let mag = rng.random_range(min_coeff..0.6);
                        let sign = if rng.random_bool(0.5) { 1.0 } else { -1.0 };
                        m.add_linear(t, s, lag, sign * mag).unwrap();
                    }
                }
            }
        }
        if m.spectral_radius() < 0.9 {
            return m;
        }
    }
}
