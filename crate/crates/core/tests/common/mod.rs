//! Independent oracles and fixtures shared by the integration tests.
#![allow(dead_code)]

use proptest::prelude::*;
use ttlab::FiniteMetricSpace;

/// All-pairs shortest paths by Floyd-Warshall on a weighted edge list.
pub fn floyd_warshall(n: usize, edges: &[(usize, usize, f64)]) -> Vec<Vec<f64>> {
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for &(a, b, w) in edges {
        d[a][b] = d[a][b].min(w);
        d[b][a] = d[b][a].min(w);
    }
    for k in 0..n {
        for i in 0..n {
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// Checks the metric axioms directly, with the library's tolerance rule.
pub fn is_metric(m: &[Vec<f64>]) -> bool {
    let n = m.len();
    if m.iter().any(|r| r.len() != n) {
        return false;
    }
    let diam = m.iter().flatten().fold(0.0f64, |a, &b| a.max(b));
    if m.iter().flatten().any(|v| !v.is_finite()) {
        return false;
    }
    let tol = 1e-12 * diam;
    for i in 0..n {
        if m[i][i] != 0.0 {
            return false;
        }
        for j in 0..n {
            if i != j && (m[i][j] <= 0.0 || (m[i][j] - m[j][i]).abs() > tol) {
                return false;
            }
            for k in 0..n {
                if m[i][k] > m[i][j] + m[j][k] + tol {
                    return false;
                }
            }
        }
    }
    true
}

/// GH distance by enumerating every relation as a bitmask over `X x Y`.
pub fn gh_by_relations(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> f64 {
    let (n, m) = (x.len(), y.len());
    assert!(n * m <= 20, "oracle limited to 20 cells");
    let mut best = f64::INFINITY;
    for mask in 1u32..(1u32 << (n * m)) {
        let pairs: Vec<(usize, usize)> =
            (0..n * m).filter(|b| mask >> b & 1 == 1).map(|b| (b / m, b % m)).collect();
        let rows_ok = (0..n).all(|i| pairs.iter().any(|p| p.0 == i));
        let cols_ok = (0..m).all(|j| pairs.iter().any(|p| p.1 == j));
        if !rows_ok || !cols_ok {
            continue;
        }
        let mut dis = 0.0f64;
        for &(a, b) in &pairs {
            for &(c, d) in &pairs {
                dis = dis.max((x.d(a, c) - y.d(b, d)).abs());
            }
        }
        best = best.min(dis);
    }
    0.5 * best
}

pub fn space(m: Vec<Vec<f64>>) -> FiniteMetricSpace {
    FiniteMetricSpace::validate(&m).expect("fixture is a metric")
}

pub fn interval_sample(points: &[f64]) -> FiniteMetricSpace {
    space(points.iter().map(|a| points.iter().map(|b| (a - b).abs()).collect()).collect())
}

/// Shortest-path metric of a random connected weighted graph on `n` nodes:
/// a random spanning path plus extra edges.
pub fn arb_metric(max_n: usize) -> impl Strategy<Value = Vec<Vec<f64>>> {
    (1..=max_n).prop_flat_map(|n| {
        let spine = prop::collection::vec(0.1f64..3.0, n.saturating_sub(1));
        let extra = prop::collection::vec((0..n, 0..n, 0.1f64..3.0), 0..=n);
        (Just(n), spine, extra).prop_map(|(n, spine, extra)| {
            let mut edges: Vec<(usize, usize, f64)> = spine.iter().enumerate().map(|(i, &w)| (i, i + 1, w)).collect();
            edges.extend(extra.into_iter().filter(|e| e.0 != e.1));
            floyd_warshall(n, &edges)
        })
    })
}

pub fn arb_space(max_n: usize) -> impl Strategy<Value = FiniteMetricSpace> {
    arb_metric(max_n).prop_map(space)
}

/// Random tree on up to `max_nodes` nodes: node `i > 0` hangs off a random
/// earlier node.
pub fn arb_tree_edges(max_nodes: usize) -> impl Strategy<Value = Vec<(usize, usize, f64)>> {
    (2..=max_nodes).prop_flat_map(|n| {
        let parents: Vec<BoxedStrategy<usize>> = (1..n).map(|i| (0..i).boxed()).collect();
        (parents, prop::collection::vec(0.1f64..2.0, n - 1)).prop_map(|(parents, lens)| {
            parents.iter().zip(&lens).enumerate().map(|(i, (&p, &w))| (p, i + 1, w)).collect()
        })
    })
}
