use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{build_space, SampledSpace};
use crate::error::{Error, Result};
use crate::travel_time::MeasurementSet;

/// A weighted tree on nodes `0..n`, given by its edge list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TreeSpec {
    pub edges: Vec<(usize, usize, f64)>,
}

impl TreeSpec {
    pub fn new(edges: Vec<(usize, usize, f64)>) -> Result<Self> {
        let spec = TreeSpec { edges };
        spec.check()?;
        Ok(spec)
    }

    /// A star with `leaves` edges of the given length around node 0.
    pub fn star(leaves: usize, length: f64) -> Self {
        TreeSpec { edges: (1..=leaves).map(|k| (0, k, length)).collect() }
    }

    pub fn node_count(&self) -> usize {
        self.edges.iter().map(|&(a, b, _)| a.max(b) + 1).max().unwrap_or(0)
    }

    pub fn degrees(&self) -> Vec<usize> {
        let mut deg = vec![0; self.node_count()];
        for &(a, b, _) in &self.edges {
            deg[a] += 1;
            deg[b] += 1;
        }
        deg
    }

    /// Degree-one nodes, in increasing order.
    pub fn leaves(&self) -> Vec<usize> {
        self.degrees()
            .iter()
            .enumerate()
            .filter(|&(_, &d)| d == 1)
            .map(|(i, _)| i)
            .collect()
    }

    fn check(&self) -> Result<()> {
        if self.edges.is_empty() {
            return Err(Error::Spec("a tree needs at least one edge".into()));
        }
        let n = self.node_count();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut a: usize) -> usize {
            while parent[a] != a {
                parent[a] = parent[parent[a]];
                a = parent[a];
            }
            a
        }
        for &(a, b, len) in &self.edges {
            if !(len > 0.0) || !len.is_finite() {
                return Err(Error::Spec(format!("edge ({a}, {b}) has length {len}")));
            }
            let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
            if ra == rb {
                return Err(Error::Spec(format!("edge ({a}, {b}) closes a cycle")));
            }
            parent[ra] = rb;
        }
        if self.edges.len() + 1 != n {
            return Err(Error::Spec(format!(
                "{} edges on {n} nodes: the tree is disconnected",
                self.edges.len()
            )));
        }
        Ok(())
    }
}

/// Samples a metric tree: its nodes plus `extra_samples_per_edge` evenly
/// spaced interior points on every edge. The measurement set is the leaves.
///
/// Sample order: tree nodes `0..n` first (labels `v<i>`), then the interior
/// points of each edge in edge order (labels `e<k>.<j>`).
pub fn build_tree(spec: &TreeSpec, extra_samples_per_edge: usize) -> Result<SampledSpace> {
    spec.check()?;
    let n_nodes = spec.node_count();
    let pieces = extra_samples_per_edge + 1;
    let total = n_nodes + spec.edges.len() * extra_samples_per_edge;

    let mut labels: Vec<String> = (0..n_nodes).map(|i| format!("v{i}")).collect();
    let mut adj: Vec<Vec<(usize, f64)>> = vec![Vec::new(); total];
    let mut step = 0.0f64;
    for (k, &(a, b, len)) in spec.edges.iter().enumerate() {
        let piece = len / pieces as f64;
        step = step.max(0.5 * piece);
        let mut prev = a;
        for j in 0..extra_samples_per_edge {
            let id = n_nodes + k * extra_samples_per_edge + j;
            labels.push(format!("e{k}.{}", j + 1));
            adj[prev].push((id, piece));
            adj[id].push((prev, piece));
            prev = id;
        }
        // last piece absorbs rounding so the edge keeps its exact length
        let last = len - piece * extra_samples_per_edge as f64;
        adj[prev].push((b, last));
        adj[b].push((prev, last));
    }

    let mut dist = vec![0.0; total * total];
    // unique paths: one traversal per source
    let mut stack = Vec::new();
    for src in 0..total {
        let row = &mut dist[src * total..(src + 1) * total];
        stack.clear();
        stack.push((src, usize::MAX, 0.0f64));
        while let Some((v, from, dv)) = stack.pop() {
            row[v] = dv;
            for &(w, len) in &adj[v] {
                if w != from {
                    stack.push((w, v, dv + len));
                }
            }
        }
    }
    // path sums differ by rounding between directions; keep the upper triangle
    for i in 0..total {
        for j in (i + 1)..total {
            let v = dist[i * total + j];
            dist[j * total + i] = v;
        }
    }

    let space = build_space(total, dist, labels)?;
    let sensors = MeasurementSet::new(spec.leaves(), &space)?;
    Ok(SampledSpace {
        space,
        sensors,
        step,
        provenance: json!({
            "generator": "tree",
            "edges": spec.edges,
            "extra_samples_per_edge": extra_samples_per_edge,
            "step": step,
        }),
    })
}
