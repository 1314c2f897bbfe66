use std::f64::consts::PI;

use petgraph::algo::dijkstra;
use petgraph::graph::{NodeIndex, UnGraph};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use super::profile::{require_herglotz, RadialProfile};
use crate::error::{Error, Result};
use crate::spaces::{nearest_neighbor_gap, SampledSpace};
use crate::metric::FiniteMetricSpace;
use crate::travel_time::MeasurementSet;

/// Concentric-ring sampling of the unit disk.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PolarGrid {
    /// Rings at radii `i / rings`, `i = 1..=rings`, plus the centre.
    pub rings: usize,
    /// Nodes closer than `reach * sqrt(1 / rings)` (Euclidean) are joined
    /// by an edge. Letting the edge radius shrink slower than the ring
    /// spacing `h` keeps the direction error of graph paths at `O(h)`.
    pub reach: f64,
}

impl PolarGrid {
    pub fn new(rings: usize) -> Self {
        PolarGrid { rings, reach: 1.0 }
    }
}

/// Samples of the disk with the metric `c^{-2} |dx|^2`, approximated by
/// shortest paths in a graph whose edges are straight segments weighted by
/// Euclidean length over `c` at the segment midpoint. The outer ring is the
/// measurement set.
pub fn disk_distance_matrix(profile: &RadialProfile, grid: PolarGrid) -> Result<SampledSpace> {
    let h = 1.0 / grid.rings as f64;
    if grid.rings < 2 || !(grid.reach * h.sqrt() >= 1.5 * h) {
        return Err(Error::Parameter(format!(
            "polar grid needs at least 2 rings and an edge radius of 1.5 ring spacings, got {} rings and reach {}",
            grid.rings, grid.reach
        )));
    }
    require_herglotz(profile)?;
    let mut pts: Vec<[f64; 2]> = vec![[0.0, 0.0]];
    let mut labels = vec!["c".to_string()];
    let mut boundary = Vec::new();
    for i in 1..=grid.rings {
        let rho = i as f64 * h;
        let m = ((2.0 * PI * i as f64).round() as usize).max(6);
        for j in 0..m {
            let a = 2.0 * PI * j as f64 / m as f64;
            if i == grid.rings {
                boundary.push(pts.len());
            }
            pts.push([rho * a.cos(), rho * a.sin()]);
            labels.push(format!("r{i}.{j}"));
        }
    }
    let n = pts.len();

    // bucket the nodes so that neighbours are found in adjacent cells
    let radius = grid.reach * h.sqrt();
    let cells = (2.0 / radius).ceil() as usize + 1;
    let cell_of = |p: [f64; 2]| {
        let cx = (((p[0] + 1.0) / radius) as usize).min(cells - 1);
        let cy = (((p[1] + 1.0) / radius) as usize).min(cells - 1);
        (cx, cy)
    };
    let mut buckets = vec![Vec::new(); cells * cells];
    for (k, &p) in pts.iter().enumerate() {
        let (cx, cy) = cell_of(p);
        buckets[cy * cells + cx].push(k);
    }
    let mut graph: UnGraph<(), f64> = UnGraph::with_capacity(n, n * 16);
    for _ in 0..n {
        graph.add_node(());
    }
    for (a, &p) in pts.iter().enumerate() {
        let (cx, cy) = cell_of(p);
        for y in cy.saturating_sub(1)..=(cy + 1).min(cells - 1) {
            for x in cx.saturating_sub(1)..=(cx + 1).min(cells - 1) {
                for &b in &buckets[y * cells + x] {
                    if b <= a {
                        continue;
                    }
                    let q = pts[b];
                    let len = (p[0] - q[0]).hypot(p[1] - q[1]);
                    if len <= radius {
                        let mid = (0.5 * (p[0] + q[0])).hypot(0.5 * (p[1] + q[1]));
                        graph.add_edge(NodeIndex::new(a), NodeIndex::new(b), len / profile.c(mid));
                    }
                }
            }
        }
    }

    let rows: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|s| {
            let reached = dijkstra(&graph, NodeIndex::new(s), None, |e| *e.weight());
            let mut row = vec![f64::INFINITY; n];
            for (node, d) in reached {
                row[node.index()] = d;
            }
            row
        })
        .collect();
    let mut dist = vec![0.0; n * n];
    for i in 0..n {
        for j in (i + 1)..n {
            let v = rows[i][j].min(rows[j][i]);
            dist[i * n + j] = v;
            dist[j * n + i] = v;
        }
    }
    let space = FiniteMetricSpace::from_flat_unchecked(n, dist)?.with_labels(labels)?;
    let step = nearest_neighbor_gap(&space);
    let sensors = MeasurementSet::new(boundary, &space)?;
    let mut provenance = profile.parameters();
    provenance["generator"] = json!("herglotz_disk");
    provenance["rings"] = json!(grid.rings);
    provenance["reach"] = json!(grid.reach);
    provenance["points"] = json!(pts);
    provenance["step"] = json!(step);
    Ok(SampledSpace { space, sensors, step, provenance })
}
