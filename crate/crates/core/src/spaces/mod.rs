//! Generators of sampled model length spaces together with their
//! measurement sets.

mod annulus;
mod polygon;
mod sphere;
mod tree;

pub use annulus::{annulus_distance, sample_annulus, AnnulusSpec};
pub use polygon::convex_polygon;
pub use sphere::{sphere_band, sphere_equator, sphere_grid, SphereBandSpec};
pub use tree::{build_tree, TreeSpec};

use rayon::prelude::*;
use serde_json::Value;

use crate::error::Result;
use crate::metric::FiniteMetricSpace;
use crate::travel_time::MeasurementSet;

/// A sampled space, its measurement set and its sampling step.
#[derive(Debug, Clone)]
pub struct SampledSpace {
    pub space: FiniteMetricSpace,
    pub sensors: MeasurementSet,
    /// Estimated largest distance from a point of the continuum to the
    /// nearest sample.
    pub step: f64,
    /// Generator name and parameters, written next to the space.
    pub provenance: Value,
}

impl SampledSpace {
    /// Default check tolerance: twice the sampling step.
    pub fn default_tol(&self) -> f64 {
        2.0 * self.step
    }
}

/// Fills a symmetric matrix from a pair function, in parallel over rows.
pub(crate) fn fill_symmetric<F>(n: usize, f: F) -> Vec<f64>
where
    F: Fn(usize, usize) -> f64 + Sync,
{
    let upper: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|i| ((i + 1)..n).map(|j| f(i, j)).collect())
        .collect();
    let mut dist = vec![0.0; n * n];
    for (i, row) in upper.iter().enumerate() {
        for (off, &v) in row.iter().enumerate() {
            let j = i + 1 + off;
            dist[i * n + j] = v;
            dist[j * n + i] = v;
        }
    }
    dist
}

/// Largest nearest-neighbour distance among the samples.
pub fn nearest_neighbor_gap(space: &FiniteMetricSpace) -> f64 {
    (0..space.len())
        .into_par_iter()
        .map(|i| {
            space
                .row(i)
                .iter()
                .enumerate()
                .filter(|&(j, _)| j != i)
                .map(|(_, &v)| v)
                .fold(f64::INFINITY, f64::min)
        })
        .filter(|v| v.is_finite())
        .reduce(|| 0.0, f64::max)
}

pub(crate) fn build_space(n: usize, dist: Vec<f64>, labels: Vec<String>) -> Result<FiniteMetricSpace> {
    FiniteMetricSpace::from_flat_unchecked(n, dist)?.with_labels(labels)
}
