use serde_json::json;

use super::{build_space, fill_symmetric, nearest_neighbor_gap, SampledSpace};
use crate::error::{Error, Result};
use crate::travel_time::MeasurementSet;

fn cross(o: [f64; 2], a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])
}

/// Convex polygon sampled on its boundary (the sensors, spacing at most
/// `resolution`) and on a square lattice of spacing `resolution` inside.
/// Distances are Euclidean.
pub fn convex_polygon(vertices: &[[f64; 2]], resolution: f64) -> Result<SampledSpace> {
    let nv = vertices.len();
    if nv < 3 {
        return Err(Error::Spec("a polygon needs at least three vertices".into()));
    }
    if !(resolution > 0.0) || !resolution.is_finite() {
        return Err(Error::Spec(format!("resolution must be positive, got {resolution}")));
    }
    let scale = vertices.iter().flatten().fold(0.0f64, |m, v| m.max(v.abs())).max(1.0);
    let mut orientation = 0.0f64;
    for k in 0..nv {
        let c = cross(vertices[k], vertices[(k + 1) % nv], vertices[(k + 2) % nv]);
        if c.abs() <= 1e-12 * scale * scale {
            continue;
        }
        if orientation == 0.0 {
            orientation = c.signum();
        } else if c.signum() != orientation {
            return Err(Error::Spec(format!("polygon is not convex at vertex {}", (k + 1) % nv)));
        }
    }
    if orientation == 0.0 {
        return Err(Error::Spec("polygon is degenerate".into()));
    }

    let mut pts: Vec<[f64; 2]> = Vec::new();
    let mut labels = Vec::new();
    for k in 0..nv {
        let (a, b) = (vertices[k], vertices[(k + 1) % nv]);
        let len = (b[0] - a[0]).hypot(b[1] - a[1]);
        let pieces = ((len / resolution).ceil() as usize).max(1);
        for j in 0..pieces {
            let t = j as f64 / pieces as f64;
            pts.push([a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])]);
            labels.push(format!("b{k}.{j}"));
        }
    }
    let n_boundary = pts.len();

    // signed distance to each edge line, positive inside
    let inside_depth = |p: [f64; 2]| {
        (0..nv)
            .map(|k| {
                let (a, b) = (vertices[k], vertices[(k + 1) % nv]);
                let len = (b[0] - a[0]).hypot(b[1] - a[1]);
                orientation * cross(a, b, p) / len
            })
            .fold(f64::INFINITY, f64::min)
    };
    let (mut lo, mut hi) = ([f64::INFINITY; 2], [f64::NEG_INFINITY; 2]);
    for v in vertices {
        for c in 0..2 {
            lo[c] = lo[c].min(v[c]);
            hi[c] = hi[c].max(v[c]);
        }
    }
    let nx = ((hi[0] - lo[0]) / resolution).floor() as usize;
    let ny = ((hi[1] - lo[1]) / resolution).floor() as usize;
    for iy in 0..=ny {
        for ix in 0..=nx {
            let p = [lo[0] + ix as f64 * resolution, lo[1] + iy as f64 * resolution];
            if inside_depth(p) > 0.5 * resolution {
                pts.push(p);
                labels.push(format!("g{ix}.{iy}"));
            }
        }
    }

    let n = pts.len();
    let dist = fill_symmetric(n, |i, j| (pts[i][0] - pts[j][0]).hypot(pts[i][1] - pts[j][1]));
    let space = build_space(n, dist, labels)?;
    let step = nearest_neighbor_gap(&space);
    let sensors = MeasurementSet::new((0..n_boundary).collect(), &space)?;
    Ok(SampledSpace {
        space,
        sensors,
        step,
        provenance: json!({
            "generator": "convex_polygon",
            "vertices": vertices,
            "resolution": resolution,
            "points": pts,
            "step": step,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_square() {
        let sq = [[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]];
        let s = convex_polygon(&sq, 0.25).unwrap();
        assert_eq!(s.sensors.len(), 16);
        assert!((s.space.diam() - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn rejects_non_convex() {
        let dart = [[0.0, 0.0], [2.0, 0.0], [1.0, 0.5], [2.0, 2.0], [0.0, 2.0]];
        assert!(convex_polygon(&dart, 0.5).is_err());
        assert!(convex_polygon(&[[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]], 0.5).is_err());
    }
}
