use std::f64::consts::PI;

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{build_space, fill_symmetric, nearest_neighbor_gap, SampledSpace};
use crate::error::{Error, Result};
use crate::travel_time::MeasurementSet;

/// Planar annulus `r <= |x| <= R` sampled on concentric rings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnnulusSpec {
    pub inner: f64,
    pub outer: f64,
    /// Samples on the outer circle (the measurement set).
    pub n_boundary: usize,
    /// Approximate number of samples strictly inside the outer circle.
    pub n_interior: usize,
}

impl AnnulusSpec {
    fn check(&self) -> Result<()> {
        if !(self.inner > 0.0 && self.inner < self.outer && self.outer.is_finite()) {
            return Err(Error::Spec(format!(
                "annulus radii must satisfy 0 < r < R, got r = {}, R = {}",
                self.inner, self.outer
            )));
        }
        if self.n_boundary < 3 || self.n_interior == 0 {
            return Err(Error::Spec("annulus needs at least 3 boundary and 1 interior sample".into()));
        }
        Ok(())
    }
}

/// Length of the shortest path between `x` and `y` in the plane with the
/// open disk of radius `r` removed.
///
/// A straight segment is used when it does not enter the open disk
/// (grazing counts as visible). Otherwise the path runs along the tangent
/// from `x`, an arc of the inner circle and the tangent to `y`.
pub fn annulus_distance(x: [f64; 2], y: [f64; 2], r: f64) -> Result<f64> {
    let (nx, ny) = (x[0].hypot(x[1]), y[0].hypot(y[1]));
    let slack = 1e-12 * r.max(1.0);
    for (p, np) in [(x, nx), (y, ny)] {
        if np < r - slack {
            return Err(Error::Domain(format!("({}, {}) lies inside the inner disk of radius {r}", p[0], p[1])));
        }
    }
    let (nx, ny) = (nx.max(r), ny.max(r));
    let dx = [y[0] - x[0], y[1] - x[1]];
    let chord = dx[0].hypot(dx[1]);
    if chord == 0.0 {
        return Ok(0.0);
    }
    let t = (-(x[0] * dx[0] + x[1] * dx[1]) / (chord * chord)).clamp(0.0, 1.0);
    let closest = (x[0] + t * dx[0]).hypot(x[1] + t * dx[1]);
    if closest >= r {
        return Ok(chord);
    }
    let cos = ((x[0] * y[0] + x[1] * y[1]) / (nx * ny)).clamp(-1.0, 1.0);
    let cross = (x[0] * y[1] - x[1] * y[0]) / (nx * ny);
    let sep = cross.abs().atan2(cos);
    let wrap = (nx * nx - r * r).max(0.0).sqrt()
        + (ny * ny - r * r).max(0.0).sqrt()
        + r * (sep - (r / nx).min(1.0).acos() - (r / ny).min(1.0).acos());
    // the two formulas agree at tangency; rounding must not undercut the chord
    Ok(wrap.max(chord))
}

/// Polar-ring samples of the annulus. The outer circle carries
/// `n_boundary` equally spaced sensors; the interior rings (from the inner
/// circle outwards) are spaced so that roughly `n_interior` samples sit at
/// a common spacing in the radial and angular directions.
pub fn sample_annulus(spec: &AnnulusSpec) -> Result<SampledSpace> {
    spec.check()?;
    let (r, big_r) = (spec.inner, spec.outer);
    let area = PI * (big_r * big_r - r * r);
    let h = (area / spec.n_interior as f64).sqrt();
    let rings = (((big_r - r) / h).round() as usize).max(1);
    let dr = (big_r - r) / rings as f64;

    let mut pts: Vec<[f64; 2]> = Vec::new();
    let mut labels = Vec::new();
    for j in 0..spec.n_boundary {
        let a = 2.0 * PI * j as f64 / spec.n_boundary as f64;
        pts.push([big_r * a.cos(), big_r * a.sin()]);
        labels.push(format!("b{j}"));
    }
    for k in 0..rings {
        let rho = r + k as f64 * dr;
        let m = ((2.0 * PI * rho / h).round() as usize).max(3);
        let offset = if k % 2 == 1 { 0.5 } else { 0.0 };
        for j in 0..m {
            let a = 2.0 * PI * (j as f64 + offset) / m as f64;
            pts.push([rho * a.cos(), rho * a.sin()]);
            labels.push(format!("i{k}.{j}"));
        }
    }
    let n = pts.len();
    let dist = fill_symmetric(n, |i, j| annulus_distance(pts[i], pts[j], r).unwrap_or(f64::NAN));
    let space = build_space(n, dist, labels)?;
    let step = nearest_neighbor_gap(&space);
    let sensors = MeasurementSet::new((0..spec.n_boundary).collect(), &space)?;
    Ok(SampledSpace {
        space,
        sensors,
        step,
        provenance: json!({
            "generator": "annulus",
            "inner": r,
            "outer": big_r,
            "n_boundary": spec.n_boundary,
            "n_interior": spec.n_interior,
            "points": pts,
            "step": step,
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn visible_pairs_are_euclidean() {
        let d = annulus_distance([1.0, 0.0], [0.0, 1.0], 0.4).unwrap();
        assert!((d - 2f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn antipodal_wrap() {
        let (rho, r) = (0.9f64, 0.4f64);
        let d = annulus_distance([rho, 0.0], [-rho, 0.0], r).unwrap();
        let expect = 2.0 * (rho * rho - r * r).sqrt() + r * (PI - 2.0 * (r / rho).acos());
        assert!((d - expect).abs() < 1e-14);
    }

    #[test]
    fn inner_circle_points_follow_the_arc() {
        let r = 0.5;
        let d = annulus_distance([r, 0.0], [0.0, r], r).unwrap();
        assert!((d - r * PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn points_in_the_hole_are_rejected() {
        assert!(annulus_distance([0.1, 0.0], [1.0, 0.0], 0.4).is_err());
    }

    #[test]
    fn bad_specs() {
        let s = AnnulusSpec { inner: 1.0, outer: 0.5, n_boundary: 10, n_interior: 10 };
        assert!(sample_annulus(&s).is_err());
    }
}
