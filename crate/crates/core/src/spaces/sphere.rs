use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};
use serde_json::json;

use super::{build_space, fill_symmetric, nearest_neighbor_gap, SampledSpace};
use crate::error::{Error, Result};
use crate::travel_time::MeasurementSet;

/// Unit sphere with a measurement band of radius `band_radius` around the
/// meridian of longitude 0 joining the poles.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SphereBandSpec {
    pub band_radius: f64,
    /// Number of latitude steps between the poles.
    pub resolution: usize,
}

/// Great-circle distance of unit vectors, stable for near and antipodal
/// pairs.
pub(crate) fn great_circle(a: [f64; 3], b: [f64; 3]) -> f64 {
    let cross = [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ];
    let s = (cross[0] * cross[0] + cross[1] * cross[1] + cross[2] * cross[2]).sqrt();
    let c = a[0] * b[0] + a[1] * b[1] + a[2] * b[2];
    s.atan2(c)
}

/// Latitude-longitude samples of the unit sphere, thinned towards the poles.
///
/// Ring `i` sits at colatitude `i * pi / resolution` and carries an even
/// number of points (about `2 * resolution * sin(colatitude)`) starting at
/// longitude 0, so the grid is closed under the antipodal map. The poles are
/// single points. The equator ring (even `resolution`) has `z = 0` exactly.
pub fn sphere_grid(resolution: usize) -> Result<(Vec<[f64; 3]>, Vec<String>)> {
    if resolution < 2 {
        return Err(Error::Spec(format!("sphere resolution must be at least 2, got {resolution}")));
    }
    let mut pts = Vec::new();
    let mut labels = Vec::new();
    for i in 0..=resolution {
        let (z, rho) = if i == 0 {
            (1.0, 0.0)
        } else if i == resolution {
            (-1.0, 0.0)
        } else if 2 * i == resolution {
            (0.0, 1.0)
        } else {
            let phi = PI * i as f64 / resolution as f64;
            (phi.cos(), phi.sin())
        };
        if rho == 0.0 {
            pts.push([0.0, 0.0, z]);
            labels.push(if i == 0 { "north".to_string() } else { "south".to_string() });
            continue;
        }
        let m = 2 * ((resolution as f64 * rho).round() as usize).max(1);
        for j in 0..m {
            let lon = 2.0 * PI * j as f64 / m as f64;
            let (s, c) = if 2 * j == m { (0.0, -1.0) } else { lon.sin_cos() };
            pts.push([rho * c, rho * s, z]);
            labels.push(format!("s{i}.{j}"));
        }
    }
    Ok((pts, labels))
}

/// Distance from a unit vector to the meridian half-circle through the
/// poles at longitude 0 (the points with `y = 0`, `x >= 0`).
pub(crate) fn distance_to_meridian(p: [f64; 3]) -> f64 {
    if p[0] >= 0.0 {
        p[1].abs().min(1.0).asin()
    } else {
        great_circle(p, [0.0, 0.0, 1.0]).min(great_circle(p, [0.0, 0.0, -1.0]))
    }
}

fn sampled_sphere(pts: &[[f64; 3]], labels: Vec<String>, sensors: Vec<usize>, provenance: serde_json::Value) -> Result<SampledSpace> {
    let n = pts.len();
    let dist = fill_symmetric(n, |i, j| great_circle(pts[i], pts[j]));
    let space = build_space(n, dist, labels)?;
    let step = nearest_neighbor_gap(&space);
    let sensors = MeasurementSet::new(sensors, &space)?;
    let mut provenance = provenance;
    provenance["step"] = json!(step);
    provenance["points"] = json!(pts);
    Ok(SampledSpace { space, sensors, step, provenance })
}

/// Sphere grid whose sensors are the samples within `band_radius` of the
/// meridian of longitude 0.
pub fn sphere_band(spec: &SphereBandSpec) -> Result<SampledSpace> {
    let r = spec.band_radius;
    if !(r > 0.0 && r < FRAC_PI_2) {
        return Err(Error::Spec(format!("band radius must lie in (0, pi/2), got {r}")));
    }
    let (pts, labels) = sphere_grid(spec.resolution)?;
    let sensors: Vec<usize> = (0..pts.len())
        .filter(|&i| distance_to_meridian(pts[i]) <= r + 1e-12)
        .collect();
    sampled_sphere(
        &pts,
        labels,
        sensors,
        json!({ "generator": "sphere_band", "band_radius": r, "resolution": spec.resolution }),
    )
}

/// Northern hemisphere grid (equator included) plus the south pole, with the
/// equator as measurement set. The two poles have identical travel time
/// functions, and they are the only such pair.
pub fn sphere_equator(resolution: usize) -> Result<SampledSpace> {
    if !resolution.is_multiple_of(2) {
        return Err(Error::Spec(format!("equator fixture needs an even resolution, got {resolution}")));
    }
    let (all, all_labels) = sphere_grid(resolution)?;
    let keep: Vec<usize> = (0..all.len()).filter(|&i| all[i][2] >= 0.0 || all[i][2] == -1.0).collect();
    let pts: Vec<[f64; 3]> = keep.iter().map(|&i| all[i]).collect();
    let labels: Vec<String> = keep.iter().map(|&i| all_labels[i].clone()).collect();
    let sensors: Vec<usize> = (0..pts.len()).filter(|&i| pts[i][2] == 0.0).collect();
    sampled_sphere(&pts, labels, sensors, json!({ "generator": "sphere_equator", "resolution": resolution }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn poles_are_pi_apart() {
        let (pts, labels) = sphere_grid(8).unwrap();
        let n = labels.iter().position(|l| l == "north").unwrap();
        let s = labels.iter().position(|l| l == "south").unwrap();
        assert_eq!(great_circle(pts[n], pts[s]), PI);
    }

    #[test]
    fn grid_is_closed_under_antipodes() {
        let (pts, _) = sphere_grid(6).unwrap();
        for p in &pts {
            let q = [-p[0], -p[1], -p[2]];
            assert!(pts.iter().any(|x| great_circle(*x, q) < 1e-12));
        }
    }

    #[test]
    fn meridian_distance() {
        assert_eq!(distance_to_meridian([1.0, 0.0, 0.0]), 0.0);
        assert!((distance_to_meridian([0.0, 1.0, 0.0]) - FRAC_PI_2).abs() < 1e-15);
        assert!((distance_to_meridian([-1.0, 0.0, 0.0]) - FRAC_PI_2).abs() < 1e-15);
    }

    #[test]
    fn band_radius_is_checked() {
        assert!(sphere_band(&SphereBandSpec { band_radius: 2.0, resolution: 8 }).is_err());
        assert!(sphere_equator(7).is_err());
    }
}
