//! Geodesics of `c^{-2} |dx|^2` traced by integrating Hamilton's equations
//! in Cartesian coordinates. Independent of the quadrature formulas and used
//! to replay predicted meeting points.

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::intersect::IntersectionTriple;
use super::profile::RadialProfile;
use crate::error::{Error, Result};

/// Default time step of the tracer.
pub const TRACE_STEP: f64 = 1e-3;
/// Largest admissible distance between a predicted and a traced meeting.
pub const REPLAY_TOL: f64 = 1e-3;

/// Polyline of a traced geodesic, sampled at equal time steps.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GeodesicTrace {
    pub tip_radius: f64,
    pub orientation: i8,
    pub points: Vec<[f64; 2]>,
    pub times: Vec<f64>,
}

type State = [f64; 4];

fn rhs(profile: &RadialProfile, y: &State) -> State {
    let (x, xi) = ([y[0], y[1]], [y[2], y[3]]);
    let r = x[0].hypot(x[1]);
    let c = profile.c(r);
    let xi2 = xi[0] * xi[0] + xi[1] * xi[1];
    let grad = if r > 0.0 { profile.dc(r) / r } else { 0.0 };
    [
        c * c * xi[0],
        c * c * xi[1],
        -c * grad * x[0] * xi2,
        -c * grad * x[1] * xi2,
    ]
}

fn rk4(profile: &RadialProfile, y: &State, dt: f64) -> State {
    let add = |a: &State, b: &State, h: f64| [a[0] + h * b[0], a[1] + h * b[1], a[2] + h * b[2], a[3] + h * b[3]];
    let k1 = rhs(profile, y);
    let k2 = rhs(profile, &add(y, &k1, 0.5 * dt));
    let k3 = rhs(profile, &add(y, &k2, 0.5 * dt));
    let k4 = rhs(profile, &add(y, &k3, dt));
    let mut out = *y;
    for i in 0..4 {
        out[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Traces the unit-speed geodesic with tip radius `tip` that starts at the
/// boundary point `(1, 0)` turning counterclockwise (`orientation = 1`) or
/// clockwise (`-1`), until it leaves the disk again.
pub fn trace_geodesic(profile: &RadialProfile, tip: f64, orientation: i8, dt: f64) -> Result<GeodesicTrace> {
    if !(0.0..1.0).contains(&tip) {
        return Err(Error::Parameter(format!("tip radius must lie in [0, 1), got {tip}")));
    }
    if orientation.abs() != 1 || !(dt > 0.0) {
        return Err(Error::Parameter(format!("need orientation +-1 and dt > 0, got {orientation}, {dt}")));
    }
    // Clairaut: r sin(psi) / c(r) is conserved, psi measured from the radial direction
    let c1 = profile.c(1.0);
    let sin_psi = profile.ray_parameter(tip) * c1;
    let cos_psi = (1.0 - sin_psi * sin_psi).max(0.0).sqrt();
    let dir = [-cos_psi, f64::from(orientation) * sin_psi];
    let mut y: State = [1.0, 0.0, dir[0] / c1, dir[1] / c1];
    let mut points = vec![[1.0, 0.0]];
    let mut times = vec![0.0];
    let max_steps = (20.0 / dt) as usize;
    for step in 1..=max_steps {
        let next = rk4(profile, &y, dt);
        let r_next = next[0].hypot(next[1]);
        if r_next >= 1.0 && step > 1 {
            // cut the last step at the boundary, linearly
            let r_prev = y[0].hypot(y[1]);
            let t = ((1.0 - r_prev) / (r_next - r_prev)).clamp(0.0, 1.0);
            points.push([y[0] + t * (next[0] - y[0]), y[1] + t * (next[1] - y[1])]);
            times.push((step as f64 - 1.0 + t) * dt);
            return Ok(GeodesicTrace { tip_radius: tip, orientation, points, times });
        }
        y = next;
        points.push([y[0], y[1]]);
        times.push(step as f64 * dt);
    }
    Err(Error::Parameter(format!("geodesic with tip {tip} did not leave the disk")))
}

fn segment_intersection(a0: [f64; 2], a1: [f64; 2], b0: [f64; 2], b1: [f64; 2]) -> Option<[f64; 2]> {
    let da = [a1[0] - a0[0], a1[1] - a0[1]];
    let db = [b1[0] - b0[0], b1[1] - b0[1]];
    let den = da[0] * db[1] - da[1] * db[0];
    if den == 0.0 {
        return None;
    }
    let w = [b0[0] - a0[0], b0[1] - a0[1]];
    let t = (w[0] * db[1] - w[1] * db[0]) / den;
    let u = (w[0] * da[1] - w[1] * da[0]) / den;
    if (0.0..=1.0).contains(&t) && (0.0..=1.0).contains(&u) {
        Some([a0[0] + t * da[0], a0[1] + t * da[1]])
    } else {
        None
    }
}

fn dist(a: [f64; 2], b: [f64; 2]) -> f64 {
    (a[0] - b[0]).hypot(a[1] - b[1])
}

/// Crossings of two polylines inside the ball of radius `window` around
/// `near`.
pub fn crossings_near(a: &GeodesicTrace, b: &GeodesicTrace, near: [f64; 2], window: f64) -> Vec<[f64; 2]> {
    let close = |t: &GeodesicTrace| -> Vec<usize> {
        (0..t.points.len().saturating_sub(1))
            .filter(|&k| dist(t.points[k], near) <= window || dist(t.points[k + 1], near) <= window)
            .collect()
    };
    let (sa, sb) = (close(a), close(b));
    let mut out = Vec::new();
    for &i in &sa {
        for &j in &sb {
            if let Some(p) = segment_intersection(a.points[i], a.points[i + 1], b.points[j], b.points[j + 1]) {
                out.push(p);
            }
        }
    }
    out
}

/// Outcome of replaying one predicted meeting.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct Replay {
    pub triple: IntersectionTriple,
    pub predicted: [f64; 2],
    /// Distance from the prediction to the nearest traced crossing, or
    /// infinity when the traces do not cross near it.
    pub miss: f64,
    /// Distance between the traced start points (the first meeting).
    pub start_gap: f64,
}

impl Replay {
    pub fn confirmed(&self, tol: f64) -> bool {
        self.start_gap <= tol && self.miss <= tol
    }
}

/// Traces every geodesic involved in `triples` once and checks that each
/// pair starts together and crosses again near the predicted meeting point.
pub fn replay_triples(profile: &RadialProfile, triples: &[IntersectionTriple], dt: f64) -> Result<Vec<Replay>> {
    let mut tips: Vec<f64> = triples.iter().flat_map(|t| [t.r0, t.r1]).collect();
    tips.sort_by(f64::total_cmp);
    tips.dedup();
    let traced: Vec<GeodesicTrace> = tips.par_iter().map(|&r| trace_geodesic(profile, r, 1, dt)).collect::<Result<_>>()?;
    let mut cache: HashMap<u64, GeodesicTrace> = HashMap::new();
    for t in traced {
        let mirror = GeodesicTrace {
            orientation: -1,
            points: t.points.iter().map(|p| [p[0], -p[1]]).collect(),
            ..t.clone()
        };
        cache.insert(key(t.tip_radius, 1), t);
        cache.insert(key(mirror.tip_radius, -1), mirror);
    }
    triples
        .par_iter()
        .map(|t| {
            let a = &cache[&key(t.r0, 1)];
            let b = &cache[&key(t.r1, t.orientation)];
            let predicted = t.meeting_point(profile)?;
            let miss = crossings_near(a, b, predicted, 10.0 * REPLAY_TOL)
                .into_iter()
                .map(|p| dist(p, predicted))
                .fold(f64::INFINITY, f64::min);
            Ok(Replay { triple: *t, predicted, miss, start_gap: dist(a.points[0], b.points[0]) })
        })
        .collect()
}

fn key(r: f64, orientation: i8) -> u64 {
    r.to_bits() ^ if orientation < 0 { 1 << 63 } else { 0 }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::herglotz::integrals::{half_length, opening_angle};

    #[test]
    fn euclidean_trace_is_a_chord() {
        let p = RadialProfile::uniform();
        let t = trace_geodesic(&p, 0.6, 1, 1e-3).unwrap();
        for q in &t.points {
            // the chord tipping at 0.6 with endpoint (1, 0)
            let n = [0.6f64.acos().cos(), 0.6f64.acos().sin()];
            assert!((q[0] * n[0] + q[1] * n[1] - 0.6).abs() < 1e-9);
        }
        assert!((t.times.last().unwrap() - 1.6).abs() < 1e-9);
    }

    #[test]
    fn traced_length_and_angle_match_the_integrals() {
        let p = RadialProfile::paper_example();
        for tip in [0.1, 0.45, 0.8] {
            let t = trace_geodesic(&p, tip, 1, 1e-3).unwrap();
            let total = *t.times.last().unwrap();
            assert!((total - 2.0 * half_length(&p, tip).unwrap()).abs() < 1e-6, "tip {tip}");
            let end = t.points.last().unwrap();
            let swept = end[1].atan2(end[0]).rem_euclid(2.0 * std::f64::consts::PI);
            let expect = (2.0 * opening_angle(&p, tip).unwrap()).rem_euclid(2.0 * std::f64::consts::PI);
            assert!((swept - expect).abs() < 1e-5, "tip {tip}: {swept} vs {expect}");
        }
    }

    #[test]
    fn segments_cross() {
        let p = segment_intersection([0.0, 0.0], [1.0, 1.0], [0.0, 1.0], [1.0, 0.0]).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-15 && (p[1] - 0.5).abs() < 1e-15);
        assert!(segment_intersection([0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [1.0, 1.0]).is_none());
    }
}
