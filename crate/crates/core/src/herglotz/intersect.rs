//! Search for pairs of geodesics that leave a common boundary point and
//! meet again inside the disk.
//!
//! Put the common endpoint `E` at polar angle 0 and let `gamma0` (tip
//! radius `r0`) leave `E` with increasing polar angle. After its tip, at
//! radius `s`, it sits at angle `alpha(r0) + alpha(r0; r0, s)`. The second
//! geodesic `gamma1` (tip `r1`) leaves `E` turning in direction
//! `orientation = +1` (same as `gamma0`) or `-1`, and passes radius `s` at
//! angle `orientation * alpha(r1; s, 1)` before its tip and
//! `orientation * (alpha(r1) + alpha(r1; r1, s))` after it. A second
//! meeting point at radius `r2` is a zero of the difference of these angles
//! modulo `2 pi`.

use std::f64::consts::PI;

use log::{info, warn};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::integrals::{integrand, opening_angle, partial_opening_angle, Kind};
use super::profile::{require_herglotz, RadialProfile};
use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadOptions};
use crate::roots::brent;

/// Default number of tip radii searched.
pub const DEFAULT_GRID: usize = 200;
/// Meetings closer to the boundary than this are discarded.
pub const BOUNDARY_GUARD: f64 = 1e-6;

const TABLE_PANELS: usize = 128;
const SCAN_POINTS: usize = 64;

/// Which half of `gamma1` contains the meeting point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Branch {
    /// Between `E` and the tip of `gamma1`.
    BeforeTip,
    /// Past the tip of `gamma1`.
    AfterTip,
}

/// Two geodesics from a common boundary point meeting again at radius `r2`.
/// The meeting point always lies past the tip of `gamma0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IntersectionTriple {
    pub r0: f64,
    pub r1: f64,
    pub r2: f64,
    /// Winding number: the angles agree up to `2 pi m`.
    pub m: i32,
    pub branch: Branch,
    pub orientation: i8,
}

impl IntersectionTriple {
    /// Polar angle of the meeting point, in `[0, 2 pi)`, with `E` at angle 0.
    pub fn meeting_angle(&self, profile: &RadialProfile) -> Result<f64> {
        let theta = opening_angle(profile, self.r0)? + partial_opening_angle(profile, self.r0, self.r0, self.r2)?;
        Ok(theta.rem_euclid(2.0 * PI))
    }

    /// Meeting point in disk coordinates.
    pub fn meeting_point(&self, profile: &RadialProfile) -> Result<[f64; 2]> {
        let theta = self.meeting_angle(profile)?;
        Ok([self.r2 * theta.cos(), self.r2 * theta.sin()])
    }

    fn key(&self) -> (f64, f64, f64, Branch, i8, i32) {
        (self.r0, self.r1, self.r2, self.branch, self.orientation, self.m)
    }
}

pub(crate) fn canonical_order(a: &IntersectionTriple, b: &IntersectionTriple) -> std::cmp::Ordering {
    let (ka, kb) = (a.key(), b.key());
    ka.0.total_cmp(&kb.0)
        .then(ka.1.total_cmp(&kb.1))
        .then(ka.2.total_cmp(&kb.2))
        .then(ka.3.cmp(&kb.3))
        .then(ka.4.cmp(&kb.4))
        .then(ka.5.cmp(&kb.5))
}

/// Tip radii searched on a grid of `n` points: `i / (n + 1)`, `i = 1..=n`.
pub fn tip_grid(n: usize) -> Vec<f64> {
    (1..=n).map(|i| i as f64 / (n + 1) as f64).collect()
}

/// Cumulative `alpha(r; r, s)` tabulated in `u = sqrt(s - r)` with the
/// integrand as slope, for cubic Hermite lookups.
struct AngleTable {
    r: f64,
    du: f64,
    cum: Vec<f64>,
    slope: Vec<f64>,
}

impl AngleTable {
    fn new(profile: &RadialProfile, r: f64) -> Result<Self> {
        let p = profile.ray_parameter(r);
        let umax = (1.0 - r).sqrt();
        let du = umax / TABLE_PANELS as f64;
        let f = |u: f64| integrand(profile, r, p, u, Kind::Angle);
        let mut cum = Vec::with_capacity(TABLE_PANELS + 1);
        let mut slope = Vec::with_capacity(TABLE_PANELS + 1);
        let mut acc = 0.0;
        cum.push(0.0);
        slope.push(f(0.0));
        for j in 0..TABLE_PANELS {
            let (a, b) = (j as f64 * du, if j + 1 == TABLE_PANELS { umax } else { (j + 1) as f64 * du });
            acc += integrate(f, a, b, QuadOptions::default())?.value;
            cum.push(acc);
            slope.push(f(b));
        }
        Ok(AngleTable { r, du, cum, slope })
    }

    fn total(&self) -> f64 {
        self.cum[TABLE_PANELS]
    }

    /// Interpolated `alpha(r; r, s)`.
    fn at(&self, s: f64) -> f64 {
        let u = (s - self.r).max(0.0).sqrt();
        let x = u / self.du;
        let j = (x.floor() as usize).min(TABLE_PANELS - 1);
        let t = x - j as f64;
        let (y0, y1) = (self.cum[j], self.cum[j + 1]);
        let (m0, m1) = (self.slope[j] * self.du, self.slope[j + 1] * self.du);
        let (t2, t3) = (t * t, t * t * t);
        (2.0 * t3 - 3.0 * t2 + 1.0) * y0 + (t3 - 2.0 * t2 + t) * m0 + (-2.0 * t3 + 3.0 * t2) * y1 + (t3 - t2) * m1
    }
}

/// Largest `|m|` worth searching: both sides of the angle conditions lie in
/// `[0, 2 A]` with `A` the largest opening angle on the grid, so
/// `2 pi |m| <= 4 A`.
pub fn winding_bound(max_opening_angle: f64) -> i32 {
    (4.0 * max_opening_angle / (2.0 * PI)).floor() as i32
}

struct Condition {
    branch: Branch,
    orientation: i8,
    m: i32,
}

/// Exact residual of the angle condition at radius `s`.
fn exact_residual(profile: &RadialProfile, r0: f64, a0: f64, r1: f64, a1: f64, cond: &Condition, s: f64) -> f64 {
    let lhs = match partial_opening_angle(profile, r0, r0, s) {
        Ok(v) => a0 + v,
        Err(_) => return f64::NAN,
    };
    let rhs = match cond.branch {
        Branch::BeforeTip => partial_opening_angle(profile, r1, s, 1.0),
        Branch::AfterTip => partial_opening_angle(profile, r1, r1, s).map(|v| a1 + v),
    };
    match rhs {
        Ok(rhs) => lhs - f64::from(cond.orientation) * rhs - 2.0 * PI * f64::from(cond.m),
        Err(_) => f64::NAN,
    }
}

/// All second meetings of geodesic pairs with tips on `tip_grid(grid)`.
///
/// For each ordered pair of tips, each branch, orientation and winding
/// number, the angle residual is scanned on interpolation tables over
/// `r2 in [max(r0, r1), 1)`, and each sign change is polished by Brent's
/// method on the exact quadrature. A geodesic is never paired with itself,
/// and with the same tip and opposite orientation only the mirror-image
/// meetings past both tips are genuine.
pub fn find_intersecting_pairs(profile: &RadialProfile, grid: usize) -> Result<Vec<IntersectionTriple>> {
    if grid == 0 {
        return Err(Error::Parameter("intersection grid needs at least one radius".into()));
    }
    require_herglotz(profile)?;
    let tips = tip_grid(grid);
    let tables: Vec<AngleTable> = tips.par_iter().map(|&r| AngleTable::new(profile, r)).collect::<Result<_>>()?;
    let exact: Vec<f64> = tips.par_iter().map(|&r| opening_angle(profile, r)).collect::<Result<_>>()?;
    let max_angle = exact.iter().cloned().fold(0.0, f64::max);
    let m_max = winding_bound(max_angle);
    info!("winding search |m| <= {m_max} (largest opening angle {max_angle:.6})");

    let mut conditions = Vec::new();
    for branch in [Branch::BeforeTip, Branch::AfterTip] {
        for orientation in [1i8, -1] {
            for m in -m_max..=m_max {
                conditions.push(Condition { branch, orientation, m });
            }
        }
    }

    let unpolished = std::sync::atomic::AtomicUsize::new(0);
    let mut triples: Vec<IntersectionTriple> = (0..grid)
        .into_par_iter()
        .flat_map_iter(|i| {
            let mut found = Vec::new();
            for j in 0..grid {
                let (t0, t1) = (&tables[i], &tables[j]);
                let (r0, r1) = (tips[i], tips[j]);
                let lo = r0.max(r1);
                let scan: Vec<f64> = (0..=SCAN_POINTS)
                    .map(|k| {
                        let x = k as f64 / SCAN_POINTS as f64;
                        lo + (1.0 - lo) * x * x
                    })
                    .collect();
                let alpha0: Vec<f64> = scan.iter().map(|&s| t0.at(s)).collect();
                let alpha1: Vec<f64> = scan.iter().map(|&s| t1.at(s)).collect();
                for cond in &conditions {
                    if i == j && cond.orientation == 1 {
                        continue;
                    }
                    let sign = f64::from(cond.orientation);
                    let shift = 2.0 * PI * f64::from(cond.m);
                    let table_residual = |k: usize| {
                        let rhs = match cond.branch {
                            Branch::BeforeTip => t1.total() - alpha1[k],
                            Branch::AfterTip => t1.total() + alpha1[k],
                        };
                        t0.total() + alpha0[k] - sign * rhs - shift
                    };
                    let values: Vec<f64> = (0..=SCAN_POINTS).map(table_residual).collect();
                    for k in 0..SCAN_POINTS {
                        if values[k] == 0.0 || values[k].signum() != values[k + 1].signum() {
                            let root = polish(profile, (r0, exact[i]), (r1, exact[j]), cond, &scan, k);
                            let r2 = match root {
                                Some(r2) => r2,
                                None => {
                                    unpolished.fetch_add(1, std::sync::atomic::Ordering::Relaxed);
                                    continue;
                                }
                            };
                            if r2 >= 1.0 - BOUNDARY_GUARD {
                                continue;
                            }
                            // a widened bracket can land on a root found from the neighbouring interval
                            if let Some(prev) = found.last() {
                                let prev: &IntersectionTriple = prev;
                                if prev.r0 == r0
                                    && prev.r1 == r1
                                    && prev.m == cond.m
                                    && prev.branch == cond.branch
                                    && prev.orientation == cond.orientation
                                    && (prev.r2 - r2).abs() < 1e-9
                                {
                                    continue;
                                }
                            }
                            found.push(IntersectionTriple {
                                r0,
                                r1,
                                r2,
                                m: cond.m,
                                branch: cond.branch,
                                orientation: cond.orientation,
                            });
                        }
                    }
                }
            }
            found
        })
        .collect();
    let skipped = unpolished.into_inner();
    if skipped > 0 {
        warn!("{skipped} interpolated sign changes did not survive exact evaluation");
    }
    triples.sort_by(canonical_order);
    Ok(triples)
}

/// Refines a table bracket `[scan[k], scan[k + 1]]` on the exact residual,
/// widening by one scan interval on each side when rounding differences
/// between table and quadrature spoil the bracket.
fn polish(
    profile: &RadialProfile,
    (r0, a0): (f64, f64),
    (r1, a1): (f64, f64),
    cond: &Condition,
    scan: &[f64],
    k: usize,
) -> Option<f64> {
    let f = |s: f64| exact_residual(profile, r0, a0, r1, a1, cond, s);
    let last = scan.len() - 1;
    for widen in 0..=1usize {
        let a = scan[k.saturating_sub(widen)];
        let b = scan[(k + 1 + widen).min(last)];
        if let Some(root) = brent(f, a, b, 1e-13, 200) {
            return Some(root);
        }
    }
    None
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table_matches_quadrature() {
        let p = RadialProfile::paper_example();
        for r in [0.01, 0.3, 0.8] {
            let t = AngleTable::new(&p, r).unwrap();
            for s in [r + 1e-4, 0.5 * (r + 1.0), 0.999] {
                let exact = partial_opening_angle(&p, r, r, s).unwrap();
                assert!((t.at(s) - exact).abs() < 1e-6, "r = {r}, s = {s}: {} vs {exact}", t.at(s));
            }
            assert!((t.total() - opening_angle(&p, r).unwrap()).abs() < 1e-10);
        }
    }

    #[test]
    fn euclidean_chords_meet_once() {
        assert!(find_intersecting_pairs(&RadialProfile::uniform(), 20).unwrap().is_empty());
    }

    #[test]
    fn winding_bound_for_small_angles() {
        assert_eq!(winding_bound(PI / 2.0), 1);
        assert_eq!(winding_bound(1.0), 0);
    }
}
