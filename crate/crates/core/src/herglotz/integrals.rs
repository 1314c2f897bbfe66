//! Half length and opening angle of the geodesics of a radial Herglotz
//! disk.
//!
//! A geodesic tipping at radius `r` has ray parameter `p = r / c(r)`. Along
//! it, at radius `s`, the travelled length and the swept polar angle grow
//! like `(1/c(s)) / sqrt(1 - q^2)` and `(p c(s) / s^2) / sqrt(1 - q^2)`
//! with `q = p c(s) / s`. Both blow up like `(s - r)^{-1/2}` at the tip, so
//! the integrals run over `u` with `s = r + u^2`. Writing `h(s) = s / c(s)`,
//! `1 - q^2 = (h(s) - p)(h(s) + p) / h(s)^2`, and the integrands become
//!
//!   angle:  2u (p / s) / sqrt(gap (h + p))
//!   length: 2u (s / c^2) / sqrt(gap (h + p))
//!
//! where `gap = h(s) - h(r)` comes from `RadialProfile::slowness_gap`. Both
//! are bounded, with finite limits at `u = 0`.

use std::f64::consts::FRAC_PI_2;

use serde::{Deserialize, Serialize};

use super::profile::RadialProfile;
use crate::error::{Error, Result};
use crate::quadrature::{integrate, Integral, QuadOptions};

/// Tip radius of a geodesic with its half length and half opening angle.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeodesicRecord {
    pub tip_radius: f64,
    pub half_length: f64,
    pub half_angle: f64,
}

#[derive(Clone, Copy)]
pub(crate) enum Kind {
    Angle,
    Length,
}

pub(crate) fn integrand(profile: &RadialProfile, r: f64, p: f64, u: f64, kind: Kind) -> f64 {
    if u == 0.0 {
        if r == 0.0 {
            return 0.0;
        }
        // gap ~ h'(r) u^2 and h + p ~ 2p
        let root = (2.0 * p * profile.herglotz_derivative(r)).sqrt();
        let c = profile.c(r);
        return match kind {
            Kind::Angle => 2.0 * (p / r) / root,
            Kind::Length => 2.0 * (r / (c * c)) / root,
        };
    }
    let ds = u * u;
    let s = r + ds;
    let c = profile.c(s);
    let h = s / c;
    let root = (profile.slowness_gap(r, ds) * (h + p)).sqrt();
    match kind {
        Kind::Angle => 2.0 * u * (p / s) / root,
        Kind::Length => 2.0 * u * (s / (c * c)) / root,
    }
}

fn check_order(r: f64, lo: f64, hi: f64) -> Result<()> {
    if !(0.0 <= r && r <= lo && lo <= hi && hi <= 1.0) {
        return Err(Error::Parameter(format!(
            "need 0 <= r <= lo <= hi <= 1, got r = {r}, lo = {lo}, hi = {hi}"
        )));
    }
    Ok(())
}

fn partial(profile: &RadialProfile, r: f64, lo: f64, hi: f64, kind: Kind, opts: QuadOptions) -> Result<Integral> {
    check_order(r, lo, hi)?;
    let p = profile.ray_parameter(r);
    let (a, b) = ((lo - r).sqrt(), (hi - r).sqrt());
    integrate(|u| integrand(profile, r, p, u, kind), a, b, opts)
}

/// Polar angle swept by the geodesic tipping at `r` between its points at
/// radii `lo` and `hi`, with error estimate.
///
/// For the diameter (`r = 0`) the angle jumps by `pi/2` at the centre, so
/// the value is `pi/2` when `lo = 0 < hi` and 0 otherwise.
pub fn partial_opening_angle_with(
    profile: &RadialProfile,
    r: f64,
    lo: f64,
    hi: f64,
    opts: QuadOptions,
) -> Result<Integral> {
    check_order(r, lo, hi)?;
    if r == 0.0 {
        let value = if lo == 0.0 && hi > 0.0 { FRAC_PI_2 } else { 0.0 };
        return Ok(Integral { value, error: 0.0 });
    }
    partial(profile, r, lo, hi, Kind::Angle, opts)
}

pub fn partial_opening_angle(profile: &RadialProfile, r: f64, lo: f64, hi: f64) -> Result<f64> {
    Ok(partial_opening_angle_with(profile, r, lo, hi, QuadOptions::default())?.value)
}

/// Length of the geodesic tipping at `r` between its points at radii `lo`
/// and `hi`, with error estimate.
pub fn partial_length_with(
    profile: &RadialProfile,
    r: f64,
    lo: f64,
    hi: f64,
    opts: QuadOptions,
) -> Result<Integral> {
    partial(profile, r, lo, hi, Kind::Length, opts)
}

pub fn partial_length(profile: &RadialProfile, r: f64, lo: f64, hi: f64) -> Result<f64> {
    Ok(partial_length_with(profile, r, lo, hi, QuadOptions::default())?.value)
}

/// Half opening angle `alpha(r)`: the polar angle between the tipping point
/// and the boundary endpoint. `alpha(0) = pi/2` is returned analytically.
pub fn opening_angle(profile: &RadialProfile, r: f64) -> Result<f64> {
    if r == 0.0 {
        return Ok(FRAC_PI_2);
    }
    partial_opening_angle(profile, r, r, 1.0)
}

/// Half length `L(r)`: the length from the tipping point to the boundary.
/// At `r = 0` this is the radial travel time to the boundary.
pub fn half_length(profile: &RadialProfile, r: f64) -> Result<f64> {
    partial_length(profile, r, r, 1.0)
}

pub fn geodesic_record(profile: &RadialProfile, r: f64) -> Result<GeodesicRecord> {
    Ok(GeodesicRecord { tip_radius: r, half_length: half_length(profile, r)?, half_angle: opening_angle(profile, r)? })
}

/// `(r, L(r), alpha(r))` on `n + 1` equally spaced radii in `[0, 1]`.
pub fn geodesic_table(profile: &RadialProfile, n: usize) -> Result<Vec<GeodesicRecord>> {
    use rayon::prelude::*;
    if n == 0 {
        return Err(Error::Parameter("table needs at least one interval".into()));
    }
    (0..=n).into_par_iter().map(|i| geodesic_record(profile, i as f64 / n as f64)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_closed_forms() {
        let p = RadialProfile::uniform();
        for i in 1..10 {
            let r = i as f64 / 10.0;
            assert!((half_length(&p, r).unwrap() - (1.0 - r * r).sqrt()).abs() < 1e-10);
            assert!((opening_angle(&p, r).unwrap() - r.acos()).abs() < 1e-10);
        }
        assert!((half_length(&p, 0.0).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn boundary_and_centre() {
        let p = RadialProfile::paper_example();
        assert_eq!(half_length(&p, 1.0).unwrap(), 0.0);
        assert_eq!(opening_angle(&p, 1.0).unwrap(), 0.0);
        assert_eq!(opening_angle(&p, 0.0).unwrap(), FRAC_PI_2);
        assert_eq!(partial_opening_angle(&p, 0.3, 0.6, 0.6).unwrap(), 0.0);
    }

    #[test]
    fn ordering_is_enforced() {
        let p = RadialProfile::uniform();
        assert!(partial_opening_angle(&p, 0.5, 0.4, 0.9).is_err());
        assert!(partial_length(&p, 0.5, 0.9, 0.6).is_err());
        assert!(half_length(&p, -0.1).is_err());
    }

    #[test]
    fn small_tips_approach_the_diameter() {
        let p = RadialProfile::paper_example();
        let a = opening_angle(&p, 1e-6).unwrap();
        assert!((a - FRAC_PI_2).abs() < 1e-4, "{a}");
        let l = half_length(&p, 1e-6).unwrap();
        assert!((l - half_length(&p, 0.0).unwrap()).abs() < 1e-4);
    }
}
