use log::warn;

use super::integrals::partial_opening_angle;
use super::profile::RadialProfile;
use crate::error::{Error, Result};
use crate::roots::bisect;

/// Finite-difference step used for `d/dr alpha~`.
pub const FD_STEP: f64 = 1e-4;
/// Width below which a bracketed conjugate radius counts as located.
pub const ROOT_TOL: f64 = 1e-6;

/// Opening angle with the boundary replaced by the circle of radius `r0`:
/// the polar angle swept by the geodesic tipping at `r` before it reaches
/// radius `r0`.
pub fn alpha_tilde(profile: &RadialProfile, r: f64, r0: f64) -> Result<f64> {
    partial_opening_angle(profile, r, r, r0)
}

/// Central difference of `alpha~(.; r0)` at `r`, Richardson-extrapolated
/// from steps `h` and `h / 2`.
pub fn alpha_tilde_derivative(profile: &RadialProfile, r: f64, r0: f64, h: f64) -> Result<f64> {
    let central = |h: f64| -> Result<f64> {
        Ok((alpha_tilde(profile, r + h, r0)? - alpha_tilde(profile, r - h, r0)?) / (2.0 * h))
    };
    let coarse = central(h)?;
    let fine = central(0.5 * h)?;
    let d = (4.0 * fine - coarse) / 3.0;
    if d.is_finite() {
        Ok(d)
    } else {
        Err(Error::Quadrature { estimate: d, error: f64::NAN })
    }
}

/// Radii `r` in `(0, r0)` where `d/dr alpha~(r; r0)` vanishes, i.e. where
/// neighbouring geodesics reach radius `r0` at the same angle to first
/// order. Sign changes are bracketed on `bracket_grid` intervals and bisected
/// to `ROOT_TOL`.
pub fn conjugate_radii(profile: &RadialProfile, r0: f64, bracket_grid: usize) -> Result<Vec<f64>> {
    conjugate_radii_with_step(profile, r0, bracket_grid, FD_STEP)
}

pub fn conjugate_radii_with_step(profile: &RadialProfile, r0: f64, bracket_grid: usize, h: f64) -> Result<Vec<f64>> {
    if !(r0 > 0.0 && r0 <= 1.0) {
        return Err(Error::Parameter(format!("r0 must lie in (0, 1], got {r0}")));
    }
    if bracket_grid < 2 {
        return Err(Error::Parameter("bracket grid needs at least two intervals".into()));
    }
    if !(h > 0.0) || 8.0 * h >= r0 {
        return Err(Error::Parameter(format!("finite-difference step {h} too large for r0 = {r0}")));
    }
    let lo = 2.0 * h;
    let hi = r0 - 2.0 * h;
    let deriv = |r: f64| alpha_tilde_derivative(profile, r, r0, h);

    let mut samples: Vec<(f64, f64)> = Vec::with_capacity(bracket_grid + 1);
    for i in 0..=bracket_grid {
        let r = lo + (hi - lo) * i as f64 / bracket_grid as f64;
        match deriv(r) {
            Ok(d) => samples.push((r, d)),
            Err(e) => {
                warn!("derivative of alpha~ failed at r = {r} (r0 = {r0}): {e}; shrinking the search to r < {r}");
                break;
            }
        }
    }

    let mut roots = Vec::new();
    for w in samples.windows(2) {
        let ((a, fa), (b, fb)) = (w[0], w[1]);
        if fa == 0.0 {
            roots.push(a);
            continue;
        }
        if fa.signum() == fb.signum() {
            continue;
        }
        let root = bisect(|r| deriv(r).unwrap_or(f64::NAN), a, b, ROOT_TOL);
        if let Some(root) = root {
            roots.push(root);
        }
    }
    Ok(roots)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn euclidean_disk_has_none() {
        let p = RadialProfile::uniform();
        for r0 in [0.3, 0.9, 1.0] {
            assert!(conjugate_radii(&p, r0, 50).unwrap().is_empty());
        }
    }

    #[test]
    fn derivative_matches_closed_form() {
        // alpha~(r; r0) = arccos(r / r0) for c = 1
        let p = RadialProfile::uniform();
        let (r, r0) = (0.3, 0.8);
        let d = alpha_tilde_derivative(&p, r, r0, FD_STEP).unwrap();
        let exact = -1.0 / (r0 * r0 - r * r).sqrt();
        assert!((d - exact).abs() < 1e-6, "{d} vs {exact}");
    }

    #[test]
    fn rejects_bad_r0() {
        assert!(conjugate_radii(&RadialProfile::uniform(), 0.0, 10).is_err());
        assert!(conjugate_radii(&RadialProfile::uniform(), 1.5, 10).is_err());
    }
}
