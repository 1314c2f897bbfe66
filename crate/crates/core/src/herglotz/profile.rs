use std::fmt;
use std::sync::Arc;

use serde_json::{json, Value};

use crate::error::{Error, Result};

type Scalar = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// Radial sound speed `c(r)` on the closed unit disk.
#[derive(Clone)]
pub enum RadialProfile {
    /// `c(r) = speed`.
    Constant { speed: f64 },
    /// `c(r) = exp(-k/2 * exp(-r^2 / (2 sigma^2)))`, a slow region around the
    /// centre.
    GaussianDip { k: f64, sigma: f64 },
    /// Any profile given by closures for `c` and `c'`.
    Custom { name: String, c: Scalar, dc: Scalar },
}

impl fmt::Debug for RadialProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "RadialProfile({})", self.describe())
    }
}

impl RadialProfile {
    pub fn uniform() -> Self {
        RadialProfile::Constant { speed: 1.0 }
    }

    pub fn gaussian_dip(k: f64, sigma: f64) -> Result<Self> {
        if !k.is_finite() || !(sigma > 0.0) || !sigma.is_finite() {
            return Err(Error::Profile(format!("need finite k and sigma > 0, got k = {k}, sigma = {sigma}")));
        }
        Ok(RadialProfile::GaussianDip { k, sigma })
    }

    /// The example profile with `k = 1.6`, `sigma = 0.4`.
    pub fn paper_example() -> Self {
        RadialProfile::GaussianDip { k: 1.6, sigma: 0.4 }
    }

    pub fn custom<C, D>(name: impl Into<String>, c: C, dc: D) -> Self
    where
        C: Fn(f64) -> f64 + Send + Sync + 'static,
        D: Fn(f64) -> f64 + Send + Sync + 'static,
    {
        RadialProfile::Custom { name: name.into(), c: Arc::new(c), dc: Arc::new(dc) }
    }

    pub fn c(&self, r: f64) -> f64 {
        match self {
            RadialProfile::Constant { speed } => *speed,
            RadialProfile::GaussianDip { k, sigma } => (-0.5 * k * gauss(r, *sigma)).exp(),
            RadialProfile::Custom { c, .. } => c(r),
        }
    }

    pub fn dc(&self, r: f64) -> f64 {
        match self {
            RadialProfile::Constant { .. } => 0.0,
            RadialProfile::GaussianDip { k, sigma } => {
                let g = gauss(r, *sigma);
                (-0.5 * k * g).exp() * 0.5 * k * g * r / (sigma * sigma)
            }
            RadialProfile::Custom { dc, .. } => dc(r),
        }
    }

    /// `h(r) = r / c(r)`, the ray parameter of the geodesic tipping at `r`.
    pub fn ray_parameter(&self, r: f64) -> f64 {
        r / self.c(r)
    }

    /// `h(r + ds) - h(r)` without cancellation for small `ds`.
    pub fn slowness_gap(&self, r: f64, ds: f64) -> f64 {
        match self {
            RadialProfile::Constant { speed } => ds / speed,
            RadialProfile::GaussianDip { k, sigma } => {
                let s = r + ds;
                let gr = gauss(r, *sigma);
                // g(s) - g(r) = g(r) * expm1(-(s - r)(s + r) / (2 sigma^2))
                let dg = gr * (-(ds * (s + r)) / (2.0 * sigma * sigma)).exp_m1();
                let inv_cr = (0.5 * k * gr).exp();
                let inv_cs = (0.5 * k * (gr + dg)).exp();
                ds * inv_cs + r * inv_cr * (0.5 * k * dg).exp_m1()
            }
            RadialProfile::Custom { .. } => self.ray_parameter(r + ds) - self.ray_parameter(r),
        }
    }

    /// `d/dr (r / c(r)) = (c - r c') / c^2`.
    pub fn herglotz_derivative(&self, r: f64) -> f64 {
        let c = self.c(r);
        (c - r * self.dc(r)) / (c * c)
    }

    pub fn describe(&self) -> String {
        match self {
            RadialProfile::Constant { speed } => format!("constant c = {speed}"),
            RadialProfile::GaussianDip { k, sigma } => format!("gaussian dip k = {k}, sigma = {sigma}"),
            RadialProfile::Custom { name, .. } => name.clone(),
        }
    }

    /// Named parameters, for provenance blocks.
    pub fn parameters(&self) -> Value {
        match self {
            RadialProfile::Constant { speed } => json!({ "profile": "constant", "speed": speed }),
            RadialProfile::GaussianDip { k, sigma } => json!({ "profile": "gaussian_dip", "k": k, "sigma": sigma }),
            RadialProfile::Custom { name, .. } => json!({ "profile": "custom", "name": name }),
        }
    }
}

fn gauss(r: f64, sigma: f64) -> f64 {
    (-r * r / (2.0 * sigma * sigma)).exp()
}

/// Smallest value of `d/dr (r / c(r))` over `grid + 1` equally spaced radii
/// in `[0, 1]`. Positive means the profile satisfies the Herglotz condition.
pub fn herglotz_margin(profile: &RadialProfile, grid: usize) -> Result<f64> {
    if grid == 0 {
        return Err(Error::Parameter("herglotz grid needs at least one interval".into()));
    }
    let mut margin = f64::INFINITY;
    for i in 0..=grid {
        let r = i as f64 / grid as f64;
        let c = profile.c(r);
        if !(c > 0.0) || !c.is_finite() {
            return Err(Error::Profile(format!("sound speed {c} at r = {r}")));
        }
        let v = profile.herglotz_derivative(r);
        if !v.is_finite() {
            return Err(Error::Profile(format!("non-finite derivative at r = {r}")));
        }
        margin = margin.min(v);
    }
    Ok(margin)
}

/// Fails unless the profile is positive and Herglotz on a 1000-step grid.
pub(crate) fn require_herglotz(profile: &RadialProfile) -> Result<()> {
    let m = herglotz_margin(profile, 1000)?;
    if m > 0.0 {
        Ok(())
    } else {
        Err(Error::Profile(format!("{} violates the Herglotz condition (margin {m})", profile.describe())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn derivative_matches_finite_difference() {
        let p = RadialProfile::paper_example();
        for r in [0.05, 0.3, 0.4, 0.77] {
            let h = 1e-6;
            let fd = (p.c(r + h) - p.c(r - h)) / (2.0 * h);
            assert!((fd - p.dc(r)).abs() < 1e-8);
        }
    }

    #[test]
    fn slowness_gap_matches_direct_difference() {
        let p = RadialProfile::paper_example();
        for (r, ds) in [(0.2, 0.3), (0.5, 1e-3), (0.01, 0.5)] {
            let direct = p.ray_parameter(r + ds) - p.ray_parameter(r);
            assert!((p.slowness_gap(r, ds) - direct).abs() < 1e-14);
        }
        // tiny gaps keep their relative accuracy
        let ds = 1e-14;
        let rel = p.slowness_gap(0.3, ds) / (ds * p.herglotz_derivative(0.3));
        assert!((rel - 1.0).abs() < 1e-9);
    }

    #[test]
    fn margins() {
        assert_eq!(herglotz_margin(&RadialProfile::uniform(), 100).unwrap(), 1.0);
        assert!(herglotz_margin(&RadialProfile::paper_example(), 1000).unwrap() > 0.0);
        // r (2 - r) has derivative 2 - 2r, zero at the boundary
        let steep = RadialProfile::custom("1/(2-r)", |r| 1.0 / (2.0 - r), |r| 1.0 / ((2.0 - r) * (2.0 - r)));
        assert!(herglotz_margin(&steep, 100).unwrap() <= 1e-12);
        let negative = RadialProfile::Constant { speed: -1.0 };
        assert!(herglotz_margin(&negative, 10).is_err());
    }
}
