use rayon::prelude::*;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::integrals::{half_length, partial_length};
use super::intersect::{Branch, IntersectionTriple};
use super::profile::RadialProfile;
use crate::error::{Error, Result};

/// Relative tolerance under which two connecting lengths count as equal.
pub const LENGTH_RTOL: f64 = 1e-8;

/// A meeting where the two geodesics reach the common point with different
/// lengths, so the longer one is not minimizing up to there.
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct FailingTriple {
    pub triple: IntersectionTriple,
    /// Lengths from the common boundary point to the meeting point, along
    /// `gamma0` and `gamma1`.
    pub lengths: [f64; 2],
    /// Time each geodesic has travelled past its midpoint at the meeting
    /// point (negative before the midpoint).
    pub extensions: [f64; 2],
    /// Index (0 or 1) of the longer, non-minimizing geodesic.
    pub failing: usize,
}

impl FailingTriple {
    /// Extension of the non-minimizing geodesic.
    pub fn extension(&self) -> f64 {
        self.extensions[self.failing]
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MinimalityReport {
    pub examined: usize,
    pub failing_triples: Vec<FailingTriple>,
    /// Extension of the non-minimizing geodesic of each failing triple.
    pub extension_times: Vec<f64>,
    /// Smallest extension time; infinite (written as `null`) when nothing
    /// fails.
    #[serde(serialize_with = "inf_as_null", deserialize_with = "null_as_inf")]
    pub delta: f64,
}

fn inf_as_null<S: Serializer>(v: &f64, s: S) -> std::result::Result<S::Ok, S::Error> {
    if v.is_finite() {
        s.serialize_f64(*v)
    } else {
        s.serialize_none()
    }
}

fn null_as_inf<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<f64, D::Error> {
    Ok(Option::<f64>::deserialize(d)?.unwrap_or(f64::INFINITY))
}

fn lengths(profile: &RadialProfile, t: &IntersectionTriple) -> Result<([f64; 2], [f64; 2])> {
    let past0 = partial_length(profile, t.r0, t.r0, t.r2)?;
    let half0 = half_length(profile, t.r0)?;
    let half1 = half_length(profile, t.r1)?;
    let (len1, ext1) = match t.branch {
        Branch::BeforeTip => {
            let before = partial_length(profile, t.r1, t.r2, 1.0)?;
            (before, before - half1)
        }
        Branch::AfterTip => {
            let past1 = partial_length(profile, t.r1, t.r1, t.r2)?;
            (half1 + past1, past1)
        }
    };
    Ok(([half0 + past0, len1], [past0, ext1]))
}

/// Compares the two connecting lengths of every meeting and records, for
/// the meetings where they differ, how far past its midpoint the longer
/// geodesic has run. `delta` is the least such time.
pub fn minimality_margin(profile: &RadialProfile, triples: &[IntersectionTriple]) -> Result<MinimalityReport> {
    let evaluated: Vec<Option<FailingTriple>> = triples
        .par_iter()
        .map(|t| {
            let (len, ext) = lengths(profile, t)?;
            let scale = len[0].max(len[1]);
            if (len[0] - len[1]).abs() <= LENGTH_RTOL * scale {
                return Ok(None);
            }
            let failing = if len[0] > len[1] { 0 } else { 1 };
            Ok(Some(FailingTriple { triple: *t, lengths: len, extensions: ext, failing }))
        })
        .collect::<Result<_>>()?;
    let failing_triples: Vec<FailingTriple> = evaluated.into_iter().flatten().collect();
    let extension_times: Vec<f64> = failing_triples.iter().map(FailingTriple::extension).collect();
    let delta = extension_times.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(MinimalityReport { examined: triples.len(), failing_triples, extension_times, delta })
}

/// If every geodesic minimizes until `delta` past its midpoint, the travel
/// time map is an `eps`-local isometry for every `eps < 2 delta`. Returns
/// that open bound.
pub fn flie_from_delta(delta: f64) -> Result<f64> {
    if !(delta > 0.0) {
        return Err(Error::Parameter(format!("minimality margin must be positive, got {delta}")));
    }
    Ok(2.0 * delta)
}
