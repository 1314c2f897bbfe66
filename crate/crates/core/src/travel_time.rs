//! Travel time maps `p -> d(p, .)|_S`, distances between travel time data,
//! and the local isometry test battery run on sampled spaces.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::metric::{self, FiniteMetricSpace, GhEstimate};

/// Rows closer than this (relative to the largest entry) count as equal
/// when testing injectivity of the travel time map.
pub const DUPLICATE_RTOL: f64 = 1e-12;

/// Indices of a host space where distances are observed.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MeasurementSet {
    indices: Vec<usize>,
}

impl MeasurementSet {
    pub fn new(indices: Vec<usize>, space: &FiniteMetricSpace) -> Result<Self> {
        if indices.is_empty() {
            return Err(Error::Parameter("measurement set is empty".into()));
        }
        let mut seen = vec![false; space.len()];
        for &i in &indices {
            space.check_index(i)?;
            if seen[i] {
                return Err(Error::Parameter(format!("measurement index {i} repeated")));
            }
            seen[i] = true;
        }
        Ok(MeasurementSet { indices })
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }
}

/// Travel time functions of all sources restricted to the sensors, one row
/// per source.
#[derive(Debug, Clone, PartialEq)]
pub struct TravelTimeData {
    n_sources: usize,
    n_sensors: usize,
    rows: Vec<f64>,
    source_labels: Vec<String>,
    sensor_labels: Vec<String>,
}

impl TravelTimeData {
    /// Builds data from explicit rows, checking shape and sign.
    pub fn from_rows(rows: Vec<Vec<f64>>, source_labels: Vec<String>, sensor_labels: Vec<String>) -> Result<Self> {
        let n_sources = rows.len();
        let n_sensors = sensor_labels.len();
        if source_labels.len() != n_sources {
            return Err(Error::LengthMismatch(source_labels.len(), n_sources));
        }
        let mut flat = Vec::with_capacity(n_sources * n_sensors);
        for (p, row) in rows.into_iter().enumerate() {
            if row.len() != n_sensors {
                return Err(Error::LengthMismatch(row.len(), n_sensors));
            }
            for (z, v) in row.into_iter().enumerate() {
                if !v.is_finite() || v < 0.0 {
                    return Err(Error::Parameter(format!("travel time ({p}, {z}) = {v} is not a nonnegative number")));
                }
                flat.push(v);
            }
        }
        Ok(TravelTimeData { n_sources, n_sensors, rows: flat, source_labels, sensor_labels })
    }

    pub fn n_sources(&self) -> usize {
        self.n_sources
    }

    pub fn n_sensors(&self) -> usize {
        self.n_sensors
    }

    #[inline]
    pub fn row(&self, p: usize) -> &[f64] {
        &self.rows[p * self.n_sensors..(p + 1) * self.n_sensors]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> {
        self.rows.chunks_exact(self.n_sensors.max(1)).take(self.n_sources)
    }

    pub fn source_labels(&self) -> &[String] {
        &self.source_labels
    }

    pub fn sensor_labels(&self) -> &[String] {
        &self.sensor_labels
    }

    fn max_entry(&self) -> f64 {
        self.rows.iter().copied().fold(0.0, f64::max)
    }

    /// Same data restricted to a subset of sources.
    pub fn select_sources(&self, sources: &[usize]) -> Result<Self> {
        let mut rows = Vec::with_capacity(sources.len());
        let mut labels = Vec::with_capacity(sources.len());
        for &p in sources {
            if p >= self.n_sources {
                return Err(Error::Index { index: p, n: self.n_sources });
            }
            rows.push(self.row(p).to_vec());
            labels.push(self.source_labels[p].clone());
        }
        Self::from_rows(rows, labels, self.sensor_labels.clone())
    }
}

/// `rows[p][z] = d(p, S[z])` for every point `p` of the space.
pub fn travel_time_data(space: &FiniteMetricSpace, s: &MeasurementSet) -> Result<TravelTimeData> {
    if s.is_empty() {
        return Err(Error::Parameter("measurement set is empty".into()));
    }
    for &z in s.indices() {
        space.check_index(z)?;
    }
    let n_sensors = s.len();
    let mut rows = Vec::with_capacity(space.len() * n_sensors);
    for p in 0..space.len() {
        let row = space.row(p);
        rows.extend(s.indices().iter().map(|&z| row[z]));
    }
    Ok(TravelTimeData {
        n_sources: space.len(),
        n_sensors,
        rows,
        source_labels: (0..space.len()).map(|i| space.label(i)).collect(),
        sensor_labels: s.indices().iter().map(|&z| space.label(z)).collect(),
    })
}

/// Sup-norm distance between two travel time rows.
pub fn sup_distance(a: &[f64], b: &[f64]) -> Result<f64> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    Ok(sup_unchecked(a, b))
}

#[inline]
fn sup_unchecked(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

/// A bijection from the sensors of one data set to those of another.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SensorMatching {
    map: Vec<usize>,
}

impl SensorMatching {
    pub fn new(map: Vec<usize>) -> Result<Self> {
        let mut seen = vec![false; map.len()];
        for (z, &w) in map.iter().enumerate() {
            if w >= map.len() {
                return Err(Error::NotBijective(format!("sensor {z} maps to {w}, outside 0..{}", map.len())));
            }
            if seen[w] {
                return Err(Error::NotBijective(format!("target sensor {w} is hit twice")));
            }
            seen[w] = true;
        }
        Ok(SensorMatching { map })
    }

    pub fn identity(n: usize) -> Self {
        SensorMatching { map: (0..n).collect() }
    }

    pub fn map(&self) -> &[usize] {
        &self.map
    }
}

/// Hausdorff distance, in the sup norm on functions of the first sensor
/// set, between the rows of `data1` and the rows of `data2` pulled back
/// through `phi`.
pub fn data_hausdorff(data1: &TravelTimeData, data2: &TravelTimeData, phi: &SensorMatching) -> Result<f64> {
    if data1.n_sensors != data2.n_sensors {
        return Err(Error::NotBijective(format!(
            "sensor counts differ: {} vs {}",
            data1.n_sensors, data2.n_sensors
        )));
    }
    if phi.map.len() != data1.n_sensors {
        return Err(Error::NotBijective(format!(
            "matching has {} entries for {} sensors",
            phi.map.len(),
            data1.n_sensors
        )));
    }
    if data1.n_sources == 0 || data2.n_sources == 0 {
        return Err(Error::Parameter("travel time data without sources".into()));
    }
    let pulled: Vec<Vec<f64>> = (0..data2.n_sources)
        .map(|q| {
            let row = data2.row(q);
            phi.map.iter().map(|&w| row[w]).collect()
        })
        .collect();
    let forward = (0..data1.n_sources)
        .into_par_iter()
        .map(|p| {
            let a = data1.row(p);
            pulled.iter().map(|b| sup_unchecked(a, b)).fold(f64::INFINITY, f64::min)
        })
        .reduce(|| 0.0, f64::max);
    let backward = pulled
        .par_iter()
        .map(|b| {
            (0..data1.n_sources)
                .map(|p| sup_unchecked(data1.row(p), b))
                .fold(f64::INFINITY, f64::min)
        })
        .reduce(|| 0.0, f64::max);
    Ok(forward.max(backward))
}

/// The pair that came closest to (or furthest past) failing a check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WorstPair {
    pub p: usize,
    pub q: usize,
    pub gap: f64,
}

/// Verdict of a local isometry or midpoint check.
///
/// `margin` is `tol` minus the largest gap seen: nonnegative slack on a pass,
/// the size of the worst violation (negated) on a failure.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub passed: bool,
    pub epsilon: f64,
    pub tol: f64,
    pub worst_pair: Option<WorstPair>,
    pub margin: f64,
}

impl CheckReport {
    fn from_worst(epsilon: f64, tol: f64, worst: Option<WorstPair>) -> Self {
        let largest = worst.map_or(0.0, |w| w.gap.max(0.0));
        CheckReport {
            passed: largest <= tol,
            epsilon,
            tol,
            worst_pair: worst,
            margin: tol - largest,
        }
    }
}

// larger gap wins, ties go to the lexicographically smaller pair
fn worse(a: Option<WorstPair>, b: Option<WorstPair>) -> Option<WorstPair> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(x), Some(y)) => {
            if y.gap > x.gap || (y.gap == x.gap && (y.p, y.q) < (x.p, x.q)) {
                Some(y)
            } else {
                Some(x)
            }
        }
    }
}

/// Scans all pairs `p < q`, keeps those accepted by `select(d, sup)` and
/// returns the one with the largest `gap(d, sup)`.
fn scan_pairs<S, G>(space: &FiniteMetricSpace, data: &TravelTimeData, select: S, gap: G) -> Option<WorstPair>
where
    S: Fn(f64, f64) -> bool + Sync,
    G: Fn(f64, f64) -> f64 + Sync,
{
    (0..space.len())
        .into_par_iter()
        .map(|p| {
            let rp = data.row(p);
            let mut worst = None;
            for q in (p + 1)..space.len() {
                let d = space.d(p, q);
                let sup = sup_unchecked(rp, data.row(q));
                if select(d, sup) {
                    worst = worse(worst, Some(WorstPair { p, q, gap: gap(d, sup) }));
                }
            }
            worst
        })
        .reduce(|| None, worse)
}

/// Forward check: every pair with `d(p, q) < epsilon` must keep its
/// distance under the travel time map, up to `tol`.
pub fn check_flie(space: &FiniteMetricSpace, s: &MeasurementSet, epsilon: f64, tol: f64) -> Result<CheckReport> {
    let data = travel_time_data(space, s)?;
    let worst = scan_pairs(space, &data, |d, _| d < epsilon, |d, sup| d - sup);
    Ok(CheckReport::from_worst(epsilon, tol, worst))
}

/// First pair of sources with identical rows, if any.
pub fn find_duplicate_rows(data: &TravelTimeData) -> Option<(usize, usize)> {
    let thresh = DUPLICATE_RTOL * data.max_entry().max(1.0);
    (0..data.n_sources).into_par_iter().find_map_first(|p| {
        ((p + 1)..data.n_sources)
            .find(|&q| sup_unchecked(data.row(p), data.row(q)) <= thresh)
            .map(|q| (p, q))
    })
}

/// Backward check: every pair whose rows are closer than `epsilon` must
/// have `d(p, q)` equal to the row distance, up to `tol`. Duplicate rows
/// are reported as an injectivity failure.
pub fn check_blie(space: &FiniteMetricSpace, s: &MeasurementSet, epsilon: f64, tol: f64) -> Result<CheckReport> {
    let data = travel_time_data(space, s)?;
    if let Some((p, q)) = find_duplicate_rows(&data) {
        return Err(Error::NonInjective { p, q });
    }
    let worst = scan_pairs(space, &data, |_, sup| sup < epsilon, |d, sup| d - sup);
    Ok(CheckReport::from_worst(epsilon, tol, worst))
}

/// Local midpoint property of the data in the sup norm: every row pair
/// closer than `epsilon` needs a third row within `tol` of half their
/// distance from both.
pub fn midpoint_test(data: &TravelTimeData, epsilon: f64, tol: f64) -> Result<CheckReport> {
    let n = data.n_sources;
    if n == 0 {
        return Err(Error::Parameter("travel time data without sources".into()));
    }
    let sup: Vec<f64> = (0..n * n)
        .into_par_iter()
        .map(|k| sup_unchecked(data.row(k / n), data.row(k % n)))
        .collect();
    let worst = (0..n)
        .into_par_iter()
        .map(|p| {
            let mut worst = None;
            for q in (p + 1)..n {
                let h = sup[p * n + q];
                if h >= epsilon {
                    continue;
                }
                let half = 0.5 * h;
                let best = (0..n)
                    .map(|m| (sup[p * n + m] - half).abs().max((sup[q * n + m] - half).abs()))
                    .fold(f64::INFINITY, f64::min);
                worst = worse(worst, Some(WorstPair { p, q, gap: best }));
            }
            worst
        })
        .reduce(|| None, worse);
    Ok(CheckReport::from_worst(epsilon, tol, worst))
}

/// Largest `epsilon` at which [`check_blie`] passes.
///
/// The verdict only changes at the pairwise row distances, so the pairs are
/// swept in increasing row distance and the first violator's distance is
/// returned. Without violators the space diameter is returned.
pub fn max_blie_epsilon(space: &FiniteMetricSpace, s: &MeasurementSet, tol: f64) -> Result<f64> {
    let data = travel_time_data(space, s)?;
    if let Some((p, q)) = find_duplicate_rows(&data) {
        return Err(Error::NonInjective { p, q });
    }
    let n = space.len();
    let mut pairs: Vec<(f64, usize, usize, f64)> = (0..n)
        .into_par_iter()
        .flat_map_iter(|p| {
            let data = &data;
            ((p + 1)..n).map(move |q| {
                let sup = sup_unchecked(data.row(p), data.row(q));
                (sup, p, q, space.d(p, q) - sup)
            })
        })
        .collect();
    pairs.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    Ok(pairs
        .iter()
        .find(|(_, _, _, gap)| *gap > tol)
        .map_or(space.diam(), |&(sup, ..)| sup.min(space.diam())))
}

/// Numbers behind the two stability inequalities for one pair of spaces.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StabilityReport {
    pub epsilon: f64,
    pub diam_bound: f64,
    /// Hausdorff distance of the travel time data.
    pub data_distance: f64,
    pub truncated_gh: GhEstimate,
    pub gh: GhEstimate,
    /// `2 D / epsilon + 1`.
    pub factor: f64,
    /// `data_distance - truncated_gh` (best lower value).
    pub truncated_slack: f64,
    /// `factor * data_distance - gh` (best lower value).
    pub full_slack: f64,
    pub truncated_holds: bool,
    pub full_holds: bool,
}

impl StabilityReport {
    pub fn holds(&self) -> bool {
        self.truncated_holds && self.full_holds
    }
}

/// Inputs of [`verify_stability`] describing one side.
pub struct StabilitySide<'a> {
    pub space: &'a FiniteMetricSpace,
    pub sensors: &'a MeasurementSet,
}

/// Floating slack allowed when comparing the two sides of an inequality.
const INEQUALITY_ATOL: f64 = 1e-12;

/// Compares the data distance of two spaces with their (truncated)
/// Gromov-Hausdorff distances. Both spaces must pass [`check_blie`] at
/// `epsilon` with tolerance `tol`, and both diameters must be at most
/// `diam_bound`.
#[allow(clippy::too_many_arguments)]
pub fn verify_stability(
    first: StabilitySide<'_>,
    second: StabilitySide<'_>,
    phi: &SensorMatching,
    epsilon: f64,
    diam_bound: f64,
    cap: usize,
    tol: f64,
) -> Result<StabilityReport> {
    if !(epsilon > 0.0) || !(diam_bound > 0.0) {
        return Err(Error::Parameter("epsilon and the diameter bound must be positive".into()));
    }
    for (which, side) in [(1, &first), (2, &second)] {
        if side.space.diam() > diam_bound {
            return Err(Error::Parameter(format!(
                "space {which} has diameter {} above the bound {diam_bound}",
                side.space.diam()
            )));
        }
        let report = check_blie(side.space, side.sensors, epsilon, tol)?;
        if !report.passed {
            return Err(Error::Precondition { which, report: Box::new(report) });
        }
    }
    let data1 = travel_time_data(first.space, first.sensors)?;
    let data2 = travel_time_data(second.space, second.sensors)?;
    let h = data_hausdorff(&data1, &data2, phi)?;
    let truncated = metric::truncated_gh(first.space, second.space, epsilon, cap)?;
    let gh = metric::gh_estimate(first.space, second.space, cap)?;
    let factor = 2.0 * diam_bound / epsilon + 1.0;
    let truncated_slack = h - truncated.best_lower();
    let full_slack = factor * h - gh.best_lower();
    Ok(StabilityReport {
        epsilon,
        diam_bound,
        data_distance: h,
        truncated_gh: truncated,
        gh,
        factor,
        truncated_slack,
        full_slack,
        truncated_holds: truncated_slack >= -INEQUALITY_ATOL,
        full_holds: full_slack >= -INEQUALITY_ATOL,
    })
}
