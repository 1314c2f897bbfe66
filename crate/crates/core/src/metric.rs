//! Finite metric spaces, truncation, Hausdorff distance and Gromov-Hausdorff
//! distances computed through correspondences.

use std::sync::atomic::{AtomicU64, Ordering};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Default relative tolerance of the triangle inequality check.
pub const TRIANGLE_RTOL: f64 = 1e-12;

/// Default point-count cap for brute-force Gromov-Hausdorff enumeration.
pub const DEFAULT_GH_CAP: usize = 5;

/// How strictly [`FiniteMetricSpace::validate`] treats floating error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Validation {
    /// Symmetry and triangle inequality up to `1e-12 * diam`.
    Strict,
    /// As `Strict`, plus an absolute slack for discretized continua.
    Slack(f64),
}

impl Validation {
    fn tolerance(self, diam: f64) -> f64 {
        let base = TRIANGLE_RTOL * diam;
        match self {
            Validation::Strict => base,
            Validation::Slack(s) => base + s.max(0.0),
        }
    }
}

/// A finite metric space stored as a dense, row-major distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteMetricSpace {
    n: usize,
    dist: Vec<f64>,
    labels: Option<Vec<String>>,
    diam: f64,
}

impl FiniteMetricSpace {
    /// Validates a square matrix as a metric in strict mode.
    pub fn validate(matrix: &[Vec<f64>]) -> Result<Self> {
        Self::validate_with(matrix, Validation::Strict)
    }

    pub fn validate_with(matrix: &[Vec<f64>], mode: Validation) -> Result<Self> {
        let n = matrix.len();
        for (row, r) in matrix.iter().enumerate() {
            if r.len() != n {
                return Err(Error::NotSquare { rows: n, row, len: r.len() });
            }
        }
        let dist: Vec<f64> = matrix.iter().flatten().copied().collect();
        Self::from_flat_with(n, dist, mode)
    }

    /// Validates a flat row-major `n * n` buffer.
    pub fn from_flat_with(n: usize, dist: Vec<f64>, mode: Validation) -> Result<Self> {
        let space = Self::from_flat_unchecked(n, dist)?;
        space.check_axioms(mode)?;
        Ok(space)
    }

    /// Builds a space checking shape, finiteness, zero diagonal, symmetry and
    /// positivity but not the triangle inequality. Generators whose distances
    /// are metric by construction use this to avoid the cubic check.
    pub fn from_flat_unchecked(n: usize, dist: Vec<f64>) -> Result<Self> {
        if dist.len() != n * n {
            return Err(Error::LengthMismatch(dist.len(), n * n));
        }
        let mut diam = 0.0f64;
        for i in 0..n {
            for j in 0..n {
                let v = dist[i * n + j];
                if !v.is_finite() {
                    return Err(Error::NonFinite(i, j));
                }
                diam = diam.max(v);
            }
        }
        let space = FiniteMetricSpace { n, dist, labels: None, diam };
        space.check_pointwise(Validation::Strict)?;
        Ok(space)
    }

    fn check_pointwise(&self, mode: Validation) -> Result<()> {
        let tol = mode.tolerance(self.diam);
        for i in 0..self.n {
            let dii = self.d(i, i);
            if dii != 0.0 {
                return Err(Error::NonzeroDiagonal(i, dii));
            }
            for j in (i + 1)..self.n {
                let (a, b) = (self.d(i, j), self.d(j, i));
                if (a - b).abs() > tol {
                    return Err(Error::Asymmetric(i, j, a, b));
                }
                if a <= 0.0 || b <= 0.0 {
                    return Err(Error::NotPositive(i, j, a.min(b)));
                }
            }
        }
        Ok(())
    }

    fn check_axioms(&self, mode: Validation) -> Result<()> {
        self.check_pointwise(mode)?;
        let n = self.n;
        let tol = mode.tolerance(self.diam);
        let hit = (0..n).into_par_iter().find_map_first(|i| {
            let row_i = self.row(i);
            for j in 0..n {
                let dij = row_i[j];
                let row_j = self.row(j);
                for k in 0..n {
                    if row_i[k] > dij + row_j[k] + tol {
                        return Some((i, j, k));
                    }
                }
            }
            None
        });
        match hit {
            Some((i, j, k)) => Err(Error::Triangle {
                i,
                j,
                k,
                ij: self.d(i, j),
                jk: self.d(j, k),
                ik: self.d(i, k),
            }),
            None => Ok(()),
        }
    }

    /// Re-runs the full validation (including the triangle inequality).
    pub fn revalidate(&self, mode: Validation) -> Result<()> {
        self.check_axioms(mode)
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.n {
            return Err(Error::LengthMismatch(labels.len(), self.n));
        }
        self.labels = Some(labels);
        Ok(self)
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn d(&self, i: usize, j: usize) -> f64 {
        self.dist[i * self.n + j]
    }

    #[inline]
    pub fn row(&self, i: usize) -> &[f64] {
        &self.dist[i * self.n..(i + 1) * self.n]
    }

    pub fn diam(&self) -> f64 {
        self.diam
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    pub fn label(&self, i: usize) -> String {
        match &self.labels {
            Some(l) => l[i].clone(),
            None => i.to_string(),
        }
    }

    pub fn to_matrix(&self) -> Vec<Vec<f64>> {
        (0..self.n).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn check_index(&self, index: usize) -> Result<()> {
        if index >= self.n {
            return Err(Error::Index { index, n: self.n });
        }
        Ok(())
    }

    /// Restriction to a subset of points, in the given order.
    pub fn subspace(&self, indices: &[usize]) -> Result<Self> {
        for &i in indices {
            self.check_index(i)?;
        }
        let m = indices.len();
        let mut dist = Vec::with_capacity(m * m);
        for &i in indices {
            for &j in indices {
                dist.push(self.d(i, j));
            }
        }
        let mut sub = Self::from_flat_unchecked(m, dist)?;
        if let Some(l) = &self.labels {
            sub.labels = Some(indices.iter().map(|&i| l[i].clone()).collect());
        }
        Ok(sub)
    }

    /// Eccentricity `max_j d(i, j)` of every point.
    pub fn eccentricities(&self) -> Vec<f64> {
        (0..self.n)
            .map(|i| self.row(i).iter().copied().fold(0.0, f64::max))
            .collect()
    }
}

/// Truncation level of a metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncationParams {
    epsilon: f64,
}

impl TruncationParams {
    pub fn new(epsilon: f64) -> Result<Self> {
        if !(epsilon > 0.0) || !epsilon.is_finite() {
            return Err(Error::Parameter(format!("truncation epsilon must be positive, got {epsilon}")));
        }
        Ok(TruncationParams { epsilon })
    }

    pub fn epsilon(&self) -> f64 {
        self.epsilon
    }
}

/// Replaces every distance by `min(d, epsilon)`.
pub fn truncate(space: &FiniteMetricSpace, params: TruncationParams) -> FiniteMetricSpace {
    let eps = params.epsilon;
    let dist: Vec<f64> = space.dist.iter().map(|&v| v.min(eps)).collect();
    FiniteMetricSpace {
        n: space.n,
        diam: space.diam.min(eps),
        dist,
        labels: space.labels.clone(),
    }
}

/// Hausdorff distance between two nonempty index sets of one space.
pub fn hausdorff(space: &FiniteMetricSpace, a: &[usize], b: &[usize]) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::Parameter("Hausdorff distance needs nonempty sets".into()));
    }
    for &i in a.iter().chain(b) {
        space.check_index(i)?;
    }
    let excess = |from: &[usize], to: &[usize]| {
        from.iter()
            .map(|&i| to.iter().map(|&j| space.d(i, j)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    Ok(excess(a, b).max(excess(b, a)))
}

/// Hausdorff distance between two finite subsets of the real line.
pub(crate) fn hausdorff_reals(a: &[f64], b: &[f64]) -> f64 {
    let excess = |from: &[f64], to: &[f64]| {
        from.iter()
            .map(|x| to.iter().map(|y| (x - y).abs()).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    excess(a, b).max(excess(b, a))
}

/// A relation between the points of two spaces that covers both sides.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Correspondence {
    pairs: Vec<(usize, usize)>,
}

impl Correspondence {
    /// Checks that every index of `0..nx` and `0..ny` occurs in some pair.
    pub fn new(pairs: Vec<(usize, usize)>, nx: usize, ny: usize) -> Result<Self> {
        let mut seen_x = vec![false; nx];
        let mut seen_y = vec![false; ny];
        for &(i, j) in &pairs {
            if i >= nx {
                return Err(Error::Index { index: i, n: nx });
            }
            if j >= ny {
                return Err(Error::Index { index: j, n: ny });
            }
            seen_x[i] = true;
            seen_y[j] = true;
        }
        if let Some(index) = seen_x.iter().position(|s| !s) {
            return Err(Error::Coverage { side: "X", index });
        }
        if let Some(index) = seen_y.iter().position(|s| !s) {
            return Err(Error::Coverage { side: "Y", index });
        }
        Ok(Correspondence { pairs })
    }

    pub fn identity(n: usize) -> Self {
        Correspondence { pairs: (0..n).map(|i| (i, i)).collect() }
    }

    pub fn pairs(&self) -> &[(usize, usize)] {
        &self.pairs
    }
}

/// Supremum of `|d_X(x, x') - d_Y(y, y')|` over pairs of pairs.
pub fn distortion(corr: &Correspondence, x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> Result<f64> {
    // re-check coverage against these particular spaces
    Correspondence::new(corr.pairs.clone(), x.len(), y.len())?;
    Ok(pairs_distortion(&corr.pairs, x, y))
}

fn pairs_distortion(pairs: &[(usize, usize)], x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> f64 {
    let mut dis = 0.0f64;
    for (a, &(i, j)) in pairs.iter().enumerate() {
        for &(k, l) in &pairs[a + 1..] {
            dis = dis.max((x.d(i, k) - y.d(j, l)).abs());
        }
    }
    dis
}

/// Exact Gromov-Hausdorff distance of two small spaces: half the least
/// distortion over all correspondences.
///
/// Every relation covering both sides is reachable by choosing a nonempty
/// subset of `Y` for each point of `X`; branches whose partial distortion
/// already meets the incumbent are cut.
pub fn gh_exact_small(x: &FiniteMetricSpace, y: &FiniteMetricSpace, cap: usize) -> Result<f64> {
    for size in [x.len(), y.len()] {
        if size > cap {
            return Err(Error::TooLarge { size, cap });
        }
    }
    if x.is_empty() || y.is_empty() {
        return Err(Error::Parameter("Gromov-Hausdorff distance needs nonempty spaces".into()));
    }
    Ok(0.5 * min_distortion(x, y))
}

fn min_distortion(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> f64 {
    let (nx, ny) = (x.len(), y.len());
    let (_, greedy) = greedy_correspondence(x, y);
    // incumbent shared between workers; f64 bits of nonnegative numbers order like integers
    let best = AtomicU64::new(greedy.to_bits());
    let full: u32 = (1u32 << ny) - 1;

    struct Search<'a> {
        x: &'a FiniteMetricSpace,
        y: &'a FiniteMetricSpace,
        nx: usize,
        full: u32,
        best: &'a AtomicU64,
    }

    impl Search<'_> {
        fn incumbent(&self) -> f64 {
            f64::from_bits(self.best.load(Ordering::Relaxed))
        }

        fn offer(&self, v: f64) {
            self.best.fetch_min(v.to_bits(), Ordering::Relaxed);
        }

        fn descend(&self, row: usize, pairs: &mut Vec<(usize, usize)>, covered: u32, dis: f64) {
            if row == self.nx {
                if covered == self.full {
                    self.offer(dis);
                }
                return;
            }
            // the remaining rows can cover at most everything, so only the
            // distortion bound prunes here
            for subset in 1..=self.full {
                let mut d = dis;
                let base = pairs.len();
                let mut ok = true;
                let mut bits = subset;
                while bits != 0 {
                    let col = bits.trailing_zeros() as usize;
                    bits &= bits - 1;
                    for &(k, l) in pairs.iter() {
                        d = d.max((self.x.d(row, k) - self.y.d(col, l)).abs());
                    }
                    if d >= self.incumbent() {
                        ok = false;
                        break;
                    }
                    pairs.push((row, col));
                }
                if ok {
                    self.descend(row + 1, pairs, covered | subset, d);
                }
                pairs.truncate(base);
            }
        }
    }

    let search = Search { x, y, nx, full, best: &best };
    (1..=full).into_par_iter().for_each(|subset| {
        let mut pairs = Vec::with_capacity(nx * ny);
        let mut d = 0.0f64;
        let mut bits = subset;
        while bits != 0 {
            let col = bits.trailing_zeros() as usize;
            bits &= bits - 1;
            for &(k, l) in pairs.iter() {
                d = d.max((x.d(0, k) - y.d(col, l)).abs());
            }
            pairs.push((0, col));
        }
        if d < search.incumbent() {
            search.descend(1, &mut pairs, subset, d);
        }
    });
    f64::from_bits(best.load(Ordering::Relaxed))
}

/// Deterministic greedy correspondence: each point of `X` in order is
/// matched to the point of `Y` that adds the least distortion, then any
/// uncovered point of `Y` is attached the same way. Returns the
/// correspondence and its distortion.
pub fn greedy_correspondence(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> (Correspondence, f64) {
    let mut pairs: Vec<(usize, usize)> = Vec::with_capacity(x.len().max(y.len()));
    let mut dis = 0.0f64;
    let mut covered = vec![false; y.len()];
    let added = |pairs: &[(usize, usize)], i: usize, j: usize| {
        pairs
            .iter()
            .map(|&(k, l)| (x.d(i, k) - y.d(j, l)).abs())
            .fold(0.0, f64::max)
    };
    for i in 0..x.len() {
        let mut best = (f64::INFINITY, 0);
        for j in 0..y.len() {
            let a = added(&pairs, i, j);
            if a < best.0 {
                best = (a, j);
            }
        }
        dis = dis.max(best.0);
        covered[best.1] = true;
        pairs.push((i, best.1));
    }
    for j in 0..y.len() {
        if covered[j] {
            continue;
        }
        let mut best = (f64::INFINITY, 0);
        for i in 0..x.len() {
            let a = added(&pairs, i, j);
            if a < best.0 {
                best = (a, i);
            }
        }
        dis = dis.max(best.0);
        pairs.push((best.1, j));
    }
    (Correspondence { pairs }, dis)
}

/// Bracket on a Gromov-Hausdorff distance, with the exact value when it was
/// computed by enumeration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GhEstimate {
    pub lower: f64,
    pub upper: f64,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub exact: Option<f64>,
}

impl GhEstimate {
    /// Best available lower value: the exact one when present.
    pub fn best_lower(&self) -> f64 {
        self.exact.unwrap_or(self.lower)
    }

    pub fn best_upper(&self) -> f64 {
        self.exact.unwrap_or(self.upper)
    }
}

/// Lower and upper Gromov-Hausdorff bounds that need no enumeration.
///
/// The lower bound is half the Hausdorff distance between the eccentricity
/// value sets, which dominates half the diameter gap. The upper bound is the
/// smaller of half the larger diameter and half the greedy distortion.
pub fn gh_bounds(x: &FiniteMetricSpace, y: &FiniteMetricSpace) -> GhEstimate {
    let diam_gap = 0.5 * (x.diam() - y.diam()).abs();
    let ecc = 0.5 * hausdorff_reals(&x.eccentricities(), &y.eccentricities());
    let lower = diam_gap.max(ecc);
    let (_, greedy) = greedy_correspondence(x, y);
    let upper = (0.5 * x.diam().max(y.diam())).min(0.5 * greedy).max(lower);
    GhEstimate { lower, upper, exact: None }
}

/// Bounds, plus the exact value when both spaces fit under `cap`.
pub fn gh_estimate(x: &FiniteMetricSpace, y: &FiniteMetricSpace, cap: usize) -> Result<GhEstimate> {
    let mut est = gh_bounds(x, y);
    if x.len() <= cap && y.len() <= cap {
        let exact = gh_exact_small(x, y, cap)?;
        est.exact = Some(exact);
        est.lower = est.lower.min(exact);
        est.upper = est.upper.max(exact);
    }
    Ok(est)
}

/// Gromov-Hausdorff estimate of the two `epsilon`-truncations.
pub fn truncated_gh(x: &FiniteMetricSpace, y: &FiniteMetricSpace, epsilon: f64, cap: usize) -> Result<GhEstimate> {
    let params = TruncationParams::new(epsilon)?;
    gh_estimate(&truncate(x, params), &truncate(y, params), cap)
}
