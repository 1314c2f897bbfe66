//! Travel time data of sampled metric spaces.
//!
//! Finite metric spaces with truncation, Hausdorff and Gromov-Hausdorff
//! estimates; travel time maps to a measurement set with local isometry
//! checks and the stability inequalities between data distance and
//! (truncated) GH distance; generators for trees, annuli, spheres and
//! convex polygons; and geodesic integrals of radially symmetric sound
//! speeds on the unit disk.

// `!(a > b)` is used on purpose so that NaN falls into the rejecting branch.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod error;
pub mod herglotz;
pub mod io;
pub mod metric;
pub mod quadrature;
pub mod roots;
pub mod spaces;
pub mod travel_time;

pub use error::{Error, Result};
pub use metric::{
    distortion, gh_bounds, gh_estimate, gh_exact_small, greedy_correspondence, hausdorff, truncate, truncated_gh,
    Correspondence, FiniteMetricSpace, GhEstimate, TruncationParams, Validation,
};
pub use spaces::SampledSpace;
pub use travel_time::{
    check_blie, check_flie, data_hausdorff, find_duplicate_rows, max_blie_epsilon, midpoint_test, sup_distance, travel_time_data,
    verify_stability, CheckReport, MeasurementSet, SensorMatching, StabilityReport, StabilitySide, TravelTimeData,
};
