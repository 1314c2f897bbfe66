//! Radially symmetric sound speeds on the unit disk: geodesic integrals,
//! conjugate radii, twice-meeting geodesics and the minimality margin.

mod conjugate;
mod disk;
mod integrals;
mod intersect;
mod minimality;
mod profile;
mod trace;

pub use conjugate::{alpha_tilde, alpha_tilde_derivative, conjugate_radii, conjugate_radii_with_step, FD_STEP, ROOT_TOL};
pub use disk::{disk_distance_matrix, PolarGrid};
pub use integrals::{
    geodesic_record, geodesic_table, half_length, opening_angle, partial_length, partial_length_with,
    partial_opening_angle, partial_opening_angle_with, GeodesicRecord,
};
pub use intersect::{find_intersecting_pairs, tip_grid, winding_bound, Branch, IntersectionTriple, BOUNDARY_GUARD, DEFAULT_GRID};
pub use minimality::{flie_from_delta, minimality_margin, FailingTriple, MinimalityReport, LENGTH_RTOL};
pub use profile::{herglotz_margin, RadialProfile};
pub use trace::{crossings_near, replay_triples, trace_geodesic, GeodesicTrace, Replay, REPLAY_TOL, TRACE_STEP};
