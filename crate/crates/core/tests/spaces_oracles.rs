mod common;

use std::collections::BinaryHeap;
use std::cmp::Reverse;
use std::f64::consts::PI;

use common::floyd_warshall;
use proptest::prelude::*;
use ttlab::spaces::{
    annulus_distance, build_tree, convex_polygon, sample_annulus, sphere_band, sphere_equator, AnnulusSpec,
    SphereBandSpec, TreeSpec,
};
use ttlab::{check_blie, check_flie, find_duplicate_rows, travel_time_data, Error, SampledSpace};

fn points(s: &SampledSpace) -> Vec<Vec<f64>> {
    s.provenance["points"]
        .as_array()
        .unwrap()
        .iter()
        .map(|p| p.as_array().unwrap().iter().map(|v| v.as_f64().unwrap()).collect())
        .collect()
}

#[test]
fn tree_matches_floyd_warshall() {
    let edges = vec![(0, 1, 0.7), (1, 2, 1.3), (1, 3, 0.2), (3, 4, 2.0), (3, 5, 0.9), (0, 6, 1.1)];
    let t = build_tree(&TreeSpec::new(edges.clone()).unwrap(), 0).unwrap();
    let fw = floyd_warshall(7, &edges);
    for i in 0..7 {
        for j in 0..7 {
            assert!((t.space.d(i, j) - fw[i][j]).abs() <= 1e-12);
        }
    }
    assert_eq!(t.sensors.indices(), &[2, 4, 5, 6]);
}

#[test]
fn trees_reject_cycles_and_forests() {
    assert!(TreeSpec::new(vec![(0, 1, 1.0), (1, 2, 1.0), (2, 0, 1.0)]).is_err());
    assert!(TreeSpec::new(vec![(0, 1, 1.0), (2, 3, 1.0)]).is_err());
    assert!(TreeSpec::new(vec![(0, 1, -1.0)]).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn subdivided_tree_matches_floyd_warshall(edges in common::arb_tree_edges(8), extra in 1usize..3) {
        let t = build_tree(&TreeSpec::new(edges.clone()).unwrap(), extra).unwrap();
        let nodes = edges.len() + 1;
        // subdivide by hand and run the oracle on the finer graph
        let mut fine = Vec::new();
        for (k, &(a, b, len)) in edges.iter().enumerate() {
            let piece = len / (extra + 1) as f64;
            let mut prev = a;
            for j in 0..extra {
                let id = nodes + k * extra + j;
                fine.push((prev, id, piece));
                prev = id;
            }
            fine.push((prev, b, piece));
        }
        let fw = floyd_warshall(t.space.len(), &fine);
        for i in 0..t.space.len() {
            for j in 0..t.space.len() {
                prop_assert!((t.space.d(i, j) - fw[i][j]).abs() <= 1e-12);
            }
        }
    }
}

/// Shortest path around the hole by Dijkstra on a visibility graph: the two
/// endpoints plus a fine polygon on the inner circle, joined when the chord
/// stays outside the open disk.
fn annulus_oracle(x: [f64; 2], y: [f64; 2], r: f64) -> f64 {
    let m = 4000;
    let mut nodes = vec![x, y];
    for j in 0..m {
        let a = 2.0 * PI * j as f64 / m as f64;
        // the polygon circumscribes the circle so its edges stay outside
        let rho = r / (PI / m as f64).cos();
        nodes.push([rho * a.cos(), rho * a.sin()]);
    }
    let visible = |p: [f64; 2], q: [f64; 2]| {
        let d = [q[0] - p[0], q[1] - p[1]];
        let len2 = d[0] * d[0] + d[1] * d[1];
        if len2 == 0.0 {
            return true;
        }
        let t = (-(p[0] * d[0] + p[1] * d[1]) / len2).clamp(0.0, 1.0);
        (p[0] + t * d[0]).hypot(p[1] + t * d[1]) >= r - 1e-12
    };
    let n = nodes.len();
    let mut dist = vec![f64::INFINITY; n];
    dist[0] = 0.0;
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((0u64, 0usize)));
    while let Some(Reverse((dk, v))) = heap.pop() {
        let dv = f64::from_bits(dk);
        if dv > dist[v] {
            continue;
        }
        let mut relax = |w: usize| {
            let len = (nodes[v][0] - nodes[w][0]).hypot(nodes[v][1] - nodes[w][1]);
            if dv + len < dist[w] {
                dist[w] = dv + len;
                heap.push(Reverse(((dv + len).to_bits(), w)));
            }
        };
        if v < 2 {
            for w in 0..n {
                if w != v && visible(nodes[v], nodes[w]) {
                    relax(w);
                }
            }
        } else {
            let j = v - 2;
            relax(2 + (j + 1) % m);
            relax(2 + (j + m - 1) % m);
            for w in 0..2 {
                if visible(nodes[v], nodes[w]) {
                    relax(w);
                }
            }
        }
    }
    dist[1]
}

#[test]
fn annulus_distance_matches_visibility_graph() {
    let r = 0.4;
    let pts = [[1.0, 0.0], [-0.9, 0.1], [0.0, -0.45], [0.3, 0.5], [-0.4, 0.0], [0.0, 0.4], [-0.2, -0.8], [0.7, -0.7]];
    for &x in &pts {
        for &y in &pts {
            let got = annulus_distance(x, y, r).unwrap();
            let oracle = annulus_oracle(x, y, r);
            assert!((got - oracle).abs() <= 1e-3, "{x:?} {y:?}: {got} vs {oracle}");
            let chord = (x[0] - y[0]).hypot(x[1] - y[1]);
            assert!(got >= chord - 1e-15);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn annulus_distance_equals_chord_iff_visible(
        a in 0.0f64..(2.0 * PI), b in 0.0f64..(2.0 * PI), ra in 0.4f64..1.0, rb in 0.4f64..1.0,
    ) {
        let r = 0.4;
        let (x, y) = ([ra * a.cos(), ra * a.sin()], [rb * b.cos(), rb * b.sin()]);
        let chord = (x[0] - y[0]).hypot(x[1] - y[1]);
        let d = annulus_distance(x, y, r).unwrap();
        prop_assert!(d >= chord);
        let dx = [y[0] - x[0], y[1] - x[1]];
        let t = if chord > 0.0 { (-(x[0] * dx[0] + x[1] * dx[1]) / (chord * chord)).clamp(0.0, 1.0) } else { 0.0 };
        let closest = (x[0] + t * dx[0]).hypot(x[1] + t * dx[1]);
        if closest >= r + 1e-9 {
            prop_assert_eq!(d, chord);
        } else if closest < r - 1e-6 {
            prop_assert!(d > chord);
        }
        prop_assert!((d - annulus_distance(y, x, r).unwrap()).abs() <= 1e-14);
    }
}

#[test]
fn thin_hole_is_nearly_euclidean() {
    let x = [0.9, 0.0];
    let y = [-0.9, 0.0];
    let d = annulus_distance(x, y, 1e-6).unwrap();
    assert!((d - 1.8).abs() < 1e-9);
}

#[test]
fn sampled_annulus_validates() {
    let s = sample_annulus(&AnnulusSpec { inner: 0.4, outer: 1.0, n_boundary: 40, n_interior: 150 }).unwrap();
    assert_eq!(s.sensors.len(), 40);
    assert!(s.step > 0.0 && s.step < 0.3);
    let pts = points(&s);
    for (i, p) in pts.iter().enumerate() {
        let rho = p[0].hypot(p[1]);
        assert!(rho >= 0.4 - 1e-12 && rho <= 1.0 + 1e-12);
        for (j, q) in pts.iter().enumerate() {
            let chord = (p[0] - q[0]).hypot(p[1] - q[1]);
            assert!(s.space.d(i, j) >= chord - 1e-15);
        }
    }
}

#[test]
fn sphere_band_flie_at_band_radius_but_not_three_times() {
    let r = 0.3;
    let s = sphere_band(&SphereBandSpec { band_radius: r, resolution: 24 }).unwrap();
    let ok = check_flie(&s.space, &s.sensors, r, s.default_tol()).unwrap();
    assert!(ok.passed, "{ok:?}");
    let bad = check_flie(&s.space, &s.sensors, 3.0 * r, s.default_tol()).unwrap();
    assert!(!bad.passed);
    let w = bad.worst_pair.unwrap();
    assert!(s.space.d(w.p, w.q) < 3.0 * r);
    assert!(w.gap > s.default_tol());
}

#[test]
fn antipodes_are_pi_apart_on_the_sphere() {
    let s = sphere_band(&SphereBandSpec { band_radius: 0.2, resolution: 10 }).unwrap();
    let pts = points(&s);
    for (i, p) in pts.iter().enumerate() {
        let j = pts.iter().position(|q| (q[0] + p[0]).abs() + (q[1] + p[1]).abs() + (q[2] + p[2]).abs() < 1e-12).unwrap();
        assert!((s.space.d(i, j) - PI).abs() < 1e-12);
    }
}

#[test]
fn equator_sees_both_poles_alike() {
    let s = sphere_equator(12).unwrap();
    let labels = s.space.labels().unwrap();
    let north = labels.iter().position(|l| l == "north").unwrap();
    let south = labels.iter().position(|l| l == "south").unwrap();
    let data = travel_time_data(&s.space, &s.sensors).unwrap();
    assert_eq!(data.row(north), data.row(south));
    match check_blie(&s.space, &s.sensors, 0.5, s.default_tol()) {
        Err(Error::NonInjective { p, q }) => assert_eq!((p.min(q), p.max(q)), (north.min(south), north.max(south))),
        other => panic!("expected an injectivity failure, got {other:?}"),
    }
    let keep: Vec<usize> = (0..s.space.len()).filter(|&i| i != south).collect();
    assert_eq!(find_duplicate_rows(&data.select_sources(&keep).unwrap()), None);
}

#[test]
fn square_is_euclidean_and_flie_at_its_diameter() {
    let s = convex_polygon(&[[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]], 0.1).unwrap();
    let pts = points(&s);
    for i in 0..pts.len() {
        for j in 0..pts.len() {
            let e = (pts[i][0] - pts[j][0]).hypot(pts[i][1] - pts[j][1]);
            assert_eq!(s.space.d(i, j), e);
        }
    }
    let report = check_flie(&s.space, &s.sensors, s.space.diam() + 1e-9, s.default_tol()).unwrap();
    assert!(report.passed, "{report:?}");
    let blie = check_blie(&s.space, &s.sensors, s.space.diam() + 1e-9, s.default_tol()).unwrap();
    assert!(blie.passed, "{blie:?}");
}

#[test]
fn polygons_must_be_convex() {
    assert!(convex_polygon(&[[0.0, 0.0], [2.0, 0.0], [1.0, 0.5], [2.0, 2.0], [0.0, 2.0]], 0.2).is_err());
    assert!(convex_polygon(&[[0.0, 0.0], [1.0, 0.0]], 0.2).is_err());
}
