mod common;

use common::{arb_space, arb_tree_edges, floyd_warshall, space};
use proptest::prelude::*;
use ttlab::spaces::{build_tree, TreeSpec};
use ttlab::{
    check_blie, check_flie, data_hausdorff, max_blie_epsilon, midpoint_test, sup_distance, travel_time_data,
    MeasurementSet, SensorMatching, TravelTimeData,
};

fn sensors_from_mask(n: usize, mask: u32, x: &ttlab::FiniteMetricSpace) -> MeasurementSet {
    let mut idx: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
    if idx.is_empty() {
        idx.push(0);
    }
    MeasurementSet::new(idx, x).unwrap()
}

#[test]
fn star_centre_row() {
    let t = build_tree(&TreeSpec::star(3, 1.0), 0).unwrap();
    let data = travel_time_data(&t.space, &t.sensors).unwrap();
    assert_eq!(data.row(0), &[1.0, 1.0, 1.0]);
}

#[test]
fn shifted_data_is_at_the_shift() {
    let x = space(floyd_warshall(4, &[(0, 1, 1.0), (1, 2, 0.5), (2, 3, 2.0)]));
    let s = MeasurementSet::new(vec![0, 3], &x).unwrap();
    let d1 = travel_time_data(&x, &s).unwrap();
    let rows: Vec<Vec<f64>> = d1.rows().map(|r| r.iter().map(|v| v + 0.25).collect()).collect();
    let d2 = TravelTimeData::from_rows(rows, d1.source_labels().to_vec(), d1.sensor_labels().to_vec()).unwrap();
    assert_eq!(data_hausdorff(&d1, &d2, &SensorMatching::identity(2)).unwrap(), 0.25);
    assert_eq!(data_hausdorff(&d1, &d1, &SensorMatching::identity(2)).unwrap(), 0.0);
}

/// Row-matching oracle: max over rows of the distance to the nearest row on
/// the other side, both ways.
fn hausdorff_oracle(a: &TravelTimeData, b: &TravelTimeData, phi: &[usize]) -> f64 {
    let sup = |p: &[f64], q: &[f64]| (0..p.len()).map(|z| (p[z] - q[phi[z]]).abs()).fold(0.0, f64::max);
    let one = a.rows().map(|p| b.rows().map(|q| sup(p, q)).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max);
    let two = b.rows().map(|q| a.rows().map(|p| sup(p, q)).fold(f64::INFINITY, f64::min)).fold(0.0, f64::max);
    one.max(two)
}

#[test]
fn lengthened_leaf_edge_matches_row_oracle() {
    for delta in [0.01, 0.05, 0.3] {
        let t1 = build_tree(&TreeSpec::new(vec![(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.5), (3, 4, 0.5), (3, 5, 0.7)]).unwrap(), 2).unwrap();
        let t2 = build_tree(&TreeSpec::new(vec![(0, 1, 1.0 + delta), (0, 2, 1.0), (0, 3, 1.5), (3, 4, 0.5), (3, 5, 0.7)]).unwrap(), 2)
            .unwrap();
        let d1 = travel_time_data(&t1.space, &t1.sensors).unwrap();
        let d2 = travel_time_data(&t2.space, &t2.sensors).unwrap();
        let phi = SensorMatching::identity(d1.n_sensors());
        let h = data_hausdorff(&d1, &d2, &phi).unwrap();
        assert!((h - hausdorff_oracle(&d1, &d2, phi.map())).abs() < 1e-15);
        assert!(h > 0.0 && h <= delta + 1e-12);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn travel_time_map_is_one_lipschitz(x in arb_space(8), mask in 1u32..256) {
        let s = sensors_from_mask(x.len(), mask, &x);
        let data = travel_time_data(&x, &s).unwrap();
        for p in 0..x.len() {
            for (z, &v) in data.row(p).iter().enumerate() {
                prop_assert!(v >= 0.0);
                prop_assert_eq!(v == 0.0, p == s.indices()[z]);
            }
            for q in 0..x.len() {
                prop_assert!(sup_distance(data.row(p), data.row(q)).unwrap() <= x.d(p, q) + 1e-12);
            }
        }
    }

    #[test]
    fn checks_are_monotone_in_epsilon(x in arb_space(8), mask in 1u32..256, e1 in 0.05f64..6.0, e2 in 0.05f64..6.0) {
        let s = sensors_from_mask(x.len(), mask, &x);
        let (lo, hi) = (e1.min(e2), e1.max(e2));
        if check_flie(&x, &s, hi, 0.0).unwrap().passed {
            prop_assert!(check_flie(&x, &s, lo, 0.0).unwrap().passed);
        }
        if let Ok(r) = check_blie(&x, &s, hi, 0.0) {
            if r.passed {
                prop_assert!(check_blie(&x, &s, lo, 0.0).unwrap().passed);
            }
        }
    }

    #[test]
    fn blie_implies_flie(x in arb_space(8), mask in 1u32..256, eps in 0.05f64..6.0, tol in 0.0f64..0.2) {
        let s = sensors_from_mask(x.len(), mask, &x);
        if let Ok(r) = check_blie(&x, &s, eps, tol) {
            if r.passed {
                prop_assert!(check_flie(&x, &s, eps, tol).unwrap().passed);
            }
            let best = max_blie_epsilon(&x, &s, tol).unwrap();
            prop_assert!(best <= x.diam());
            prop_assert!(check_blie(&x, &s, best, tol).unwrap().passed);
        }
    }

    #[test]
    fn data_distance_is_a_pseudometric(a in arb_space(6), b in arb_space(6), c in arb_space(6), rot in 0usize..3) {
        let sensors = |x: &ttlab::FiniteMetricSpace| {
            let k = x.len().min(2);
            MeasurementSet::new((0..k).collect(), x).unwrap()
        };
        prop_assume!(a.len() >= 2 && b.len() >= 2 && c.len() >= 2);
        let (da, db, dc) = (
            travel_time_data(&a, &sensors(&a)).unwrap(),
            travel_time_data(&b, &sensors(&b)).unwrap(),
            travel_time_data(&c, &sensors(&c)).unwrap(),
        );
        let id = SensorMatching::identity(2);
        let ab = data_hausdorff(&da, &db, &id).unwrap();
        prop_assert_eq!(data_hausdorff(&da, &da, &id).unwrap(), 0.0);
        prop_assert!((ab - data_hausdorff(&db, &da, &id).unwrap()).abs() <= 1e-15);
        prop_assert!(ab <= data_hausdorff(&da, &dc, &id).unwrap() + data_hausdorff(&dc, &db, &id).unwrap() + 1e-12);
        // permuting rows leaves the distance unchanged
        let n = db.n_sources();
        let order: Vec<usize> = (0..n).map(|i| (i + rot) % n).collect();
        let permuted = db.select_sources(&order).unwrap();
        prop_assert_eq!(data_hausdorff(&da, &permuted, &id).unwrap(), ab);
        prop_assert!((ab - hausdorff_oracle(&da, &db, id.map())).abs() <= 1e-15);
    }

    #[test]
    fn trees_embed_isometrically(edges in arb_tree_edges(12), extra in 0usize..3, eps in 0.05f64..10.0) {
        let t = build_tree(&TreeSpec::new(edges).unwrap(), extra).unwrap();
        let (x, s) = (&t.space, &t.sensors);
        let data = travel_time_data(x, s).unwrap();
        for p in 0..x.len() {
            for q in 0..x.len() {
                let sup = sup_distance(data.row(p), data.row(q)).unwrap();
                prop_assert!((sup - x.d(p, q)).abs() <= 1e-12, "pair ({}, {}): {} vs {}", p, q, sup, x.d(p, q));
                // a single sensor realises the distance
                let witness = data.row(p).iter().zip(data.row(q)).any(|(a, b)| (a - b).abs() >= x.d(p, q) - 1e-12);
                prop_assert!(witness);
            }
        }
        prop_assert!(check_flie(x, s, eps, 1e-12).unwrap().passed);
        prop_assert!(check_blie(x, s, eps, 1e-12).unwrap().passed);
        prop_assert_eq!(max_blie_epsilon(x, s, 1e-12).unwrap(), x.diam());
        prop_assert!(midpoint_test(&data, eps, t.step + 1e-12).unwrap().passed);
    }

    #[test]
    fn tree_distances_satisfy_four_point_condition(edges in arb_tree_edges(9), extra in 0usize..2) {
        let t = build_tree(&TreeSpec::new(edges).unwrap(), extra).unwrap();
        let x = &t.space;
        let n = x.len().min(10);
        for a in 0..n { for b in 0..n { for c in 0..n { for d in 0..n {
            let mut s = [x.d(a, b) + x.d(c, d), x.d(a, c) + x.d(b, d), x.d(a, d) + x.d(b, c)];
            s.sort_by(f64::total_cmp);
            prop_assert!((s[2] - s[1]).abs() <= 1e-12 * (1.0 + s[2]));
        }}}}
    }
}
