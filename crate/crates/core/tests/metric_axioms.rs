use proptest::prelude::*;
use touchscope_core::{
    combined_distance, cosine_similarity, euclid_distance, DistanceConfig, GestureVector, Point,
};

fn vector(n: usize) -> impl Strategy<Value = GestureVector> {
    prop::collection::vec((-2000.0f64..2000.0, -2000.0f64..2000.0), n).prop_map(|v| {
        GestureVector::from_points(0, v.into_iter().map(|(x, y)| Point::new(x, y)).collect())
    })
}

fn triple() -> impl Strategy<Value = (GestureVector, GestureVector, GestureVector)> {
    (2usize..33).prop_flat_map(|n| (vector(n), vector(n), vector(n)))
}

fn scaled(v: &GestureVector, s: f64) -> GestureVector {
    GestureVector::from_points(v.gesture_id, v.points.iter().map(|&p| p * s).collect())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2000))]

    #[test]
    fn euclid_is_a_metric((u, v, w) in triple()) {
        prop_assert_eq!(euclid_distance(&u, &u).unwrap(), 0.0);
        prop_assert_eq!(euclid_distance(&u, &v).unwrap(), euclid_distance(&v, &u).unwrap());
        let uv = euclid_distance(&u, &v).unwrap();
        let vw = euclid_distance(&v, &w).unwrap();
        let uw = euclid_distance(&u, &w).unwrap();
        prop_assert!(uw <= uv + vw + 1e-9);
    }

    #[test]
    fn cosine_bounded_and_scale_invariant((u, v, _w) in triple(), s in 1e-3f64..1e3) {
        let c = cosine_similarity(&u, &v).unwrap();
        prop_assert!((-1.0..=1.0).contains(&c));
        let cs = cosine_similarity(&scaled(&u, s), &v).unwrap();
        prop_assert!((c - cs).abs() <= 1e-9);
        let cs2 = cosine_similarity(&u, &scaled(&v, s)).unwrap();
        prop_assert!((c - cs2).abs() <= 1e-9);
    }

    #[test]
    fn combined_symmetric_non_negative((u, v, _w) in triple(), weight in 0.0f64..=1.0, center in any::<bool>()) {
        let cfg = DistanceConfig { weight_euclid: weight, center_cosine: center, ..DistanceConfig::default() };
        let ab = combined_distance(&u, &v, &cfg);
        let ba = combined_distance(&v, &u, &cfg);
        match (ab, ba) {
            (Ok(ab), Ok(ba)) => {
                prop_assert!(ab >= 0.0);
                prop_assert!((ab - ba).abs() <= 1e-12);
            }
            (a, b) => prop_assert_eq!(a, b),
        }
        if let Ok(d) = combined_distance(&u, &u, &cfg) {
            prop_assert!(d.abs() <= 1e-12);
        }
    }
}
