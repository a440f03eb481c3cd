use hopcut_core::geometry::{
    adjacent_differences, build_strongly_convex_set, verify_strong_convexity, ConvexVectorSet, Vector2,
};
use proptest::prelude::*;

mod common;
use common::clique::{max_clique, MAX_SIZES};


#[test]
fn clique_oracle_reproduces_frozen_sizes() {
    for r in 2..=20i64 {
        assert_eq!(max_clique(r), MAX_SIZES[r as usize - 2], "r = {r}");
    }
}

#[test]
fn build_matches_exhaustive_maximum() {
    for r in 2..=20i64 {
        let w = build_strongly_convex_set(r).unwrap();
        assert_eq!(w.len(), MAX_SIZES[r as usize - 2], "r = {r}");
        assert!(verify_strong_convexity(&w).pass, "r = {r}");
    }
}

#[test]
fn radius_ten_and_hundred() {
    let w10 = build_strongly_convex_set(10).unwrap();
    assert_eq!(w10.len(), MAX_SIZES[10 - 2]);
    let c = w10.len() as f64 / 10f64.powf(2.0 / 3.0);
    let w100 = build_strongly_convex_set(100).unwrap();
    assert!(verify_strong_convexity(&w100).pass);
    assert!(w100.len() >= (c * 100f64.powf(2.0 / 3.0)).floor() as usize, "|W(100)| = {}", w100.len());
}

#[test]
fn interior_points_can_be_optimal() {
    let w5 = build_strongly_convex_set(5).unwrap();
    assert_eq!(w5.vectors, vec![Vector2::new(4, 1), Vector2::new(3, 3), Vector2::new(1, 4)]);
    let w6 = build_strongly_convex_set(6).unwrap();
    assert_eq!(w6.len(), 4);
}

#[test]
fn perimeter_bound_for_cubed_radius() {
    let w = build_strongly_convex_set(27).unwrap();
    let c = adjacent_differences(&w).unwrap();
    let total: f64 = c.iter().map(|v| v.norm()).sum();
    assert!(total <= 2.0 * std::f64::consts::PI * 27.0, "norm sum {total}");
}

#[test]
fn json_shape() {
    let w = ConvexVectorSet::new(3, vec![Vector2::new(1, 2), Vector2::new(2, 1)]).unwrap();
    let s = serde_json::to_string(&w).unwrap();
    assert_eq!(s, r#"{"r":3,"vectors":[[2,1],[1,2]]}"#);
    let back: ConvexVectorSet = serde_json::from_str(&s).unwrap();
    assert_eq!(back, w);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn size_is_monotone_in_r(r in 2i64..120) {
        let a = build_strongly_convex_set(r).unwrap();
        let b = build_strongly_convex_set(r + 1).unwrap();
        prop_assert!(a.len() <= b.len());
    }

    #[test]
    fn differences_telescope(r in 3i64..150) {
        let w = build_strongly_convex_set(r).unwrap();
        prop_assume!(w.len() >= 2);
        let c = adjacent_differences(&w).unwrap();
        let mut acc = w.vectors[0];
        for (k, d) in c.iter().enumerate() {
            acc = acc + *d;
            prop_assert_eq!(acc, w.vectors[k + 1]);
        }
    }

    #[test]
    fn built_sets_satisfy_triple_order(r in 2i64..90) {
        let w = build_strongly_convex_set(r).unwrap();
        let v = &w.vectors;
        for i in 0..v.len() {
            for j in i + 1..v.len() {
                for k in j + 1..v.len() {
                    prop_assert!(v[i].dot(v[k]) < v[j].dot(v[k]) && v[j].dot(v[k]) < v[k].norm_sq());
                    prop_assert!(v[i].dot(v[k]) < v[i].dot(v[j]) && v[i].dot(v[j]) < v[i].norm_sq());
                }
            }
        }
    }
}
