mod common;

use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, PI};

use cutlocus::cutlocus::{
    dist_to_submanifold, s_function, se_detect, ModelSpace, Point, SubmanifoldSpec, UnitNormal,
    DEFAULT_TOL,
};
use cutlocus::random::rng;
use proptest::prelude::*;
use rand::Rng;

fn minimal(model: ModelSpace, sub: &SubmanifoldSpec, v: &UnitNormal, t: f64) -> bool {
    dist_to_submanifold(model, sub, &v.point_at(model, t))
        .unwrap()
        .distance
        >= t - DEFAULT_TOL
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn minimality_holds_before_and_fails_after_the_cut_time(case in 0usize..7, seed in any::<u64>()) {
        let (model, sub) = common::cases().swap_remove(case);
        let v = common::normal(model, &sub, seed);
        let s = s_function(model, &sub, &v, DEFAULT_TOL).unwrap().s_value;
        let t_max = sub.default_t_max(model);
        let mut r = rng(seed ^ 0x5eed);
        for _ in 0..20 {
            let t = r.random_range(0.0..s);
            prop_assert!(minimal(model, &sub, &v, t), "t = {t} < s = {s}");
        }
        // Just past a focal cut point minimality fails only by O((t − s)²), below
        // the predicate slack; start the sample one percent past s.
        let (lo, hi) = (s * 1.01, (1.5 * s).min(t_max));
        if lo < hi {
            for _ in 0..20 {
                let t = r.random_range(lo..hi);
                prop_assert!(!minimal(model, &sub, &v, t), "t = {t} > s = {s}");
            }
        }
    }

    #[test]
    fn separating_points_lie_beyond_the_cut_time(case in 0usize..7, seed in any::<u64>()) {
        let (model, sub) = common::cases().swap_remove(case);
        let v = common::normal(model, &sub, seed);
        let s = s_function(model, &sub, &v, DEFAULT_TOL).unwrap().s_value;
        let end = (1.3 * s).min(sub.default_t_max(model));
        for i in 1..=40 {
            let t = end * i as f64 / 40.0;
            if se_detect(model, &sub, &v.point_at(model, t)).unwrap() >= 2 {
                prop_assert!(t >= s - 1e-6, "separating point at t = {t} < s = {s}");
            }
        }
        prop_assert!(se_detect(model, &sub, &v.point_at(model, 0.5 * s)).unwrap() == 1);
    }

    #[test]
    fn ellipse_feet_satisfy_the_normality_condition(x in -4.0f64..4.0, y in -3.0f64..3.0, a in 1.1f64..3.0) {
        let sub = SubmanifoldSpec::Ellipse { a, b: 1.0 };
        let q = Point::from_vec(vec![x, y]);
        let res = dist_to_submanifold(ModelSpace::EuclideanPlane, &sub, &q).unwrap();
        for f in &res.feet {
            let diff = &q - f;
            let dn = diff.norm();
            prop_assert!((dn - res.distance).abs() < 1e-10);
            if dn > 1e-6 {
                let th = f[1].atan2(f[0] / a);
                let tangent = Point::from_vec(vec![-a * th.sin(), th.cos()]).normalize();
                prop_assert!((diff.dot(&tangent) / dn).abs() < 1e-8);
            }
        }
    }
}

#[test]
fn cut_time_is_continuous_along_ellipse_normals() {
    for (a, b) in [(2.0, 1.0), (1.3, 1.0), (3.0, 0.5)] {
        let sub = SubmanifoldSpec::Ellipse { a, b };
        let max_jump = |m: usize| {
            let s: Vec<f64> = (0..=m)
                .map(|i| {
                    let v =
                        UnitNormal::ellipse_inward(a, b, FRAC_PI_2 * i as f64 / m as f64).unwrap();
                    s_function(ModelSpace::EuclideanPlane, &sub, &v, DEFAULT_TOL)
                        .unwrap()
                        .s_value
                })
                .collect();
            s.windows(2)
                .map(|w| (w[1] - w[0]).abs())
                .fold(0.0, f64::max)
        };
        let jumps: Vec<f64> = [8, 32, 128].iter().map(|&m| max_jump(m)).collect();
        assert!(
            jumps[0] > jumps[1] && jumps[1] > jumps[2],
            "a={a} b={b}: {jumps:?}"
        );
        assert!(jumps[2] < 0.05 * (a + b), "a={a} b={b}: {jumps:?}");
    }
}

#[test]
fn equator_cut_locus_is_the_complementary_sphere() {
    for n in 1..=4 {
        for k in 0..n {
            let model = ModelSpace::RoundSphere { n };
            let sub = SubmanifoldSpec::Equator { k };
            for seed in 0..10 {
                let v = common::normal(model, &sub, seed);
                let c = s_function(model, &sub, &v, DEFAULT_TOL).unwrap();
                assert!(
                    (c.s_value - FRAC_PI_2).abs() < 1e-7,
                    "n={n} k={k}: {}",
                    c.s_value
                );
                assert!(c.cut_point.rows(0, k + 1).norm() < 1e-8, "n={n} k={k}");
                assert!((c.cut_point.norm() - 1.0).abs() < 1e-12);
            }
        }
    }
}

#[test]
fn linked_circles_cut_on_the_clifford_torus() {
    let model = ModelSpace::RoundSphere { n: 3 };
    let sub = SubmanifoldSpec::LinkedCircles;
    for seed in 0..50 {
        let c = s_function(model, &sub, &common::normal(model, &sub, seed), DEFAULT_TOL).unwrap();
        let x = &c.cut_point;
        assert!((x[0].hypot(x[1]) - FRAC_1_SQRT_2).abs() < 1e-8);
        assert!((x[2].hypot(x[3]) - FRAC_1_SQRT_2).abs() < 1e-8);
    }
}

#[test]
fn point_cut_locus_is_the_antipode() {
    for n in 1..=4 {
        let model = ModelSpace::RoundSphere { n };
        let p = Point::from_fn(n + 1, |i, _| if i == n { 1.0 } else { 0.0 });
        let sub = SubmanifoldSpec::SpherePoint { p: p.clone() };
        for seed in 0..5 {
            let c =
                s_function(model, &sub, &common::normal(model, &sub, seed), DEFAULT_TOL).unwrap();
            assert!((c.s_value - PI).abs() < 1e-7);
            assert!((&c.cut_point + &p).norm() < 1e-7);
        }
    }
}
