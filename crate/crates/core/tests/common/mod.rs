//! Model cases shared by the geometric property tests.

use cutlocus::cutlocus::{ModelSpace, Point, SubmanifoldSpec, UnitNormal};
use cutlocus::random::rng;
use rand::Rng;

pub fn cases() -> Vec<(ModelSpace, SubmanifoldSpec)> {
    vec![
        (
            ModelSpace::RoundSphere { n: 2 },
            SubmanifoldSpec::Equator { k: 1 },
        ),
        (
            ModelSpace::RoundSphere { n: 3 },
            SubmanifoldSpec::Equator { k: 2 },
        ),
        (
            ModelSpace::RoundSphere { n: 3 },
            SubmanifoldSpec::Equator { k: 1 },
        ),
        (
            ModelSpace::RoundSphere { n: 2 },
            SubmanifoldSpec::SpherePoint {
                p: Point::from_vec(vec![0.0, 0.6, 0.8]),
            },
        ),
        (
            ModelSpace::RoundSphere { n: 3 },
            SubmanifoldSpec::LinkedCircles,
        ),
        (
            ModelSpace::EuclideanPlane,
            SubmanifoldSpec::Ellipse { a: 2.0, b: 1.0 },
        ),
        (
            ModelSpace::EuclideanPlane,
            SubmanifoldSpec::Ellipse { a: 1.3, b: 1.0 },
        ),
    ]
}

/// A unit normal with a finite cut time: inward for the ellipse, any otherwise.
pub fn normal(model: ModelSpace, sub: &SubmanifoldSpec, seed: u64) -> UnitNormal {
    let mut r = rng(seed);
    match sub {
        SubmanifoldSpec::Ellipse { a, b } => {
            UnitNormal::ellipse_inward(*a, *b, r.random_range(0.0..std::f64::consts::TAU)).unwrap()
        }
        _ => sub.sample_unit_normal(model, &mut r),
    }
}
