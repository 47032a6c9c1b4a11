//! Numerical acceptance checks. Each check is deterministic for a given seed
//! and reports its worst observed error against a fixed limit.

use std::f64::consts::{E, FRAC_1_SQRT_2, PI};
use std::time::{Duration, Instant};

use nalgebra::DVector;
use rand::Rng;
use serde::Serialize;

use crate::cutlocus::{self, ModelSpace, Point, SubmanifoldSpec, UnitNormal};
use crate::error::Result;
use crate::matrix::{ComplexMatrix, RealMatrix};
use crate::random::{gaussian, haar_orthogonal, random_spd, random_symmetric, rng, SeededRng};
use crate::{flow, leftinv, matfun, numeric, orthodist, upq};

/// Inputs shared by all checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Bisection tolerance for cut times.
    pub tol: f64,
    /// Disk-bundle samples for the injectivity check.
    pub samples: usize,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            tol: 1e-8,
            samples: 10_000,
        }
    }
}

/// Outcome of one check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub id: usize,
    pub name: &'static str,
    pub passed: bool,
    pub detail: String,
    #[serde(skip)]
    pub elapsed: Duration,
    pub budget_secs: f64,
}

type CheckFn = fn(&VerifyConfig, &mut SeededRng) -> Result<(bool, String)>;

/// `(id, name, runtime budget in seconds, check)`.
const CHECKS: [(usize, &str, f64, CheckFn); 11] = [
    (
        1,
        "distance-to-O(n) formula vs brute force",
        30.0,
        distance_formula,
    ),
    (2, "O(n) gradient flow solves its ODE", 5.0, orthogonal_flow),
    (3, "normal Hessian block equals 2I", 10.0, hessian_block),
    (4, "left-invariant distance to SO(n)", 10.0, left_invariant),
    (5, "U(p,q) factorization round trip", 20.0, upq_round_trip),
    (6, "Frechet derivative of the square root", 10.0, frechet),
    (7, "kink of tr sqrt(A^T A) at singular A", 5.0, kink),
    (8, "cut times on model spaces", 60.0, cut_times),
    (
        9,
        "ellipse d^2 one-sided derivatives",
        10.0,
        ellipse_regularity,
    ),
    (10, "rescaled exponential is injective", 60.0, injectivity),
    (11, "Morse-Bott flow laws", 10.0, flow_laws),
];

/// Ids and names of all checks, in order.
pub fn check_names() -> Vec<(usize, &'static str)> {
    CHECKS.iter().map(|(id, name, _, _)| (*id, *name)).collect()
}

/// Runs check `id` (1-based).
pub fn run_check(id: usize, cfg: &VerifyConfig) -> Option<CheckResult> {
    let (id, name, budget, check) = *CHECKS.iter().find(|c| c.0 == id)?;
    let mut r = rng(cfg.seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ id as u64);
    let start = Instant::now();
    let (ok, detail) = check(cfg, &mut r).unwrap_or_else(|e| (false, format!("error: {e}")));
    let elapsed = start.elapsed();
    let in_budget = elapsed.as_secs_f64() <= budget;
    let detail = if in_budget {
        detail
    } else {
        format!("{detail}; over the {budget} s budget")
    };
    Some(CheckResult {
        id,
        name,
        passed: ok && in_budget,
        detail,
        elapsed,
        budget_secs: budget,
    })
}

pub fn run_all(cfg: &VerifyConfig) -> Vec<CheckResult> {
    CHECKS.iter().filter_map(|c| run_check(c.0, cfg)).collect()
}

/// Largest value seen, with a fixed limit.
struct Worst {
    label: &'static str,
    value: f64,
    limit: f64,
}

impl Worst {
    fn new(label: &'static str, limit: f64) -> Self {
        Self {
            label,
            value: 0.0,
            limit,
        }
    }

    fn see(&mut self, v: f64) {
        if v.is_nan() || v > self.value {
            self.value = if v.is_nan() { f64::INFINITY } else { v };
        }
    }

    fn ok(&self) -> bool {
        self.value < self.limit
    }

    fn describe(&self) -> String {
        format!("{} {:.2e} < {:.0e}", self.label, self.value, self.limit)
    }
}

fn summarize(items: &[&Worst]) -> (bool, String) {
    let ok = items.iter().all(|w| w.ok());
    (
        ok,
        items
            .iter()
            .map(|w| w.describe())
            .collect::<Vec<_>>()
            .join("; "),
    )
}

fn positive_det(mut a: RealMatrix) -> RealMatrix {
    if a.determinant() < 0.0 {
        a.row_mut(0).neg_mut();
    }
    a
}

fn distance_formula(_: &VerifyConfig, r: &mut SeededRng) -> Result<(bool, String)> {
    let mut w = Worst::new("max |f - brute|", 1e-4);
    for i in 0..100 {
        let n = 2 + i % 2;
        let a = gaussian(r, n, n);
        let seed = r.random();
        w.see(
            (orthodist::dist_sq_to_on(&a)? - orthodist::brute_force_dist_sq(&a, 100_000, seed)?)
                .abs(),
        );
    }
    Ok(summarize(&[&w]))
}

fn orthogonal_flow(_: &VerifyConfig, r: &mut SeededRng) -> Result<(bool, String)> {
    let mut w = Worst::new("max residual", 1e-7);
    let mut count = 0;
    while count < 100 {
        let n = 2 + count % 2;
        let a = gaussian(r, n, n);
        if matfun::svd(&a).sigma.min() < 1e-3 {
            continue;
        }
        for t in [0.1, 0.5, 1.0, 2.0] {
            w.see(orthodist::flow_ode_residual(&a, t)?);
        }
        count += 1;
    }
    Ok(summarize(&[&w]))
}

fn hessian_block(_: &VerifyConfig, r: &mut SeededRng) -> Result<(bool, String)> {
    let mut w = Worst::new("max |H - 2I|", 1e-5);
    for n in [2, 3] {
        for _ in 0..20 {
            let q = haar_orthogonal(r, n);
            let h = orthodist::hessian_normal_block(&q)?;
            let k = h.nrows();
            w.see((h - RealMatrix::identity(k, k) * 2.0).amax());
        }
    }
    Ok(summarize(&[&w]))
}

fn left_invariant(_: &VerifyConfig, r: &mut SeededRng) -> Result<(bool, String)> {
    let d = RealMatrix::from_diagonal(&DVector::from_vec(vec![E, E * E]));
    let mut exact = Worst::new("|d(diag(e,e^2)) - sqrt5|", 1e-10);
    exact.see((leftinv::dist_to_son(&d)? - 5f64.sqrt()).abs());
    let mut len = Worst::new("max |Simpson length - d|", 1e-5);
    for _ in 0..20 {
        let a = positive_det(gaussian(r, 3, 3));
        len.see((leftinv::geodesic_length_numeric(&a, 2000)? - leftinv::dist_to_son(&a)?).abs());
    }
    Ok(summarize(&[&exact, &len]))
}

fn upq_round_trip(_: &VerifyConfig, r: &mut SeededRng) -> Result<(bool, String)> {
    let sigs = [(1, 1), (2, 1), (2, 2)];
    let mut member = Worst::new("membership", 1e-8);
    let mut polar = Worst::new("polar reconstruction", 1e-7);
    let mut block = Worst::new("block inverse", 1e-9);
    let mut expo = Worst::new("closed-form exp", 1e-9);
    let mut dist = Worst::new("boost distance", 1e-9);
    for i in 0..100 {
        let (p, q) = sigs[i % 3];
        let sig = upq::Signature::new(p, q)?;
        let n = sig.n();
        let a = upq::random_upq(sig, r.random());
        let b = upq::random_upq(sig, r.random());
        let gram = a.mat().adjoint() * a.mat();
        for m in [
            a.mat() * b.mat(),
            a.inverse().mat().clone(),
            matfun::sqrt_pd(&gram)?,
        ] {
            member.see(upq::is_upq(&m, sig, 1e-8)?.residual);
        }
        let pol = upq::polar_upq(&a)?;
        polar.see((pol.u.mat() * matfun::expm(&pol.y)? - a.mat()).norm());
        let direct = (gram + ComplexMatrix::identity(n, n))
            .try_inverse()
            .ok_or(crate::Error::BlockSingular)?;
        block.see((upq::block_inverse(&a)? - direct).norm());
        expo.see((upq::exp_n_closed_form(&pol.y, sig)? - matfun::expm(&pol.y)?).norm());
    }
    for rr in [0.1, 1.0, 3.0] {
        dist.see((upq::dist_sq_upq(&upq::hyperbolic_boost(rr))? - 2.0 * rr * rr).abs());
    }
    Ok(summarize(&[&member, &polar, &block, &expo, &dist]))
}

fn frechet(_: &VerifyConfig, r: &mut SeededRng) -> Result<(bool, String)> {
    let mut sylvester = Worst::new("Sylvester residual", 1e-10);
    let mut fd = Worst::new("finite difference", 1e-6);
    let mut quad = Worst::new("quadrature", 1e-5);
    let h_step = 1e-5;
    for i in 0..50 {
        let n = 2 + i % 3;
        let a = random_spd(r, n, 0.5, 3.0);
        let mut h = random_symmetric(r, n);
        h /= h.norm();
        let l = matfun::frechet_sqrt(&a, &h)?;
        let s = matfun::sqrt_pd(&a)?;
        sylvester.see((&s * &l + &l * &s - &h).norm());
        let diff = (matfun::sqrt_pd(&(&a + &h * h_step))? - matfun::sqrt_pd(&(&a - &h * h_step))?)
            / (2.0 * h_step);
        fd.see((diff - &l).norm());
        let q = matfun::frechet_sqrt_quadrature(&a, &h, 20.0, 2000)?;
        quad.see((q.value - &l).norm());
    }
    Ok(summarize(&[&sylvester, &fd, &quad]))
}

fn kink(_: &VerifyConfig, r: &mut SeededRng) -> Result<(bool, String)> {
    let n = 3;
    let mut jump = Worst::new("max |jump - 2(n-k)|", 1e-3);
    let mut smooth = Worst::new("max |right - left| at invertible A", 1e-6);
    for k in 0..n {
        for _ in 0..5 {
            let a = orthodist::random_matrix_of_rank(r, n, k, 0.5, 2.0);
            let b = matfun::singular_probe_direction(&a)?;
            let (left, right) = matfun::g_one_sided_derivatives(&a, &b)?;
            jump.see((right - left - 2.0 * (n - k) as f64).abs());
        }
    }
    for _ in 0..5 {
        let a = orthodist::random_matrix_of_rank(r, n, n, 0.5, 2.0);
        let b = gaussian(r, n, n);
        let (left, right) = matfun::g_one_sided_derivatives(&a, &b)?;
        smooth.see((right - left).abs());
    }
    Ok(summarize(&[&jump, &smooth]))
}

fn cut_times(cfg: &VerifyConfig, r: &mut SeededRng) -> Result<(bool, String)> {
    let tol = cfg.tol;
    let s2 = ModelSpace::RoundSphere { n: 2 };
    let s3 = ModelSpace::RoundSphere { n: 3 };
    let plane = ModelSpace::EuclideanPlane;
    let mut equator = Worst::new("equator |s - pi/2|", 1e-7);
    let mut point = Worst::new("point |s - pi|", 1e-7);
    let mut clifford = Worst::new("Clifford |s - pi/4|", 1e-7);
    let mut torus = Worst::new("torus residual", 1e-7);
    let mut ends = Worst::new("ellipse endpoints", 1e-6);
    let mut segment = Worst::new("ellipse cut points off segment", 1e-6);
    for (model, k) in [(s2, 1), (s3, 2)] {
        let sub = SubmanifoldSpec::Equator { k };
        for _ in 0..200 {
            let v = sub.sample_unit_normal(model, r);
            equator.see((cutlocus::s_function(model, &sub, &v, tol)?.s_value - PI / 2.0).abs());
        }
    }
    let sp = SubmanifoldSpec::SpherePoint {
        p: Point::from_vec(vec![0.0, 0.0, 1.0]),
    };
    for _ in 0..200 {
        let v = sp.sample_unit_normal(s2, r);
        point.see((cutlocus::s_function(s2, &sp, &v, tol)?.s_value - PI).abs());
    }
    let link = SubmanifoldSpec::LinkedCircles;
    for _ in 0..200 {
        let v = link.sample_unit_normal(s3, r);
        let c = cutlocus::s_function(s3, &link, &v, tol)?;
        clifford.see((c.s_value - PI / 4.0).abs());
        let x = &c.cut_point;
        torus.see(
            (x[0].hypot(x[1]) - FRAC_1_SQRT_2)
                .abs()
                .max((x[2].hypot(x[3]) - FRAC_1_SQRT_2).abs()),
        );
    }
    let (a, b) = (2.0, 1.0);
    let ell = SubmanifoldSpec::Ellipse { a, b };
    let (left, right) = cutlocus::ellipse_cut_segment(a, b)?;
    for (theta, end) in [(0.0, &right), (PI, &left)] {
        let v = UnitNormal::ellipse_inward(a, b, theta)?;
        let c = cutlocus::s_function(plane, &ell, &v, tol)?;
        ends.see((&c.cut_point - end).norm().max((end[0].abs() - 1.5).abs()));
    }
    for _ in 0..50 {
        let v = UnitNormal::ellipse_inward(a, b, r.random_range(0.0..2.0 * PI))?;
        let x = cutlocus::s_function(plane, &ell, &v, tol)?.cut_point;
        segment.see(x[1].abs().max(x[0].abs() - right[0]));
    }
    Ok(summarize(&[
        &equator, &point, &clifford, &torus, &ends, &segment,
    ]))
}

fn ellipse_regularity(_: &VerifyConfig, _: &mut SeededRng) -> Result<(bool, String)> {
    let (a, b) = (2.0, 1.0);
    let eps = numeric::halving_steps(1e-2, 6);
    let p0 = Point::from_vec(vec![(a * a - b * b) / a, 0.0]);
    let mut slopes = Worst::new("slope error", 1e-4);
    let mut quads = Worst::new("quadratic error", 1e-3);
    for (alpha, beta) in [(1.0, 0.0), (0.6, 0.8), (-0.6, 0.8)] {
        let d = cutlocus::ellipse_dsq_directional(a, b, alpha, beta, &p0, &eps)?;
        let expect = -2.0 * b * b * alpha / a;
        slopes.see(
            (d.left_slope - expect)
                .abs()
                .max((d.right_slope - expect).abs()),
        );
        if beta == 0.0 {
            quads.see((d.right_quadratic - alpha * alpha).abs());
            quads.see((d.left_quadratic + b * b * alpha * alpha / (a * a - b * b)).abs());
        }
    }
    let d =
        cutlocus::ellipse_dsq_directional(a, b, 0.0, 1.0, &Point::from_vec(vec![0.5, 0.0]), &eps)?;
    let gap = (d.right_slope - d.left_slope).abs();
    let (ok, detail) = summarize(&[&slopes, &quads]);
    Ok((
        ok && gap > 0.1,
        format!("{detail}; Se slope gap {gap:.3} > 0.1"),
    ))
}

fn injectivity(cfg: &VerifyConfig, r: &mut SeededRng) -> Result<(bool, String)> {
    let s2 = ModelSpace::RoundSphere { n: 2 };
    let cases = [
        ("equator", SubmanifoldSpec::Equator { k: 1 }),
        (
            "point",
            SubmanifoldSpec::SpherePoint {
                p: Point::from_vec(vec![0.0, 0.0, 1.0]),
            },
        ),
    ];
    let mut ok = true;
    let mut parts = Vec::new();
    for (label, sub) in cases {
        let rep = cutlocus::injectivity_check(s2, &sub, cfg.samples, r.random(), cfg.tol)?;
        ok &= rep.collisions == 0;
        parts.push(format!(
            "{label}: {} collisions, min separation {:.2e}",
            rep.collisions, rep.min_image_separation
        ));
    }
    Ok((ok, parts.join("; ")))
}

/// A point with a unique foot at distance in `(0, 𝓈(v))`, plus its flow time.
fn flow_sample(
    model: ModelSpace,
    sub: &SubmanifoldSpec,
    r: &mut SeededRng,
    tol: f64,
) -> Result<(Point, f64)> {
    let mut v = sub.sample_unit_normal(model, r);
    let s = if let SubmanifoldSpec::Ellipse { .. } = sub {
        // Outward normals of a convex curve never reach a cut point.
        if v.dir.dot(&v.base) < 0.0 && r.random_bool(0.5) {
            v.dir = -v.dir;
        }
        if v.dir.dot(&v.base) > 0.0 {
            3.0
        } else {
            cutlocus::s_function(model, sub, &v, tol)?.s_value
        }
    } else {
        cutlocus::s_function(model, sub, &v, tol)?.s_value
    };
    let dist = s * r.random_range(0.02..0.95);
    Ok((v.point_at(model, dist), r.random_range(0.0..3.0)))
}

fn flow_laws(cfg: &VerifyConfig, r: &mut SeededRng) -> Result<(bool, String)> {
    let cases = [
        (
            ModelSpace::RoundSphere { n: 2 },
            SubmanifoldSpec::Equator { k: 1 },
        ),
        (
            ModelSpace::RoundSphere { n: 2 },
            SubmanifoldSpec::SpherePoint {
                p: Point::from_vec(vec![0.0, 0.0, 1.0]),
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
    ];
    let mut decay = Worst::new("decay law", 1e-8);
    let mut norm = Worst::new("gradient norm", 1e-9);
    for (model, sub) in &cases {
        for _ in 0..100 {
            let (q, t) = flow_sample(*model, sub, r, cfg.tol)?;
            let d = cutlocus::dist_to_submanifold(*model, sub, &q)?.distance;
            let x = flow::flow_to_submanifold(*model, sub, &q, t)?;
            let dx = cutlocus::dist_to_submanifold(*model, sub, &x)?.distance;
            decay.see((dx - d * (-2.0 * t).exp()).abs());
            norm.see((flow::grad_dist_sq_geom(*model, sub, &q)?.norm() - 2.0 * d).abs());
        }
    }
    Ok(summarize(&[&decay, &norm]))
}
