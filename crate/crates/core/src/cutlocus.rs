//! Cut loci of submanifolds of model spaces (round spheres and the plane).
//!
//! Geodesics and distances are closed form. The cut time `𝓈(v)` of a unit
//! normal is the supremum of `t` for which `γ_v|[0,t]` still realizes the
//! distance to `N`. It is found by bisection on that minimality predicate and
//! capped by the first focal time, where the normal exponential map drops rank.

use nalgebra::DVector;
use rand::Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;
use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::numeric::golden_section_min;
use crate::random::rng;

pub type Point = DVector<f64>;

/// Default bisection tolerance for cut times.
pub const DEFAULT_TOL: f64 = 1e-8;
/// Points and tangents are validated to this tolerance.
pub const POINT_TOL: f64 = 1e-10;
/// Feet whose distances exceed the minimum by at most this are all reported.
pub const FOOT_TOL: f64 = 1e-7;
/// Feet closer than this are treated as one foot when counting.
pub const SE_RESOLUTION: f64 = 1e-6;
/// Central-difference step for the Jacobian of the normal exponential map.
pub const FOCAL_FD_STEP: f64 = 1e-5;
/// Rank drop threshold `σ_min / σ_max` for focal points.
pub const FOCAL_RATIO: f64 = 1e-5;
/// Number of grid points when scanning the bracket for focal times.
pub const FOCAL_GRID: usize = 256;
/// Grid used when the scan only caps a cut time already bracketed.
const CAP_GRID: usize = 64;
/// Feet sampled from a continuous family of feet.
pub const CONTINUUM_SAMPLES: usize = 8;
/// Interior disk-bundle samples satisfy `r < 1 − INTERIOR_MARGIN`.
pub const INTERIOR_MARGIN: f64 = 1e-3;
/// Preimages closer than this are considered the same bundle point.
pub const PREIMAGE_SEPARATION: f64 = 1e-6;
/// Images closer than this count as a collision.
pub const COLLISION_TOL: f64 = 1e-12;

/// Ambient Riemannian manifold `M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum ModelSpace {
    /// Unit sphere `Sⁿ ⊂ ℝⁿ⁺¹`.
    RoundSphere {
        n: usize,
    },
    EuclideanPlane,
}

impl ModelSpace {
    pub fn ambient_dim(&self) -> usize {
        match self {
            ModelSpace::RoundSphere { n } => n + 1,
            ModelSpace::EuclideanPlane => 2,
        }
    }

    pub fn is_sphere(&self) -> bool {
        matches!(self, ModelSpace::RoundSphere { .. })
    }

    pub fn check_point(&self, x: &Point) -> Result<()> {
        if x.len() != self.ambient_dim() {
            return Err(Error::InvalidPoint(format!(
                "expected {} coordinates, got {}",
                self.ambient_dim(),
                x.len()
            )));
        }
        if x.iter().any(|c| !c.is_finite()) {
            return Err(Error::InvalidPoint("non-finite coordinate".into()));
        }
        if self.is_sphere() && (x.norm() - 1.0).abs() > POINT_TOL {
            return Err(Error::InvalidPoint(format!("norm {} is not 1", x.norm())));
        }
        Ok(())
    }

    /// Riemannian distance between two points of `M`.
    pub fn distance(&self, x: &Point, y: &Point) -> f64 {
        let chord = (x - y).norm();
        match self {
            ModelSpace::RoundSphere { .. } => 2.0 * (0.5 * chord).min(1.0).asin(),
            ModelSpace::EuclideanPlane => chord,
        }
    }

    fn check_tangent(&self, p: &Point, v: &Point) -> Result<()> {
        if v.len() != self.ambient_dim() {
            return Err(Error::InvalidTangent(format!(
                "expected {} coordinates, got {}",
                self.ambient_dim(),
                v.len()
            )));
        }
        if (v.norm() - 1.0).abs() > POINT_TOL {
            return Err(Error::InvalidTangent(format!("norm {} is not 1", v.norm())));
        }
        if self.is_sphere() && p.dot(v).abs() > POINT_TOL {
            return Err(Error::InvalidTangent(format!(
                "not tangent at p (⟨p,v⟩ = {:.3e})",
                p.dot(v)
            )));
        }
        Ok(())
    }
}

/// `exp_p(w)` for an arbitrary tangent vector `w`.
fn exp_point(model: ModelSpace, p: &Point, w: &Point) -> Point {
    match model {
        ModelSpace::RoundSphere { .. } => {
            let r = w.norm();
            if r == 0.0 {
                return p.clone();
            }
            let x = p * r.cos() + w * (r.sin() / r);
            let norm = x.norm();
            x / norm
        }
        ModelSpace::EuclideanPlane => p + w,
    }
}

/// Unit-speed geodesic `cos t·p + sin t·v` on the sphere, `p + t v` on the plane.
pub fn geodesic(model: ModelSpace, p: &Point, v: &Point, t: f64) -> Result<Point> {
    model.check_point(p)?;
    model.check_tangent(p, v)?;
    Ok(exp_point(model, p, &(v * t)))
}

/// The submanifold `N`.
#[derive(Debug, Clone, PartialEq)]
pub enum SubmanifoldSpec {
    SpherePoint {
        p: Point,
    },
    /// Great `Sᵏ` spanned by the first `k + 1` coordinates.
    Equator {
        k: usize,
    },
    /// Hopf link `{x₂ = x₃ = 0} ⊔ {x₀ = x₁ = 0}` in `S³`.
    LinkedCircles,
    /// `(x/a)² + (y/b)² = 1` with `a > b > 0`.
    Ellipse {
        a: f64,
        b: f64,
    },
}

impl SubmanifoldSpec {
    pub fn validate(&self, model: ModelSpace) -> Result<()> {
        match (self, model) {
            (SubmanifoldSpec::SpherePoint { p }, ModelSpace::RoundSphere { .. }) => {
                model.check_point(p)
            }
            (SubmanifoldSpec::Equator { k }, ModelSpace::RoundSphere { n }) if *k < n => Ok(()),
            (SubmanifoldSpec::Equator { k }, ModelSpace::RoundSphere { n }) => Err(
                Error::InvalidArgument(format!("equator needs 0 <= k <= n-1, got k={k}, n={n}")),
            ),
            (SubmanifoldSpec::LinkedCircles, ModelSpace::RoundSphere { n: 3 }) => Ok(()),
            (SubmanifoldSpec::Ellipse { a, b }, ModelSpace::EuclideanPlane) => check_axes(*a, *b),
            _ => Err(Error::InvalidArgument(format!(
                "{self:?} is not a submanifold of {model:?}"
            ))),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            SubmanifoldSpec::SpherePoint { .. } => 0,
            SubmanifoldSpec::Equator { k } => *k,
            SubmanifoldSpec::LinkedCircles | SubmanifoldSpec::Ellipse { .. } => 1,
        }
    }

    /// Default cut-time bracket: the diameter `π` on spheres, `10(a+b)` for the ellipse.
    pub fn default_t_max(&self, model: ModelSpace) -> f64 {
        match (self, model) {
            (_, ModelSpace::RoundSphere { .. }) => PI,
            (SubmanifoldSpec::Ellipse { a, b }, _) => 10.0 * (a + b),
            _ => PI,
        }
    }

    pub fn contains(&self, x: &Point, tol: f64) -> bool {
        match self {
            SubmanifoldSpec::SpherePoint { p } => (x - p).norm() <= tol,
            SubmanifoldSpec::Equator { k } => {
                x.rows(k + 1, x.len() - k - 1).norm() <= tol && (x.norm() - 1.0).abs() <= tol
            }
            SubmanifoldSpec::LinkedCircles => {
                let (r1, r2) = pair_norms(x);
                (x.norm() - 1.0).abs() <= tol && r1.min(r2) <= tol
            }
            SubmanifoldSpec::Ellipse { a, b } => {
                ((x[0] / a).powi(2) + (x[1] / b).powi(2) - 1.0).abs() <= tol
            }
        }
    }

    /// Orthonormal basis of `T_x N`.
    pub fn tangent_basis(&self, x: &Point) -> Vec<Point> {
        match self {
            SubmanifoldSpec::SpherePoint { .. } => Vec::new(),
            SubmanifoldSpec::Equator { k } => {
                let mut basis = vec![x.clone()];
                for i in 0..=*k {
                    let mut e = Point::zeros(x.len());
                    e[i] = 1.0;
                    push_orthonormal(&mut basis, e);
                }
                basis.remove(0);
                basis.truncate(*k);
                basis
            }
            SubmanifoldSpec::LinkedCircles => {
                let (r1, r2) = pair_norms(x);
                let t = if r1 >= r2 {
                    Point::from_vec(vec![-x[1], x[0], 0.0, 0.0])
                } else {
                    Point::from_vec(vec![0.0, 0.0, -x[3], x[2]])
                };
                let norm = t.norm();
                vec![t / norm]
            }
            SubmanifoldSpec::Ellipse { a, b } => {
                let th = ellipse_angle(*a, *b, x);
                let t = Point::from_vec(vec![-a * th.sin(), b * th.cos()]);
                let norm = t.norm();
                vec![t / norm]
            }
        }
    }

    /// Orthonormal basis of the normal space of `N` at `x` inside `T_x M`.
    pub fn normal_basis(&self, model: ModelSpace, x: &Point) -> Vec<Point> {
        let mut basis = Vec::new();
        if model.is_sphere() {
            basis.push(x.clone());
        }
        let skip = basis.len() + self.dim();
        basis.extend(self.tangent_basis(x));
        for i in 0..x.len() {
            let mut e = Point::zeros(x.len());
            e[i] = 1.0;
            push_orthonormal(&mut basis, e);
        }
        basis.split_off(skip)
    }

    /// Random point of `N`.
    pub fn sample_point<R: Rng>(&self, model: ModelSpace, rng: &mut R) -> Point {
        let dim = model.ambient_dim();
        match self {
            SubmanifoldSpec::SpherePoint { p } => p.clone(),
            SubmanifoldSpec::Equator { k } => {
                let mut x = Point::zeros(dim);
                loop {
                    for i in 0..=*k {
                        x[i] = rng.sample(StandardNormal);
                    }
                    let norm = x.norm();
                    if norm > 1e-6 {
                        return x / norm;
                    }
                }
            }
            SubmanifoldSpec::LinkedCircles => {
                let th: f64 = rng.random_range(0.0..2.0 * PI);
                if rng.random_bool(0.5) {
                    Point::from_vec(vec![th.cos(), th.sin(), 0.0, 0.0])
                } else {
                    Point::from_vec(vec![0.0, 0.0, th.cos(), th.sin()])
                }
            }
            SubmanifoldSpec::Ellipse { a, b } => {
                let th: f64 = rng.random_range(0.0..2.0 * PI);
                Point::from_vec(vec![a * th.cos(), b * th.sin()])
            }
        }
    }

    /// Random unit normal at a random point of `N`.
    pub fn sample_unit_normal<R: Rng>(&self, model: ModelSpace, rng: &mut R) -> UnitNormal {
        let base = self.sample_point(model, rng);
        let normals = self.normal_basis(model, &base);
        loop {
            let dir = normals.iter().fold(Point::zeros(base.len()), |acc, n| {
                acc + n * rng.sample::<f64, _>(StandardNormal)
            });
            let norm = dir.norm();
            if norm > 1e-6 {
                return UnitNormal {
                    base,
                    dir: dir / norm,
                };
            }
        }
    }

    /// Local parametrization of `N` near `base`.
    fn chart_point(&self, base: &Point, tangents: &[Point], u: &[f64]) -> Point {
        match self {
            SubmanifoldSpec::SpherePoint { .. } => base.clone(),
            SubmanifoldSpec::Equator { .. } | SubmanifoldSpec::LinkedCircles => {
                let y = tangents
                    .iter()
                    .zip(u)
                    .fold(base.clone(), |acc, (t, ui)| acc + t * *ui);
                let norm = y.norm();
                y / norm
            }
            SubmanifoldSpec::Ellipse { a, b } => {
                let th = ellipse_angle(*a, *b, base) + u[0];
                Point::from_vec(vec![a * th.cos(), b * th.sin()])
            }
        }
    }
}

fn check_axes(a: f64, b: f64) -> Result<()> {
    if a.is_finite() && b.is_finite() && a > b && b > 0.0 {
        Ok(())
    } else {
        Err(Error::InvalidAxes { a, b })
    }
}

fn pair_norms(x: &Point) -> (f64, f64) {
    (x[0].hypot(x[1]), x[2].hypot(x[3]))
}

fn ellipse_angle(a: f64, b: f64, x: &Point) -> f64 {
    (x[1] / b).atan2(x[0] / a)
}

/// Gram-Schmidt step; keeps `v` only if it is independent of `basis`.
fn push_orthonormal(basis: &mut Vec<Point>, mut v: Point) {
    for _ in 0..2 {
        for e in basis.iter() {
            let c = e.dot(&v);
            v -= e * c;
        }
    }
    let norm = v.norm();
    if norm > 1e-6 {
        basis.push(v / norm);
    }
}

/// A unit normal vector `v ∈ S(ν)` at a point of `N`.
#[derive(Debug, Clone, PartialEq)]
pub struct UnitNormal {
    pub base: Point,
    pub dir: Point,
}

impl UnitNormal {
    pub fn new(model: ModelSpace, sub: &SubmanifoldSpec, base: Point, dir: Point) -> Result<Self> {
        sub.validate(model)?;
        model.check_point(&base)?;
        if !sub.contains(&base, POINT_TOL) {
            return Err(Error::InvalidPoint("base is not on the submanifold".into()));
        }
        model.check_tangent(&base, &dir)?;
        for t in sub.tangent_basis(&base) {
            if t.dot(&dir).abs() > POINT_TOL {
                return Err(Error::InvalidTangent(format!(
                    "not normal to N (⟨v,t⟩ = {:.3e})",
                    t.dot(&dir)
                )));
            }
        }
        let norm = dir.norm();
        Ok(Self {
            base,
            dir: dir / norm,
        })
    }

    /// Inward unit normal of the ellipse at `(a cos θ, b sin θ)`.
    pub fn ellipse_inward(a: f64, b: f64, theta: f64) -> Result<Self> {
        check_axes(a, b)?;
        let base = Point::from_vec(vec![a * theta.cos(), b * theta.sin()]);
        let dir = -Point::from_vec(vec![b * theta.cos(), a * theta.sin()]);
        let norm = dir.norm();
        Ok(Self {
            base,
            dir: dir / norm,
        })
    }

    pub fn point_at(&self, model: ModelSpace, t: f64) -> Point {
        exp_point(model, &self.base, &(&self.dir * t))
    }
}

/// Distance from a point to `N` with all nearest points.
#[derive(Debug, Clone, PartialEq)]
pub struct FootPointResult {
    pub distance: f64,
    pub feet: Vec<Point>,
    /// The feet form a continuous family; `feet` holds a finite sample of it.
    pub continuum: bool,
}

impl FootPointResult {
    /// Number of feet after merging those within `resolution` of each other.
    pub fn distinct_feet(&self, resolution: f64) -> usize {
        let mut reps: Vec<&Point> = Vec::new();
        for f in &self.feet {
            if reps.iter().all(|r| (*r - f).norm() > resolution) {
                reps.push(f);
            }
        }
        reps.len()
    }
}

fn circle_sample(dim: usize, count: usize) -> Vec<Point> {
    (0..count)
        .map(|j| {
            let th = 2.0 * PI * j as f64 / count as f64;
            let mut x = Point::zeros(dim);
            x[0] = th.cos();
            x[1] = th.sin();
            x
        })
        .collect()
}

/// Foot points on the ellipse and the distance, for any query in the plane.
fn ellipse_feet(a: f64, b: f64, x0: f64, y0: f64) -> (f64, Vec<Point>) {
    let (u, w) = (x0.abs(), y0.abs());
    let (sx, sy) = (sign(x0), sign(y0));
    let c2 = a * a - b * b;
    let main = if w == 0.0 && u < c2 / a {
        let x = a * a * u / c2;
        let y = b * (1.0 - (x / a).powi(2)).max(0.0).sqrt();
        return finish_ellipse(x0, y0, vec![(sx * x, y), (sx * x, -y)]);
    } else if w == 0.0 {
        (a, 0.0)
    } else {
        // G(s) = (a u/(s + c²))² + (b w/s)² − 1 with s = t + b², decreasing and convex.
        let g = |s: f64| (a * u / (s + c2)).powi(2) + (b * w / s).powi(2) - 1.0;
        let mut lo = 0.5 * b * w;
        let mut hi = 2.0 * (a * a * u * u + b * b * w * w).sqrt() + b * w;
        for _ in 0..200 {
            let mid = (lo * hi).sqrt();
            if g(mid) > 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
            if hi / lo - 1.0 < 1e-15 {
                break;
            }
        }
        let mut s = lo;
        for _ in 0..3 {
            let dg = -2.0 * (a * u).powi(2) / (s + c2).powi(3) - 2.0 * (b * w).powi(2) / s.powi(3);
            let next = s - g(s) / dg;
            if next.is_finite() && next > 0.0 {
                s = next;
            }
        }
        (a * a * u / (s + c2), b * b * w / s)
    };
    let (fx, fy) = main;
    finish_ellipse(
        x0,
        y0,
        vec![(sx * fx, sy * fy), (sx * fx, -sy * fy), (-sx * fx, sy * fy)],
    )
}

fn sign(x: f64) -> f64 {
    if x < 0.0 {
        -1.0
    } else {
        1.0
    }
}

/// Keeps candidates within `FOOT_TOL` of the best, without duplicates.
fn finish_ellipse(x0: f64, y0: f64, cands: Vec<(f64, f64)>) -> (f64, Vec<Point>) {
    let dists: Vec<f64> = cands.iter().map(|(x, y)| (x - x0).hypot(y - y0)).collect();
    let best = dists.iter().cloned().fold(f64::INFINITY, f64::min);
    let mut feet: Vec<Point> = Vec::new();
    for ((x, y), d) in cands.into_iter().zip(dists) {
        let p = Point::from_vec(vec![x, y]);
        if d - best <= FOOT_TOL && feet.iter().all(|f| (f - &p).norm() > 1e-12) {
            feet.push(p);
        }
    }
    (best, feet)
}

/// `d(x, N)` and every nearest point of `N`.
pub fn dist_to_submanifold(
    model: ModelSpace,
    sub: &SubmanifoldSpec,
    x: &Point,
) -> Result<FootPointResult> {
    sub.validate(model)?;
    model.check_point(x)?;
    let dim = model.ambient_dim();
    Ok(match sub {
        SubmanifoldSpec::SpherePoint { p } => FootPointResult {
            distance: model.distance(x, p),
            feet: vec![p.clone()],
            continuum: false,
        },
        SubmanifoldSpec::Equator { k } => {
            let px = x.rows(0, k + 1).into_owned();
            let qx = x.rows(k + 1, dim - k - 1).norm();
            let r = px.norm();
            let distance = qx.atan2(r);
            let embed = |v: &DVector<f64>| {
                let mut f = Point::zeros(dim);
                f.rows_mut(0, k + 1).copy_from(v);
                f
            };
            if r < FOOT_TOL {
                if *k == 0 {
                    let e = embed(&DVector::from_element(1, 1.0));
                    FootPointResult {
                        distance,
                        feet: vec![e.clone(), -e],
                        continuum: false,
                    }
                } else {
                    FootPointResult {
                        distance,
                        feet: circle_sample(dim, CONTINUUM_SAMPLES),
                        continuum: true,
                    }
                }
            } else {
                FootPointResult {
                    distance,
                    feet: vec![embed(&(px / r))],
                    continuum: false,
                }
            }
        }
        SubmanifoldSpec::LinkedCircles => {
            let (r1, r2) = pair_norms(x);
            let d1 = r2.atan2(r1);
            let d2 = r1.atan2(r2);
            let mut feet = Vec::new();
            if d1 - d1.min(d2) <= FOOT_TOL {
                feet.push(Point::from_vec(vec![x[0] / r1, x[1] / r1, 0.0, 0.0]));
            }
            if d2 - d1.min(d2) <= FOOT_TOL {
                feet.push(Point::from_vec(vec![0.0, 0.0, x[2] / r2, x[3] / r2]));
            }
            FootPointResult {
                distance: d1.min(d2),
                feet,
                continuum: false,
            }
        }
        SubmanifoldSpec::Ellipse { a, b } => {
            let (distance, feet) = ellipse_feet(*a, *b, x[0], x[1]);
            FootPointResult {
                distance,
                feet,
                continuum: false,
            }
        }
    })
}

/// Number of distinct feet of `x`, merged at [`SE_RESOLUTION`]; at least 2 on `Se(N)`.
pub fn se_detect(model: ModelSpace, sub: &SubmanifoldSpec, x: &Point) -> Result<usize> {
    Ok(dist_to_submanifold(model, sub, x)?.distinct_feet(SE_RESOLUTION))
}

/// What ends minimality at the cut point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CutCause {
    Focal,
    Equidistant,
    Both,
    BracketLimit,
}

impl CutCause {
    pub fn as_str(&self) -> &'static str {
        match self {
            CutCause::Focal => "focal",
            CutCause::Equidistant => "equidistant",
            CutCause::Both => "both",
            CutCause::BracketLimit => "bracket-limit",
        }
    }
}

/// Cut time of one unit normal.
#[derive(Debug, Clone, PartialEq)]
pub struct CutSample {
    pub normal: UnitNormal,
    pub s_value: f64,
    pub cause: CutCause,
    pub cut_point: Point,
    /// Width of the final bisection bracket of the minimality predicate.
    pub bracket_width: f64,
    pub focal_time: Option<f64>,
}

/// Normal exponential map in coordinates (base parameters, fiber coordinates).
struct NormalChart<'a> {
    model: ModelSpace,
    sub: &'a SubmanifoldSpec,
    base: Point,
    tangents: Vec<Point>,
    normals: Vec<Point>,
}

impl<'a> NormalChart<'a> {
    fn new(model: ModelSpace, sub: &'a SubmanifoldSpec, base: &Point) -> Self {
        Self {
            model,
            sub,
            base: base.clone(),
            tangents: sub.tangent_basis(base),
            normals: sub.normal_basis(model, base),
        }
    }

    fn params(&self) -> usize {
        self.tangents.len() + self.normals.len()
    }

    fn fiber_coords(&self, dir: &Point) -> Vec<f64> {
        self.normals.iter().map(|n| n.dot(dir)).collect()
    }

    /// Normal frame transported to `x` by projection and Gram-Schmidt.
    fn frame_at(&self, x: &Point) -> Vec<Point> {
        if self.tangents.is_empty() {
            return self.normals.clone();
        }
        let mut basis = Vec::new();
        if self.model.is_sphere() {
            basis.push(x.clone());
        }
        let skip = basis.len() + self.tangents.len();
        basis.extend(self.sub.tangent_basis(x));
        for n in &self.normals {
            push_orthonormal(&mut basis, n.clone());
        }
        basis.split_off(skip)
    }

    fn exp(&self, coords: &[f64]) -> Point {
        let (u, w) = coords.split_at(self.tangents.len());
        let x = self.sub.chart_point(&self.base, &self.tangents, u);
        let frame = self.frame_at(&x);
        let v = frame
            .iter()
            .zip(w)
            .fold(Point::zeros(x.len()), |acc, (n, wi)| acc + n * *wi);
        exp_point(self.model, &x, &v)
    }

    /// `σ_min / σ_max` of the central-difference Jacobian at fiber point `t·c`.
    fn rank_ratio(&self, c: &[f64], t: f64) -> f64 {
        let m = self.params();
        let mut coords = vec![0.0; m];
        for (j, cj) in c.iter().enumerate() {
            coords[self.tangents.len() + j] = t * cj;
        }
        let h = FOCAL_FD_STEP;
        let dim = self.base.len();
        let mut jac = nalgebra::DMatrix::<f64>::zeros(dim, m);
        for i in 0..m {
            let mut plus = coords.clone();
            let mut minus = coords.clone();
            plus[i] += h;
            minus[i] -= h;
            jac.set_column(i, &((self.exp(&plus) - self.exp(&minus)) / (2.0 * h)));
        }
        let sv = crate::matfun::svd(&jac).sigma;
        let max = sv.max();
        if max == 0.0 {
            0.0
        } else {
            sv.min() / max
        }
    }
}

fn check_normal(model: ModelSpace, sub: &SubmanifoldSpec, v: &UnitNormal) -> Result<()> {
    UnitNormal::new(model, sub, v.base.clone(), v.dir.clone()).map(|_| ())
}

fn check_tol(tol: f64) -> Result<()> {
    if tol > 0.0 && tol.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "tolerance must be positive, got {tol}"
        )))
    }
}

/// First focal time along `γ_v` in `(0, t_max]`.
fn focal_time_in(
    model: ModelSpace,
    sub: &SubmanifoldSpec,
    v: &UnitNormal,
    tol: f64,
    t_max: f64,
    grid: usize,
) -> Option<f64> {
    let chart = NormalChart::new(model, sub, &v.base);
    let c = chart.fiber_coords(&v.dir);
    let ratio = |t: f64| chart.rank_ratio(&c, t);
    let ts: Vec<f64> = (1..=grid).map(|i| t_max * i as f64 / grid as f64).collect();
    let rs: Vec<f64> = ts.iter().map(|&t| ratio(t)).collect();
    let last = ts.len() - 1;
    for i in 0..ts.len() {
        let left_ok = i == 0 || rs[i] < rs[i - 1];
        let right_ok = i == last || rs[i] <= rs[i + 1];
        if !(left_ok && right_ok) {
            continue;
        }
        let lo = if i == 0 { 0.0 } else { ts[i - 1] };
        let hi = ts[(i + 1).min(last)];
        let t = golden_section_min(ratio, lo, hi, (tol * 1e-3).max(1e-13));
        if ratio(t) < FOCAL_RATIO {
            return Some(t);
        }
    }
    None
}

/// Smallest `t` in the default bracket where `D exp_ν` at `t·v` loses rank.
pub fn focal_time(
    model: ModelSpace,
    sub: &SubmanifoldSpec,
    v: &UnitNormal,
    tol: f64,
) -> Result<Option<f64>> {
    focal_time_with_bracket(model, sub, v, tol, sub.default_t_max(model))
}

pub fn focal_time_with_bracket(
    model: ModelSpace,
    sub: &SubmanifoldSpec,
    v: &UnitNormal,
    tol: f64,
    t_max: f64,
) -> Result<Option<f64>> {
    check_tol(tol)?;
    check_normal(model, sub, v)?;
    if t_max.is_nan() || t_max <= 0.0 {
        return Err(Error::BracketTooSmall(t_max));
    }
    Ok(focal_time_in(model, sub, v, tol, t_max, FOCAL_GRID))
}

/// Cut time `𝓈(v)` with the default bracket.
pub fn s_function(
    model: ModelSpace,
    sub: &SubmanifoldSpec,
    v: &UnitNormal,
    tol: f64,
) -> Result<CutSample> {
    s_function_with_bracket(model, sub, v, tol, sub.default_t_max(model))
}

/// Cut time `𝓈(v)` searched in `[0, t_max]`.
pub fn s_function_with_bracket(
    model: ModelSpace,
    sub: &SubmanifoldSpec,
    v: &UnitNormal,
    tol: f64,
    t_max: f64,
) -> Result<CutSample> {
    check_tol(tol)?;
    check_normal(model, sub, v)?;
    if t_max.is_nan() || t_max <= 0.0 {
        return Err(Error::BracketTooSmall(t_max));
    }
    let minimal = |t: f64| -> Result<bool> {
        Ok(dist_to_submanifold(model, sub, &v.point_at(model, t))?.distance >= t - tol)
    };
    let (t_pred, bracket_width) = if minimal(t_max)? {
        if !model.is_sphere() {
            return Err(Error::BracketTooSmall(t_max));
        }
        (t_max, 0.0)
    } else {
        let (mut lo, mut hi) = (0.0, t_max);
        while hi - lo > tol {
            let mid = 0.5 * (lo + hi);
            if minimal(mid)? {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        (lo, hi - lo)
    };
    // Cut points never lie beyond the first focal point; scanning slightly past
    // the predicate's answer is enough to find a focal time that caps it.
    let scan = (t_pred * (1.0 + 1e-3) + 1e-6).min(t_max);
    let focal = focal_time_in(model, sub, v, tol, scan, CAP_GRID);
    let s_value = focal.map_or(t_pred, |f| f.min(t_pred));
    let cut_point = v.point_at(model, s_value);
    let focal_hit = focal.is_some_and(|f| (f - s_value).abs() <= 10.0 * tol);
    let feet = dist_to_submanifold(model, sub, &cut_point)?;
    let separation = (10.0 * tol).sqrt();
    let equidistant = feet.continuum
        || feet
            .feet
            .iter()
            .any(|f| model.distance(f, &v.base) > separation);
    let cause = match (focal_hit, equidistant) {
        (true, true) => CutCause::Both,
        (true, false) => CutCause::Focal,
        (false, true) => CutCause::Equidistant,
        (false, false) => CutCause::BracketLimit,
    };
    Ok(CutSample {
        normal: v.clone(),
        s_value,
        cause,
        cut_point,
        bracket_width,
        focal_time: focal,
    })
}

/// `exp(𝓈(v)·r·v)`: the disk bundle onto `M`, with the unit sphere bundle landing on `Cu(N)`.
pub fn rescaled_exponential(
    model: ModelSpace,
    sub: &SubmanifoldSpec,
    v: &UnitNormal,
    r: f64,
    tol: f64,
) -> Result<Point> {
    if !(0.0..=1.0).contains(&r) {
        return Err(Error::InvalidArgument(format!(
            "radius must lie in [0,1], got {r}"
        )));
    }
    if r == 0.0 {
        check_normal(model, sub, v)?;
        return Ok(v.base.clone());
    }
    let s = s_function(model, sub, v, tol)?.s_value;
    Ok(v.point_at(model, s * r))
}

/// Pairwise injectivity test of the rescaled exponential on interior samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct InjectivityReport {
    pub samples: usize,
    pub pairs_checked: usize,
    pub collisions: usize,
    /// Smallest image distance over pairs with distinct preimages.
    pub min_image_separation: f64,
    pub closest_pair: (usize, usize),
}

pub fn injectivity_check(
    model: ModelSpace,
    sub: &SubmanifoldSpec,
    samples: usize,
    seed: u64,
    tol: f64,
) -> Result<InjectivityReport> {
    if samples < 2 {
        return Err(Error::InvalidArgument(
            "injectivity check needs at least 2 samples".into(),
        ));
    }
    sub.validate(model)?;
    let mut r = rng(seed);
    let draws: Vec<(UnitNormal, f64)> = (0..samples)
        .map(|_| {
            let mut v = sub.sample_unit_normal(model, &mut r);
            // Outward normals of a plane curve have no cut point, so only the
            // inward half of the bundle has a rescaled exponential.
            if matches!(sub, SubmanifoldSpec::Ellipse { .. }) && v.dir.dot(&v.base) > 0.0 {
                v.dir = -v.dir;
            }
            let radius = r.random_range(0.0..1.0 - INTERIOR_MARGIN);
            (v, radius)
        })
        .collect();
    let images = draws
        .par_iter()
        .map(|(v, radius)| rescaled_exponential(model, sub, v, *radius, tol))
        .collect::<Result<Vec<Point>>>()?;
    let bundle: Vec<Vec<f64>> = draws
        .iter()
        .map(|(v, radius)| {
            v.base
                .iter()
                .copied()
                .chain(v.dir.iter().map(|c| c * radius))
                .collect()
        })
        .collect();
    let images: Vec<&[f64]> = images.iter().map(|p| p.as_slice()).collect();
    let half = model.ambient_dim();
    let per_row: Vec<(usize, f64, usize)> = (0..samples)
        .into_par_iter()
        .map(|i| {
            let mut collisions = 0;
            let mut best = (f64::INFINITY, i);
            for j in i + 1..samples {
                let (bi, bj) = (&bundle[i], &bundle[j]);
                let pre = euclid(&bi[..half], &bj[..half]) + euclid(&bi[half..], &bj[half..]);
                if pre <= PREIMAGE_SEPARATION {
                    continue;
                }
                let d = euclid(images[i], images[j]);
                if d < COLLISION_TOL {
                    collisions += 1;
                }
                if d < best.0 {
                    best = (d, j);
                }
            }
            (collisions, best.0, best.1)
        })
        .collect();
    let mut report = InjectivityReport {
        samples,
        pairs_checked: samples * (samples - 1) / 2,
        collisions: 0,
        min_image_separation: f64::INFINITY,
        closest_pair: (0, 0),
    };
    for (i, (c, d, j)) in per_row.into_iter().enumerate() {
        report.collisions += c;
        if d < report.min_image_separation {
            report.min_image_separation = d;
            report.closest_pair = (i, j);
        }
    }
    Ok(report)
}

fn euclid(x: &[f64], y: &[f64]) -> f64 {
    x.iter()
        .zip(y)
        .map(|(a, b)| (a - b) * (a - b))
        .sum::<f64>()
        .sqrt()
}

/// Endpoints `(∓(a²−b²)/a, 0)` of the ellipse's cut segment.
pub fn ellipse_cut_segment(a: f64, b: f64) -> Result<(Point, Point)> {
    check_axes(a, b)?;
    let x = (a * a - b * b) / a;
    Ok((
        Point::from_vec(vec![-x, 0.0]),
        Point::from_vec(vec![x, 0.0]),
    ))
}

/// One-sided derivatives of `ε ↦ d²(N, base + ε(α, β))` at `ε = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DirectionalDerivatives {
    pub left_slope: f64,
    pub right_slope: f64,
    /// `c` in `d² = d²(base) + slope·ε + c ε² + …` for `ε < 0`.
    pub left_quadratic: f64,
    pub right_quadratic: f64,
}

pub fn ellipse_dsq_directional(
    a: f64,
    b: f64,
    alpha: f64,
    beta: f64,
    base: &Point,
    eps: &[f64],
) -> Result<DirectionalDerivatives> {
    use crate::numeric::extrapolate_to_zero;
    check_axes(a, b)?;
    if alpha == 0.0 && beta == 0.0 {
        return Err(Error::InvalidArgument("direction must be nonzero".into()));
    }
    if eps.len() < 2 || eps.iter().any(|h| h.is_nan() || *h <= 0.0) {
        return Err(Error::InvalidArgument(
            "need at least two positive steps".into(),
        ));
    }
    if base.len() != 2 {
        return Err(Error::InvalidPoint(
            "base must be a point of the plane".into(),
        ));
    }
    let f = |e: f64| {
        ellipse_feet(a, b, base[0] + e * alpha, base[1] + e * beta)
            .0
            .powi(2)
    };
    let f0 = f(0.0);
    // Near the evolute cusp the foot moves like ε^{1/3}, so secants are
    // extrapolated as series in ε^{1/3}. Quadratic coefficients only exist
    // where the expansion is in integer powers.
    let nodes: Vec<f64> = eps.iter().map(|h| h.cbrt()).collect();
    let side = |sigma: f64| {
        let secants: Vec<f64> = eps
            .iter()
            .map(|&h| (f(sigma * h) - f0) / (sigma * h))
            .collect();
        let slope = extrapolate_to_zero(&nodes, &secants);
        let linear = extrapolate_to_zero(eps, &secants);
        let quads: Vec<f64> = eps
            .iter()
            .map(|&h| (f(sigma * h) - f0 - linear * sigma * h) / (h * h))
            .collect();
        (slope, extrapolate_to_zero(eps, &quads))
    };
    let (left_slope, left_quadratic) = side(-1.0);
    let (right_slope, right_quadratic) = side(1.0);
    Ok(DirectionalDerivatives {
        left_slope,
        right_slope,
        left_quadratic,
        right_quadratic,
    })
}
