//! Gradient flow of `f = d²(N, ·)` and the deformation of `M − N` onto `Cu(N)`.
//!
//! Off `Cu(N) ∪ N` a point is `q = exp(d·v)` for a unique foot and unit normal
//! `v`, and `∇f(q) = 2d·γ_v′(d)`. The negative gradient line is
//! `η(t) = γ_v(d e^{−2t})`; the retraction is `H(q,t) = γ_v(t𝓈(v) + (1−t)d)`.

use crate::cutlocus::{
    dist_to_submanifold, s_function, ModelSpace, Point, SubmanifoldSpec, UnitNormal, SE_RESOLUTION,
};
use crate::error::{Error, Result};
use crate::trajectory::{check_grid, Trajectory};

/// Points closer than this to `N` are treated as lying on `N`.
pub const ON_SUBMANIFOLD_TOL: f64 = 1e-10;
/// Step for the central difference of the flow in time.
pub const FLOW_FD_STEP: f64 = 1e-5;

/// Which curve [`sample_trajectory`] traces.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FlowKind {
    /// `η(t)`, `t ≥ 0`.
    ToSubmanifold,
    /// `H(q, t)`, `t ∈ [0, 1]`.
    ToCutLocus,
}

/// Unit normal at the foot of `q` and `d(q)`. The foot must be unique.
pub fn normal_coordinates(
    model: ModelSpace,
    sub: &SubmanifoldSpec,
    q: &Point,
) -> Result<(UnitNormal, f64)> {
    let fp = dist_to_submanifold(model, sub, q)?;
    if fp.distance < ON_SUBMANIFOLD_TOL {
        return Err(Error::OnSubmanifold(fp.distance));
    }
    let count = fp.distinct_feet(SE_RESOLUTION);
    if fp.continuum || count > 1 {
        return Err(Error::OnCutLocus(count));
    }
    Ok((
        initial_normal(model, &fp.feet[0], q, fp.distance),
        fp.distance,
    ))
}

fn initial_normal(model: ModelSpace, foot: &Point, q: &Point, d: f64) -> UnitNormal {
    let dir = match model {
        ModelSpace::RoundSphere { .. } => q - foot * foot.dot(q),
        ModelSpace::EuclideanPlane => (q - foot) / d,
    };
    let norm = dir.norm();
    UnitNormal {
        base: foot.clone(),
        dir: dir / norm,
    }
}

/// `γ_v′(t)`.
fn velocity(model: ModelSpace, v: &UnitNormal, t: f64) -> Point {
    match model {
        ModelSpace::RoundSphere { .. } => &v.base * (-t.sin()) + &v.dir * t.cos(),
        ModelSpace::EuclideanPlane => v.dir.clone(),
    }
}

/// `∇f(q) = 2d(q)·γ′(d(q))`.
pub fn grad_dist_sq_geom(model: ModelSpace, sub: &SubmanifoldSpec, q: &Point) -> Result<Point> {
    let (v, d) = normal_coordinates(model, sub, q)?;
    Ok(velocity(model, &v, d) * (2.0 * d))
}

/// `η(t) = γ(d(q) e^{−2t})`, the negative gradient line through `q`.
pub fn flow_to_submanifold(
    model: ModelSpace,
    sub: &SubmanifoldSpec,
    q: &Point,
    t: f64,
) -> Result<Point> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "flow time must be nonnegative, got {t}"
        )));
    }
    let (v, d) = normal_coordinates(model, sub, q)?;
    if t == 0.0 {
        return Ok(q.clone());
    }
    Ok(v.point_at(model, d * (-2.0 * t).exp()))
}

/// `‖η′(t) + ∇f(η(t))‖` with `η′` by central differences.
pub fn flow_ode_residual_geom(
    model: ModelSpace,
    sub: &SubmanifoldSpec,
    q: &Point,
    t: f64,
) -> Result<f64> {
    if t.is_nan() || t < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "flow time must be nonnegative, got {t}"
        )));
    }
    let (v, d) = normal_coordinates(model, sub, q)?;
    let eta = |s: f64| v.point_at(model, d * (-2.0 * s).exp());
    let h = FLOW_FD_STEP;
    let deriv = if t >= h {
        (eta(t + h) - eta(t - h)) / (2.0 * h)
    } else {
        (eta(t) * -3.0 + eta(t + h) * 4.0 - eta(t + 2.0 * h)) / (2.0 * h)
    };
    let grad = grad_dist_sq_geom(model, sub, &eta(t))?;
    Ok((deriv + grad).norm())
}

/// `H(q,t) = γ_v(t𝓈(v) + (1−t)d(q))`; points with several feet lie on `Cu(N)` and stay fixed.
pub fn deform_to_cut_locus(
    model: ModelSpace,
    sub: &SubmanifoldSpec,
    q: &Point,
    t: f64,
    tol: f64,
) -> Result<Point> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidArgument(format!(
            "deformation time must lie in [0,1], got {t}"
        )));
    }
    match normal_coordinates(model, sub, q) {
        Err(Error::OnCutLocus(_)) => Ok(q.clone()),
        Err(e) => Err(e),
        Ok(_) if t == 0.0 => Ok(q.clone()),
        Ok((v, d)) => {
            let s = s_function(model, sub, &v, tol)?.s_value;
            Ok(v.point_at(model, t * s + (1.0 - t) * d))
        }
    }
}

/// Samples the flow line or the retraction path of `q` on a time grid.
pub fn sample_trajectory(
    model: ModelSpace,
    sub: &SubmanifoldSpec,
    q: &Point,
    grid: &[f64],
    kind: FlowKind,
    tol: f64,
) -> Result<Trajectory> {
    check_grid(grid)?;
    let points = match kind {
        FlowKind::ToSubmanifold => {
            if grid[0] < 0.0 {
                return Err(Error::InvalidArgument(
                    "flow times must be nonnegative".into(),
                ));
            }
            let (v, d) = normal_coordinates(model, sub, q)?;
            grid.iter()
                .map(|&t| {
                    if t == 0.0 {
                        q.clone()
                    } else {
                        v.point_at(model, d * (-2.0 * t).exp())
                    }
                })
                .collect::<Vec<_>>()
        }
        FlowKind::ToCutLocus => {
            if grid[0] < 0.0 || grid[grid.len() - 1] > 1.0 {
                return Err(Error::InvalidArgument(
                    "deformation times must lie in [0,1]".into(),
                ));
            }
            match normal_coordinates(model, sub, q) {
                Err(Error::OnCutLocus(_)) => vec![q.clone(); grid.len()],
                Err(e) => return Err(e),
                Ok((v, d)) => {
                    let s = s_function(model, sub, &v, tol)?.s_value;
                    grid.iter()
                        .map(|&t| {
                            if t == 0.0 {
                                q.clone()
                            } else {
                                v.point_at(model, t * s + (1.0 - t) * d)
                            }
                        })
                        .collect()
                }
            }
        }
    };
    Trajectory::new(
        grid.to_vec(),
        points
            .into_iter()
            .map(|p| p.iter().copied().collect())
            .collect(),
    )
}
