//! Left-invariant, right-`O(n)`-invariant metric on `GL⁺(n,ℝ)` generated by
//! the Frobenius product at the identity, and the distance to `SO(n)`.
//!
//! For `A = U D Vᵀ` the nearest point of `SO(n)` is `U Vᵀ` and the minimal
//! geodesic is `t ↦ A (√(AᵀA))⁻¹ exp(t log √(AᵀA))`, of length
//! `(Σ (log σᵢ)²)^{1/2}`.

use crate::error::{Error, Result};
use crate::matfun;
use crate::matrix::{frob_inner, RealMatrix};
use crate::numeric::simpson_samples;

/// Step for central differences along the closed-form geodesic.
pub const GEODESIC_FD_STEP: f64 = 1e-5;

/// `g_P(X, Y) = tr((P⁻¹X)ᵀ (P⁻¹Y))` on `n × n` matrices.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LeftInvariantMetric {
    pub dim: usize,
}

impl LeftInvariantMetric {
    pub fn new(dim: usize) -> Self {
        Self { dim }
    }

    pub fn eval(&self, p: &RealMatrix, x: &RealMatrix, y: &RealMatrix) -> Result<f64> {
        for m in [p, x, y] {
            if m.shape() != (self.dim, self.dim) {
                return Err(Error::DimensionMismatch {
                    expected: self.dim,
                    got: m.nrows(),
                });
            }
        }
        metric_eval(p, x, y)
    }
}

/// Distance to `SO(n)` together with the conditioning of the input.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SonDistance {
    pub distance: f64,
    /// Smallest singular value of the input; the minimizer degrades as it shrinks.
    pub sigma_min: f64,
}

pub fn metric_eval(p: &RealMatrix, x: &RealMatrix, y: &RealMatrix) -> Result<f64> {
    let lu = p.clone().lu();
    let sigma = matfun::svd(p).sigma;
    if sigma.max() == 0.0 || sigma.min() <= matfun::RANK_TOL * sigma.max() {
        return Err(Error::Singular(sigma.min()));
    }
    let px = lu.solve(x).ok_or(Error::Singular(0.0))?;
    let py = lu.solve(y).ok_or(Error::Singular(0.0))?;
    Ok(frob_inner(&px, &py))
}

fn check_positive_det(a: &RealMatrix) -> Result<()> {
    if a.nrows() != a.ncols() || a.nrows() == 0 {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    let det = a.determinant();
    if det <= 0.0 {
        return Err(Error::NonPositiveDeterminant(det));
    }
    Ok(())
}

/// `(√(AᵀA), log √(AᵀA))` for `det A > 0`.
fn stretch_and_log(a: &RealMatrix) -> Result<(RealMatrix, RealMatrix)> {
    check_positive_det(a)?;
    let root = matfun::sqrt_pd(&(a.transpose() * a)).map_err(|e| match e {
        Error::NotPositiveDefinite(m) => Error::Singular(m.max(0.0).sqrt()),
        other => other,
    })?;
    let log = matfun::principal_log_eig(&root)?;
    Ok((root, log))
}

/// `‖log √(AᵀA)‖_F = (Σ (log σᵢ)²)^{1/2}`.
pub fn dist_to_son(a: &RealMatrix) -> Result<f64> {
    Ok(dist_to_son_report(a)?.distance)
}

pub fn dist_to_son_report(a: &RealMatrix) -> Result<SonDistance> {
    let (_, log) = stretch_and_log(a)?;
    Ok(SonDistance {
        distance: log.norm(),
        sigma_min: matfun::svd(a).sigma.min(),
    })
}

/// Point at parameter `t` of the minimal geodesic from `U Vᵀ` (t = 0) to `A` (t = 1).
pub fn geodesic_to_son(a: &RealMatrix, t: f64) -> Result<RealMatrix> {
    let (root, log) = stretch_and_log(a)?;
    let base = a * root.try_inverse().ok_or(Error::Singular(0.0))?;
    Ok(base * matfun::exp_hermitian(&(log * t))?)
}

/// The geodesic as a reusable closure-friendly pair `(U Vᵀ, log √(AᵀA))`.
fn geodesic_data(a: &RealMatrix) -> Result<(RealMatrix, RealMatrix)> {
    let (root, log) = stretch_and_log(a)?;
    Ok((a * root.try_inverse().ok_or(Error::Singular(0.0))?, log))
}

/// Metric speed `√g(γ′, γ′)` of the geodesic at `t`, with `γ′` by central differences.
pub fn geodesic_speed(a: &RealMatrix, t: f64) -> Result<f64> {
    let (base, log) = geodesic_data(a)?;
    speed_at(&base, &log, t)
}

fn speed_at(base: &RealMatrix, log: &RealMatrix, t: f64) -> Result<f64> {
    let curve = |s: f64| matfun::exp_hermitian(&(log * s)).map(|e| base * e);
    let h = GEODESIC_FD_STEP;
    let d = (curve(t + h)? - curve(t - h)?) / (2.0 * h);
    Ok(metric_eval(&curve(t)?, &d, &d)?.max(0.0).sqrt())
}

/// Length of the geodesic on `[0, 1]` by composite Simpson on `steps` panels.
pub fn geodesic_length_numeric(a: &RealMatrix, steps: usize) -> Result<f64> {
    if steps < 2 {
        return Err(Error::InvalidArgument("steps must be at least 2".into()));
    }
    let (base, log) = geodesic_data(a)?;
    let n = steps + steps % 2;
    let speeds = (0..=n)
        .map(|i| speed_at(&base, &log, i as f64 / n as f64))
        .collect::<Result<Vec<f64>>>()?;
    Ok(simpson_samples(&speeds, 0.0, 1.0))
}
