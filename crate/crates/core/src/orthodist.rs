//! Distance squared from `M(n,ℝ)` to `O(n,ℝ)` in the Frobenius metric.
//!
//! `f(A) = n + tr(AᵀA) − 2 tr √(AᵀA)`. On invertible matrices the unique
//! nearest orthogonal matrix is the polar factor `A (√(AᵀA))⁻¹`, the negative
//! gradient flow has the closed form
//! `γ(t) = A e^{−2t} + (1 − e^{−2t}) A (√(AᵀA))⁻¹`, and the straight segment
//! to the polar factor is a deformation retraction onto `O(n)`. Singular
//! matrices are the cut locus: their nearest points form a copy of `O(n−k)`.

use rand::Rng;

use crate::error::{Error, Result};
use crate::matfun::{self, SvdFactors};
use crate::matrix::{direct_sum, frob_inner, RealMatrix};
use crate::random::{haar_orthogonal, rng};

/// Central-difference step used by the derivative checks.
pub const FD_STEP: f64 = 1e-5;
const ORTHO_TOL: f64 = 1e-10;

/// The set of orthogonal matrices nearest to a singular `A` of rank `k`:
/// `{ U (I_k ⊕ C) Vᵀ : C ∈ O(n − k) }`.
#[derive(Debug, Clone, PartialEq)]
pub struct EquidistantSetDescription {
    pub u: RealMatrix,
    pub v: RealMatrix,
    pub rank: usize,
    pub dim: usize,
}

impl EquidistantSetDescription {
    /// The member indexed by `c ∈ O(n − k)`.
    pub fn member(&self, c: &RealMatrix) -> Result<RealMatrix> {
        let m = self.dim - self.rank;
        if c.shape() != (m, m) {
            return Err(Error::DimensionMismatch {
                expected: m,
                got: c.nrows(),
            });
        }
        check_orthogonal(c)?;
        let block = direct_sum(&RealMatrix::identity(self.rank, self.rank), c);
        Ok(&self.u * block * self.v.transpose())
    }

    /// A Haar-random member.
    pub fn draw(&self, seed: u64) -> RealMatrix {
        let c = haar_orthogonal(&mut rng(seed), self.dim - self.rank);
        self.member(&c).expect("Haar sample is orthogonal")
    }

    /// All members when the set is finite, i.e. when `n − k = 1`.
    pub fn finite_members(&self) -> Option<Vec<RealMatrix>> {
        if self.dim - self.rank != 1 {
            return None;
        }
        let plus = RealMatrix::identity(1, 1);
        let minus = -RealMatrix::identity(1, 1);
        Some(vec![self.member(&plus).ok()?, self.member(&minus).ok()?])
    }
}

fn ensure_square(a: &RealMatrix) -> Result<usize> {
    if a.nrows() != a.ncols() || a.nrows() == 0 {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    Ok(a.nrows())
}

pub(crate) fn check_orthogonal(q: &RealMatrix) -> Result<()> {
    let n = ensure_square(q)?;
    let res = (q.transpose() * q - RealMatrix::identity(n, n)).norm();
    if res > ORTHO_TOL {
        return Err(Error::NotOrthogonal(res));
    }
    Ok(())
}

/// `(√(AᵀA))⁻¹`, rejecting (numerically) singular `A`.
fn inv_sqrt_gram(a: &RealMatrix) -> Result<RealMatrix> {
    ensure_square(a)?;
    let sigma = matfun::svd(a).sigma;
    let (smax, smin) = (sigma.max(), sigma.min());
    if smax == 0.0 || smin <= matfun::RANK_TOL * smax {
        return Err(Error::Singular(smin));
    }
    matfun::inv_sqrt_pd(&(a.transpose() * a))
}

/// `n + tr(AᵀA) − 2 tr √(AᵀA)`; valid for singular `A` as well.
///
/// `tr √(AᵀA)` is taken as the sum of singular values: the eigenvalue route
/// loses half the digits of the zero singular values of a singular `A`.
pub fn dist_sq_to_on(a: &RealMatrix) -> Result<f64> {
    let n = ensure_square(a)?;
    Ok((n as f64 + a.norm_squared() - 2.0 * matfun::trace_sqrt_gram(a)).max(0.0))
}

/// The polar factor `A (√(AᵀA))⁻¹`, the unique nearest orthogonal matrix.
pub fn nearest_orthogonal(a: &RealMatrix) -> Result<RealMatrix> {
    Ok(a * inv_sqrt_gram(a)?)
}

/// Euclidean gradient `2A − 2A (√(AᵀA))⁻¹`.
pub fn grad_dist_sq(a: &RealMatrix) -> Result<RealMatrix> {
    let q = nearest_orthogonal(a)?;
    Ok((a - q) * 2.0)
}

/// Orthonormal basis of the symmetric matrices under the Frobenius product.
pub fn symmetric_basis(n: usize) -> Vec<RealMatrix> {
    let mut basis = Vec::with_capacity(n * (n + 1) / 2);
    for i in 0..n {
        for j in i..n {
            let mut w = RealMatrix::zeros(n, n);
            if i == j {
                w[(i, i)] = 1.0;
            } else {
                w[(i, j)] = std::f64::consts::FRAC_1_SQRT_2;
                w[(j, i)] = std::f64::consts::FRAC_1_SQRT_2;
            }
            basis.push(w);
        }
    }
    basis
}

/// Hessian of `f` at `q ∈ O(n)` restricted to the normal space `q·Sym(n)`,
/// assembled by second-order central differences. Expected to equal `2 I`.
pub fn hessian_normal_block(q: &RealMatrix) -> Result<RealMatrix> {
    check_orthogonal(q)?;
    let n = q.nrows();
    let dirs: Vec<RealMatrix> = symmetric_basis(n).iter().map(|w| q * w).collect();
    let m = dirs.len();
    let h = 1e-4;
    let f = |x: &RealMatrix| dist_sq_to_on(x).expect("square input");
    let mut hess = RealMatrix::zeros(m, m);
    for i in 0..m {
        for j in i..m {
            let (di, dj) = (&dirs[i] * h, &dirs[j] * h);
            let v = (f(&(q + &di + &dj)) - f(&(q + &di - &dj)) - f(&(q - &di + &dj))
                + f(&(q - &di - &dj)))
                / (4.0 * h * h);
            hess[(i, j)] = v;
            hess[(j, i)] = v;
        }
    }
    Ok(hess)
}

/// Closed-form negative gradient flow `A e^{−2t} + (1 − e^{−2t}) A (√(AᵀA))⁻¹`.
pub fn flow_closed_form(a: &RealMatrix, t: f64) -> Result<RealMatrix> {
    if t < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "flow time must be nonnegative, got {t}"
        )));
    }
    let q = nearest_orthogonal(a)?;
    let decay = (-2.0 * t).exp();
    Ok(a * decay + q * (1.0 - decay))
}

/// `‖γ′(t) + ∇f(γ(t))‖` for the closed-form flow, with `γ′` by central differences.
pub fn flow_ode_residual(a: &RealMatrix, t: f64) -> Result<f64> {
    let q = nearest_orthogonal(a)?;
    let curve = |s: f64| a * (-2.0 * s).exp() + &q * (1.0 - (-2.0 * s).exp());
    let h = FD_STEP;
    let deriv = (curve(t + h) - curve(t - h)) / (2.0 * h);
    let grad = grad_dist_sq(&curve(t))?;
    Ok((deriv + grad).norm())
}

/// `A (1 − t) + t A (√(AᵀA))⁻¹` for `t ∈ [0, 1]`.
pub fn linear_retraction(a: &RealMatrix, t: f64) -> Result<RealMatrix> {
    if !(0.0..=1.0).contains(&t) {
        return Err(Error::InvalidArgument(format!(
            "retraction parameter must lie in [0,1], got {t}"
        )));
    }
    let q = nearest_orthogonal(a)?;
    Ok(a * (1.0 - t) + q * t)
}

/// Nearest-point set of a singular matrix, from an SVD with nonincreasing
/// singular values and the rank threshold `σ > 1e-8 σ_max`.
pub fn equidistant_set_singular(a: &RealMatrix) -> Result<EquidistantSetDescription> {
    let n = ensure_square(a)?;
    let SvdFactors { u, v, .. } = matfun::svd(a);
    let rank = matfun::svd(a).rank();
    if rank == n {
        return Err(Error::FullRank);
    }
    Ok(EquidistantSetDescription { u, v, rank, dim: n })
}

/// Brute-force `min_{B ∈ O(n)} ‖A − B‖²`: best of `samples` Haar draws,
/// refined by Riemannian gradient descent with a QR retraction.
pub fn brute_force_dist_sq(a: &RealMatrix, samples: usize, seed: u64) -> Result<f64> {
    let n = ensure_square(a)?;
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be at least 1".into()));
    }
    let mut r = rng(seed);
    let mut best = RealMatrix::identity(n, n);
    let mut best_val = f64::INFINITY;
    for _ in 0..samples {
        let b = haar_orthogonal(&mut r, n);
        let val = (a - &b).norm_squared();
        if val < best_val {
            best_val = val;
            best = b;
        }
    }
    Ok(refine_on_orthogonal(a, best).min(best_val))
}

/// Descent on `B ↦ ‖A − B‖²` over `O(n)`. The Riemannian gradient at `B` is
/// `−B (BᵀA − AᵀB)`; steps are retracted with the Q factor of a QR split.
fn refine_on_orthogonal(a: &RealMatrix, mut b: RealMatrix) -> f64 {
    let n = a.nrows();
    let objective = |b: &RealMatrix| (a - b).norm_squared();
    let mut val = objective(&b);
    let mut step = 0.25;
    for _ in 0..5000 {
        let m = b.transpose() * a;
        let skew = &m - m.transpose();
        let gnorm = skew.norm();
        if gnorm < 1e-13 {
            break;
        }
        let mut accepted = false;
        while step > 1e-12 {
            let trial = qr_retract(&(&b * (RealMatrix::identity(n, n) + &skew * step)));
            let tv = objective(&trial);
            if tv <= val - 1e-4 * step * gnorm * gnorm {
                b = trial;
                val = tv;
                step = (step * 2.0).min(1.0);
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if !accepted {
            break;
        }
    }
    val
}

fn qr_retract(m: &RealMatrix) -> RealMatrix {
    let n = m.nrows();
    let qr = m.clone().qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Random `n × n` matrix of prescribed rank with singular values in `[lo, hi]`.
pub fn random_matrix_of_rank<R: Rng>(
    rng: &mut R,
    n: usize,
    rank: usize,
    lo: f64,
    hi: f64,
) -> RealMatrix {
    let u = haar_orthogonal(rng, n);
    let v = haar_orthogonal(rng, n);
    let mut d = RealMatrix::zeros(n, n);
    for i in 0..rank.min(n) {
        d[(i, i)] = rng.random_range(lo..hi);
    }
    u * d * v.transpose()
}

/// Gradient of `dist_sq_to_on` by central differences on unit basis directions.
pub fn grad_dist_sq_fd(a: &RealMatrix) -> Result<RealMatrix> {
    let n = ensure_square(a)?;
    let mut g = RealMatrix::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            let mut e = RealMatrix::zeros(n, n);
            e[(i, j)] = FD_STEP;
            g[(i, j)] = (dist_sq_to_on(&(a + &e))? - dist_sq_to_on(&(a - &e))?) / (2.0 * FD_STEP);
        }
    }
    Ok(g)
}

/// Frobenius inner product of the analytic gradient with a direction.
pub fn directional_derivative(a: &RealMatrix, h: &RealMatrix) -> Result<f64> {
    Ok(frob_inner(&grad_dist_sq(a)?, h))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::random::{haar_special_orthogonal, random_spd};
    use approx::assert_abs_diff_eq;
    use nalgebra::{dmatrix, DVector};

    fn diag(v: &[f64]) -> RealMatrix {
        RealMatrix::from_diagonal(&DVector::from_column_slice(v))
    }

    fn rotation(theta: f64) -> RealMatrix {
        dmatrix![theta.cos(), -theta.sin(); theta.sin(), theta.cos()]
    }

    #[test]
    fn distance_examples() {
        assert_abs_diff_eq!(
            dist_sq_to_on(&RealMatrix::identity(3, 3)).unwrap(),
            0.0,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            dist_sq_to_on(&(RealMatrix::identity(2, 2) * 2.0)).unwrap(),
            2.0,
            epsilon = 1e-13
        );
        assert_abs_diff_eq!(
            dist_sq_to_on(&RealMatrix::zeros(2, 2)).unwrap(),
            2.0,
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            dist_sq_to_on(&diag(&[3.0, 0.5])).unwrap(),
            4.25,
            epsilon = 1e-13
        );
    }

    #[test]
    fn brute_force_examples() {
        assert!(brute_force_dist_sq(&RealMatrix::identity(2, 2), 1000, 0).unwrap() < 1e-6);
        let v = brute_force_dist_sq(&(RealMatrix::identity(2, 2) * 2.0), 1000, 1).unwrap();
        assert_abs_diff_eq!(v, 2.0, epsilon = 1e-4);
        let v = brute_force_dist_sq(&diag(&[3.0, 0.5]), 1000, 2).unwrap();
        assert_abs_diff_eq!(v, 4.25, epsilon = 1e-4);
        assert!(brute_force_dist_sq(&diag(&[3.0, 0.5]), 0, 2).is_err());
    }

    #[test]
    fn nearest_orthogonal_examples() {
        assert_abs_diff_eq!(
            nearest_orthogonal(&diag(&[3.0, 0.5])).unwrap(),
            RealMatrix::identity(2, 2),
            epsilon = 1e-14
        );
        let mut r = rng(3);
        let q = haar_orthogonal(&mut r, 3);
        assert!((nearest_orthogonal(&q).unwrap() - &q).norm() < 1e-10);
        let s = random_spd(&mut r, 3, 0.3, 3.0);
        let a = &q * s;
        let b = nearest_orthogonal(&a).unwrap();
        assert!((&b - &q).norm() < 1e-10);
        assert!(((&a - &b).norm_squared() - dist_sq_to_on(&a).unwrap()).abs() < 1e-9);
        let f = matfun::svd(&a);
        assert!((&b - &f.u * f.v.transpose()).norm() < 1e-10);
        assert!(matches!(
            nearest_orthogonal(&diag(&[1.0, 0.0])),
            Err(Error::Singular(_))
        ));
    }

    #[test]
    fn gradient_examples() {
        assert!(grad_dist_sq(&rotation(0.4)).unwrap().norm() < 1e-14);
        let g = grad_dist_sq(&(RealMatrix::identity(2, 2) * 2.0)).unwrap();
        assert_abs_diff_eq!(g, RealMatrix::identity(2, 2) * 2.0, epsilon = 1e-13);
        let fd = grad_dist_sq_fd(&(RealMatrix::identity(2, 2) * 2.0)).unwrap();
        assert!((fd - RealMatrix::identity(2, 2) * 2.0).norm() < 1e-6);
    }

    #[test]
    fn hessian_block_is_twice_identity() {
        for q in [
            RealMatrix::identity(2, 2),
            rotation(1.1),
            RealMatrix::identity(3, 3),
        ] {
            let h = hessian_normal_block(&q).unwrap();
            let m = h.nrows();
            assert_eq!(m, q.nrows() * (q.nrows() + 1) / 2);
            assert!((h - RealMatrix::identity(m, m) * 2.0).amax() < 1e-5);
        }
        assert!(matches!(
            hessian_normal_block(&diag(&[1.0, 2.0])),
            Err(Error::NotOrthogonal(_))
        ));
    }

    #[test]
    fn flow_examples() {
        let a = RealMatrix::identity(2, 2) * 2.0;
        assert_abs_diff_eq!(flow_closed_form(&a, 0.0).unwrap(), a, epsilon = 1e-14);
        for t in [0.1f64, 0.7, 3.0] {
            let expect = RealMatrix::identity(2, 2) * ((-2.0 * t).exp() + 1.0);
            assert_abs_diff_eq!(flow_closed_form(&a, t).unwrap(), expect, epsilon = 1e-13);
        }
        let mut r = rng(5);
        let b = crate::random::gaussian(&mut r, 3, 3);
        let lim = flow_closed_form(&b, 10.0).unwrap();
        assert!((lim - nearest_orthogonal(&b).unwrap()).norm() < 1e-8 * (1.0 + b.norm()));
        assert!(flow_closed_form(&b, -1.0).is_err());
    }

    #[test]
    fn flow_solves_the_gradient_ode() {
        assert!(flow_ode_residual(&(RealMatrix::identity(2, 2) * 2.0), 0.5).unwrap() < 1e-7);
        let mut r = rng(6);
        let b = crate::random::gaussian(&mut r, 3, 3);
        assert!(flow_ode_residual(&b, 1.0).unwrap() < 1e-7);
        let q = rotation(0.3);
        assert!(flow_ode_residual(&q, 2.0).unwrap() < 1e-10);
    }

    #[test]
    fn linear_retraction_endpoints_and_monotonicity() {
        let a = diag(&[3.0, 0.5]);
        assert_abs_diff_eq!(linear_retraction(&a, 0.0).unwrap(), a, epsilon = 0.0);
        assert_abs_diff_eq!(
            linear_retraction(&a, 1.0).unwrap(),
            RealMatrix::identity(2, 2),
            epsilon = 1e-14
        );
        let mut r = rng(12);
        let b = crate::random::gaussian(&mut r, 3, 3);
        let mut prev = f64::INFINITY;
        for t in crate::numeric::linspace(0.0, 1.0, 100) {
            let d = dist_sq_to_on(&linear_retraction(&b, t).unwrap()).unwrap();
            assert!(d <= prev + 1e-12);
            prev = d;
        }
        assert!(linear_retraction(&a, 1.5).is_err());
    }

    #[test]
    fn equidistant_sets_of_singular_matrices() {
        let zero = RealMatrix::zeros(2, 2);
        let set = equidistant_set_singular(&zero).unwrap();
        assert_eq!(set.rank, 0);
        for seed in 0..3 {
            let b = set.draw(seed);
            assert!(((&zero - b).norm_squared() - 2.0).abs() < 1e-8);
        }

        let a = diag(&[1.0, 0.0]);
        let set = equidistant_set_singular(&a).unwrap();
        assert_eq!(set.rank, 1);
        let members = set.finite_members().unwrap();
        let mut found: Vec<RealMatrix> = members.clone();
        found.sort_by(|x, y| x[(1, 1)].total_cmp(&y[(1, 1)]));
        assert_abs_diff_eq!(found[0], diag(&[1.0, -1.0]), epsilon = 1e-12);
        assert_abs_diff_eq!(found[1], diag(&[1.0, 1.0]), epsilon = 1e-12);

        let a = diag(&[2.0, 3.0, 0.0]);
        let set = equidistant_set_singular(&a).unwrap();
        assert_eq!(set.rank, 2);
        let target = dist_sq_to_on(&a).unwrap();
        for b in set.finite_members().unwrap() {
            assert!(((&a - b).norm_squared() - target).abs() < 1e-8);
        }

        assert!(matches!(
            equidistant_set_singular(&RealMatrix::identity(2, 2)),
            Err(Error::FullRank)
        ));
    }

    #[test]
    fn brute_force_finds_exactly_two_minimizers_for_rank_one() {
        // Scan O(2) = rotations ∪ reflections and collect near-minimizers.
        let a = diag(&[1.0, 0.0]);
        let target = dist_sq_to_on(&a).unwrap();
        let mut hits = Vec::new();
        let steps = 20000;
        for i in 0..steps {
            let th = 2.0 * std::f64::consts::PI * i as f64 / steps as f64;
            let rot = rotation(th);
            let refl = &rot * diag(&[1.0, -1.0]);
            for b in [rot, refl] {
                if (&a - &b).norm_squared() - target < 1e-7 {
                    hits.push(b);
                }
            }
        }
        let mut clusters: Vec<RealMatrix> = Vec::new();
        for h in hits {
            if clusters.iter().all(|c| (c - &h).norm() > 1e-2) {
                clusters.push(h);
            }
        }
        assert_eq!(clusters.len(), 2);
    }

    #[test]
    fn distance_is_bi_invariant() {
        let mut r = rng(30);
        for _ in 0..10 {
            let a = crate::random::gaussian(&mut r, 3, 3);
            let q1 = haar_orthogonal(&mut r, 3);
            let q2 = haar_special_orthogonal(&mut r, 3);
            let d0 = dist_sq_to_on(&a).unwrap();
            let d1 = dist_sq_to_on(&(&q1 * &a * &q2)).unwrap();
            assert!((d0 - d1).abs() < 1e-10);
        }
    }
}
