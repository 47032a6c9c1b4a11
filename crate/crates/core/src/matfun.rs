//! Matrix functions on symmetric/Hermitian positive (semi)definite input:
//! square roots, principal logarithms (spectral and Gregory-series routes),
//! the Fréchet derivative of the square root, polar and singular value
//! decompositions, and one-sided derivatives of `A ↦ tr √(AᵀA)`.
//!
//! Everything here is generic over `f64` and `Complex64` where the algebra
//! allows it; adjoints are conjugate transposes.

use nalgebra::{ComplexField, DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::matrix::RealMatrix;
use crate::numeric::{halving_steps, one_sided_slopes};

/// Relative tolerance for the symmetry check on inputs.
pub const SYMMETRY_TOL: f64 = 1e-8;
/// Default truncation threshold for the Gregory series.
pub const GREGORY_TOL: f64 = 1e-14;
pub const GREGORY_MAX_TERMS: usize = 10_000;
/// Singular values below `RANK_TOL * σ_max` are treated as zero.
pub const RANK_TOL: f64 = 1e-8;

/// Orthogonal/unitary factor and positive semidefinite factor of `A = Q S`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolarFactors<T: ComplexField> {
    pub q_factor: DMatrix<T>,
    pub s_factor: DMatrix<T>,
}

/// `A = U diag(σ) V*` with `σ` nonincreasing.
#[derive(Debug, Clone, PartialEq)]
pub struct SvdFactors<T: ComplexField> {
    pub u: DMatrix<T>,
    pub sigma: DVector<f64>,
    pub v: DMatrix<T>,
}

impl<T: ComplexField<RealField = f64>> SvdFactors<T> {
    pub fn reconstruct(&self) -> DMatrix<T> {
        let mut us = self.u.clone();
        for (j, s) in self.sigma.iter().enumerate() {
            us.column_mut(j).scale_mut(*s);
        }
        us * self.v.adjoint()
    }

    /// Number of singular values above `RANK_TOL · σ_max`.
    pub fn rank(&self) -> usize {
        let smax = self.sigma.iter().cloned().fold(0.0, f64::max);
        if smax == 0.0 {
            return 0;
        }
        self.sigma.iter().filter(|s| **s > RANK_TOL * smax).count()
    }
}

/// Quadrature value with an a-posteriori error bound.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureEstimate {
    pub value: RealMatrix,
    pub error_bound: f64,
}

fn ensure_square<T: ComplexField>(a: &DMatrix<T>) -> Result<()> {
    if a.nrows() != a.ncols() || a.nrows() == 0 {
        return Err(Error::NotSquare {
            rows: a.nrows(),
            cols: a.ncols(),
        });
    }
    Ok(())
}

/// Checks `‖a − a*‖ ≤ 1e-8 (1 + ‖a‖)` and returns `(a + a*)/2`.
pub fn hermitian_part<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> Result<DMatrix<T>> {
    ensure_square(a)?;
    let adj = a.adjoint();
    let asym = (a - &adj).norm();
    if asym > SYMMETRY_TOL * (1.0 + a.norm()) {
        return Err(Error::NotSymmetric(asym));
    }
    Ok((a + adj).scale(0.5))
}

/// Eigendecomposition of a Hermitian matrix (already symmetrized).
fn eigh<T: ComplexField<RealField = f64>>(a: DMatrix<T>) -> (DVector<f64>, DMatrix<T>) {
    let eig = SymmetricEigen::new(a);
    (eig.eigenvalues, eig.eigenvectors)
}

/// `V diag(f(λ)) V*`.
fn spectral<T: ComplexField<RealField = f64>>(
    values: &DVector<f64>,
    vectors: &DMatrix<T>,
    f: impl Fn(f64) -> f64,
) -> DMatrix<T> {
    let mut scaled = vectors.clone();
    for (j, lam) in values.iter().enumerate() {
        scaled.column_mut(j).scale_mut(f(*lam));
    }
    let out = scaled * vectors.adjoint();
    (&out + out.adjoint()).scale(0.5)
}

fn pd_eigh<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> Result<(DVector<f64>, DMatrix<T>)> {
    let (vals, vecs) = eigh(hermitian_part(a)?);
    let min = vals.min();
    if min <= 0.0 {
        return Err(Error::NotPositiveDefinite(min));
    }
    Ok((vals, vecs))
}

/// Positive definite square root of a symmetric/Hermitian positive definite matrix.
pub fn sqrt_pd<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> Result<DMatrix<T>> {
    let (vals, vecs) = pd_eigh(a)?;
    Ok(spectral(&vals, &vecs, f64::sqrt))
}

/// Square root of a positive semidefinite matrix. Eigenvalues that roundoff
/// pushed below zero are clamped to zero.
pub fn sqrt_psd<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> Result<DMatrix<T>> {
    let (vals, vecs) = eigh(hermitian_part(a)?);
    Ok(spectral(&vals, &vecs, |x| x.max(0.0).sqrt()))
}

/// Inverse of the positive definite square root.
pub fn inv_sqrt_pd<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> Result<DMatrix<T>> {
    let (vals, vecs) = pd_eigh(a)?;
    Ok(spectral(&vals, &vecs, |x| 1.0 / x.sqrt()))
}

/// Principal logarithm via the spectral decomposition.
pub fn principal_log_eig<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> Result<DMatrix<T>> {
    let (vals, vecs) = pd_eigh(a)?;
    Ok(spectral(&vals, &vecs, f64::ln))
}

/// Exponential of a symmetric/Hermitian matrix via the spectral decomposition.
pub fn exp_hermitian<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> Result<DMatrix<T>> {
    let (vals, vecs) = eigh(hermitian_part(a)?);
    Ok(spectral(&vals, &vecs, f64::exp))
}

/// Sums `2 Σ X^{2m+1}/(2m+1)` for `X = (A − I)(A + I)⁻¹`, which equals
/// `log A` when the spectral radius of `X` is below one.
///
/// Returns the sum and the number of terms used.
pub fn gregory_series<T: ComplexField<RealField = f64>>(
    x: &DMatrix<T>,
    tol: f64,
    max_terms: usize,
) -> Result<(DMatrix<T>, usize)> {
    ensure_square(x)?;
    let x2 = x * x;
    let mut power = x.clone();
    let mut sum = x.scale(2.0);
    let mut last = sum.norm();
    for m in 1..max_terms {
        if last < tol {
            return Ok((sum, m));
        }
        power = &power * &x2;
        let term = power.scale(2.0 / (2 * m + 1) as f64);
        last = term.norm();
        sum += term;
    }
    if last < tol {
        return Ok((sum, max_terms));
    }
    Err(Error::NoConvergence {
        terms: max_terms,
        last,
    })
}

/// Principal logarithm of a positive definite matrix by the Gregory series
/// `log A = −Σ 2/(2m+1) [(I − A)(I + A)⁻¹]^{2m+1}`, truncated once a term's
/// Frobenius norm drops below `tol`.
pub fn principal_log_gregory<T: ComplexField<RealField = f64>>(
    a: &DMatrix<T>,
    tol: f64,
    max_terms: usize,
) -> Result<DMatrix<T>> {
    pd_eigh(a)?;
    let a = hermitian_part(a)?;
    let n = a.nrows();
    let id = DMatrix::<T>::identity(n, n);
    let plus = (&a + &id).lu();
    // (A + I)⁻¹ and (A − I) commute.
    let x = plus.solve(&(&a - &id)).ok_or(Error::Singular(0.0))?;
    let (log, _) = gregory_series(&x, tol, max_terms)?;
    Ok((&log + log.adjoint()).scale(0.5))
}

/// Matrix exponential by scaling and squaring of the Taylor series.
pub fn expm<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> Result<DMatrix<T>> {
    ensure_square(a)?;
    let n = a.nrows();
    let norm = a.norm();
    let squarings = if norm > 0.5 {
        (norm / 0.5).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a.scale(f64::powi(2.0, -squarings));
    let mut term = DMatrix::<T>::identity(n, n);
    let mut sum = term.clone();
    for k in 1..40 {
        term = &term * &scaled;
        term = term.scale(1.0 / k as f64);
        let tn = term.norm();
        sum += &term;
        if tn <= 1e-18 * sum.norm() {
            break;
        }
    }
    for _ in 0..squarings {
        sum = &sum * &sum;
    }
    Ok(sum)
}

/// Fréchet derivative of the SPD square root at `a` in direction `h`: the
/// symmetric solution `X` of `X √a + √a X = h`.
pub fn frechet_sqrt(a: &RealMatrix, h: &RealMatrix) -> Result<RealMatrix> {
    let (vals, vecs) = pd_eigh(a)?;
    if h.shape() != a.shape() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            got: h.nrows(),
        });
    }
    let h = hermitian_part(h)?;
    let roots = vals.map(f64::sqrt);
    let mut ht = vecs.transpose() * h * &vecs;
    for i in 0..ht.nrows() {
        for j in 0..ht.ncols() {
            ht[(i, j)] /= roots[i] + roots[j];
        }
    }
    let x = &vecs * ht * vecs.transpose();
    Ok((&x + x.transpose()) * 0.5)
}

/// The same derivative from `∫₀^∞ e^{−t√a} h e^{−t√a} dt`, truncated at
/// `t_max` and integrated with composite Simpson on `steps` panels.
///
/// The value is Richardson-corrected from the Simpson sums on `steps` and
/// `steps/2` panels; the bound combines that correction with the neglected
/// tail `‖h‖ e^{−2 t_max μ}/(2μ)`, `μ` the smallest eigenvalue of `√a`.
pub fn frechet_sqrt_quadrature(
    a: &RealMatrix,
    h: &RealMatrix,
    t_max: f64,
    steps: usize,
) -> Result<QuadratureEstimate> {
    if t_max <= 0.0 || steps < 2 {
        return Err(Error::InvalidArgument(
            "need t_max > 0 and steps >= 2".into(),
        ));
    }
    let root = sqrt_pd(a)?;
    let h = hermitian_part(h)?;
    let steps = if steps.is_multiple_of(4) {
        steps
    } else {
        steps + 4 - steps % 4
    };
    let dt = t_max / steps as f64;
    let step = expm(&(-&root * dt))?;
    // integrand samples at t_i = i dt
    let mut e = RealMatrix::identity(a.nrows(), a.ncols());
    let mut samples = Vec::with_capacity(steps + 1);
    for _ in 0..=steps {
        samples.push(&e * &h * &e);
        e = &e * &step;
    }
    let simpson_on = |stride: usize| -> RealMatrix {
        let n = steps / stride;
        let w = dt * stride as f64 / 3.0;
        let mut acc = &samples[0] + &samples[steps];
        for i in 1..n {
            let c = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += &samples[i * stride] * c;
        }
        acc * w
    };
    let fine = simpson_on(1);
    let coarse = simpson_on(2);
    let mu = sqrt_pd(a).map(|r| SymmetricEigen::new(r).eigenvalues.min())?;
    let tail = h.norm() * (-2.0 * t_max * mu).exp() / (2.0 * mu);
    let correction = (&fine - &coarse) / 15.0;
    let error_bound = correction.norm() + tail;
    Ok(QuadratureEstimate {
        value: fine + correction,
        error_bound,
    })
}

/// Cap on one-sided Jacobi sweeps; convergence is quadratic and small inputs need well under ten.
const JACOBI_MAX_SWEEPS: usize = 60;

/// Singular value decomposition with nonincreasing singular values, by
/// one-sided (Hestenes) Jacobi rotations.
///
/// The bundled LAPACK-style bidiagonal SVD can return factors that do not
/// reconstruct rank-deficient inputs, which breaks everything downstream
/// that reads the null-space columns. Jacobi is accurate to high relative
/// precision, including the zero singular values.
pub fn svd<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> SvdFactors<T> {
    let (m, n) = a.shape();
    if m < n {
        let f = svd(&a.adjoint());
        return SvdFactors {
            u: f.v,
            sigma: f.sigma,
            v: f.u,
        };
    }
    let mut w = a.clone();
    let mut v = DMatrix::<T>::identity(n, n);
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for i in 0..n {
            for j in i + 1..n {
                let alpha = w.column(i).norm_squared();
                let beta = w.column(j).norm_squared();
                let gamma = w.column(i).dotc(&w.column(j));
                let g = gamma.clone().modulus();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma.unscale(g).conjugate();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                rotate_columns(&mut w, i, j, c, s, &phase);
                rotate_columns(&mut v, i, j, c, s, &phase);
            }
        }
        if !rotated {
            break;
        }
    }

    let norms: Vec<f64> = (0..n).map(|i| w.column(i).norm()).collect();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| norms[j].total_cmp(&norms[i]));
    let sigma = DVector::from_fn(n, |i, _| norms[order[i]]);
    let v = DMatrix::from_fn(n, n, |r, c| v[(r, order[c])].clone());
    let mut u = DMatrix::<T>::zeros(m, n);
    let mut filled = Vec::with_capacity(n);
    for (c, &k) in order.iter().enumerate() {
        if norms[k] > 0.0 {
            u.set_column(c, &w.column(k).unscale(norms[k]));
            filled.push(c);
        }
    }
    complete_orthonormal(&mut u, &filled);
    SvdFactors { u, sigma, v }
}

/// `(x, y) ↦ (c x − s φ y, s x + c φ y)` on columns `i`, `j`.
fn rotate_columns<T: ComplexField<RealField = f64>>(
    m: &mut DMatrix<T>,
    i: usize,
    j: usize,
    c: f64,
    s: f64,
    phase: &T,
) {
    for r in 0..m.nrows() {
        let x = m[(r, i)].clone();
        let y = m[(r, j)].clone() * phase.clone();
        m[(r, i)] = x.clone().scale(c) - y.clone().scale(s);
        m[(r, j)] = x.scale(s) + y.scale(c);
    }
}

/// Fills the columns of `u` not listed in `filled` with an orthonormal
/// completion, by Gram-Schmidt on the standard basis.
fn complete_orthonormal<T: ComplexField<RealField = f64>>(u: &mut DMatrix<T>, filled: &[usize]) {
    let (m, n) = u.shape();
    let mut basis: Vec<usize> = filled.to_vec();
    let mut candidate = 0;
    for c in (0..n).filter(|c| !filled.contains(c)) {
        while candidate < m {
            let mut x =
                DVector::<T>::from_fn(m, |r, _| if r == candidate { T::one() } else { T::zero() });
            candidate += 1;
            for _ in 0..2 {
                for &b in &basis {
                    let proj = u.column(b).dotc(&x);
                    x -= u.column(b) * proj;
                }
            }
            let norm = x.norm();
            if norm > 0.5 {
                u.set_column(c, &x.unscale(norm));
                basis.push(c);
                break;
            }
        }
    }
}

/// Polar decomposition `a = Q S` with `S = √(a*a)` and `Q = a S⁻¹`.
pub fn polar<T: ComplexField<RealField = f64>>(a: &DMatrix<T>) -> Result<PolarFactors<T>> {
    ensure_square(a)?;
    let sigma = svd(a).sigma;
    let (smax, smin) = (sigma.max(), sigma.min());
    if smax == 0.0 || smin <= 1e-12 * smax {
        return Err(Error::Singular(smin));
    }
    let gram = a.adjoint() * a;
    let s_factor = sqrt_pd(&gram)?;
    let q_factor = a * inv_sqrt_pd(&gram)?;
    Ok(PolarFactors { q_factor, s_factor })
}

/// `g(A) = tr √(AᵀA)`, the nuclear norm, as the sum of singular values.
pub fn trace_sqrt_gram(a: &RealMatrix) -> f64 {
    svd(a).sigma.sum()
}

/// One-sided derivatives of `t ↦ tr √((a+tb)ᵀ(a+tb))` at `t = 0`, each
/// obtained by Richardson extrapolation of one-sided secant slopes.
pub fn g_one_sided_derivatives(a: &RealMatrix, b: &RealMatrix) -> Result<(f64, f64)> {
    ensure_square(a)?;
    if a.shape() != b.shape() {
        return Err(Error::DimensionMismatch {
            expected: a.nrows(),
            got: b.nrows(),
        });
    }
    let bn = b.norm();
    if bn == 0.0 {
        return Ok((0.0, 0.0));
    }
    let steps = halving_steps(1e-2 / bn, 6);
    Ok(one_sided_slopes(|t| trace_sqrt_gram(&(a + b * t)), &steps))
}

/// Direction `U (0_r ⊕ I_{n−r}) Vᵀ` along which `tr √(AᵀA)` has a kink of
/// size `2(n − r)` at a matrix of rank `r`.
pub fn singular_probe_direction(a: &RealMatrix) -> Result<RealMatrix> {
    ensure_square(a)?;
    let f = svd(a);
    let r = f.rank();
    let n = a.nrows();
    let mut b = RealMatrix::zeros(n, n);
    for j in r..n {
        b += f.u.column(j) * f.v.column(j).transpose();
    }
    Ok(b)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::ComplexMatrix;
    use crate::random::{haar_orthogonal, random_spd, random_symmetric, rng};
    use approx::assert_abs_diff_eq;
    use nalgebra::dmatrix;
    use num_complex::Complex64;

    fn diag(v: &[f64]) -> RealMatrix {
        RealMatrix::from_diagonal(&DVector::from_column_slice(v))
    }

    #[test]
    fn sqrt_of_identity_and_diagonal() {
        let i3 = RealMatrix::identity(3, 3);
        assert_abs_diff_eq!(sqrt_pd(&i3).unwrap(), i3, epsilon = 1e-14);
        assert_abs_diff_eq!(
            sqrt_pd(&diag(&[4.0, 9.0])).unwrap(),
            diag(&[2.0, 3.0]),
            epsilon = 1e-14
        );
    }

    #[test]
    fn sqrt_squares_back() {
        let mut r = rng(11);
        for n in 2..6 {
            let s = random_spd(&mut r, n, 0.1, 10.0);
            let root = sqrt_pd(&s).unwrap();
            assert!((&root * &root - &s).norm() < 1e-10 * s.norm());
            assert!((&root - root.transpose()).norm() < 1e-14);
        }
    }

    #[test]
    fn sqrt_rejects_bad_input() {
        let asym = dmatrix![1.0, 2.0; 0.0, 1.0];
        assert!(matches!(sqrt_pd(&asym), Err(Error::NotSymmetric(_))));
        let indef = diag(&[1.0, -1.0]);
        assert!(matches!(
            sqrt_pd(&indef),
            Err(Error::NotPositiveDefinite(_))
        ));
        assert!(matches!(
            sqrt_pd(&diag(&[1.0, 0.0])),
            Err(Error::NotPositiveDefinite(_))
        ));
        let rect = RealMatrix::zeros(2, 3);
        assert!(matches!(sqrt_pd(&rect), Err(Error::NotSquare { .. })));
    }

    #[test]
    fn gregory_log_examples() {
        let i2 = RealMatrix::identity(2, 2);
        assert_abs_diff_eq!(
            principal_log_gregory(&i2, GREGORY_TOL, GREGORY_MAX_TERMS).unwrap(),
            RealMatrix::zeros(2, 2),
            epsilon = 1e-15
        );
        let a = diag(&[2.0, 0.5]);
        let lg = principal_log_gregory(&a, GREGORY_TOL, GREGORY_MAX_TERMS).unwrap();
        let le = principal_log_eig(&a).unwrap();
        assert_abs_diff_eq!(lg, le, epsilon = 1e-12);
        assert_abs_diff_eq!(lg, diag(&[2f64.ln(), -(2f64.ln())]), epsilon = 1e-12);
    }

    #[test]
    fn gregory_matches_eig_on_hermitian() {
        let mut r = rng(5);
        let g = crate::random::complex_gaussian(&mut r, 4, 4);
        let a = &g * g.adjoint() + crate::matrix::ComplexMatrix::identity(4, 4).scale(0.5);
        let lg = principal_log_gregory(&a, GREGORY_TOL, GREGORY_MAX_TERMS).unwrap();
        let le = principal_log_eig(&a).unwrap();
        assert!((&lg - &le).norm() < 1e-9);
        let back = expm(&lg).unwrap();
        assert!((back - &a).norm() < 1e-9 * a.norm());
    }

    #[test]
    fn gregory_reports_nonconvergence() {
        let a = diag(&[1e6, 1.0]);
        assert!(matches!(
            principal_log_gregory(&a, GREGORY_TOL, 50),
            Err(Error::NoConvergence { terms: 50, .. })
        ));
    }

    #[test]
    fn eig_log_examples() {
        let e = std::f64::consts::E;
        assert_abs_diff_eq!(
            principal_log_eig(&diag(&[e, e * e])).unwrap(),
            diag(&[1.0, 2.0]),
            epsilon = 1e-14
        );
        assert_abs_diff_eq!(
            principal_log_eig(&RealMatrix::identity(4, 4)).unwrap(),
            RealMatrix::zeros(4, 4),
            epsilon = 1e-15
        );
        let mut r = rng(2);
        for _ in 0..5 {
            let y = random_symmetric(&mut r, 3);
            let back = principal_log_eig(&expm(&y).unwrap()).unwrap();
            assert!((back - &y).norm() < 1e-9);
        }
    }

    #[test]
    fn expm_agrees_with_spectral_exp() {
        let mut r = rng(8);
        let y = random_symmetric(&mut r, 4) * 3.0;
        assert!(
            (expm(&y).unwrap() - exp_hermitian(&y).unwrap()).norm()
                < 1e-9 * exp_hermitian(&y).unwrap().norm()
        );
        let z = dmatrix![Complex64::new(0.0, 1.0)];
        let ez = expm(&z).unwrap();
        assert_abs_diff_eq!(ez[(0, 0)].re, 1f64.cos(), epsilon = 1e-15);
        assert_abs_diff_eq!(ez[(0, 0)].im, 1f64.sin(), epsilon = 1e-15);
    }

    #[test]
    fn frechet_sqrt_trivial_cases() {
        let h = dmatrix![1.0, 2.0; 2.0, -3.0];
        assert_abs_diff_eq!(
            frechet_sqrt(&RealMatrix::identity(2, 2), &h).unwrap(),
            &h / 2.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            frechet_sqrt(&diag(&[4.0, 4.0]), &h).unwrap(),
            &h / 4.0,
            epsilon = 1e-15
        );
    }

    #[test]
    fn frechet_sqrt_solves_sylvester_and_matches_differences() {
        let mut r = rng(21);
        for n in 2..5 {
            let a = random_spd(&mut r, n, 0.5, 4.0);
            let mut h = random_symmetric(&mut r, n);
            h /= h.norm();
            let x = frechet_sqrt(&a, &h).unwrap();
            let root = sqrt_pd(&a).unwrap();
            assert!((&x * &root + &root * &x - &h).norm() < 1e-10);
            let eps = 1e-5;
            let fd = (sqrt_pd(&(&a + &h * eps)).unwrap() - sqrt_pd(&(&a - &h * eps)).unwrap())
                / (2.0 * eps);
            assert!((fd - &x).norm() < 1e-6);
        }
    }

    #[test]
    fn frechet_sqrt_rejects_nonsymmetric_direction() {
        let h = dmatrix![0.0, 1.0; 0.0, 0.0];
        assert!(matches!(
            frechet_sqrt(&RealMatrix::identity(2, 2), &h),
            Err(Error::NotSymmetric(_))
        ));
    }

    #[test]
    fn quadrature_route_agrees() {
        let h = dmatrix![1.0, 0.3; 0.3, -1.0];
        let q = frechet_sqrt_quadrature(&RealMatrix::identity(2, 2), &h, 20.0, 2000).unwrap();
        assert!((&q.value - &h / 2.0).norm() < 1e-6);
        assert!(q.error_bound < 1e-6);

        let a = diag(&[4.0, 9.0]);
        let ones = RealMatrix::from_element(2, 2, 1.0);
        let q = frechet_sqrt_quadrature(&a, &ones, 20.0, 2000).unwrap();
        let exact = frechet_sqrt(&a, &ones).unwrap();
        for (x, y) in q.value.iter().zip(exact.iter()) {
            assert!((x - y).abs() < 1e-6);
        }
        assert!((q.value - exact).norm() <= q.error_bound + 1e-12);
    }

    #[test]
    fn polar_examples() {
        let mut r = rng(4);
        let q = haar_orthogonal(&mut r, 3);
        let pf = polar(&q).unwrap();
        assert!((pf.q_factor - &q).norm() < 1e-10);
        assert!((pf.s_factor - RealMatrix::identity(3, 3)).norm() < 1e-10);

        let pf = polar(&(RealMatrix::identity(2, 2) * 2.0)).unwrap();
        assert_abs_diff_eq!(pf.q_factor, RealMatrix::identity(2, 2), epsilon = 1e-14);
        assert_abs_diff_eq!(
            pf.s_factor,
            RealMatrix::identity(2, 2) * 2.0,
            epsilon = 1e-14
        );

        let s = random_spd(&mut r, 3, 0.2, 5.0);
        let pf = polar(&(&q * &s)).unwrap();
        assert!((pf.q_factor - &q).norm() < 1e-10);
        assert!((pf.s_factor - &s).norm() < 1e-10);

        assert!(matches!(polar(&diag(&[1.0, 0.0])), Err(Error::Singular(_))));
    }

    #[test]
    fn svd_is_sorted_and_reconstructs() {
        let a = diag(&[1.0, 5.0, 3.0]);
        let f = svd(&a);
        assert_eq!(f.sigma.as_slice(), &[5.0, 3.0, 1.0]);
        assert!((f.reconstruct() - &a).norm() < 1e-14);
        assert_eq!(f.rank(), 3);
        assert_eq!(svd(&diag(&[2.0, 0.0])).rank(), 1);
        assert_eq!(svd(&RealMatrix::zeros(2, 2)).rank(), 0);
    }

    #[test]
    fn svd_is_exact_on_rank_deficient_rectangular_and_complex_input() {
        let mut r = crate::random::rng(5);
        for trial in 0..200 {
            let (m, n, k) = (2 + trial % 4, 2 + (trial / 4) % 4, trial % 3);
            let k = k.min(m.min(n));
            let a = crate::random::gaussian(&mut r, m, k) * crate::random::gaussian(&mut r, k, n);
            let f = svd(&a);
            let p = m.min(n);
            assert_eq!(f.u.shape(), (m, p));
            assert_eq!(f.v.shape(), (n, p));
            assert!(
                (f.reconstruct() - &a).norm() < 1e-13 * (1.0 + a.norm()),
                "trial {trial}"
            );
            assert!((f.u.transpose() * &f.u - RealMatrix::identity(p, p)).norm() < 1e-13);
            assert!((f.v.transpose() * &f.v - RealMatrix::identity(p, p)).norm() < 1e-13);
            assert_eq!(f.rank(), k);
            // Null-space columns annihilate the input from both sides.
            for c in k..p {
                assert!((&a * f.v.column(c)).norm() < 1e-13 * (1.0 + a.norm()));
                assert!((f.u.column(c).transpose() * &a).norm() < 1e-13 * (1.0 + a.norm()));
            }
        }
        for _ in 0..50 {
            let a = crate::random::complex_gaussian(&mut r, 3, 2)
                * crate::random::complex_gaussian(&mut r, 2, 4);
            let f = svd(&a);
            assert!((f.reconstruct() - &a).norm() < 1e-13 * a.norm());
            assert!((f.u.adjoint() * &f.u - ComplexMatrix::identity(3, 3)).norm() < 1e-13);
            assert_eq!(f.rank(), 2);
        }
    }

    #[test]
    fn one_sided_derivative_examples() {
        let (l, r) = g_one_sided_derivatives(&diag(&[1.0, 0.0]), &diag(&[0.0, 1.0])).unwrap();
        assert_abs_diff_eq!(l, -1.0, epsilon = 1e-8);
        assert_abs_diff_eq!(r, 1.0, epsilon = 1e-8);

        let b = dmatrix![0.3, 0.7; 0.7, -1.1];
        let (l, r) = g_one_sided_derivatives(&RealMatrix::identity(2, 2), &b).unwrap();
        assert_abs_diff_eq!(l, b.trace(), epsilon = 1e-8);
        assert_abs_diff_eq!(r, b.trace(), epsilon = 1e-8);

        let (l, r) =
            g_one_sided_derivatives(&RealMatrix::zeros(2, 2), &RealMatrix::identity(2, 2)).unwrap();
        assert_abs_diff_eq!(l, -2.0, epsilon = 1e-8);
        assert_abs_diff_eq!(r, 2.0, epsilon = 1e-8);
    }
}
