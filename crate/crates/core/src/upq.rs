//! The indefinite unitary group `U(p,q) = {𝒜 : 𝒜* I_{p,q} 𝒜 = I_{p,q}}`.
//!
//! Every element factors uniquely as `𝒜 = U e^Y` with `U ∈ U(p) × U(q)` and
//! `Y = [[0, B], [B*, 0]]`, where `Y = ½ log(𝒜*𝒜)`. The logarithm is summed
//! as a Gregory series whose Cayley argument `(𝒜*𝒜 − I)(𝒜*𝒜 + I)⁻¹` is formed
//! with the closed-form block inverse of `𝒜*𝒜 + I`. Under the left-invariant
//! metric `tr(X*Y)` the distance to `U(p) × U(q)` is `‖Y‖`.

use nalgebra::{DMatrix, DVector, Schur};
use num_complex::Complex64;
use rand::Rng;

use crate::error::{Error, Result};
use crate::matfun::{self, GREGORY_MAX_TERMS, GREGORY_TOL};
use crate::matrix::ComplexMatrix;
use crate::random::{complex_gaussian, rng};

/// Default membership tolerance for `U(p,q)`.
pub const GROUP_TOL: f64 = 1e-9;
/// Default tolerance for the Lie algebra relation.
pub const ALGEBRA_TOL: f64 = 1e-9;
/// Eigenvalues of the unitary factor closer than this to `−1` are rejected.
pub const PHASE_TOL: f64 = 1e-10;

/// Signature `(p, q)` of the Hermitian form `I_{p,q} = diag(I_p, −I_q)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Signature {
    pub p: usize,
    pub q: usize,
}

impl Signature {
    pub fn new(p: usize, q: usize) -> Result<Self> {
        if p == 0 || q == 0 {
            return Err(Error::InvalidArgument(format!(
                "signature needs p, q >= 1, got ({p},{q})"
            )));
        }
        Ok(Self { p, q })
    }

    pub fn n(&self) -> usize {
        self.p + self.q
    }

    /// `diag(I_p, −I_q)`.
    pub fn form(&self) -> ComplexMatrix {
        let d = DVector::from_fn(self.n(), |i, _| {
            if i < self.p {
                Complex64::new(1.0, 0.0)
            } else {
                Complex64::new(-1.0, 0.0)
            }
        });
        DMatrix::from_diagonal(&d)
    }

    fn check_dim(&self, m: &ComplexMatrix) -> Result<()> {
        if m.nrows() != self.n() || m.ncols() != self.n() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: m.nrows().max(m.ncols()),
            });
        }
        Ok(())
    }
}

/// Membership test outcome.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Membership {
    pub member: bool,
    pub residual: f64,
}

/// A validated element of `U(p,q)`.
#[derive(Debug, Clone, PartialEq)]
pub struct UpqElement {
    mat: ComplexMatrix,
    sig: Signature,
}

impl UpqElement {
    pub fn new(mat: ComplexMatrix, sig: Signature) -> Result<Self> {
        let m = is_upq(&mat, sig, GROUP_TOL)?;
        if !m.member {
            return Err(Error::NotInGroup(m.residual));
        }
        let det = mat.determinant().norm();
        if (det - 1.0).abs() > GROUP_TOL.max(1e-9 * mat.norm()) {
            return Err(Error::NotInGroup((det - 1.0).abs()));
        }
        Ok(Self { mat, sig })
    }

    pub fn mat(&self) -> &ComplexMatrix {
        &self.mat
    }

    pub fn sig(&self) -> Signature {
        self.sig
    }

    /// `(A, B, C, D)` with `A` of size `p × p` and `D` of size `q × q`.
    pub fn blocks(&self) -> (ComplexMatrix, ComplexMatrix, ComplexMatrix, ComplexMatrix) {
        blocks(&self.mat, self.sig)
    }

    /// Group inverse `I_{p,q} 𝒜* I_{p,q}`.
    pub fn inverse(&self) -> UpqElement {
        let j = self.sig.form();
        UpqElement {
            mat: &j * self.mat.adjoint() * &j,
            sig: self.sig,
        }
    }

    pub fn mul(&self, other: &UpqElement) -> Result<UpqElement> {
        if self.sig != other.sig {
            return Err(Error::DimensionMismatch {
                expected: self.sig.n(),
                got: other.sig.n(),
            });
        }
        UpqElement::new(&self.mat * &other.mat, self.sig)
    }
}

/// Element of `𝔲_{p,q}` split as `k_part ∈ 𝔲_p ⊕ 𝔲_q` plus `n_part ∈ 𝔫`.
#[derive(Debug, Clone, PartialEq)]
pub struct UpqLieElement {
    pub mat: ComplexMatrix,
    pub sig: Signature,
    pub k_part: ComplexMatrix,
    pub n_part: ComplexMatrix,
}

/// Result of `𝒜 = U e^Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct UpqPolar {
    pub u: UpqElement,
    pub y: ComplexMatrix,
}

/// Outcome of the factored exponential round trip `𝒜 = e^Z e^Y`.
#[derive(Debug, Clone, PartialEq)]
pub struct SurjectivityReport {
    pub z: ComplexMatrix,
    pub y: ComplexMatrix,
    /// `‖e^Z e^Y − 𝒜‖_F`.
    pub reconstruction_residual: f64,
    /// Distance of `Z` from block-diagonal skew-Hermitian matrices.
    pub z_algebra_residual: f64,
    /// Distance of `Y` from `𝔫`.
    pub y_algebra_residual: f64,
}

impl SurjectivityReport {
    pub fn passed(&self, tol: f64) -> bool {
        self.reconstruction_residual < tol
            && self.z_algebra_residual < tol
            && self.y_algebra_residual < tol
    }
}

fn blocks(
    m: &ComplexMatrix,
    sig: Signature,
) -> (ComplexMatrix, ComplexMatrix, ComplexMatrix, ComplexMatrix) {
    let (p, q) = (sig.p, sig.q);
    (
        m.view((0, 0), (p, p)).into_owned(),
        m.view((0, p), (p, q)).into_owned(),
        m.view((p, 0), (q, p)).into_owned(),
        m.view((p, p), (q, q)).into_owned(),
    )
}

/// Frobenius norm of the off-diagonal blocks.
fn off_block_norm(m: &ComplexMatrix, sig: Signature) -> f64 {
    let (_, b, c, _) = blocks(m, sig);
    (b.norm_squared() + c.norm_squared()).sqrt()
}

/// Frobenius norm of the diagonal blocks.
fn diag_block_norm(m: &ComplexMatrix, sig: Signature) -> f64 {
    let (a, _, _, d) = blocks(m, sig);
    (a.norm_squared() + d.norm_squared()).sqrt()
}

/// Distance of `y` from `𝔫 = {[[0, B], [B*, 0]]}`.
pub fn n_part_residual(y: &ComplexMatrix, sig: Signature) -> f64 {
    let (_, b, c, _) = blocks(y, sig);
    (diag_block_norm(y, sig).powi(2) + (c - b.adjoint()).norm_squared()).sqrt()
}

/// `‖m* I_{p,q} m − I_{p,q}‖_F ≤ tol`.
pub fn is_upq(m: &ComplexMatrix, sig: Signature, tol: f64) -> Result<Membership> {
    sig.check_dim(m)?;
    let j = sig.form();
    let residual = (m.adjoint() * &j * m - &j).norm();
    Ok(Membership {
        member: residual <= tol,
        residual,
    })
}

/// `‖x* I_{p,q} + I_{p,q} x‖_F`.
pub fn algebra_residual(x: &ComplexMatrix, sig: Signature) -> Result<f64> {
    sig.check_dim(x)?;
    let j = sig.form();
    Ok((x.adjoint() * &j + &j * x).norm())
}

/// Splits `x ∈ 𝔲_{p,q}` into its block-diagonal and block-anti-diagonal parts.
pub fn split_lie_algebra(x: &ComplexMatrix, sig: Signature) -> Result<UpqLieElement> {
    let res = algebra_residual(x, sig)?;
    if res > ALGEBRA_TOL {
        return Err(Error::NotInAlgebra(res));
    }
    let (p, q) = (sig.p, sig.q);
    let mut k_part = x.clone();
    k_part
        .view_mut((0, p), (p, q))
        .fill(Complex64::new(0.0, 0.0));
    k_part
        .view_mut((p, 0), (q, p))
        .fill(Complex64::new(0.0, 0.0));
    let n_part = x - &k_part;
    Ok(UpqLieElement {
        mat: x.clone(),
        sig,
        k_part,
        n_part,
    })
}

/// `(𝒜*𝒜 + I)⁻¹ = ½ [[I_p, −A⁻¹B], [−B*(A*)⁻¹, I_q]]`.
pub fn block_inverse(a: &UpqElement) -> Result<ComplexMatrix> {
    let sig = a.sig;
    let (ab, b, _, d) = a.blocks();
    let a_inv = ab.clone().try_inverse().ok_or(Error::BlockSingular)?;
    if d.determinant().norm() < 1e-14 {
        return Err(Error::BlockSingular);
    }
    let f = -(&a_inv * &b);
    let mut out = ComplexMatrix::identity(sig.n(), sig.n());
    out.view_mut((0, sig.p), (sig.p, sig.q)).copy_from(&f);
    out.view_mut((sig.p, 0), (sig.q, sig.p))
        .copy_from(&f.adjoint());
    Ok(out.scale(0.5))
}

/// `𝒜 = U e^Y` with `Y = ½ log(𝒜*𝒜) ∈ 𝔫` and `U ∈ U(p) × U(q)`.
pub fn polar_upq(a: &UpqElement) -> Result<UpqPolar> {
    let sig = a.sig;
    let n = sig.n();
    let gram = a.mat.adjoint() * &a.mat;
    let cayley = (&gram - ComplexMatrix::identity(n, n)) * block_inverse(a)?;
    let (log, _) = matfun::gregory_series(&cayley, GREGORY_TOL, GREGORY_MAX_TERMS)?;
    let y = (&log + log.adjoint()).scale(0.25);
    let u = &a.mat * matfun::exp_hermitian(&(-&y))?;
    let stray = off_block_norm(&u, sig);
    if stray > 1e-8 {
        return Err(Error::NotInGroup(stray));
    }
    Ok(UpqPolar {
        u: UpqElement::new(u, sig)?,
        y,
    })
}

/// `e^Y` for `Y = [[0, B], [B*, 0]]` from a compact SVD `B = V_L Σ V_R*`:
/// blocks `cosh`/`sinh` of `Σ`, padded by the identity on the kernels.
pub fn exp_n_closed_form(y: &ComplexMatrix, sig: Signature) -> Result<ComplexMatrix> {
    sig.check_dim(y)?;
    let res = n_part_residual(y, sig);
    if res > 1e-10 * (1.0 + y.norm()) {
        return Err(Error::NotNPart(res));
    }
    let (p, q) = (sig.p, sig.q);
    let b = y.view((0, p), (p, q)).into_owned();
    let f = matfun::svd(&b);
    let (vl, vr) = (&f.u, &f.v);
    let scale_cols = |m: &ComplexMatrix, g: &dyn Fn(f64) -> f64| {
        let mut out = m.clone();
        for (j, s) in f.sigma.iter().enumerate() {
            out.column_mut(j).scale_mut(g(*s));
        }
        out
    };
    let cosh_m1 = |s: f64| s.cosh() - 1.0;
    let top_left = ComplexMatrix::identity(p, p) + scale_cols(vl, &cosh_m1) * vl.adjoint();
    let bottom_right = ComplexMatrix::identity(q, q) + scale_cols(vr, &cosh_m1) * vr.adjoint();
    let top_right = scale_cols(vl, &f64::sinh) * vr.adjoint();
    let mut out = ComplexMatrix::zeros(p + q, p + q);
    out.view_mut((0, 0), (p, p)).copy_from(&top_left);
    out.view_mut((p, p), (q, q)).copy_from(&bottom_right);
    out.view_mut((0, p), (p, q)).copy_from(&top_right);
    out.view_mut((p, 0), (q, p)).copy_from(&top_right.adjoint());
    Ok(out)
}

/// `d²(𝒜, U(p) × U(q)) = ¼ tr[(log 𝒜*𝒜)²]`.
pub fn dist_sq_upq(a: &UpqElement) -> Result<f64> {
    let log = matfun::principal_log_eig(&(a.mat.adjoint() * &a.mat))?;
    Ok(0.25 * (&log * &log).trace().re)
}

/// Skew-Hermitian principal logarithm of a unitary matrix, phases in `(−π, π)`.
pub fn unitary_log(u: &ComplexMatrix) -> Result<ComplexMatrix> {
    let (vecs, tri) = Schur::new(u.clone()).unpack();
    let mut phases = Vec::with_capacity(tri.nrows());
    for i in 0..tri.nrows() {
        let lam = tri[(i, i)];
        if (lam + Complex64::new(1.0, 0.0)).norm() < PHASE_TOL {
            return Err(Error::PhaseBoundary(PHASE_TOL));
        }
        phases.push(Complex64::new(0.0, lam.arg()));
    }
    let d = DMatrix::from_diagonal(&DVector::from_vec(phases));
    let z = &vecs * d * vecs.adjoint();
    Ok((&z - z.adjoint()).scale(0.5))
}

/// Verifies `𝒜 = e^Z e^Y` with `Z ∈ 𝔲_p ⊕ 𝔲_q` the logarithm of the unitary
/// polar factor and `Y ∈ 𝔫` from [`polar_upq`].
pub fn exp_surjectivity_roundtrip(a: &UpqElement) -> Result<SurjectivityReport> {
    let sig = a.sig;
    let UpqPolar { u, y } = polar_upq(a)?;
    let (ua, _, _, ud) = u.blocks();
    let za = unitary_log(&ua)?;
    let zd = unitary_log(&ud)?;
    let z = crate::matrix::direct_sum(&za, &zd);
    let rebuilt = matfun::expm(&z)? * matfun::expm(&y)?;
    let reconstruction_residual = (rebuilt - &a.mat).norm();
    let z_algebra_residual =
        ((&z + z.adjoint()).norm_squared() + off_block_norm(&z, sig).powi(2)).sqrt();
    let y_algebra_residual = n_part_residual(&y, sig);
    Ok(SurjectivityReport {
        z,
        y,
        reconstruction_residual,
        z_algebra_residual,
        y_algebra_residual,
    })
}

/// Random block-diagonal skew-Hermitian `Z` and `Y ∈ 𝔫` with `‖Y‖_F ≤ 2`.
pub fn random_algebra_pair<R: Rng>(rng: &mut R, sig: Signature) -> (ComplexMatrix, ComplexMatrix) {
    let (p, q) = (sig.p, sig.q);
    let skew = |rng: &mut R, k: usize| {
        let g = complex_gaussian(rng, k, k);
        (&g - g.adjoint()).scale(0.5)
    };
    let z = crate::matrix::direct_sum(&skew(rng, p), &skew(rng, q));
    let mut b = complex_gaussian(rng, p, q);
    let target = rng.random_range(0.05..2.0);
    b = b.scale(target / (std::f64::consts::SQRT_2 * b.norm()));
    let mut y = ComplexMatrix::zeros(p + q, p + q);
    y.view_mut((0, p), (p, q)).copy_from(&b);
    y.view_mut((p, 0), (q, p)).copy_from(&b.adjoint());
    (z, y)
}

/// `e^Z e^Y` for a random pair from [`random_algebra_pair`], both exponentials
/// by the scaling-and-squaring series.
pub fn random_upq(sig: Signature, seed: u64) -> UpqElement {
    let mut r = rng(seed);
    let (z, y) = random_algebra_pair(&mut r, sig);
    let mat = matfun::expm(&z).expect("square") * matfun::expm(&y).expect("square");
    UpqElement::new(mat, sig).expect("product of group exponentials lies in U(p,q)")
}

/// `[[cosh r, sinh r], [sinh r, cosh r]] ∈ U(1,1)`.
pub fn hyperbolic_boost(r: f64) -> UpqElement {
    let c = Complex64::new(r.cosh(), 0.0);
    let s = Complex64::new(r.sinh(), 0.0);
    let mat = DMatrix::from_row_slice(2, 2, &[c, s, s, c]);
    UpqElement::new(mat, Signature { p: 1, q: 1 }).expect("boost lies in U(1,1)")
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn sig(p: usize, q: usize) -> Signature {
        Signature::new(p, q).unwrap()
    }

    #[test]
    fn membership_examples() {
        for s in [sig(1, 1), sig(2, 1), sig(2, 3)] {
            let id = ComplexMatrix::identity(s.n(), s.n());
            assert!(is_upq(&id, s, 1e-12).unwrap().member);
        }
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![
            c(0.3f64.cos(), 0.3f64.sin()),
            c(1.2f64.cos(), -1.2f64.sin()),
        ]));
        assert!(is_upq(&d, sig(1, 1), 1e-12).unwrap().member);
        let boost = hyperbolic_boost(0.9);
        assert!(is_upq(boost.mat(), sig(1, 1), 1e-12).unwrap().member);
        let bad = ComplexMatrix::identity(2, 2).scale(2.0);
        let m = is_upq(&bad, sig(1, 1), 1e-9).unwrap();
        assert!(!m.member && m.residual > 1.0);
        assert!(matches!(
            is_upq(&bad, sig(2, 1), 1e-9),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(matches!(
            UpqElement::new(bad, sig(1, 1)),
            Err(Error::NotInGroup(_))
        ));
    }

    #[test]
    fn lie_algebra_split() {
        let s = sig(2, 1);
        let mut r = rng(4);
        let (z, y) = random_algebra_pair(&mut r, s);
        let only_k = split_lie_algebra(&z, s).unwrap();
        assert_eq!(only_k.k_part, z);
        assert!(only_k.n_part.norm() == 0.0);
        let only_n = split_lie_algebra(&y, s).unwrap();
        assert!(only_n.k_part.norm() == 0.0);
        let mixed = &z + &y;
        let parts = split_lie_algebra(&mixed, s).unwrap();
        assert!((&parts.k_part + &parts.n_part - &mixed).norm() < 1e-15);
        assert!((parts.k_part.adjoint() * &parts.n_part).trace().norm() < 1e-12);
        assert!(algebra_residual(&parts.k_part, s).unwrap() < 1e-12);
        assert!(algebra_residual(&parts.n_part, s).unwrap() < 1e-12);
        let not_algebra = ComplexMatrix::identity(3, 3);
        assert!(matches!(
            split_lie_algebra(&not_algebra, s),
            Err(Error::NotInAlgebra(_))
        ));
    }

    #[test]
    fn polar_of_compact_and_boost() {
        let d = DMatrix::from_diagonal(&DVector::from_vec(vec![
            c(0.0, 1.0),
            c(-1.0, 0.0).scale(1.0),
        ]));
        let a = UpqElement::new(d.clone(), sig(1, 1)).unwrap();
        let pol = polar_upq(&a).unwrap();
        assert!((pol.u.mat() - &d).norm() < 1e-12);
        assert!(pol.y.norm() < 1e-12);

        let r = 0.7;
        let pol = polar_upq(&hyperbolic_boost(r)).unwrap();
        assert!((pol.u.mat() - ComplexMatrix::identity(2, 2)).norm() < 1e-10);
        let expect =
            DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(r, 0.0), c(r, 0.0), c(0.0, 0.0)]);
        assert!((&pol.y - expect).norm() < 1e-10);
    }

    #[test]
    fn polar_recovers_construction() {
        let s = sig(2, 1);
        let mut r = rng(17);
        for _ in 0..5 {
            let (z, y0) = random_algebra_pair(&mut r, s);
            let u0 = matfun::expm(&z).unwrap();
            let a = UpqElement::new(&u0 * matfun::expm(&y0).unwrap(), s).unwrap();
            let pol = polar_upq(&a).unwrap();
            assert!((pol.u.mat() - &u0).norm() < 1e-7);
            assert!((&pol.y - &y0).norm() < 1e-7);
            assert!(diag_block_norm(&pol.y, s) < 1e-8);
        }
    }

    #[test]
    fn block_inverse_matches_direct_solve() {
        let id = UpqElement::new(ComplexMatrix::identity(3, 3), sig(2, 1)).unwrap();
        assert!(
            (block_inverse(&id).unwrap() - ComplexMatrix::identity(3, 3).scale(0.5)).norm() < 1e-15
        );
        for a in [
            hyperbolic_boost(1.3),
            random_upq(sig(2, 1), 3),
            random_upq(sig(2, 2), 4),
        ] {
            let n = a.sig().n();
            let direct = (a.mat().adjoint() * a.mat() + ComplexMatrix::identity(n, n))
                .try_inverse()
                .unwrap();
            assert!((block_inverse(&a).unwrap() - direct).norm() < 1e-10);
        }
    }

    #[test]
    fn closed_form_exponential() {
        let s = sig(1, 1);
        assert!(
            (exp_n_closed_form(&ComplexMatrix::zeros(2, 2), s).unwrap()
                - ComplexMatrix::identity(2, 2))
            .norm()
                < 1e-15
        );
        let r = 1.1;
        let y = DMatrix::from_row_slice(2, 2, &[c(0.0, 0.0), c(r, 0.0), c(r, 0.0), c(0.0, 0.0)]);
        let e = exp_n_closed_form(&y, s).unwrap();
        assert!((&e - hyperbolic_boost(r).mat()).norm() < 1e-12);
        assert!((&e - matfun::expm(&y).unwrap()).norm() < 1e-9);
        for s in [sig(2, 1), sig(1, 3), sig(2, 2)] {
            let (_, y) = random_algebra_pair(&mut rng(8), s);
            let e = exp_n_closed_form(&y, s).unwrap();
            assert!((&e - matfun::expm(&y).unwrap()).norm() < 1e-9);
            assert!(is_upq(&e, s, 1e-9).unwrap().member);
        }
        let bad = ComplexMatrix::identity(2, 2);
        assert!(matches!(
            exp_n_closed_form(&bad, s),
            Err(Error::NotNPart(_))
        ));
    }

    #[test]
    fn distance_examples() {
        let id = UpqElement::new(ComplexMatrix::identity(2, 2), sig(1, 1)).unwrap();
        assert!(dist_sq_upq(&id).unwrap().abs() < 1e-15);
        for r in [0.1, 1.0, 3.0] {
            assert_abs_diff_eq!(
                dist_sq_upq(&hyperbolic_boost(r)).unwrap(),
                2.0 * r * r,
                epsilon = 1e-9
            );
        }
        let s = sig(2, 1);
        let (z, y0) = random_algebra_pair(&mut rng(33), s);
        let a = UpqElement::new(matfun::expm(&z).unwrap() * matfun::expm(&y0).unwrap(), s).unwrap();
        assert!((dist_sq_upq(&a).unwrap() - y0.norm_squared()).abs() < 1e-7);
    }

    #[test]
    fn surjectivity_round_trip() {
        let id = UpqElement::new(ComplexMatrix::identity(2, 2), sig(1, 1)).unwrap();
        let rep = exp_surjectivity_roundtrip(&id).unwrap();
        assert!(rep.z.norm() < 1e-12 && rep.y.norm() < 1e-12);

        let rep = exp_surjectivity_roundtrip(&hyperbolic_boost(0.4)).unwrap();
        assert!(rep.z.norm() < 1e-9);
        assert!(rep.reconstruction_residual < 1e-9);

        for seed in 0..5 {
            let a = random_upq(sig(1, 1), seed);
            let rep = exp_surjectivity_roundtrip(&a).unwrap();
            assert!(rep.passed(1e-7), "{rep:?}");
        }

        let minus = UpqElement::new(
            DMatrix::from_diagonal(&DVector::from_vec(vec![c(-1.0, 0.0), c(1.0, 0.0)])),
            sig(1, 1),
        )
        .unwrap();
        assert!(matches!(
            exp_surjectivity_roundtrip(&minus),
            Err(Error::PhaseBoundary(_))
        ));
    }

    #[test]
    fn random_elements_are_deterministic_members() {
        for s in [sig(1, 1), sig(2, 1), sig(2, 2)] {
            let a = random_upq(s, 12);
            assert_eq!(a, random_upq(s, 12));
            assert!(is_upq(a.mat(), s, 1e-9).unwrap().residual < 1e-9);
        }
        let a = random_upq(sig(1, 1), 5);
        let (al, be, ga, de) = a.blocks();
        let (al, be, ga, de) = (al[(0, 0)], be[(0, 0)], ga[(0, 0)], de[(0, 0)]);
        assert!((al.norm_sqr() - ga.norm_sqr() - 1.0).abs() < 1e-9);
        assert!((de.norm_sqr() - be.norm_sqr() - 1.0).abs() < 1e-9);
    }
}
