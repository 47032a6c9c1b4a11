//! Seeded random matrices: Gaussian ensembles, Haar orthogonal/unitary
//! matrices and SPD test data.

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::matrix::{ComplexMatrix, RealMatrix};

pub type SeededRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SeededRng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn gaussian<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> RealMatrix {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

pub fn complex_gaussian<R: Rng>(rng: &mut R, rows: usize, cols: usize) -> ComplexMatrix {
    DMatrix::from_fn(rows, cols, |_, _| {
        Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    })
}

/// Haar-distributed element of O(n): QR of a Gaussian matrix with the
/// diagonal of R forced positive.
pub fn haar_orthogonal<R: Rng>(rng: &mut R, n: usize) -> RealMatrix {
    let qr = gaussian(rng, n, n).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Haar element of SO(n).
pub fn haar_special_orthogonal<R: Rng>(rng: &mut R, n: usize) -> RealMatrix {
    let mut q = haar_orthogonal(rng, n);
    if q.determinant() < 0.0 {
        q.column_mut(0).neg_mut();
    }
    q
}

/// Haar-distributed element of U(n).
pub fn haar_unitary<R: Rng>(rng: &mut R, n: usize) -> ComplexMatrix {
    let qr = complex_gaussian(rng, n, n).qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..n {
        let d = r[(j, j)];
        let norm = d.norm();
        if norm > 0.0 {
            let phase = d / norm;
            for i in 0..n {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}

/// Random symmetric positive definite matrix with spectrum in `[lo, hi]`.
pub fn random_spd<R: Rng>(rng: &mut R, n: usize, lo: f64, hi: f64) -> RealMatrix {
    let q = haar_orthogonal(rng, n);
    let d = DMatrix::from_diagonal(&nalgebra::DVector::from_fn(n, |_, _| {
        rng.random_range(lo..hi)
    }));
    let s = &q * d * q.transpose();
    (&s + s.transpose()) * 0.5
}

pub fn random_symmetric<R: Rng>(rng: &mut R, n: usize) -> RealMatrix {
    let g = gaussian(rng, n, n);
    (&g + g.transpose()) * 0.5
}
