//! Dense matrix carriers and their JSON form.
//!
//! Matrices are plain `nalgebra` dynamic matrices. On disk they use the
//! row-major layout `{"rows":r,"cols":c,"real":[...],"imag":[...]}` where
//! `imag` is omitted for real matrices.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type RealMatrix = DMatrix<f64>;
pub type ComplexMatrix = DMatrix<Complex64>;

/// Serialized matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixJson {
    pub rows: usize,
    pub cols: usize,
    pub real: Vec<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub imag: Option<Vec<f64>>,
}

impl MatrixJson {
    fn check(&self) -> Result<()> {
        if self.rows == 0 || self.cols == 0 {
            return Err(Error::InvalidArgument(
                "matrix must have positive dimensions".into(),
            ));
        }
        let len = self.rows * self.cols;
        if self.real.len() != len {
            return Err(Error::DimensionMismatch {
                expected: len,
                got: self.real.len(),
            });
        }
        if let Some(im) = &self.imag {
            if im.len() != len {
                return Err(Error::DimensionMismatch {
                    expected: len,
                    got: im.len(),
                });
            }
        }
        let finite = self
            .real
            .iter()
            .chain(self.imag.iter().flatten())
            .all(|x| x.is_finite());
        if !finite {
            return Err(Error::InvalidArgument(
                "matrix entries must be finite".into(),
            ));
        }
        Ok(())
    }

    pub fn from_real(m: &RealMatrix) -> Self {
        let real = (0..m.nrows())
            .flat_map(|i| (0..m.ncols()).map(move |j| m[(i, j)]))
            .collect();
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            real,
            imag: None,
        }
    }

    pub fn from_complex(m: &ComplexMatrix) -> Self {
        let mut real = Vec::with_capacity(m.len());
        let mut imag = Vec::with_capacity(m.len());
        for i in 0..m.nrows() {
            for j in 0..m.ncols() {
                real.push(m[(i, j)].re);
                imag.push(m[(i, j)].im);
            }
        }
        Self {
            rows: m.nrows(),
            cols: m.ncols(),
            real,
            imag: Some(imag),
        }
    }

    /// Real matrix; rejects inputs carrying a nonzero imaginary part.
    pub fn to_real(&self) -> Result<RealMatrix> {
        self.check()?;
        if let Some(im) = &self.imag {
            if im.iter().any(|x| *x != 0.0) {
                return Err(Error::InvalidArgument("expected a real matrix".into()));
            }
        }
        Ok(DMatrix::from_row_slice(self.rows, self.cols, &self.real))
    }

    pub fn to_complex(&self) -> Result<ComplexMatrix> {
        self.check()?;
        let zeros;
        let im = match &self.imag {
            Some(im) => im.as_slice(),
            None => {
                zeros = vec![0.0; self.real.len()];
                zeros.as_slice()
            }
        };
        Ok(DMatrix::from_fn(self.rows, self.cols, |i, j| {
            let k = i * self.cols + j;
            Complex64::new(self.real[k], im[k])
        }))
    }
}

pub fn to_complex(m: &RealMatrix) -> ComplexMatrix {
    m.map(|x| Complex64::new(x, 0.0))
}

/// Frobenius inner product `tr(aᵀ b)` of real matrices.
pub fn frob_inner(a: &RealMatrix, b: &RealMatrix) -> f64 {
    a.component_mul(b).sum()
}

/// Block-diagonal `a ⊕ b`.
pub fn direct_sum<T: nalgebra::ComplexField>(a: &DMatrix<T>, b: &DMatrix<T>) -> DMatrix<T> {
    let (p, q) = (a.nrows(), b.nrows());
    let mut out = DMatrix::zeros(p + q, a.ncols() + b.ncols());
    out.view_mut((0, 0), (p, a.ncols())).copy_from(a);
    out.view_mut((p, a.ncols()), (q, b.ncols())).copy_from(b);
    out
}
