//! Dense linear algebra at desk scale: row-major storage, a cyclic Jacobi
//! eigensolver for symmetric matrices, Cholesky, and the weighted quantities
//! the certificate algebra is written in.

mod cholesky;
mod eigen;
mod matrix;
mod vector;

pub use cholesky::{cholesky, spd_inverse, Cholesky};
pub use eigen::{
    gen_eig_max, min_nonzero_eig, psd_pseudo_inverse, psd_sqrt, sym_eigen, sym_eigs,
    SpectralSummary, SymmetricEigen, DEFAULT_RANK_TOL,
};
pub use matrix::DenseMatrix;
pub use vector::DenseVector;

use crate::error::{Error, Result};

/// `vᵀ M v`. Negative values are legitimate for indefinite `M`.
pub fn weighted_norm_sq(v: &[f64], m: &DenseMatrix) -> Result<f64> {
    if m.rows() != v.len() || m.cols() != v.len() {
        return Err(Error::DimensionMismatch {
            op: "weighted_norm_sq",
            expected: m.rows(),
            found: v.len(),
        });
    }
    Ok(m.quadratic_form(v, v))
}

pub(crate) fn sqrt(x: f64) -> f64 {
    libm::sqrt(x)
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    debug_assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn norm(a: &[f64]) -> f64 {
    sqrt(dot(a, a))
}
