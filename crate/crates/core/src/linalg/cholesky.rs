use super::{DenseMatrix, DenseVector};
use crate::error::{Error, Result};

/// Lower-triangular factor `L` with `L Lᵀ = S`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: DenseMatrix,
}

pub fn cholesky(s: &DenseMatrix) -> Result<DenseMatrix> {
    Cholesky::new(s).map(Cholesky::into_factor)
}

/// Inverse of a symmetric positive definite matrix, symmetrized.
pub fn spd_inverse(s: &DenseMatrix) -> Result<DenseMatrix> {
    let ch = Cholesky::new(s)?;
    let n = s.rows();
    let mut inv = DenseMatrix::zeros(n, n);
    let mut e = DenseVector::zeros(n);
    for j in 0..n {
        e.iter_mut().for_each(|v| *v = 0.0);
        e[j] = 1.0;
        inv.set_column(j, &ch.solve(&e));
    }
    Ok(inv.symmetrized())
}

impl Cholesky {
    pub fn new(s: &DenseMatrix) -> Result<Self> {
        s.check_symmetric()?;
        let n = s.rows();
        let mut l = DenseMatrix::zeros(n, n);
        for j in 0..n {
            let mut d = s[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if !(d > 0.0) {
                return Err(Error::NotPositiveDefinite { pivot: j });
            }
            let djj = super::sqrt(d);
            l[(j, j)] = djj;
            for i in (j + 1)..n {
                let mut v = s[(i, j)];
                for k in 0..j {
                    v -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = v / djj;
            }
        }
        Ok(Cholesky { l })
    }

    pub fn factor(&self) -> &DenseMatrix {
        &self.l
    }

    pub fn into_factor(self) -> DenseMatrix {
        self.l
    }

    /// `L⁻¹ b`
    pub fn forward(&self, b: &[f64]) -> DenseVector {
        let n = self.l.rows();
        let mut y = DenseVector::from(b);
        for i in 0..n {
            let mut v = y[i];
            for k in 0..i {
                v -= self.l[(i, k)] * y[k];
            }
            y[i] = v / self.l[(i, i)];
        }
        y
    }

    /// `L⁻ᵀ b`
    pub fn backward(&self, b: &[f64]) -> DenseVector {
        let n = self.l.rows();
        let mut x = DenseVector::from(b);
        for i in (0..n).rev() {
            let mut v = x[i];
            for k in (i + 1)..n {
                v -= self.l[(k, i)] * x[k];
            }
            x[i] = v / self.l[(i, i)];
        }
        x
    }

    /// `S⁻¹ b`
    pub fn solve(&self, b: &[f64]) -> DenseVector {
        self.backward(&self.forward(b))
    }

    /// `L⁻¹ M L⁻ᵀ`, symmetrized.
    pub fn congruence(&self, m: &DenseMatrix) -> DenseMatrix {
        let n = self.l.rows();
        // columns of L⁻¹ M
        let mut half = DenseMatrix::zeros(n, n);
        for j in 0..n {
            half.set_column(j, &self.forward(&m.column(j)));
        }
        // (L⁻¹ (L⁻¹ M)ᵀ)ᵀ = L⁻¹ M L⁻ᵀ
        let ht = half.transpose();
        let mut out = DenseMatrix::zeros(n, n);
        for j in 0..n {
            out.set_column(j, &self.forward(&ht.column(j)));
        }
        out.transpose().symmetrized()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstruction_error(s: &DenseMatrix) -> f64 {
        let l = cholesky(s).unwrap();
        l.matmul(&l.transpose()).unwrap().sub(s).unwrap().frobenius_norm()
    }

    #[test]
    fn cholesky_examples() {
        assert_eq!(cholesky(&DenseMatrix::identity(3)).unwrap(), DenseMatrix::identity(3));
        let d = DenseMatrix::from_rows(&[&[4.0, 0.0], &[0.0, 9.0]]);
        assert_eq!(cholesky(&d).unwrap(), DenseMatrix::from_rows(&[&[2.0, 0.0], &[0.0, 3.0]]));
        let s = DenseMatrix::from_rows(&[&[2.0, 1.0], &[1.0, 2.0]]);
        assert!(reconstruction_error(&s) <= 1e-10 * s.frobenius_norm());
        let l = cholesky(&s).unwrap();
        assert_eq!(l[(0, 1)], 0.0);
    }

    #[test]
    fn indefinite_input_names_pivot() {
        let s = DenseMatrix::from_rows(&[&[1.0, 2.0], &[2.0, 1.0]]);
        assert_eq!(cholesky(&s), Err(Error::NotPositiveDefinite { pivot: 1 }));
        let z = DenseMatrix::from_rows(&[&[0.0, 0.0], &[0.0, 1.0]]);
        assert_eq!(cholesky(&z), Err(Error::NotPositiveDefinite { pivot: 0 }));
    }

    #[test]
    fn inverse_and_solve() {
        let s = DenseMatrix::from_rows(&[&[4.0, 1.0, 0.0], &[1.0, 3.0, 1.0], &[0.0, 1.0, 2.0]]);
        let inv = spd_inverse(&s).unwrap();
        let prod = s.matmul(&inv).unwrap();
        assert!(prod.sub(&DenseMatrix::identity(3)).unwrap().max_abs() < 1e-14);
        let ch = Cholesky::new(&s).unwrap();
        let x = ch.solve(&[1.0, 2.0, 3.0]);
        let back = s.matvec(&x);
        assert!((back[0] - 1.0).abs() + (back[1] - 2.0).abs() + (back[2] - 3.0).abs() < 1e-14);
    }
}
