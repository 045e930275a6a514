use crate::error::{Error, Result};
use crate::linalg::{self, DenseMatrix, DenseVector};
use crate::rng;

/// Bounded linear map `A: X → S`, stored densely.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearOperator {
    matrix: DenseMatrix,
}

impl LinearOperator {
    pub fn new(matrix: DenseMatrix) -> Self {
        LinearOperator { matrix }
    }

    pub fn identity(n: usize) -> Self {
        Self::new(DenseMatrix::identity(n))
    }

    pub fn domain_dim(&self) -> usize {
        self.matrix.cols()
    }

    pub fn codomain_dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.matrix
    }

    pub fn forward(&self, x: &[f64]) -> Result<DenseVector> {
        if x.len() != self.domain_dim() {
            return Err(Error::DimensionMismatch {
                op: "forward",
                expected: self.domain_dim(),
                found: x.len(),
            });
        }
        Ok(self.matrix.matvec(x))
    }

    pub fn adjoint(&self, s: &[f64]) -> Result<DenseVector> {
        if s.len() != self.codomain_dim() {
            return Err(Error::DimensionMismatch {
                op: "adjoint",
                expected: self.codomain_dim(),
                found: s.len(),
            });
        }
        Ok(self.matrix.matvec_t(s))
    }

    /// `A P⁻¹ Aᵀ` for a given `P⁻¹`, symmetrized.
    pub fn gram(&self, p_inv: &DenseMatrix) -> Result<DenseMatrix> {
        let a = &self.matrix;
        Ok(a.matmul(p_inv)?.matmul(&a.transpose())?.symmetrized())
    }

    /// Worst `|⟨Ax,s⟩ − ⟨x,Aᵀs⟩| / (‖x‖‖s‖‖A‖_F)` over uniform probes on `[−1, 1]`.
    pub fn adjoint_defect(&self, probes: usize, seed: u64) -> f64 {
        let mut g = rng::seeded(seed);
        let scale = self.matrix.frobenius_norm();
        let mut worst = 0.0f64;
        for _ in 0..probes {
            let x: DenseVector = (0..self.domain_dim()).map(|_| rng::uniform(&mut g, -1.0, 1.0)).collect();
            let s: DenseVector = (0..self.codomain_dim()).map(|_| rng::uniform(&mut g, -1.0, 1.0)).collect();
            let lhs = linalg::dot(&self.matrix.matvec(&x), &s);
            let rhs = linalg::dot(&x, &self.matrix.matvec_t(&s));
            let denom = linalg::norm(&x) * linalg::norm(&s) * scale;
            if denom > 0.0 {
                worst = worst.max((lhs - rhs).abs() / denom);
            }
        }
        worst
    }
}

impl From<DenseMatrix> for LinearOperator {
    fn from(m: DenseMatrix) -> Self {
        Self::new(m)
    }
}
