use alloc::vec::Vec;

use super::{Cholesky, DenseMatrix};
use crate::error::{Error, Result};

/// Relative threshold (against `λ_max`) below which an eigenvalue counts as zero.
pub const DEFAULT_RANK_TOL: f64 = 1e-10;

const MAX_SWEEPS: usize = 100;

/// Ascending spectrum of a symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralSummary {
    pub eigenvalues: Vec<f64>,
    /// Smallest eigenvalue above `rank_tol · λ_max`, if any.
    pub min_nonzero: Option<f64>,
}

impl SpectralSummary {
    fn from_ascending(eigenvalues: Vec<f64>, rank_tol: f64) -> Self {
        let top = eigenvalues.last().copied().unwrap_or(0.0);
        let min_nonzero = if top > 0.0 {
            eigenvalues.iter().copied().find(|&v| v > rank_tol * top)
        } else {
            None
        };
        SpectralSummary { eigenvalues, min_nonzero }
    }

    pub fn min(&self) -> f64 {
        self.eigenvalues.first().copied().unwrap_or(0.0)
    }

    pub fn max(&self) -> f64 {
        self.eigenvalues.last().copied().unwrap_or(0.0)
    }
}

/// Eigenpairs, eigenvalues ascending, eigenvectors as matching columns.
#[derive(Debug, Clone)]
pub struct SymmetricEigen {
    pub values: Vec<f64>,
    pub vectors: DenseMatrix,
}

impl SymmetricEigen {
    /// `V diag(g(λ)) Vᵀ`
    pub fn map_spectrum(&self, g: impl Fn(f64) -> f64) -> DenseMatrix {
        let n = self.values.len();
        let mut out = DenseMatrix::zeros(n, n);
        for (k, &lam) in self.values.iter().enumerate() {
            let w = g(lam);
            if w == 0.0 {
                continue;
            }
            for i in 0..n {
                let vik = w * self.vectors[(i, k)];
                for j in 0..n {
                    out[(i, j)] += vik * self.vectors[(j, k)];
                }
            }
        }
        out.symmetrized()
    }

    pub fn summary(&self) -> SpectralSummary {
        SpectralSummary::from_ascending(self.values.clone(), DEFAULT_RANK_TOL)
    }
}

/// Cyclic Jacobi rotations until the off-diagonal mass is at rounding level.
pub fn sym_eigen(s: &DenseMatrix) -> Result<SymmetricEigen> {
    s.check_symmetric()?;
    let n = s.rows();
    let mut a = s.symmetrized();
    let mut v = DenseMatrix::identity(n);
    let scale = a.frobenius_norm();

    for _ in 0..MAX_SWEEPS {
        let mut off = 0.0;
        for i in 0..n {
            for j in 0..n {
                if i != j {
                    off += a[(i, j)] * a[(i, j)];
                }
            }
        }
        if off == 0.0 || super::sqrt(off) <= 1e-15 * scale {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = a[(p, q)];
                if apq == 0.0 {
                    continue;
                }
                let tau = (a[(q, q)] - a[(p, p)]) / (2.0 * apq);
                let t = if tau >= 0.0 {
                    1.0 / (tau + super::sqrt(1.0 + tau * tau))
                } else {
                    -1.0 / (-tau + super::sqrt(1.0 + tau * tau))
                };
                let c = 1.0 / super::sqrt(1.0 + t * t);
                let sn = t * c;
                for k in 0..n {
                    let akp = a[(k, p)];
                    let akq = a[(k, q)];
                    a[(k, p)] = c * akp - sn * akq;
                    a[(k, q)] = sn * akp + c * akq;
                }
                for k in 0..n {
                    let apk = a[(p, k)];
                    let aqk = a[(q, k)];
                    a[(p, k)] = c * apk - sn * aqk;
                    a[(q, k)] = sn * apk + c * aqk;
                }
                a[(p, q)] = 0.0;
                a[(q, p)] = 0.0;
                for k in 0..n {
                    let vkp = v[(k, p)];
                    let vkq = v[(k, q)];
                    v[(k, p)] = c * vkp - sn * vkq;
                    v[(k, q)] = sn * vkp + c * vkq;
                }
            }
        }
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].total_cmp(&a[(j, j)]));
    let values = order.iter().map(|&i| a[(i, i)]).collect();
    let mut vectors = DenseMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        for i in 0..n {
            vectors[(i, dst)] = v[(i, src)];
        }
    }
    Ok(SymmetricEigen { values, vectors })
}

pub fn sym_eigs(s: &DenseMatrix) -> Result<SpectralSummary> {
    sym_eigen(s).map(|e| e.summary())
}

/// Smallest eigenvalue of a PSD matrix exceeding `rank_tol · λ_max`.
pub fn min_nonzero_eig(s: &DenseMatrix, rank_tol: f64) -> Result<f64> {
    if !(rank_tol > 0.0) {
        return Err(Error::InvalidParameter {
            name: "rank_tol",
            value: rank_tol,
        });
    }
    let e = sym_eigen(s)?;
    SpectralSummary::from_ascending(e.values, rank_tol)
        .min_nonzero
        .ok_or(Error::NoNonzeroEigenvalue)
}

/// Largest `μ` with `num·v = μ·den·v`, i.e. `λ_max(L⁻¹ num L⁻ᵀ)` for `den = LLᵀ`.
/// Clamped at zero since `num` is PSD.
pub fn gen_eig_max(num: &DenseMatrix, den: &DenseMatrix) -> Result<f64> {
    if num.rows() != den.rows() || num.cols() != den.cols() {
        return Err(Error::DimensionMismatch {
            op: "gen_eig_max",
            expected: den.rows(),
            found: num.rows(),
        });
    }
    num.check_symmetric()?;
    let ch = Cholesky::new(den)?;
    let reduced = ch.congruence(num);
    Ok(sym_eigs(&reduced)?.max().max(0.0))
}

/// Symmetric square root of a PSD matrix (negative rounding noise clipped).
pub fn psd_sqrt(s: &DenseMatrix) -> Result<DenseMatrix> {
    Ok(sym_eigen(s)?.map_spectrum(|l| super::sqrt(l.max(0.0))))
}

/// Moore-Penrose inverse of a PSD matrix with a relative rank cut.
pub fn psd_pseudo_inverse(s: &DenseMatrix, rank_tol: f64) -> Result<DenseMatrix> {
    let e = sym_eigen(s)?;
    let top = e.values.last().copied().unwrap_or(0.0);
    Ok(e.map_spectrum(|l| if top > 0.0 && l > rank_tol * top { 1.0 / l } else { 0.0 }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sym_eigs_examples() {
        let d = DenseMatrix::from_rows(&[&[2.0, 0.0], &[0.0, 3.0]]);
        assert_eq!(sym_eigs(&d).unwrap().eigenvalues, [2.0, 3.0]);
        assert_eq!(sym_eigs(&DenseMatrix::identity(3)).unwrap().eigenvalues, [1.0, 1.0, 1.0]);
        // λ² − 1 = 0
        let swap = DenseMatrix::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let ev = sym_eigs(&swap).unwrap().eigenvalues;
        assert!((ev[0] + 1.0).abs() < 1e-15 && (ev[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sym_eigs_rejects_bad_shapes() {
        assert!(matches!(sym_eigs(&DenseMatrix::zeros(2, 3)), Err(Error::NotSquare { .. })));
        let asym = DenseMatrix::from_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        assert!(matches!(sym_eigs(&asym), Err(Error::NotSymmetric { .. })));
    }

    #[test]
    fn reconstruction() {
        let s = DenseMatrix::from_rows(&[
            &[4.0, 1.0, -2.0, 0.5],
            &[1.0, 2.0, 0.0, 1.0],
            &[-2.0, 0.0, 3.0, -1.0],
            &[0.5, 1.0, -1.0, 1.0],
        ]);
        let e = sym_eigen(&s).unwrap();
        let back = e.map_spectrum(|l| l);
        assert!(back.sub(&s).unwrap().frobenius_norm() <= 1e-10 * s.frobenius_norm().max(1.0));
        assert!(e.values.windows(2).all(|w| w[0] <= w[1]));
    }

    #[test]
    fn min_nonzero_examples() {
        let lap = DenseMatrix::from_rows(&[&[1.0, -1.0], &[-1.0, 1.0]]);
        assert!((min_nonzero_eig(&lap, DEFAULT_RANK_TOL).unwrap() - 2.0).abs() < 1e-14);
        assert_eq!(min_nonzero_eig(&DenseMatrix::identity(2), DEFAULT_RANK_TOL).unwrap(), 1.0);
        assert_eq!(
            min_nonzero_eig(&DenseMatrix::zeros(2, 2), DEFAULT_RANK_TOL),
            Err(Error::NoNonzeroEigenvalue)
        );
        assert!(min_nonzero_eig(&lap, 0.0).is_err());
    }

    #[test]
    fn gen_eig_examples() {
        let id = DenseMatrix::identity(2);
        assert!((gen_eig_max(&id, &id).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(gen_eig_max(&DenseMatrix::zeros(2, 2), &id).unwrap(), 0.0);
        let num = DenseMatrix::from_rows(&[&[2.0, 0.0], &[0.0, 0.0]]);
        let den = DenseMatrix::from_rows(&[&[1.0, 0.0], &[0.0, 4.0]]);
        assert!((gen_eig_max(&num, &den).unwrap() - 2.0).abs() < 1e-15);
        let singular = DenseMatrix::from_rows(&[&[1.0, 0.0], &[0.0, 0.0]]);
        assert!(matches!(
            gen_eig_max(&id, &singular),
            Err(Error::NotPositiveDefinite { pivot: 1 })
        ));
    }

    #[test]
    fn sqrt_and_pinv() {
        let lap = DenseMatrix::from_rows(&[&[1.0, -1.0], &[-1.0, 1.0]]);
        let r = psd_sqrt(&lap).unwrap();
        assert!(r.matmul(&r).unwrap().sub(&lap).unwrap().max_abs() < 1e-14);
        let p = psd_pseudo_inverse(&lap, DEFAULT_RANK_TOL).unwrap();
        // L⁺ = L / 4 for this Laplacian
        assert!(p.sub(&lap.scaled(0.25)).unwrap().max_abs() < 1e-14);
    }
}
