use alloc::boxed::Box;

use super::{SmoothOracle, SmoothStructure};
use crate::error::{Error, Result};
use crate::linalg::{sym_eigs, DenseMatrix, DenseVector};

/// `f ≡ 0`
#[derive(Debug, Clone)]
pub struct ZeroSmooth {
    dim: usize,
}

impl ZeroSmooth {
    pub fn new(dim: usize) -> Self {
        ZeroSmooth { dim }
    }
}

impl SmoothOracle for ZeroSmooth {
    fn dim(&self) -> usize {
        self.dim
    }
    fn gradient_into(&self, _x: &[f64], out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
    }
    fn lipschitz(&self) -> f64 {
        0.0
    }
    fn value(&self, _x: &[f64]) -> Option<f64> {
        Some(0.0)
    }
    fn structure(&self) -> SmoothStructure {
        SmoothStructure::Zero
    }
}

/// `f(x) = bᵀx`
#[derive(Debug, Clone)]
pub struct LinearSmooth {
    b: DenseVector,
}

impl LinearSmooth {
    pub fn new(b: DenseVector) -> Self {
        LinearSmooth { b }
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.b
    }
}

pub fn linear_oracle(b: DenseVector) -> LinearSmooth {
    LinearSmooth::new(b)
}

impl SmoothOracle for LinearSmooth {
    fn dim(&self) -> usize {
        self.b.len()
    }
    fn gradient_into(&self, _x: &[f64], out: &mut [f64]) {
        out.copy_from_slice(&self.b);
    }
    fn lipschitz(&self) -> f64 {
        0.0
    }
    fn value(&self, x: &[f64]) -> Option<f64> {
        Some(self.b.dot(x))
    }
    fn structure(&self) -> SmoothStructure {
        if self.b.iter().all(|v| *v == 0.0) {
            SmoothStructure::Zero
        } else {
            SmoothStructure::Linear
        }
    }
}

/// Least squares `½‖Kx − y‖²` with `L = λ_max(KᵀK)` and `τ = λ_min(KᵀK)`.
#[derive(Debug, Clone)]
pub struct Quadratic {
    k: DenseMatrix,
    y: DenseVector,
    lipschitz: f64,
    strong_convexity: f64,
}

impl Quadratic {
    pub fn new(k: DenseMatrix, y: DenseVector) -> Result<Self> {
        if k.rows() != y.len() {
            return Err(Error::DimensionMismatch {
                op: "quadratic_oracle",
                expected: k.rows(),
                found: y.len(),
            });
        }
        let gram = k.transpose().matmul(&k)?.symmetrized();
        let spec = sym_eigs(&gram)?;
        let lipschitz = spec.max().max(0.0);
        // λ_min of a Gram matrix is only meaningful above rounding noise
        let floor = 1e-12 * lipschitz;
        let strong_convexity = if spec.min() > floor { spec.min() } else { 0.0 };
        Ok(Quadratic {
            k,
            y,
            lipschitz,
            strong_convexity,
        })
    }

    pub fn operator(&self) -> &DenseMatrix {
        &self.k
    }

    pub fn target(&self) -> &[f64] {
        &self.y
    }
}

pub fn quadratic_oracle(k: DenseMatrix, y: DenseVector) -> Result<Quadratic> {
    Quadratic::new(k, y)
}

impl SmoothOracle for Quadratic {
    fn dim(&self) -> usize {
        self.k.cols()
    }
    fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        let r = self.k.matvec(x).sub(&self.y);
        out.copy_from_slice(&self.k.matvec_t(&r));
    }
    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }
    fn strong_convexity(&self) -> f64 {
        self.strong_convexity
    }
    fn value(&self, x: &[f64]) -> Option<f64> {
        let r = self.k.matvec(x).sub(&self.y);
        Some(0.5 * r.dot(&r))
    }
}

/// `(w/2)‖x − c‖²`, the per-node consensus loss and the `l* = (μ/2)‖s‖²`
/// smoothing used with infimal convolutions.
#[derive(Debug, Clone)]
pub struct ScaledDistance {
    weight: f64,
    center: DenseVector,
}

impl ScaledDistance {
    pub fn new(weight: f64, center: DenseVector) -> Result<Self> {
        if !(weight > 0.0) {
            return Err(Error::InvalidParameter {
                name: "weight",
                value: weight,
            });
        }
        Ok(ScaledDistance { weight, center })
    }

    /// `(w/2)‖x‖²` on `dim` coordinates.
    pub fn centered(weight: f64, dim: usize) -> Result<Self> {
        Self::new(weight, DenseVector::zeros(dim))
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }

    pub fn center(&self) -> &[f64] {
        &self.center
    }
}

impl SmoothOracle for ScaledDistance {
    fn dim(&self) -> usize {
        self.center.len()
    }
    fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        for ((o, xi), ci) in out.iter_mut().zip(x).zip(self.center.iter()) {
            *o = self.weight * (xi - ci);
        }
    }
    fn lipschitz(&self) -> f64 {
        self.weight
    }
    fn strong_convexity(&self) -> f64 {
        self.weight
    }
    fn value(&self, x: &[f64]) -> Option<f64> {
        let d = self.center.sub(x);
        Some(0.5 * self.weight * d.dot(&d))
    }
    fn structure(&self) -> SmoothStructure {
        if self.weight == 1.0 && self.center.iter().all(|v| *v == 0.0) {
            SmoothStructure::HalfSquaredNorm
        } else {
            SmoothStructure::General
        }
    }
}

type GradientFn = Box<dyn Fn(&[f64], &mut [f64]) + Send + Sync>;
type ValueFn = Box<dyn Fn(&[f64]) -> f64 + Send + Sync>;

/// User-supplied gradient map with declared constants.
pub struct CustomSmooth {
    dim: usize,
    gradient: GradientFn,
    value: Option<ValueFn>,
    lipschitz: f64,
    strong_convexity: f64,
}

impl CustomSmooth {
    pub fn new(
        dim: usize,
        lipschitz: f64,
        strong_convexity: f64,
        gradient: impl Fn(&[f64], &mut [f64]) + Send + Sync + 'static,
    ) -> Self {
        CustomSmooth {
            dim,
            gradient: Box::new(gradient),
            value: None,
            lipschitz,
            strong_convexity,
        }
    }

    pub fn with_value(mut self, value: impl Fn(&[f64]) -> f64 + Send + Sync + 'static) -> Self {
        self.value = Some(Box::new(value));
        self
    }
}

impl SmoothOracle for CustomSmooth {
    fn dim(&self) -> usize {
        self.dim
    }
    fn gradient_into(&self, x: &[f64], out: &mut [f64]) {
        (self.gradient)(x, out)
    }
    fn lipschitz(&self) -> f64 {
        self.lipschitz
    }
    fn strong_convexity(&self) -> f64 {
        self.strong_convexity
    }
    fn value(&self, x: &[f64]) -> Option<f64> {
        self.value.as_ref().map(|v| v(x))
    }
}
