use alloc::boxed::Box;

use super::{conjugate_prox_unchecked, soft_threshold, ProxOracle, ProxStructure};
use crate::error::{Error, Result};
use crate::linalg::DenseVector;

/// `h ≡ 0`: identity prox, `h* = ι_{0}`.
#[derive(Debug, Clone)]
pub struct ZeroProx {
    dim: usize,
}

impl ZeroProx {
    pub fn new(dim: usize) -> Self {
        ZeroProx { dim }
    }
}

impl ProxOracle for ZeroProx {
    fn dim(&self) -> usize {
        self.dim
    }
    fn prox_into(&self, t: &[f64], _sigma: f64, out: &mut [f64]) {
        out.copy_from_slice(t);
    }
    fn value(&self, _u: &[f64]) -> Option<f64> {
        Some(0.0)
    }
    fn structure(&self) -> ProxStructure {
        ProxStructure::Zero
    }
}

/// `h = ι_{0}`: prox maps to the origin, `h* ≡ 0`. With this `h` the
/// infimal convolution `h □ l` collapses to `l`.
#[derive(Debug, Clone)]
pub struct IndicatorZero {
    dim: usize,
}

impl IndicatorZero {
    pub fn new(dim: usize) -> Self {
        IndicatorZero { dim }
    }
}

impl ProxOracle for IndicatorZero {
    fn dim(&self) -> usize {
        self.dim
    }
    fn prox_into(&self, _t: &[f64], _sigma: f64, out: &mut [f64]) {
        out.iter_mut().for_each(|v| *v = 0.0);
    }
    fn value(&self, u: &[f64]) -> Option<f64> {
        Some(if u.iter().all(|v| *v == 0.0) { 0.0 } else { f64::INFINITY })
    }
    fn structure(&self) -> ProxStructure {
        ProxStructure::IndicatorOfZero
    }
}

/// `μ‖u‖₁`
#[derive(Debug, Clone)]
pub struct L1Norm {
    dim: usize,
    weight: f64,
}

impl L1Norm {
    pub fn new(dim: usize, weight: f64) -> Self {
        L1Norm { dim, weight }
    }

    pub fn weight(&self) -> f64 {
        self.weight
    }
}

impl ProxOracle for L1Norm {
    fn dim(&self) -> usize {
        self.dim
    }
    fn prox_into(&self, t: &[f64], sigma: f64, out: &mut [f64]) {
        let k = sigma * self.weight;
        for (o, v) in out.iter_mut().zip(t) {
            *o = soft_threshold(*v, k);
        }
    }
    fn value(&self, u: &[f64]) -> Option<f64> {
        Some(self.weight * u.iter().map(|v| v.abs()).sum::<f64>())
    }
}

/// Indicator of `[lo, hi]` componentwise.
#[derive(Debug, Clone)]
pub struct BoxIndicator {
    lo: DenseVector,
    hi: DenseVector,
}

impl BoxIndicator {
    pub fn new(lo: DenseVector, hi: DenseVector) -> Result<Self> {
        if lo.len() != hi.len() {
            return Err(Error::DimensionMismatch {
                op: "box",
                expected: lo.len(),
                found: hi.len(),
            });
        }
        if let Some((l, _)) = lo.iter().zip(hi.iter()).find(|(l, h)| !(l <= h)) {
            return Err(Error::InvalidParameter { name: "lo", value: *l });
        }
        Ok(BoxIndicator { lo, hi })
    }

    /// `[−r, r]ⁿ`, the conjugate domain of `r‖·‖₁`.
    pub fn symmetric(dim: usize, radius: f64) -> Result<Self> {
        Self::new(DenseVector::filled(dim, -radius), DenseVector::filled(dim, radius))
    }
}

impl ProxOracle for BoxIndicator {
    fn dim(&self) -> usize {
        self.lo.len()
    }
    fn prox_into(&self, t: &[f64], _sigma: f64, out: &mut [f64]) {
        for (i, o) in out.iter_mut().enumerate() {
            *o = t[i].max(self.lo[i]).min(self.hi[i]);
        }
    }
    fn value(&self, u: &[f64]) -> Option<f64> {
        let inside = u.iter().enumerate().all(|(i, v)| self.lo[i] <= *v && *v <= self.hi[i]);
        Some(if inside { 0.0 } else { f64::INFINITY })
    }
}

/// `(c/2)‖u‖²`; its conjugate `‖s‖²/(2c)` has a `1/c`-strongly monotone
/// gradient.
#[derive(Debug, Clone)]
pub struct SquaredNorm {
    dim: usize,
    scale: f64,
}

impl SquaredNorm {
    pub fn new(dim: usize, scale: f64) -> Result<Self> {
        if !(scale > 0.0) || !scale.is_finite() {
            return Err(Error::InvalidParameter {
                name: "scale",
                value: scale,
            });
        }
        Ok(SquaredNorm { dim, scale })
    }
}

impl ProxOracle for SquaredNorm {
    fn dim(&self) -> usize {
        self.dim
    }
    fn prox_into(&self, t: &[f64], sigma: f64, out: &mut [f64]) {
        let f = 1.0 / (1.0 + sigma * self.scale);
        for (o, v) in out.iter_mut().zip(t) {
            *o = f * v;
        }
    }
    fn conjugate_strong_monotonicity(&self) -> f64 {
        1.0 / self.scale
    }
    fn value(&self, u: &[f64]) -> Option<f64> {
        Some(0.5 * self.scale * u.iter().map(|v| v * v).sum::<f64>())
    }
}

/// `g*` for a wrapped `g`, through the Moreau identity.
pub struct Conjugate<P> {
    inner: P,
}

impl<P: ProxOracle> Conjugate<P> {
    pub fn new(inner: P) -> Self {
        Conjugate { inner }
    }

    pub fn inner(&self) -> &P {
        &self.inner
    }
}

impl<P: ProxOracle> ProxOracle for Conjugate<P> {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn prox_into(&self, t: &[f64], sigma: f64, out: &mut [f64]) {
        out.copy_from_slice(&conjugate_prox_unchecked(&self.inner, t, sigma));
    }
    fn structure(&self) -> ProxStructure {
        match self.inner.structure() {
            ProxStructure::Zero => ProxStructure::IndicatorOfZero,
            ProxStructure::IndicatorOfZero => ProxStructure::Zero,
            ProxStructure::General => ProxStructure::General,
        }
    }
}

type ProxFn = Box<dyn Fn(&[f64], f64, &mut [f64]) + Send + Sync>;

/// User-supplied proximal map.
pub struct CustomProx {
    dim: usize,
    prox: ProxFn,
    conjugate_strong_monotonicity: f64,
}

impl CustomProx {
    pub fn new(dim: usize, prox: impl Fn(&[f64], f64, &mut [f64]) + Send + Sync + 'static) -> Self {
        CustomProx {
            dim,
            prox: Box::new(prox),
            conjugate_strong_monotonicity: 0.0,
        }
    }

    pub fn with_conjugate_strong_monotonicity(mut self, tau: f64) -> Self {
        self.conjugate_strong_monotonicity = tau;
        self
    }
}

impl ProxOracle for CustomProx {
    fn dim(&self) -> usize {
        self.dim
    }
    fn prox_into(&self, t: &[f64], sigma: f64, out: &mut [f64]) {
        (self.prox)(t, sigma, out)
    }
    fn conjugate_strong_monotonicity(&self) -> f64 {
        self.conjugate_strong_monotonicity
    }
}
