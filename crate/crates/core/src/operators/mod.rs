//! Oracles for the three functions of `min f(x) + (h □ l)(Ax)`:
//! gradients of `f` and `l*`, the proximal map of `h`, and the bridge from
//! `prox_h` to the resolvent of `∂h*` via the Moreau identity.
//!
//! Constants are declared in the Euclidean metric. The solver converts them
//! into the `P`- and `M₁`-weighted constants its certificate needs, using
//! spectral bounds of those matrices.

mod linear;
mod prox;
mod smooth;
mod validate;

pub use linear::LinearOperator;
pub use prox::{BoxIndicator, Conjugate, CustomProx, IndicatorZero, L1Norm, SquaredNorm, ZeroProx};
pub use smooth::{linear_oracle, quadratic_oracle, CustomSmooth, LinearSmooth, Quadratic, ScaledDistance, ZeroSmooth};
pub use validate::{validate_prox, validate_smooth, validate_smooth_claims, AssumptionReport, InequalityCheck};

use crate::error::{Error, Result};
use crate::linalg::DenseVector;

/// Cocoercivity constant. `Infinite` is the exact limit for constant
/// gradients, where every `γ²/β`-type term vanishes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Beta {
    Finite(f64),
    Infinite,
}

impl Beta {
    /// `β = metric_min_eig / L`, with `L = 0` mapping to `Infinite`.
    pub fn from_lipschitz(lipschitz: f64, metric_min_eig: f64) -> Beta {
        if lipschitz == 0.0 {
            Beta::Infinite
        } else {
            Beta::Finite(metric_min_eig / lipschitz)
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Beta::Finite(b) => b,
            Beta::Infinite => f64::INFINITY,
        }
    }

    pub fn min(self, other: Beta) -> Beta {
        match (self, other) {
            (Beta::Infinite, b) | (b, Beta::Infinite) => b,
            (Beta::Finite(a), Beta::Finite(b)) => Beta::Finite(a.min(b)),
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Beta::Infinite)
    }

    /// `γ²/β`, exactly zero for `β = ∞`.
    pub fn gamma_sq_over_beta(self, gamma: f64) -> f64 {
        match self {
            Beta::Finite(b) => gamma * gamma / b,
            Beta::Infinite => 0.0,
        }
    }

    /// `γ/(2β)`, exactly zero for `β = ∞`.
    pub fn gamma_over_two_beta(self, gamma: f64) -> f64 {
        match self {
            Beta::Finite(b) => gamma / (2.0 * b),
            Beta::Infinite => 0.0,
        }
    }

    /// `γ < 2β`
    pub fn admits(self, gamma: f64) -> bool {
        match self {
            Beta::Finite(b) => gamma < 2.0 * b,
            Beta::Infinite => true,
        }
    }
}

/// Structural facts the solver can exploit (objective reporting, which
/// contraction rate applies).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SmoothStructure {
    Zero,
    Linear,
    /// `½‖v‖²`
    HalfSquaredNorm,
    General,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProxStructure {
    /// `h ≡ 0`, so `h* = ι_{0}`.
    Zero,
    /// `h = ι_{0}`, so `h* ≡ 0`.
    IndicatorOfZero,
    General,
}

/// Differentiable convex function with a cocoercive gradient.
pub trait SmoothOracle: Send + Sync {
    fn dim(&self) -> usize;

    fn gradient_into(&self, x: &[f64], out: &mut [f64]);

    fn gradient(&self, x: &[f64]) -> DenseVector {
        let mut g = DenseVector::zeros(self.dim());
        self.gradient_into(x, &mut g);
        g
    }

    /// Euclidean Lipschitz constant of the gradient. Zero means the gradient
    /// is constant.
    fn lipschitz(&self) -> f64;

    /// Euclidean strong convexity (strong monotonicity of the gradient).
    fn strong_convexity(&self) -> f64 {
        0.0
    }

    fn value(&self, _x: &[f64]) -> Option<f64> {
        None
    }

    fn structure(&self) -> SmoothStructure {
        SmoothStructure::General
    }

    /// Euclidean cocoercivity `1/L`.
    fn beta(&self) -> Beta {
        Beta::from_lipschitz(self.lipschitz(), 1.0)
    }
}

/// Proper closed convex function with a computable proximal map.
pub trait ProxOracle: Send + Sync {
    fn dim(&self) -> usize;

    /// `out = prox_{σh}(t)`; callers guarantee `σ > 0`.
    fn prox_into(&self, t: &[f64], sigma: f64, out: &mut [f64]);

    fn prox(&self, t: &[f64], sigma: f64) -> DenseVector {
        let mut u = DenseVector::zeros(self.dim());
        self.prox_into(t, sigma, &mut u);
        u
    }

    /// Euclidean strong monotonicity of `∂h*`.
    fn conjugate_strong_monotonicity(&self) -> f64 {
        0.0
    }

    /// `h(u)`, possibly `+∞` for indicators.
    fn value(&self, _u: &[f64]) -> Option<f64> {
        None
    }

    fn structure(&self) -> ProxStructure {
        ProxStructure::General
    }
}

fn check_sigma(sigma: f64) -> Result<()> {
    if sigma > 0.0 && sigma.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name: "sigma",
            value: sigma,
        })
    }
}

/// Componentwise soft threshold `sign(t)·max(|t| − σ, 0)`.
pub fn prox_l1(t: &[f64], sigma: f64) -> Result<DenseVector> {
    check_sigma(sigma)?;
    Ok(t.iter().map(|&v| soft_threshold(v, sigma)).collect())
}

pub(crate) fn soft_threshold(v: f64, k: f64) -> f64 {
    if v > k {
        v - k
    } else if v < -k {
        v + k
    } else {
        0.0
    }
}

/// `prox_{σh}(t)` with the stepsize checked.
pub fn prox_checked(h: &dyn ProxOracle, t: &[f64], sigma: f64) -> Result<DenseVector> {
    check_sigma(sigma)?;
    if t.len() != h.dim() {
        return Err(Error::DimensionMismatch {
            op: "prox",
            expected: h.dim(),
            found: t.len(),
        });
    }
    Ok(h.prox(t, sigma))
}

/// `prox_{σh*}(t) = t − σ·prox_{h/σ}(t/σ)`.
pub fn prox_conjugate(h: &dyn ProxOracle, t: &[f64], sigma: f64) -> Result<DenseVector> {
    check_sigma(sigma)?;
    if t.len() != h.dim() {
        return Err(Error::DimensionMismatch {
            op: "prox_conjugate",
            expected: h.dim(),
            found: t.len(),
        });
    }
    Ok(conjugate_prox_unchecked(h, t, sigma))
}

pub(crate) fn conjugate_prox_unchecked(h: &dyn ProxOracle, t: &[f64], sigma: f64) -> DenseVector {
    // exact in the two degenerate cases, where the identity would leave rounding residue
    match h.structure() {
        ProxStructure::Zero => return DenseVector::zeros(t.len()),
        ProxStructure::IndicatorOfZero => return DenseVector::from(t),
        ProxStructure::General => {}
    }
    let scaled: DenseVector = t.iter().map(|v| v / sigma).collect();
    let inner = h.prox(&scaled, 1.0 / sigma);
    t.iter().zip(inner.iter()).map(|(ti, pi)| ti - sigma * pi).collect()
}

/// Tests `q ∈ ∂h*(s)` through the equivalent `s ∈ ∂h(q)`, i.e.
/// `q = prox_h(q + s)`.
pub fn in_conjugate_subdifferential(h: &dyn ProxOracle, s: &[f64], q: &[f64], tol: f64) -> bool {
    let t: DenseVector = q.iter().zip(s).map(|(a, b)| a + b).collect();
    let p = h.prox(&t, 1.0);
    let scale = 1.0 + crate::linalg::norm(q) + crate::linalg::norm(s);
    p.iter().zip(q).all(|(a, b)| (a - b).abs() <= tol * scale)
}

#[cfg(test)]
mod tests {
    use super::*;

    // argmin_u |u| + (u − t)²/(2σ) on a fine grid
    fn grid_prox_abs(t: f64, sigma: f64) -> f64 {
        let mut best = (f64::INFINITY, 0.0);
        for i in 0..=200_000 {
            let u = -10.0 + 20.0 * i as f64 / 200_000.0;
            let obj = u.abs() + (u - t) * (u - t) / (2.0 * sigma);
            if obj < best.0 {
                best = (obj, u);
            }
        }
        best.1
    }

    #[test]
    fn prox_l1_examples() {
        assert_eq!(grid_prox_abs(3.0, 1.0), 2.0);
        assert_eq!(grid_prox_abs(-0.5, 1.0), 0.0);
        assert_eq!(&*prox_l1(&[3.0], 1.0).unwrap(), &[2.0]);
        assert_eq!(&*prox_l1(&[-0.5], 1.0).unwrap(), &[0.0]);
        assert_eq!(&*prox_l1(&[0.0], 5.0).unwrap(), &[0.0]);
        assert!(prox_l1(&[1.0], 0.0).is_err());
        assert!(prox_l1(&[1.0], -1.0).is_err());
    }

    #[test]
    fn prox_conjugate_examples() {
        let abs = L1Norm::new(1, 1.0);
        assert_eq!(&*prox_conjugate(&abs, &[3.0], 1.0).unwrap(), &[1.0]);
        assert_eq!(&*prox_conjugate(&abs, &[-0.25], 2.0).unwrap(), &[-0.25]);
        let ind = IndicatorZero::new(2);
        assert_eq!(&*prox_conjugate(&ind, &[1.5, -2.0], 0.7).unwrap(), &[1.5, -2.0]);
        let zero = ZeroProx::new(2);
        assert_eq!(&*prox_conjugate(&zero, &[1.5, -2.0], 0.7).unwrap(), &[0.0, 0.0]);
        assert!(prox_conjugate(&zero, &[1.0, 1.0], 0.0).is_err());
        assert!(prox_conjugate(&zero, &[1.0], 1.0).is_err());
    }

    #[test]
    fn beta_sentinel_limits() {
        let inf = Beta::Infinite;
        assert_eq!(inf.gamma_sq_over_beta(3.0), 0.0);
        assert_eq!(inf.gamma_over_two_beta(3.0), 0.0);
        assert!(inf.admits(1e300));
        assert_eq!(Beta::from_lipschitz(0.0, 2.0), Beta::Infinite);
        assert_eq!(Beta::from_lipschitz(4.0, 2.0), Beta::Finite(0.5));
        assert_eq!(inf.min(Beta::Finite(2.0)), Beta::Finite(2.0));
        assert!(!Beta::Finite(1.0).admits(2.0));
        assert!(Beta::Finite(1.0).admits(1.999));
    }

    #[test]
    fn conjugate_subdifferential_membership() {
        let abs = L1Norm::new(1, 1.0);
        // q = 2 > 0 ⇒ ∂|·|(2) = {1}
        assert!(in_conjugate_subdifferential(&abs, &[1.0], &[2.0], 1e-12));
        assert!(!in_conjugate_subdifferential(&abs, &[0.5], &[2.0], 1e-12));
        // q = 0 ⇒ ∂|·|(0) = [−1, 1]
        assert!(in_conjugate_subdifferential(&abs, &[0.3], &[0.0], 1e-12));
    }
}
