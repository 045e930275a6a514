//! The generalized primal-dual iteration
//!
//! ```text
//! s⁺ = ((γ/λ)D + ∂h*)⁻¹( (1/γ)M s + A(x − γP⁻¹∇f(x)) − ∇l*(s) )
//! x⁺ = x − γP⁻¹∇f(x) − γP⁻¹Aᵀs⁺,      M = (γ²/λ)(D − λAP⁻¹Aᵀ)
//! ```
//!
//! for `min f(x) + (h □ l)(Ax)`, together with its parameter certificate
//! ([`certify`]), Lyapunov diagnostics and the linearized-ALM adapter.

mod alm;
mod cert;
mod iterate;

pub use alm::alm_step;
pub use cert::{certify, certify_from_gram, certify_with, select_theta, CertBundle, CertInputs, Feasibility};
pub use iterate::{FixedPoint, IterateState, PrimalDual, SolveOutcome, SolveStatus, TraceRecord};

use alloc::boxed::Box;

use crate::error::{Error, Result};
use crate::linalg::{spd_inverse, sym_eigs, Cholesky, DenseMatrix};
use crate::operators::{LinearOperator, ProxOracle, SmoothOracle};

/// `min f(x) + (h □ l)(Ax)` with metrics `P` (primal) and `D` (dual).
pub struct ProblemSpec {
    f: Box<dyn SmoothOracle>,
    h: Box<dyn ProxOracle>,
    lstar: Box<dyn SmoothOracle>,
    a: LinearOperator,
    p: DenseMatrix,
    p_inv: DenseMatrix,
    d: DenseMatrix,
    gram: DenseMatrix,
}

impl ProblemSpec {
    /// `P = D = I`.
    pub fn new(
        f: impl SmoothOracle + 'static,
        h: impl ProxOracle + 'static,
        lstar: impl SmoothOracle + 'static,
        a: LinearOperator,
    ) -> Result<Self> {
        Self::from_boxed(Box::new(f), Box::new(h), Box::new(lstar), a)
    }

    pub fn from_boxed(
        f: Box<dyn SmoothOracle>,
        h: Box<dyn ProxOracle>,
        lstar: Box<dyn SmoothOracle>,
        a: LinearOperator,
    ) -> Result<Self> {
        let check = |op, expected: usize, found: usize| {
            if expected == found {
                Ok(())
            } else {
                Err(Error::DimensionMismatch { op, expected, found })
            }
        };
        check("f", a.domain_dim(), f.dim())?;
        check("h", a.codomain_dim(), h.dim())?;
        check("lstar", a.codomain_dim(), lstar.dim())?;
        let n = a.domain_dim();
        let m = a.codomain_dim();
        let p = DenseMatrix::identity(n);
        let gram = a.gram(&p)?;
        Ok(ProblemSpec {
            f,
            h,
            lstar,
            p_inv: p.clone(),
            p,
            d: DenseMatrix::identity(m),
            gram,
            a,
        })
    }

    pub fn with_primal_metric(mut self, p: DenseMatrix) -> Result<Self> {
        if p.rows() != self.a.domain_dim() {
            return Err(Error::DimensionMismatch {
                op: "P",
                expected: self.a.domain_dim(),
                found: p.rows(),
            });
        }
        self.p_inv = spd_inverse(&p)?;
        self.gram = self.a.gram(&self.p_inv)?;
        self.p = p;
        Ok(self)
    }

    pub fn with_dual_metric(mut self, d: DenseMatrix) -> Result<Self> {
        if d.rows() != self.a.codomain_dim() {
            return Err(Error::DimensionMismatch {
                op: "D",
                expected: self.a.codomain_dim(),
                found: d.rows(),
            });
        }
        Cholesky::new(&d)?;
        self.d = d;
        Ok(self)
    }

    pub fn f(&self) -> &dyn SmoothOracle {
        self.f.as_ref()
    }

    pub fn h(&self) -> &dyn ProxOracle {
        self.h.as_ref()
    }

    pub fn lstar(&self) -> &dyn SmoothOracle {
        self.lstar.as_ref()
    }

    pub fn a(&self) -> &LinearOperator {
        &self.a
    }

    pub fn p(&self) -> &DenseMatrix {
        &self.p
    }

    pub fn p_inv(&self) -> &DenseMatrix {
        &self.p_inv
    }

    pub fn d(&self) -> &DenseMatrix {
        &self.d
    }

    /// `A P⁻¹ Aᵀ`
    pub fn gram(&self) -> &DenseMatrix {
        &self.gram
    }

    pub fn primal_dim(&self) -> usize {
        self.a.domain_dim()
    }

    pub fn dual_dim(&self) -> usize {
        self.a.codomain_dim()
    }

    /// Certificate inputs in the Euclidean constants the oracles declare.
    pub fn cert_inputs(&self) -> Result<CertInputs<'_>> {
        let p_spec = sym_eigs(&self.p)?;
        let identity_metrics = self.p.as_scaled_identity() == Some(1.0) && self.d.as_scaled_identity() == Some(1.0);
        let composite_structure = identity_metrics
            && self.f.structure() == crate::operators::SmoothStructure::Zero
            && self.h.structure() == crate::operators::ProxStructure::IndicatorOfZero;
        Ok(CertInputs {
            gram: &self.gram,
            d: &self.d,
            p_min: p_spec.min(),
            p_max: p_spec.max(),
            identity_metrics,
            composite_structure,
            lipschitz_f: self.f.lipschitz(),
            tau_f: self.f.strong_convexity(),
            lipschitz_l: self.lstar.lipschitz(),
            tau_l: self.lstar.strong_convexity(),
            tau_h: self.h.conjugate_strong_monotonicity(),
        })
    }
}

/// How `θ ∈ (3/4, 1]` is chosen. `θ` only enters the analysis, never the
/// iteration itself.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ThetaPolicy {
    Auto,
    Fixed(f64),
}

#[derive(Debug, Clone, PartialEq)]
pub struct PdParams {
    pub gamma: f64,
    pub lambda: f64,
    pub theta: ThetaPolicy,
    pub max_iters: usize,
    /// Stop once `‖Δx‖_P + ‖Δs‖_{M₁} ≤ tol`.
    pub tol: f64,
    /// Keep every `trace_every`-th record (the final one is always kept).
    pub trace_every: usize,
    /// Step even when the certificate fails.
    pub allow_infeasible: bool,
    /// Largest admissible `|entry|` before the run counts as diverged.
    pub divergence_norm: f64,
}

impl Default for PdParams {
    fn default() -> Self {
        PdParams {
            gamma: 1.0,
            lambda: 1.0,
            theta: ThetaPolicy::Auto,
            max_iters: 10_000,
            tol: 1e-10,
            trace_every: 1,
            allow_infeasible: false,
            divergence_norm: 1e12,
        }
    }
}

impl PdParams {
    pub fn new(gamma: f64, lambda: f64) -> Self {
        PdParams {
            gamma,
            lambda,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidParameter { name, value: v })
            }
        };
        positive("gamma", self.gamma)?;
        positive("lambda", self.lambda)?;
        if !(self.tol >= 0.0) {
            return Err(Error::InvalidParameter {
                name: "tol",
                value: self.tol,
            });
        }
        if self.trace_every == 0 {
            return Err(Error::InvalidParameter {
                name: "trace_every",
                value: 0.0,
            });
        }
        positive("divergence_norm", self.divergence_norm)
    }
}
