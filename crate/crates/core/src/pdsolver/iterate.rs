use alloc::vec::Vec;

use super::cert::{certify_with, CertBundle};
use super::{PdParams, ProblemSpec};
use crate::error::{Error, Result};
use crate::linalg::{self, DenseMatrix, DenseVector};
use crate::operators::{conjugate_prox_unchecked, ProxStructure, SmoothStructure};

/// `(x^k, s^k)` with the gradients evaluated there.
#[derive(Debug, Clone, PartialEq)]
pub struct IterateState {
    pub x: DenseVector,
    pub s: DenseVector,
    pub grad_f: DenseVector,
    pub grad_l: DenseVector,
    pub k: usize,
    /// `‖x^k − x^{k−1}‖_P + ‖s^k − s^{k−1}‖_{M₁}`; `None` before the first step.
    pub residual: Option<f64>,
}

/// A reference saddle point `(x*, s*)`.
#[derive(Debug, Clone, PartialEq)]
pub struct FixedPoint {
    pub x: DenseVector,
    pub s: DenseVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecord {
    pub k: usize,
    pub residual: f64,
    pub lyapunov: Option<f64>,
    pub objective: Option<f64>,
    pub dist_to_opt: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolveStatus {
    Converged,
    MaxIters,
}

#[derive(Debug, Clone)]
pub struct SolveOutcome {
    pub state: IterateState,
    pub status: SolveStatus,
    pub trace: Vec<TraceRecord>,
}

/// A certified instance of the iteration. `D` must be a positive multiple
/// of the identity so the resolvent reduces to `prox_h`.
pub struct PrimalDual<'a> {
    spec: &'a ProblemSpec,
    params: PdParams,
    cert: CertBundle,
    d_scale: f64,
    /// Metric of the residual: `M₁`, or `(γ²/λ)D` when `M₁` is not PD.
    residual_metric: DenseMatrix,
}

fn sq(m: &DenseMatrix, v: &[f64]) -> f64 {
    m.quadratic_form(v, v)
}

fn norm_in(m: &DenseMatrix, v: &[f64]) -> f64 {
    linalg::sqrt(sq(m, v).max(0.0))
}

impl<'a> PrimalDual<'a> {
    pub fn new(spec: &'a ProblemSpec, params: PdParams) -> Result<Self> {
        params.validate()?;
        let d_scale = match spec.d().as_scaled_identity() {
            Some(c) if c > 0.0 => c,
            _ => return Err(Error::UnsupportedDualScaling),
        };
        let cert = certify_with(spec, params.gamma, params.lambda, params.theta, params.allow_infeasible)?;
        let residual_metric = if cert.feasibility.m1_positive_definite {
            cert.m1.clone()
        } else {
            spec.d().scaled(params.gamma * params.gamma / params.lambda)
        };
        Ok(PrimalDual {
            spec,
            params,
            cert,
            d_scale,
            residual_metric,
        })
    }

    pub fn spec(&self) -> &ProblemSpec {
        self.spec
    }

    pub fn params(&self) -> &PdParams {
        &self.params
    }

    pub fn cert(&self) -> &CertBundle {
        &self.cert
    }

    pub fn init(&self, x0: DenseVector, s0: DenseVector) -> Result<IterateState> {
        let n = self.spec.primal_dim();
        let m = self.spec.dual_dim();
        if x0.len() != n {
            return Err(Error::DimensionMismatch {
                op: "x0",
                expected: n,
                found: x0.len(),
            });
        }
        if s0.len() != m {
            return Err(Error::DimensionMismatch {
                op: "s0",
                expected: m,
                found: s0.len(),
            });
        }
        Ok(IterateState {
            grad_f: self.spec.f().gradient(&x0),
            grad_l: self.spec.lstar().gradient(&s0),
            x: x0,
            s: s0,
            k: 0,
            residual: None,
        })
    }

    /// `x − γP⁻¹∇f(x)`
    fn forward_primal(&self, st: &IterateState) -> DenseVector {
        let mut y = st.x.clone();
        y.axpy(-self.params.gamma, &self.spec.p_inv().matvec(&st.grad_f));
        y
    }

    pub fn step(&self, st: &IterateState) -> Result<IterateState> {
        let gamma = self.params.gamma;
        let lambda = self.params.lambda;
        let a = self.spec.a().matrix();
        let xf = self.forward_primal(st);

        // (1/γ)M s + A(x − γP⁻¹∇f(x)) − ∇l*(s)
        let mut v = self.cert.m.matvec(&st.s).scaled(1.0 / gamma);
        v.axpy(1.0, &a.matvec(&xf));
        v.axpy(-1.0, &st.grad_l);

        // ((γd/λ)I + ∂h*)⁻¹ v = prox_{σh*}(σ v), σ = λ/(γd)
        let sigma = lambda / (gamma * self.d_scale);
        let s_next = conjugate_prox_unchecked(self.spec.h(), &v.scaled(sigma), sigma);

        let mut x_next = xf;
        x_next.axpy(-gamma, &self.spec.p_inv().matvec(&a.matvec_t(&s_next)));

        self.finish(st, x_next, s_next)
    }

    fn finish(&self, st: &IterateState, x: DenseVector, s: DenseVector) -> Result<IterateState> {
        let k = st.k + 1;
        let bound = self.params.divergence_norm;
        let ok = |v: &DenseVector| v.iter().all(|e| e.is_finite() && e.abs() <= bound);
        if !ok(&x) || !ok(&s) {
            return Err(Error::Diverged { iteration: k });
        }
        let residual = norm_in(self.spec.p(), &x.sub(&st.x)) + norm_in(&self.residual_metric, &s.sub(&st.s));
        Ok(IterateState {
            grad_f: self.spec.f().gradient(&x),
            grad_l: self.spec.lstar().gradient(&s),
            x,
            s,
            k,
            residual: Some(residual),
        })
    }

    /// Iterates until the residual drops to `tol` or `max_iters` is reached.
    pub fn solve(&self, x0: DenseVector, s0: DenseVector) -> Result<SolveOutcome> {
        self.solve_observed(x0, s0, None, &mut |_| {})
    }

    /// Like [`solve`](Self::solve), additionally reporting each kept trace
    /// record to `observer` as it is produced (so a diverging run still
    /// leaves its prefix behind).
    pub fn solve_observed(
        &self,
        x0: DenseVector,
        s0: DenseVector,
        reference: Option<&FixedPoint>,
        observer: &mut dyn FnMut(&TraceRecord),
    ) -> Result<SolveOutcome> {
        let mut state = self.init(x0, s0)?;
        let mut trace = Vec::new();
        let mut status = SolveStatus::MaxIters;
        while state.k < self.params.max_iters {
            state = self.step(&state)?;
            let residual = state.residual.unwrap_or(0.0);
            let done = residual <= self.params.tol;
            let last = done || state.k == self.params.max_iters;
            if state.k % self.params.trace_every == 0 || last {
                let rec = self.record(&state, reference);
                observer(&rec);
                trace.push(rec);
            }
            if done {
                status = SolveStatus::Converged;
                break;
            }
        }
        Ok(SolveOutcome { state, status, trace })
    }

    pub fn record(&self, st: &IterateState, reference: Option<&FixedPoint>) -> TraceRecord {
        TraceRecord {
            k: st.k,
            residual: st.residual.unwrap_or(0.0),
            lyapunov: reference.map(|r| self.lyapunov(st, r)),
            objective: self.objective(&st.x),
            dist_to_opt: reference.map(|r| linalg::norm(&st.x.sub(&r.x))),
        }
    }

    /// `‖x − x*‖²_P + ‖s − s*‖²_{M̃}`
    pub fn lyapunov(&self, st: &IterateState, r: &FixedPoint) -> f64 {
        lyapunov(self.spec.p(), &self.cert, &st.x, &st.s, r)
    }

    /// `‖x − x*‖²_P + ‖s − s*‖²_{M̂}`
    pub fn mhat_distance(&self, st: &IterateState, r: &FixedPoint) -> f64 {
        sq(self.spec.p(), &st.x.sub(&r.x)) + sq(&self.cert.m_hat, &st.s.sub(&r.s))
    }

    /// `K‖x − x*‖² + ‖s − s*‖²_{M̲}` with the primal weight `K` of the
    /// `f = 0`, `h* = 0` rate; `None` without `C₂`.
    pub fn composite_lyapunov(&self, st: &IterateState, r: &FixedPoint) -> Option<f64> {
        let k = self.cert.composite_primal_weight()?;
        let dx = st.x.sub(&r.x);
        Some(k * dx.dot(&dx) + sq(&self.cert.m_under, &st.s.sub(&r.s)))
    }

    /// Lyapunov change plus the two decrease terms; nonpositive up to
    /// rounding whenever the certificate holds.
    pub fn descent_slack(&self, prev: &IterateState, next: &IterateState, r: &FixedPoint) -> f64 {
        let (cs, cx) = self.cert.descent_coefficients();
        let delta = self.lyapunov(next, r) - self.lyapunov(prev, r);
        delta + cs * sq(&self.cert.m1, &prev.s.sub(&next.s)) + cx * sq(self.spec.p(), &prev.x.sub(&next.x))
    }

    /// `f(x) + h(Ax)` when `l = ι_{0}`; `f(x) + env_h(Ax)` when
    /// `l* = ½‖·‖²`, using `h □ ½‖·‖² (v) = h(p) + ½‖v − p‖²`, `p = prox_h(v)`.
    pub fn objective(&self, x: &[f64]) -> Option<f64> {
        let fx = self.spec.f().value(x)?;
        let ax = self.spec.a().matrix().matvec(x);
        let h = self.spec.h();
        match self.spec.lstar().structure() {
            SmoothStructure::Zero => Some(fx + h.value(&ax)?),
            SmoothStructure::HalfSquaredNorm => {
                let p = match h.structure() {
                    ProxStructure::Zero => return Some(fx),
                    _ => h.prox(&ax, 1.0),
                };
                let r = ax.sub(&p);
                Some(fx + h.value(&p)? + 0.5 * r.dot(&r))
            }
            _ => None,
        }
    }
}

pub(crate) fn lyapunov(p: &DenseMatrix, cert: &CertBundle, x: &[f64], s: &[f64], r: &FixedPoint) -> f64 {
    let dx: DenseVector = x.iter().zip(r.x.iter()).map(|(a, b)| a - b).collect();
    let ds: DenseVector = s.iter().zip(r.s.iter()).map(|(a, b)| a - b).collect();
    sq(p, &dx) + sq(&cert.m_tilde, &ds)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operators::{quadratic_oracle, L1Norm, LinearOperator, ScaledDistance, ZeroProx, ZeroSmooth};
    use alloc::vec;

    fn scalar_lasso() -> ProblemSpec {
        ProblemSpec::new(
            ScaledDistance::new(1.0, DenseVector::from(vec![1.0])).unwrap(),
            L1Norm::new(1, 1.0),
            ZeroSmooth::new(1),
            LinearOperator::identity(1),
        )
        .unwrap()
    }

    #[test]
    fn gradient_descent_limit() {
        let spec = ProblemSpec::new(
            quadratic_oracle(DenseMatrix::identity(1), DenseVector::zeros(1)).unwrap(),
            ZeroProx::new(1),
            ZeroSmooth::new(1),
            LinearOperator::new(DenseMatrix::zeros(1, 1)),
        )
        .unwrap();
        let pd = PrimalDual::new(&spec, PdParams::new(0.5, 1.0)).unwrap();
        let st = pd.init(DenseVector::from(vec![1.0]), DenseVector::zeros(1)).unwrap();
        let st = pd.step(&st).unwrap();
        assert_eq!(&*st.x, &[0.5]);
        assert_eq!(&*st.s, &[0.0]);
    }

    #[test]
    fn scalar_lasso_hits_saddle() {
        let spec = scalar_lasso();
        let pd = PrimalDual::new(&spec, PdParams::new(1.0, 1.0)).unwrap();
        let st = pd.init(DenseVector::zeros(1), DenseVector::zeros(1)).unwrap();
        let st = pd.step(&st).unwrap();
        assert_eq!(&*st.s, &[1.0]);
        assert_eq!(&*st.x, &[0.0]);

        let out = pd.solve(DenseVector::zeros(1), DenseVector::zeros(1)).unwrap();
        assert_eq!(out.status, SolveStatus::Converged);
        assert!(out.state.k <= 2);

        let r = FixedPoint {
            x: DenseVector::zeros(1),
            s: DenseVector::from(vec![1.0]),
        };
        let st0 = pd.init(DenseVector::zeros(1), DenseVector::zeros(1)).unwrap();
        assert_eq!(pd.lyapunov(&st0, &r), pd.cert().m_tilde[(0, 0)]);
        assert_eq!(pd.lyapunov(&st, &r), 0.0);
        assert!(pd.descent_slack(&st0, &st, &r) <= 1e-12);
    }

    #[test]
    fn rejects_general_dual_metric() {
        let spec = scalar_lasso().with_dual_metric(DenseMatrix::from_rows(&[&[2.0]])).unwrap();
        assert!(PrimalDual::new(&spec, PdParams::new(1.0, 1.0)).is_ok());
        let spec = ProblemSpec::new(
            ZeroSmooth::new(2),
            ZeroProx::new(2),
            ZeroSmooth::new(2),
            LinearOperator::identity(2),
        )
        .unwrap()
        .with_dual_metric(DenseMatrix::diagonal(&[1.0, 2.0]))
        .unwrap();
        assert!(matches!(
            PrimalDual::new(&spec, PdParams::new(1.0, 0.5)),
            Err(Error::UnsupportedDualScaling)
        ));
    }

    #[test]
    fn objective_with_moreau_envelope() {
        let spec = ProblemSpec::new(
            ZeroSmooth::new(1),
            L1Norm::new(1, 1.0),
            ScaledDistance::centered(1.0, 1).unwrap(),
            LinearOperator::identity(1),
        )
        .unwrap();
        let pd = PrimalDual::new(&spec, PdParams::new(1.0, 0.5)).unwrap();
        // Huber: |v| − ½ for |v| ≥ 1, ½v² inside
        assert_eq!(pd.objective(&[3.0]), Some(2.5));
        assert_eq!(pd.objective(&[0.5]), Some(0.125));
    }
}
