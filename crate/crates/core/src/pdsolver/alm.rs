use super::IterateState;
use crate::error::{Error, Result};
use crate::linalg::DenseVector;
use crate::operators::{prox_conjugate, LinearOperator, ProxOracle};

/// One linearized-ALM step for `min bᵀx + h(Ax)`:
///
/// ```text
/// s⁺ = argmin_s h*(s) + (β/2)‖s − s − (1/β)A(x − γ(Aᵀs + b))‖²
/// x⁺ = x − γ(Aᵀs⁺ + b)
/// ```
///
/// The returned state carries `∇f = b` and `∇l* = 0`.
pub fn alm_step(
    h: &dyn ProxOracle,
    a: &LinearOperator,
    b: &[f64],
    gamma: f64,
    beta_alm: f64,
    state: &IterateState,
) -> Result<IterateState> {
    if !(beta_alm > 0.0 && beta_alm.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "beta_alm",
            value: beta_alm,
        });
    }
    if b.len() != a.domain_dim() {
        return Err(Error::DimensionMismatch {
            op: "alm_step",
            expected: a.domain_dim(),
            found: b.len(),
        });
    }
    let mut r = a.adjoint(&state.s)?;
    r.axpy(1.0, b);
    let mut inner = state.x.clone();
    inner.axpy(-gamma, &r);
    let mut v = state.s.clone();
    v.axpy(1.0 / beta_alm, &a.forward(&inner)?);
    let s = prox_conjugate(h, &v, 1.0 / beta_alm)?;

    let mut r = a.adjoint(&s)?;
    r.axpy(1.0, b);
    let mut x = state.x.clone();
    x.axpy(-gamma, &r);
    let k = state.k + 1;
    if !x.is_finite() || !s.is_finite() {
        return Err(Error::Diverged { iteration: k });
    }
    Ok(IterateState {
        grad_f: DenseVector::from(b),
        grad_l: DenseVector::zeros(s.len()),
        x,
        s,
        k,
        residual: None,
    })
}
