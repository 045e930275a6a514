use super::ConsensusProblem;
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;

/// Node copies and auxiliaries of the EXTRA-family recursions.
///
/// At `k = 0` the state holds a virtual predecessor: `Z = X_prev = X⁰` and
/// `∇s(X_prev) = 0`. With this convention the two-step recursions produce
/// `Z¹ = ((I+W)/2)X⁰ − α∇s(X⁰)`, which is the dual form started from `U⁰ = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusState {
    pub x: DenseMatrix,
    pub z: DenseMatrix,
    pub x_prev: DenseMatrix,
    pub grad: DenseMatrix,
    pub grad_prev: DenseMatrix,
    /// Dual tracker `U = A y`, kept up to date by every step form.
    pub u: DenseMatrix,
    pub k: usize,
}

impl ConsensusState {
    pub fn new(prob: &ConsensusProblem, x0: DenseMatrix) -> Result<Self> {
        prob.check_block(&x0, "x0")?;
        let zeros = DenseMatrix::zeros(x0.rows(), x0.cols());
        Ok(ConsensusState {
            grad: prob.gradient(&x0),
            grad_prev: zeros.clone(),
            u: zeros,
            z: x0.clone(),
            x_prev: x0.clone(),
            x: x0,
            k: 0,
        })
    }

    /// `‖X − X_prev‖_F`
    pub fn primal_change(&self) -> f64 {
        self.x.sub(&self.x_prev).expect("same shape").frobenius_norm()
    }
}

fn check_positive(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidParameter { name, value: v })
    }
}

fn advance(
    prob: &ConsensusProblem,
    st: &ConsensusState,
    z: DenseMatrix,
    sigma: f64,
    gamma: f64,
) -> Result<ConsensusState> {
    let x = prob.prox_rows(&z, sigma);
    assemble(prob, st, z, x, gamma)
}

/// Next state from freshly computed `Z⁺` and `X⁺`.
pub(crate) fn assemble(
    prob: &ConsensusProblem,
    st: &ConsensusState,
    z: DenseMatrix,
    x: DenseMatrix,
    gamma: f64,
) -> Result<ConsensusState> {
    let k = st.k + 1;
    if !x.is_finite() || !z.is_finite() {
        return Err(Error::Diverged { iteration: k });
    }
    // U⁺ = U − γ(I − W)X⁺
    let u = st.u.add_scaled(-gamma, &prob.mixing().laplacian().matmul(&x)?)?;
    Ok(ConsensusState {
        grad: prob.gradient(&x),
        grad_prev: st.grad.clone(),
        x_prev: st.x.clone(),
        x,
        z,
        u,
        k,
    })
}

/// `Z⁺ = Z − X + ((I+W)/2)(2X − X_prev) − α∇s(X) + α∇s(X_prev)`,
/// `X⁺ = prox_{αr}(Z⁺)`.
pub fn pg_extra_step(prob: &ConsensusProblem, alpha: f64, st: &ConsensusState) -> Result<ConsensusState> {
    check_positive("alpha", alpha)?;
    let n = prob.nodes();
    let half = DenseMatrix::identity(n).add(prob.mixing().matrix())?.scaled(0.5);
    let two_step = st.x.scaled(2.0).sub(&st.x_prev)?;
    let z = st
        .z
        .sub(&st.x)?
        .add(&half.matmul(&two_step)?)?
        .add_scaled(-alpha, &st.grad)?
        .add_scaled(alpha, &st.grad_prev)?;
    advance(prob, st, z, alpha, 1.0 / (2.0 * alpha))
}

/// The primal-dual iteration on the dual problem, with `U = A y` so that only
/// `AAᵀ = I − W` appears:
/// `Z⁺ = (I − λ(I−W))X + (λ/γ)U − (λ/γ)∇s(X)`, `X⁺ = prox_{(λ/γ)r}(Z⁺)`,
/// `U⁺ = U − γ(I−W)X⁺`.
pub fn dual_form_step(prob: &ConsensusProblem, gamma: f64, lambda: f64, st: &ConsensusState) -> Result<ConsensusState> {
    check_positive("gamma", gamma)?;
    check_positive("lambda", lambda)?;
    let ratio = lambda / gamma;
    let z = prob
        .mixing()
        .damped(lambda)
        .matmul(&st.x)?
        .add_scaled(ratio, &st.u)?
        .add_scaled(-ratio, &st.grad)?;
    advance(prob, st, z, ratio, gamma)
}

/// The dual form with `U` eliminated:
/// `Z⁺ = Z − X + (I − λ(I−W))(2X − X_prev) − (λ/γ)(∇s(X) − ∇s(X_prev))`.
pub fn eliminated_step(prob: &ConsensusProblem, gamma: f64, lambda: f64, st: &ConsensusState) -> Result<ConsensusState> {
    check_positive("gamma", gamma)?;
    check_positive("lambda", lambda)?;
    let ratio = lambda / gamma;
    let two_step = st.x.scaled(2.0).sub(&st.x_prev)?;
    let z = st
        .z
        .sub(&st.x)?
        .add(&prob.mixing().damped(lambda).matmul(&two_step)?)?
        .add_scaled(-ratio, &st.grad)?
        .add_scaled(ratio, &st.grad_prev)?;
    advance(prob, st, z, ratio, gamma)
}
