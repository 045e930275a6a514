use super::{PdParams, ProblemSpec, ThetaPolicy};
use crate::error::{Error, Result};
use crate::linalg::{gen_eig_max, min_nonzero_eig, sym_eigs, Cholesky, DenseMatrix, DEFAULT_RANK_TOL};
use crate::operators::Beta;

/// Margin below `4/3` that `λ·λ_max(G)` must respect.
const DUAL_BOUND_MARGIN: f64 = 1e-12;
/// `λ·λ_max(G)` at or below `1 − THETA_ONE_SLACK` certifies with `θ = 1`.
const THETA_ONE_SLACK: f64 = 1e-9;
const ILL_CONDITIONED: f64 = 1e12;

/// Everything the certificate needs, decoupled from the oracles so that
/// callers holding only `A P⁻¹ Aᵀ` (consensus with `AAᵀ = I − W`) can use it.
/// Oracle constants are Euclidean.
#[derive(Debug, Clone)]
pub struct CertInputs<'a> {
    /// `A P⁻¹ Aᵀ`
    pub gram: &'a DenseMatrix,
    pub d: &'a DenseMatrix,
    pub p_min: f64,
    pub p_max: f64,
    /// `P = I` and `D = I`, where `C₂` is defined.
    pub identity_metrics: bool,
    /// `f = 0` and `h* = 0` on top of identity metrics: the rate `ρ₂` applies.
    pub composite_structure: bool,
    pub lipschitz_f: f64,
    pub tau_f: f64,
    pub lipschitz_l: f64,
    pub tau_l: f64,
    pub tau_h: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Feasibility {
    /// `λ·λ_max(G) < 4/3`
    pub dual_within_bound: bool,
    /// `γ < 2β`
    pub primal_step_admissible: bool,
    pub m1_positive_definite: bool,
    /// `cond(M₁) > 1e12`; a warning only.
    pub ill_conditioned: bool,
}

impl Feasibility {
    pub fn is_feasible(&self) -> bool {
        self.dual_within_bound && self.primal_step_admissible && self.m1_positive_definite
    }
}

/// Metric operators and rate constants for one `(γ, λ)`.
#[derive(Debug, Clone)]
pub struct CertBundle {
    pub gamma: f64,
    pub lambda: f64,
    pub theta: f64,
    /// `λ_max(D^{−1/2} A P⁻¹ Aᵀ D^{−1/2})`
    pub lambda_max_g: f64,
    /// `M = (γ²/λ)(D − λAP⁻¹Aᵀ)`
    pub m: DenseMatrix,
    pub m1: DenseMatrix,
    pub m2: DenseMatrix,
    /// `M₁ + M₂`
    pub m_tilde: DenseMatrix,
    /// `(1 + 2γτ_h)M₁ + M₂`
    pub m_hat: DenseMatrix,
    /// `M₁ + ((2θ−1)/(2(1−θ)))M₂`, or `M₁` at `θ = 1`.
    pub m_under: DenseMatrix,
    pub m1_min_eig: f64,
    pub m1_max_eig: f64,
    /// `λ_max(M₁^{−1/2} M₂ M₁^{−1/2})`; infinite when `M₁` is not PD.
    pub c1: f64,
    pub c2: Option<f64>,
    pub rho1: Option<f64>,
    pub rho2: Option<f64>,
    pub beta: Beta,
    pub beta_f: Beta,
    pub beta_l: Beta,
    /// Metric-converted strong monotonicity constants.
    pub tau_f: f64,
    pub tau_l: f64,
    pub tau_h: f64,
    pub feasibility: Feasibility,
}

impl CertBundle {
    pub fn scaled_lambda(&self) -> f64 {
        self.lambda * self.lambda_max_g
    }

    /// `2γ − γ²/β`
    pub fn descent_factor(&self) -> f64 {
        2.0 * self.gamma - self.beta.gamma_sq_over_beta(self.gamma)
    }

    /// Coefficients of `‖Δs‖²_{M₁}` and `‖Δx‖²_P` in the Lyapunov decrease:
    /// `1 − γ/(2β)` and `(4θ−3)(2β−γ)/(2β−4(1−θ)γ)`, exactly `1` and `4θ−3`
    /// for `β = ∞`.
    pub fn descent_coefficients(&self) -> (f64, f64) {
        let g = self.gamma;
        let t = self.theta;
        match self.beta {
            Beta::Infinite => (1.0, 4.0 * t - 3.0),
            Beta::Finite(b) => (
                1.0 - g / (2.0 * b),
                (4.0 * t - 3.0) * (2.0 * b - g) / (2.0 * b - 4.0 * (1.0 - t) * g),
            ),
        }
    }

    /// Weight `1 + (4θ−3)C₂/(4θ−3 + 4(1−θ)C₁)` on the primal part of the
    /// contraction quantity for `f = 0`, `h* = 0`.
    pub fn composite_primal_weight(&self) -> Option<f64> {
        let c2 = self.c2?;
        let a = 4.0 * self.theta - 3.0;
        Some(1.0 + a * c2 / (a + 4.0 * (1.0 - self.theta) * self.c1))
    }
}

/// `θ = 1` when `λ·λ_max(G) ≤ 1 − 1e−9`, else the midpoint of
/// `(3/4, 1/(λ·λ_max(G)))`, clamped to `3/4` beyond the bound.
pub fn select_theta(scaled_lambda: f64) -> f64 {
    if scaled_lambda <= 1.0 - THETA_ONE_SLACK {
        1.0
    } else {
        let upper = (1.0 / scaled_lambda).max(0.75);
        0.5 * (0.75 + upper)
    }
}

/// Strict certificate with automatic `θ`.
pub fn certify(spec: &ProblemSpec, gamma: f64, lambda: f64) -> Result<CertBundle> {
    certify_with(spec, gamma, lambda, ThetaPolicy::Auto, false)
}

pub fn certify_with(
    spec: &ProblemSpec,
    gamma: f64,
    lambda: f64,
    theta: ThetaPolicy,
    allow_infeasible: bool,
) -> Result<CertBundle> {
    let params = PdParams {
        gamma,
        lambda,
        theta,
        allow_infeasible,
        ..PdParams::default()
    };
    params.validate()?;
    certify_from_gram(&spec.cert_inputs()?, gamma, lambda, theta, allow_infeasible)
}

pub fn certify_from_gram(
    inp: &CertInputs<'_>,
    gamma: f64,
    lambda: f64,
    theta_policy: ThetaPolicy,
    allow_infeasible: bool,
) -> Result<CertBundle> {
    for (name, v) in [("gamma", gamma), ("lambda", lambda)] {
        if !(v > 0.0 && v.is_finite()) {
            return Err(Error::InvalidParameter { name, value: v });
        }
    }
    let gram = inp.gram.symmetrized();
    let d = inp.d;
    let lambda_max_g = gen_eig_max(&gram, d)?;
    let scaled = lambda * lambda_max_g;
    let dual_within_bound = scaled < 4.0 / 3.0 - DUAL_BOUND_MARGIN;
    if !dual_within_bound && !allow_infeasible {
        return Err(Error::DualStepBeyondBound { scaled_lambda: scaled });
    }

    let theta = match theta_policy {
        ThetaPolicy::Auto => select_theta(scaled),
        ThetaPolicy::Fixed(t) => {
            if !(t > 0.75 && t <= 1.0) {
                return Err(Error::InvalidParameter { name: "theta", value: t });
            }
            t
        }
    };

    let g2 = gamma * gamma;
    let m = d.add_scaled(-lambda, &gram)?.scaled(g2 / lambda);
    let m1 = d.add_scaled(-theta * lambda, &gram)?.scaled(g2 / lambda);
    let m2 = gram.scaled(g2 * (1.0 - theta));
    let m_tilde = m1.add(&m2)?;

    let m1_spec = sym_eigs(&m1)?;
    let m1_positive_definite = Cholesky::new(&m1).is_ok() && m1_spec.min() > 0.0;
    if !m1_positive_definite && !allow_infeasible {
        return Err(Error::InvalidParameter { name: "theta", value: theta });
    }
    let m1_min_eig = m1_spec.min();
    let m1_max_eig = m1_spec.max();
    let ill_conditioned = !m1_positive_definite || m1_max_eig / m1_min_eig > ILL_CONDITIONED;

    let beta_f = Beta::from_lipschitz(inp.lipschitz_f, inp.p_min);
    let beta_l = Beta::from_lipschitz(inp.lipschitz_l, m1_min_eig.max(0.0));
    let beta = beta_f.min(beta_l);
    let primal_step_admissible = beta.admits(gamma);
    if !primal_step_admissible && !allow_infeasible {
        return Err(Error::PrimalStepTooLarge {
            gamma,
            two_beta: 2.0 * beta.value(),
        });
    }

    let tau_f = inp.tau_f / inp.p_max;
    let (tau_l, tau_h) = if m1_max_eig > 0.0 {
        (inp.tau_l / m1_max_eig, inp.tau_h / m1_max_eig)
    } else {
        (0.0, 0.0)
    };
    let m_hat = m1.scaled(1.0 + 2.0 * gamma * tau_h).add(&m2)?;
    let m_under = if theta < 1.0 {
        m1.add_scaled((2.0 * theta - 1.0) / (2.0 * (1.0 - theta)), &m2)?
    } else {
        m1.clone()
    };

    let c1 = if m1_positive_definite {
        gen_eig_max(&m2, &m1)?
    } else {
        f64::INFINITY
    };
    let c2 = if inp.identity_metrics && m1_positive_definite {
        min_nonzero_eig(&gram, DEFAULT_RANK_TOL)
            .ok()
            .map(|mu| lambda * mu / (1.0 - theta * lambda * mu))
    } else {
        None
    };

    let feasibility = Feasibility {
        dual_within_bound,
        primal_step_admissible,
        m1_positive_definite,
        ill_conditioned,
    };

    let mut cert = CertBundle {
        gamma,
        lambda,
        theta,
        lambda_max_g,
        m,
        m1,
        m2,
        m_tilde,
        m_hat,
        m_under,
        m1_min_eig,
        m1_max_eig,
        c1,
        c2,
        rho1: None,
        rho2: None,
        beta,
        beta_f,
        beta_l,
        tau_f,
        tau_l,
        tau_h,
        feasibility,
    };
    if feasibility.is_feasible() {
        cert.rho1 = Some(rho1(&cert));
        if inp.composite_structure {
            cert.rho2 = rho2(&cert);
        }
    }
    Ok(cert)
}

fn rho1(c: &CertBundle) -> f64 {
    let q = c.descent_factor();
    let dual = (1.0 - q * c.tau_l + c.c1) / (1.0 + 2.0 * c.gamma * c.tau_h + c.c1);
    let primal = 1.0 - q * c.tau_f;
    dual.max(primal)
}

fn rho2(c: &CertBundle) -> Option<f64> {
    let c2 = c.c2?;
    let q = c.descent_factor();
    let t = c.theta;
    if t >= 1.0 {
        return Some((1.0 / (1.0 + c2)).max(1.0 - q * c.tau_l));
    }
    let a = 4.0 * t - 3.0;
    let b = 4.0 * (1.0 - t) * c.c1;
    let k = (2.0 * t - 1.0) / (2.0 * (1.0 - t));
    let first = (a + b) / (a * (c2 + 1.0) + b);
    let second = (1.0 - q * c.tau_l + k * c.c1) / (1.0 + k * c.c1);
    Some(first.max(second))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseVector;
    use crate::operators::{linear_oracle, quadratic_oracle, LinearOperator, ZeroProx, ZeroSmooth};

    fn scalar_spec(a: f64) -> ProblemSpec {
        ProblemSpec::new(
            ZeroSmooth::new(1),
            ZeroProx::new(1),
            ZeroSmooth::new(1),
            LinearOperator::new(DenseMatrix::from_rows(&[&[a]])),
        )
        .unwrap()
    }

    #[test]
    fn zero_operator() {
        let spec = ProblemSpec::new(
            quadratic_oracle(DenseMatrix::identity(2), DenseVector::zeros(2)).unwrap(),
            ZeroProx::new(3),
            ZeroSmooth::new(3),
            LinearOperator::new(DenseMatrix::zeros(3, 2)),
        )
        .unwrap();
        let c = certify(&spec, 0.5, 7.0).unwrap();
        assert_eq!(c.theta, 1.0);
        assert_eq!(c.m1, DenseMatrix::scaled_identity(3, 0.25 / 7.0));
        assert_eq!(c.m2, DenseMatrix::zeros(3, 3));
        assert_eq!(c.c1, 0.0);
        assert_eq!(c.c2, None);
    }

    #[test]
    fn scalar_unit_operator() {
        let c = certify(&scalar_spec(1.0), 1.0, 1.0).unwrap();
        assert!(c.theta > 0.75 && c.theta < 1.0);
        assert_eq!(c.m[(0, 0)], 0.0);
        assert!((c.m1[(0, 0)] - (1.0 - c.theta)).abs() < 1e-15);
        assert!((c.m2[(0, 0)] - (1.0 - c.theta)).abs() < 1e-15);
        assert!(c.feasibility.is_feasible());
        // M = M₁ − M₂
        assert!(c.m1.sub(&c.m2).unwrap().sub(&c.m).unwrap().max_abs() < 1e-15);
    }

    #[test]
    fn dual_bound_is_strict() {
        let spec = scalar_spec(2.0);
        // λ_max(AAᵀ) = 4, bound 1/3
        let err = certify(&spec, 1.0, 1.0 / 3.0).unwrap_err();
        assert!(matches!(err, Error::DualStepBeyondBound { .. }));
        assert!(certify(&spec, 1.0, 0.999 / 3.0).is_ok());
        let over = certify_with(&spec, 1.0, 0.5, ThetaPolicy::Auto, true).unwrap();
        assert!(!over.feasibility.dual_within_bound);
        assert_eq!(over.rho1, None);
    }

    #[test]
    fn primal_step_bound() {
        let spec = ProblemSpec::new(
            quadratic_oracle(DenseMatrix::from_rows(&[&[2.0]]), DenseVector::zeros(1)).unwrap(),
            ZeroProx::new(1),
            ZeroSmooth::new(1),
            LinearOperator::new(DenseMatrix::zeros(1, 1)),
        )
        .unwrap();
        // L = 4 ⇒ 2β = 0.5
        assert!(certify(&spec, 0.49, 1.0).is_ok());
        assert!(matches!(certify(&spec, 0.5, 1.0), Err(Error::PrimalStepTooLarge { .. })));
    }

    #[test]
    fn theta_rule() {
        assert_eq!(select_theta(0.5), 1.0);
        assert_eq!(select_theta(1.0), 0.875);
        assert!((select_theta(1.25) - 0.5 * (0.75 + 0.8)).abs() < 1e-15);
    }

    #[test]
    fn infinite_beta_coefficients() {
        let spec = ProblemSpec::new(
            linear_oracle(DenseVector::from(alloc::vec![1.0])),
            ZeroProx::new(1),
            ZeroSmooth::new(1),
            LinearOperator::new(DenseMatrix::from_rows(&[&[1.0]])),
        )
        .unwrap();
        let c = certify(&spec, 3.0, 1.2).unwrap();
        assert_eq!(c.beta, Beta::Infinite);
        assert_eq!(c.descent_coefficients(), (1.0, 4.0 * c.theta - 3.0));
    }
}
