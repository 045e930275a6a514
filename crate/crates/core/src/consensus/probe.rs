use alloc::vec::Vec;

use super::{stepsize_bound, ConsensusProblem, ConsensusState, StepsizeRegime};
use crate::error::{Error, Result};
use crate::linalg::{psd_pseudo_inverse, psd_sqrt, sym_eigs, DenseMatrix, DEFAULT_RANK_TOL};
use crate::operators::Beta;
use crate::pdsolver::{certify_from_gram, CertBundle, CertInputs, ThetaPolicy};

/// Roots of `μ² − bμ + c`, larger magnitude first.
fn quadratic_roots(b: f64, c: f64) -> ([f64; 2], bool) {
    let disc = b * b - 4.0 * c;
    if disc < 0.0 {
        // complex pair of modulus √c
        let m = crate::linalg::sqrt(c);
        return ([m, m], true);
    }
    let q = 0.5 * (b + libm::copysign(crate::linalg::sqrt(disc), b));
    if q == 0.0 {
        return ([0.0, 0.0], false);
    }
    ([q, c / q], false)
}

/// Largest root magnitude of the EXTRA recursion on `sᵢ = (L/2)‖xᵢ − yᵢ‖²`,
/// `r = 0`, after removing the unit root carried by the consensus mode.
///
/// Each eigenvalue `w` of `W` contributes the roots of
/// `μ² − (1 + w − αL)μ + ((1+w)/2 − αL)`. Below `1` the recursion converges
/// linearly; above `1` it diverges.
pub fn extra_amplification(w: &DenseMatrix, alpha: f64, l_scale: f64) -> Result<f64> {
    if !alpha.is_finite() || !l_scale.is_finite() {
        return Err(Error::InvalidParameter {
            name: "alpha",
            value: alpha * l_scale,
        });
    }
    w.check_symmetric()?;
    let eigs = sym_eigs(&w.symmetrized())?.eigenvalues;
    let al = alpha * l_scale;
    let consensus = eigs
        .iter()
        .enumerate()
        .min_by(|a, b| (a.1 - 1.0).abs().total_cmp(&(b.1 - 1.0).abs()))
        .map(|(i, _)| i);
    let mut worst: f64 = 0.0;
    for (i, &wi) in eigs.iter().enumerate() {
        let (roots, complex) = quadratic_roots(1.0 + wi - al, 0.5 * (1.0 + wi) - al);
        let kept: Vec<f64> = if Some(i) == consensus && !complex {
            let drop = if (roots[0] - 1.0).abs() <= (roots[1] - 1.0).abs() { 0 } else { 1 };
            alloc::vec![roots[1 - drop]]
        } else {
            roots.to_vec()
        };
        for r in kept {
            worst = worst.max(r.abs());
        }
    }
    Ok(worst)
}

/// Linear rate for EXTRA obtained by reading it as the primal-dual iteration
/// on the dual problem, with `λ = 1/2`, `γ = 1/(2α)`, `AAᵀ = I − W`.
#[derive(Debug, Clone)]
pub struct ConsensusCertificate {
    pub alpha: f64,
    pub rho2: f64,
    pub c1: f64,
    pub c2: f64,
    pub theta: f64,
    pub gamma: f64,
    pub lambda: f64,
    pub beta: Beta,
    /// Strong convexity of the `sᵢ` after metric conversion.
    pub tau_l: f64,
    /// Weight `K` on the dual part of the contraction quantity.
    pub primal_weight: f64,
    pub cert: CertBundle,
}

const THETA_GRID: usize = 400;

/// Certifies the rate of EXTRA (`r = 0`) at stepsize `α`. `θ` is searched
/// over its admissible interval for the smallest `ρ₂`.
pub fn consensus_rate_certificate(prob: &ConsensusProblem, alpha: f64) -> Result<ConsensusCertificate> {
    let n = prob.nodes();
    if n == 1 {
        return Err(Error::NoLinearCertificate("A = 0"));
    }
    if !prob.prox_is_zero() {
        return Err(Error::NoLinearCertificate("r is not zero"));
    }
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter { name: "alpha", value: alpha });
    }
    let l = prob.lipschitz();
    let bound = stepsize_bound(prob.mixing().matrix(), l, StepsizeRegime::Extended)?;
    if alpha >= bound {
        return Err(Error::StepsizeOutOfRange { alpha, bound });
    }
    let mu = prob.strong_convexity();
    if !(mu > 0.0) {
        return Err(Error::NoLinearCertificate("τ_l = 0"));
    }

    let gram = prob.mixing().laplacian();
    let d = DenseMatrix::identity(n);
    let inputs = CertInputs {
        gram: &gram,
        d: &d,
        p_min: 1.0,
        p_max: 1.0,
        identity_metrics: true,
        composite_structure: true,
        lipschitz_f: 0.0,
        tau_f: 0.0,
        lipschitz_l: l,
        tau_l: mu,
        tau_h: 0.0,
    };
    let lambda = 0.5;
    let gamma = 1.0 / (2.0 * alpha);
    let lmax = sym_eigs(&gram)?.max();
    if !(lmax > DEFAULT_RANK_TOL) {
        return Err(Error::NoLinearCertificate("A = 0"));
    }
    // M₁ ≻ 0 together with γ < 2β reads θ < (2 − αL)/λ_max(I − W).
    let theta_max = ((2.0 - alpha * l) / lmax).min(1.0);
    let mut best: Option<CertBundle> = None;
    for j in 1..=THETA_GRID {
        let theta = 0.75 + (theta_max - 0.75) * j as f64 / THETA_GRID as f64;
        let Ok(cert) = certify_from_gram(&inputs, gamma, lambda, ThetaPolicy::Fixed(theta), false) else {
            continue;
        };
        let Some(rho) = cert.rho2 else { continue };
        if best.as_ref().and_then(|b| b.rho2).is_none_or(|r| rho < r) {
            best = Some(cert);
        }
    }
    let cert = best.ok_or(Error::StepsizeOutOfRange { alpha, bound })?;
    let rho2 = cert.rho2.expect("selected with a rate");
    if !(rho2 < 1.0) {
        return Err(Error::NoLinearCertificate("rate is not below one"));
    }
    Ok(ConsensusCertificate {
        alpha,
        rho2,
        c1: cert.c1,
        c2: cert.c2.expect("identity metrics"),
        theta: cert.theta,
        gamma,
        lambda,
        beta: cert.beta,
        tau_l: cert.tau_l,
        primal_weight: cert.composite_primal_weight().expect("identity metrics"),
        cert,
    })
}

/// Optimal pair for the dual-form variables: `X*` and `U* = ∇s(X*)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusReference {
    pub x: DenseMatrix,
    pub u: DenseMatrix,
}

impl ConsensusReference {
    pub fn new(prob: &ConsensusProblem, x_star: DenseMatrix) -> Result<Self> {
        prob.check_block(&x_star, "x_star")?;
        let u = prob.gradient(&x_star);
        Ok(ConsensusReference { x: x_star, u })
    }
}

/// `K·Σ_c (U−U*)ᵀ(I−W)⁺(U−U*) + Σ_c (X−X*)ᵀ M̲ (X−X*)` summed over
/// columns `c`. The first term is `K‖y − y*‖²` written through `U = Ay`.
pub fn composite_lyapunov(
    prob: &ConsensusProblem,
    cert: &ConsensusCertificate,
    st: &ConsensusState,
    reference: &ConsensusReference,
) -> Result<f64> {
    let lap_pinv = psd_pseudo_inverse(&prob.mixing().laplacian(), DEFAULT_RANK_TOL)?;
    let du = st.u.sub(&reference.u)?;
    let dx = st.x.sub(&reference.x)?;
    let mut dual = 0.0;
    let mut primal = 0.0;
    for c in 0..dx.cols() {
        let uc = du.column(c);
        let xc = dx.column(c);
        dual += lap_pinv.quadratic_form(&uc, &uc);
        primal += cert.cert.m_under.quadratic_form(&xc, &xc);
    }
    Ok(cert.primal_weight * dual + primal)
}

/// A matrix `A` with `AAᵀ = I − W`, its symmetric square root. Only for
/// cross-checks against the general solver; the iterations never need it.
pub fn explicit_incidence(prob: &ConsensusProblem) -> Result<DenseMatrix> {
    psd_sqrt(&prob.mixing().laplacian())
}
