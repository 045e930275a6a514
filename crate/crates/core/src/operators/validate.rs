use alloc::vec::Vec;

use super::{Beta, ProxOracle, SmoothOracle};
use crate::linalg::{self, DenseVector};
use crate::rng::{self, Xoshiro256PlusPlus};

/// Worst observed slack `rhs_side − lhs_side` of one inequality; negative
/// means the declared constant is violated on some sampled pair.
#[derive(Debug, Clone, PartialEq)]
pub struct InequalityCheck {
    pub name: &'static str,
    pub worst_slack: f64,
    /// Slack divided by `1 + |both sides|` at the worst pair.
    pub worst_relative_slack: f64,
    pub samples: usize,
}

impl InequalityCheck {
    fn new(name: &'static str) -> Self {
        InequalityCheck {
            name,
            worst_slack: f64::INFINITY,
            worst_relative_slack: f64::INFINITY,
            samples: 0,
        }
    }

    /// Records `big ≥ small`.
    fn record(&mut self, big: f64, small: f64) {
        let slack = big - small;
        let rel = slack / (1.0 + big.abs() + small.abs());
        if rel < self.worst_relative_slack {
            self.worst_relative_slack = rel;
            self.worst_slack = slack;
        }
        self.samples += 1;
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct AssumptionReport {
    pub checks: Vec<InequalityCheck>,
}

impl AssumptionReport {
    pub fn violations(&self, tol: f64) -> impl Iterator<Item = &InequalityCheck> {
        self.checks.iter().filter(move |c| c.worst_relative_slack < -tol)
    }

    pub fn holds(&self, tol: f64) -> bool {
        self.violations(tol).next().is_none()
    }

    pub fn worst_slack(&self) -> f64 {
        self.checks.iter().fold(f64::INFINITY, |m, c| m.min(c.worst_slack))
    }
}

fn sample(g: &mut Xoshiro256PlusPlus, n: usize, radius: f64) -> DenseVector {
    (0..n).map(|_| rng::uniform(g, -radius, radius)).collect()
}

/// Checks the oracle's own constants: cocoercivity with `β = 1/L` and
/// strong monotonicity with `τ`.
pub fn validate_smooth(oracle: &dyn SmoothOracle, probes: usize, seed: u64) -> AssumptionReport {
    validate_smooth_claims(oracle, oracle.beta(), oracle.strong_convexity(), probes, seed)
}

/// Checks `⟨∇g(x)−∇g(y), x−y⟩ ≥ β‖∇g(x)−∇g(y)‖²` and
/// `⟨∇g(x)−∇g(y), x−y⟩ ≥ τ‖x−y‖²` on sampled pairs in `[−5, 5]ⁿ`.
/// For `β = ∞` the first inequality degenerates to `∇g(x) = ∇g(y)`.
pub fn validate_smooth_claims(
    oracle: &dyn SmoothOracle,
    beta: Beta,
    tau: f64,
    probes: usize,
    seed: u64,
) -> AssumptionReport {
    let mut g = rng::seeded(seed);
    let n = oracle.dim();
    let mut coco = InequalityCheck::new("cocoercivity");
    let mut mono = InequalityCheck::new("strong_monotonicity");
    for _ in 0..probes {
        let x = sample(&mut g, n, 5.0);
        let y = sample(&mut g, n, 5.0);
        let dg = oracle.gradient(&x).sub(&oracle.gradient(&y));
        let dx = x.sub(&y);
        let inner = dg.dot(&dx);
        let dg_sq = dg.dot(&dg);
        match beta {
            Beta::Finite(b) => coco.record(inner, b * dg_sq),
            Beta::Infinite => coco.record(0.0, linalg::sqrt(dg_sq)),
        }
        mono.record(inner, tau * dx.dot(&dx));
    }
    AssumptionReport {
        checks: alloc::vec![coco, mono],
    }
}

/// Firm nonexpansiveness of `prox_{σh}` and strong monotonicity of `∂h*`
/// with the declared `τ_h`. The latter uses `u = prox_h(t) ∈ ∂h*(t − u)`.
pub fn validate_prox(oracle: &dyn ProxOracle, probes: usize, seed: u64) -> AssumptionReport {
    let mut g = rng::seeded(seed);
    let n = oracle.dim();
    let tau = oracle.conjugate_strong_monotonicity();
    let mut firm = InequalityCheck::new("firm_nonexpansiveness");
    let mut mono = InequalityCheck::new("conjugate_strong_monotonicity");
    for _ in 0..probes {
        let t1 = sample(&mut g, n, 5.0);
        let t2 = sample(&mut g, n, 5.0);
        let sigma = rng::uniform(&mut g, 0.1, 3.0);
        let du = oracle.prox(&t1, sigma).sub(&oracle.prox(&t2, sigma));
        firm.record(du.dot(&t1.sub(&t2)), du.dot(&du));

        let u1 = oracle.prox(&t1, 1.0);
        let u2 = oracle.prox(&t2, 1.0);
        let ds = t1.sub(&u1).sub(&t2.sub(&u2));
        let dq = u1.sub(&u2);
        mono.record(dq.dot(&ds), tau * ds.dot(&ds));
    }
    AssumptionReport {
        checks: alloc::vec![firm, mono],
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::DenseMatrix;
    use crate::operators::{linear_oracle, quadratic_oracle, L1Norm, SquaredNorm};

    #[test]
    fn quadratic_identity_claims() {
        let q = quadratic_oracle(DenseMatrix::identity(3), DenseVector::zeros(3)).unwrap();
        let ok = validate_smooth(&q, 200, 1);
        assert!(ok.worst_slack() >= -1e-10, "{ok:?}");
        let bad = validate_smooth_claims(&q, Beta::Finite(2.0), 0.0, 200, 1);
        assert!(!bad.holds(1e-10));
        assert_eq!(bad.violations(1e-10).next().unwrap().name, "cocoercivity");
    }

    #[test]
    fn linear_never_violates() {
        let l = linear_oracle(DenseVector::from(alloc::vec![1.0, -2.0]));
        for beta in [Beta::Finite(1e6), Beta::Finite(1e-3), Beta::Infinite] {
            let r = validate_smooth_claims(&l, beta, 0.0, 50, 3);
            assert!(r.holds(0.0), "{r:?}");
        }
    }

    #[test]
    fn prox_catalog_is_firm() {
        assert!(validate_prox(&L1Norm::new(4, 0.7), 200, 5).holds(1e-12));
        assert!(validate_prox(&SquaredNorm::new(4, 2.0).unwrap(), 200, 5).holds(1e-12));
    }
}
