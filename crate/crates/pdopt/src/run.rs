//! Dispatch of one configured experiment, with trace and report emission.

use std::time::Instant;

use pdopt_core::consensus::{
    consensus_rate_certificate, extra_amplification, run_consensus, run_consensus_with, stepsize_bound,
    ConsensusCertificate, ConsensusMethod, ConsensusProblem, ConsensusTraceRecord, RunOptions, StepsizeRegime,
};
use pdopt_core::operators::Beta;
use pdopt_core::pdsolver::{certify_with, CertBundle, PdParams, PrimalDual, SolveStatus, TraceRecord};
use pdopt_core::Error;
use serde::{Deserialize, Serialize};

use crate::config::{ConsensusMethodSpec, ExperimentConfig, Mode};
use crate::error::{PdoptError, Result};
use crate::format::{fmt_f64, fmt_opt, write_text};
use crate::generate::{generate_problem, ConsensusInstance, PdInstance};
use crate::threaded::{default_workers, threaded_round};

pub const PD_HEADER: &str = "k,residual,lyapunov,objective,dist_to_opt";
pub const CONSENSUS_HEADER: &str = "k,residual,consensus_violation,objective,dist_to_opt";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Converged,
    MaxIters,
    Diverged,
    Infeasible,
    /// `certify` mode found a valid certificate.
    Certified,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Converged | Status::Certified => 0,
            Status::MaxIters => 2,
            Status::Diverged => 3,
            Status::Infeasible => 4,
        }
    }
}

impl From<SolveStatus> for Status {
    fn from(s: SolveStatus) -> Self {
        match s {
            SolveStatus::Converged => Status::Converged,
            SolveStatus::MaxIters => Status::MaxIters,
        }
    }
}

/// Scalar fields of a primal-dual certificate. Non-finite values are `None`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CertificateSnapshot {
    pub gamma: f64,
    pub lambda: f64,
    pub theta: f64,
    pub lambda_max_g: f64,
    pub scaled_lambda: f64,
    pub m1_min_eig: f64,
    pub m1_max_eig: f64,
    pub c1: Option<f64>,
    pub c2: Option<f64>,
    pub rho1: Option<f64>,
    pub rho2: Option<f64>,
    /// `None` for `β = ∞`.
    pub beta: Option<f64>,
    pub tau_f: f64,
    pub tau_l: f64,
    pub tau_h: f64,
    pub dual_within_bound: bool,
    pub primal_step_admissible: bool,
    pub m1_positive_definite: bool,
    pub ill_conditioned: bool,
}

fn finite(v: f64) -> Option<f64> {
    v.is_finite().then_some(v)
}

fn beta_value(b: Beta) -> Option<f64> {
    match b {
        Beta::Finite(v) => Some(v),
        Beta::Infinite => None,
    }
}

impl From<&CertBundle> for CertificateSnapshot {
    fn from(c: &CertBundle) -> Self {
        CertificateSnapshot {
            gamma: c.gamma,
            lambda: c.lambda,
            theta: c.theta,
            lambda_max_g: c.lambda_max_g,
            scaled_lambda: c.scaled_lambda(),
            m1_min_eig: c.m1_min_eig,
            m1_max_eig: c.m1_max_eig,
            c1: finite(c.c1),
            c2: c.c2.and_then(finite),
            rho1: c.rho1.and_then(finite),
            rho2: c.rho2.and_then(finite),
            beta: beta_value(c.beta),
            tau_f: c.tau_f,
            tau_l: c.tau_l,
            tau_h: c.tau_h,
            dual_within_bound: c.feasibility.dual_within_bound,
            primal_step_admissible: c.feasibility.primal_step_admissible,
            m1_positive_definite: c.feasibility.m1_positive_definite,
            ill_conditioned: c.feasibility.ill_conditioned,
        }
    }
}

/// Stepsize analysis of a consensus instance at its configured `α`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConsensusSnapshot {
    pub alpha: Option<f64>,
    pub lipschitz: f64,
    pub strong_convexity: f64,
    pub w_min_eig: f64,
    pub classic_bound: f64,
    pub extended_bound: f64,
    /// Per-mode root magnitude for quadratic node terms with curvature `L`.
    pub amplification: Option<f64>,
    pub rho2: Option<f64>,
    pub theta: Option<f64>,
    pub primal_weight: Option<f64>,
    /// Why no rate certificate exists, when it does not.
    pub certificate_error: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub mode: Mode,
    pub family: String,
    pub seed: u64,
    pub status: Status,
    pub iterations: usize,
    /// Equals the residual of the last trace row.
    pub final_residual: Option<f64>,
    pub certificate: Option<CertificateSnapshot>,
    pub consensus: Option<ConsensusSnapshot>,
    /// Error detail behind `diverged` or `infeasible`.
    pub message: Option<String>,
    pub wall_time_s: f64,
}

impl RunReport {
    pub fn exit_code(&self) -> i32 {
        self.status.exit_code()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

pub fn pd_row(r: &TraceRecord) -> String {
    format!(
        "{},{},{},{},{}",
        r.k,
        fmt_f64(r.residual),
        fmt_opt(r.lyapunov),
        fmt_opt(r.objective),
        fmt_opt(r.dist_to_opt)
    )
}

pub fn consensus_row(r: &ConsensusTraceRecord) -> String {
    format!(
        "{},{},{},{},{}",
        r.k,
        fmt_f64(r.residual),
        fmt_f64(r.consensus_violation),
        fmt_opt(r.objective),
        fmt_opt(r.dist_to_opt)
    )
}

fn is_infeasibility(e: &Error) -> bool {
    matches!(
        e,
        Error::DualStepBeyondBound { .. }
            | Error::PrimalStepTooLarge { .. }
            | Error::StepsizeOutOfRange { .. }
            | Error::NoLinearCertificate(_)
            | Error::InvalidParameter { name: "theta", .. }
    )
}

/// Collected trace: CSV lines plus the last `(k, residual)`.
struct Trace {
    header: &'static str,
    lines: Vec<String>,
    last: Option<(usize, f64)>,
}

impl Trace {
    fn new(header: &'static str) -> Self {
        Trace {
            header,
            lines: Vec::new(),
            last: None,
        }
    }

    fn push(&mut self, k: usize, residual: f64, line: String) {
        self.last = Some((k, residual));
        self.lines.push(line);
    }

    fn render(&self) -> String {
        let mut out = String::with_capacity(self.header.len() + 1 + self.lines.len() * 64);
        out.push_str(self.header);
        out.push('\n');
        for l in &self.lines {
            out.push_str(l);
            out.push('\n');
        }
        out
    }
}

struct Outcome {
    status: Status,
    iterations: usize,
    certificate: Option<CertificateSnapshot>,
    consensus: Option<ConsensusSnapshot>,
    message: Option<String>,
}

impl Outcome {
    fn new(status: Status) -> Self {
        Outcome {
            status,
            iterations: 0,
            certificate: None,
            consensus: None,
            message: None,
        }
    }
}

/// Classifies a core error: divergence and infeasibility become statuses,
/// anything else is a usage error.
fn classify(e: Error, out: &mut Outcome) -> Result<()> {
    match e {
        Error::Diverged { iteration } => {
            out.status = Status::Diverged;
            out.iterations = iteration;
        }
        ref e if is_infeasibility(e) => out.status = Status::Infeasible,
        e => return Err(e.into()),
    }
    out.message = Some(e.to_string());
    Ok(())
}

/// Runs the experiment, writes the configured trace and report files, and
/// returns the report.
pub fn run(cfg: &ExperimentConfig) -> Result<RunReport> {
    let started = Instant::now();
    let generated = generate_problem(&cfg.problem, &cfg.base_dir, cfg.seed)?;
    let (outcome, trace) = match cfg.mode {
        Mode::Solve => {
            let pd = generated.into_pd().ok_or_else(|| PdoptError::config("mode", "solve needs a primal-dual family"))?;
            run_pd(cfg, pd)?
        }
        Mode::Certify => match generated {
            crate::generate::Generated::Pd(pd) => (certify_pd(cfg, &pd)?, None),
            crate::generate::Generated::Consensus(c) => (certify_consensus(cfg, &c)?, None),
        },
        Mode::Consensus => {
            let c = generated
                .into_consensus()
                .ok_or_else(|| PdoptError::config("problem.family", "consensus mode needs a consensus family"))?;
            run_consensus_mode(cfg, c)?
        }
        Mode::Probe => {
            let c = generated
                .into_consensus()
                .ok_or_else(|| PdoptError::config("problem.family", "probe mode needs a consensus family"))?;
            (probe(cfg, &c)?, None)
        }
    };
    let final_residual = trace.as_ref().and_then(|t| t.last).map(|(_, r)| r);
    if let (Some(trace), Some(path)) = (&trace, &cfg.output.trace) {
        write_text(&cfg.resolve(path), &trace.render())?;
    }
    let report = RunReport {
        mode: cfg.mode,
        family: cfg.problem.family.clone(),
        seed: cfg.seed,
        status: outcome.status,
        iterations: outcome.iterations,
        final_residual,
        certificate: outcome.certificate,
        consensus: outcome.consensus,
        message: outcome.message,
        wall_time_s: started.elapsed().as_secs_f64(),
    };
    if let Some(path) = &cfg.output.report {
        write_text(&cfg.resolve(path), &report.to_json())?;
    }
    Ok(report)
}

fn pd_params(cfg: &ExperimentConfig) -> Result<PdParams> {
    let p = &cfg.params;
    Ok(PdParams {
        gamma: p.gamma()?,
        lambda: p.lambda()?,
        theta: p.theta.into(),
        max_iters: p.max_iters,
        tol: p.tol,
        trace_every: cfg.output.trace_every,
        allow_infeasible: p.allow_infeasible,
        divergence_norm: p.divergence_norm,
    })
}

fn run_pd(cfg: &ExperimentConfig, pd: PdInstance) -> Result<(Outcome, Option<Trace>)> {
    let params = pd_params(cfg)?;
    let mut trace = Trace::new(PD_HEADER);
    let mut out = Outcome::new(Status::MaxIters);
    let solver = match PrimalDual::new(&pd.spec, params) {
        Ok(s) => s,
        Err(e) => {
            // report whatever the relaxed certificate says about the failure
            out.certificate = certify_with(&pd.spec, cfg.params.gamma()?, cfg.params.lambda()?, cfg.params.theta.into(), true)
                .ok()
                .map(|c| CertificateSnapshot::from(&c));
            classify(e, &mut out)?;
            return Ok((out, Some(trace)));
        }
    };
    out.certificate = Some(CertificateSnapshot::from(solver.cert()));
    let result = solver.solve_observed(pd.x0, pd.s0, pd.reference.as_ref(), &mut |r| {
        trace.push(r.k, r.residual, pd_row(r));
    });
    match result {
        Ok(o) => {
            out.status = o.status.into();
            out.iterations = o.state.k;
        }
        Err(e) => classify(e, &mut out)?,
    }
    Ok((out, Some(trace)))
}

fn certify_pd(cfg: &ExperimentConfig, pd: &PdInstance) -> Result<Outcome> {
    let p = &cfg.params;
    let cert = certify_with(&pd.spec, p.gamma()?, p.lambda()?, p.theta.into(), true)?;
    let status = if cert.feasibility.is_feasible() {
        Status::Certified
    } else {
        Status::Infeasible
    };
    let mut out = Outcome::new(status);
    if status == Status::Infeasible {
        out.message = Some(describe_infeasibility(&cert));
    }
    out.certificate = Some(CertificateSnapshot::from(&cert));
    Ok(out)
}

fn describe_infeasibility(c: &CertBundle) -> String {
    let f = c.feasibility;
    let mut why = Vec::new();
    if !f.dual_within_bound {
        why.push(format!("λ·λ_max(G) = {} is not below 4/3", c.scaled_lambda()));
    }
    if !f.primal_step_admissible {
        why.push(format!("γ = {} is not below 2β = {}", c.gamma, 2.0 * c.beta.value()));
    }
    if !f.m1_positive_definite {
        why.push(format!("M₁ is not positive definite (λ_min = {})", c.m1_min_eig));
    }
    why.join("; ")
}

fn consensus_snapshot(prob: &ConsensusProblem, alpha: Option<f64>, quadratic: bool) -> Result<ConsensusSnapshot> {
    let w = prob.mixing().matrix();
    let l = prob.lipschitz();
    let mut snap = ConsensusSnapshot {
        alpha,
        lipschitz: l,
        strong_convexity: prob.strong_convexity(),
        w_min_eig: prob.mixing().min_eig(),
        classic_bound: stepsize_bound(w, l, StepsizeRegime::Classic)?,
        extended_bound: stepsize_bound(w, l, StepsizeRegime::Extended)?,
        amplification: None,
        rho2: None,
        theta: None,
        primal_weight: None,
        certificate_error: None,
    };
    if let Some(alpha) = alpha {
        if quadratic {
            snap.amplification = Some(extra_amplification(w, alpha, l)?);
        }
        match consensus_rate_certificate(prob, alpha) {
            Ok(c) => fill_rate(&mut snap, &c),
            Err(e) => snap.certificate_error = Some(e.to_string()),
        }
    }
    Ok(snap)
}

fn fill_rate(snap: &mut ConsensusSnapshot, c: &ConsensusCertificate) {
    snap.rho2 = Some(c.rho2);
    snap.theta = Some(c.theta);
    snap.primal_weight = Some(c.primal_weight);
}

fn is_quadratic_family(cfg: &ExperimentConfig) -> bool {
    cfg.problem.family == "consensus-quadratic"
}

fn certify_consensus(cfg: &ExperimentConfig, c: &ConsensusInstance) -> Result<Outcome> {
    let alpha = cfg.params.alpha()?;
    let snap = consensus_snapshot(&c.problem, Some(alpha), is_quadratic_family(cfg))?;
    let mut out = Outcome::new(if snap.rho2.is_some() {
        Status::Certified
    } else {
        Status::Infeasible
    });
    out.message = snap.certificate_error.clone();
    if let Ok(cert) = consensus_rate_certificate(&c.problem, alpha) {
        out.certificate = Some(CertificateSnapshot::from(&cert.cert));
    }
    out.consensus = Some(snap);
    Ok(out)
}

fn run_consensus_mode(cfg: &ExperimentConfig, c: ConsensusInstance) -> Result<(Outcome, Option<Trace>)> {
    let p = &cfg.params;
    let opts = RunOptions {
        max_iters: p.max_iters,
        tol: p.tol,
        trace_every: cfg.output.trace_every,
        divergence_norm: p.divergence_norm,
    };
    let method = match p.method {
        ConsensusMethodSpec::PgExtra | ConsensusMethodSpec::Threaded => ConsensusMethod::PgExtra { alpha: p.alpha()? },
        ConsensusMethodSpec::NodeLocal => ConsensusMethod::NodeLocal { alpha: p.alpha()? },
        ConsensusMethodSpec::Dual => match p.alpha {
            Some(alpha) => ConsensusMethod::dual_of(alpha),
            None => ConsensusMethod::DualForm {
                gamma: p.gamma()?,
                lambda: p.lambda()?,
            },
        },
    };
    let alpha = match method {
        ConsensusMethod::PgExtra { alpha } | ConsensusMethod::NodeLocal { alpha } => Some(alpha),
        ConsensusMethod::DualForm { gamma, lambda } | ConsensusMethod::Eliminated { gamma, lambda } => {
            (lambda == 0.5).then(|| 1.0 / (2.0 * gamma))
        }
    };
    let mut out = Outcome::new(Status::MaxIters);
    out.consensus = Some(consensus_snapshot(&c.problem, alpha, is_quadratic_family(cfg))?);
    let mut trace = Trace::new(CONSENSUS_HEADER);
    let observer = |r: &ConsensusTraceRecord| trace.push(r.k, r.residual, consensus_row(r));
    let prob = &c.problem;
    let result = if p.method == ConsensusMethodSpec::Threaded {
        let alpha = p.alpha()?;
        let workers = default_workers();
        run_consensus_with(prob, |st| threaded_round(prob, alpha, st, workers), c.x0, &opts, c.reference.as_ref(), observer)
    } else {
        run_consensus(prob, method, c.x0, &opts, c.reference.as_ref(), observer)
    };
    match result {
        Ok(o) => {
            out.status = o.status.into();
            out.iterations = o.state.k;
        }
        Err(e) => classify(e, &mut out)?,
    }
    Ok((out, Some(trace)))
}

/// Amplification within this distance of `1` is reported as marginal.
pub const MARGINAL_AMPLIFICATION: f64 = 1e-12;

/// `converged` below one, `diverged` above, `max_iters` (neither) at one.
pub fn amplification_verdict(amp: f64) -> Status {
    if (amp - 1.0).abs() <= MARGINAL_AMPLIFICATION {
        Status::MaxIters
    } else if amp < 1.0 {
        Status::Converged
    } else {
        Status::Diverged
    }
}

/// Predicts convergence from the per-mode amplification alone.
fn probe(cfg: &ExperimentConfig, c: &ConsensusInstance) -> Result<Outcome> {
    let alpha = cfg.params.alpha()?;
    let snap = consensus_snapshot(&c.problem, Some(alpha), true)?;
    let amp = snap.amplification.expect("computed for probes");
    let mut out = Outcome::new(amplification_verdict(amp));
    out.message = Some(format!("amplification {} at α = {alpha}", fmt_f64(amp)));
    out.consensus = Some(snap);
    Ok(out)
}
