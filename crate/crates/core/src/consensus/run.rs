use alloc::vec::Vec;

use super::{dual_form_step, eliminated_step, pg_extra_step, simulate_round, ConsensusProblem, ConsensusState};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::pdsolver::SolveStatus;

/// Which recursion drives a run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ConsensusMethod {
    PgExtra { alpha: f64 },
    /// PG-EXTRA computed node by node from neighbor messages.
    NodeLocal { alpha: f64 },
    DualForm { gamma: f64, lambda: f64 },
    Eliminated { gamma: f64, lambda: f64 },
}

impl ConsensusMethod {
    /// The dual form matching PG-EXTRA at stepsize `α`: `λ = 1/2`, `γ = 1/(2α)`.
    pub fn dual_of(alpha: f64) -> Self {
        ConsensusMethod::DualForm {
            gamma: 1.0 / (2.0 * alpha),
            lambda: 0.5,
        }
    }

    pub fn step(&self, prob: &ConsensusProblem, st: &ConsensusState) -> Result<ConsensusState> {
        match *self {
            ConsensusMethod::PgExtra { alpha } => pg_extra_step(prob, alpha, st),
            ConsensusMethod::NodeLocal { alpha } => simulate_round(prob, alpha, st),
            ConsensusMethod::DualForm { gamma, lambda } => dual_form_step(prob, gamma, lambda, st),
            ConsensusMethod::Eliminated { gamma, lambda } => eliminated_step(prob, gamma, lambda, st),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RunOptions {
    pub max_iters: usize,
    /// Stop once `‖X⁺ − X‖_F + ‖U⁺ − U‖_F` falls to this value. The `U` term
    /// is `γ‖(I − W)X⁺‖_F`, so a stalled but non-consensual `X` never stops.
    pub tol: f64,
    pub trace_every: usize,
    /// Any entry beyond this magnitude counts as divergence.
    pub divergence_norm: f64,
}

impl Default for RunOptions {
    fn default() -> Self {
        RunOptions {
            max_iters: 10_000,
            tol: 1e-10,
            trace_every: 1,
            divergence_norm: 1e12,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConsensusTraceRecord {
    pub k: usize,
    pub residual: f64,
    pub consensus_violation: f64,
    pub objective: Option<f64>,
    pub dist_to_opt: Option<f64>,
}

#[derive(Debug, Clone)]
pub struct ConsensusOutcome {
    pub state: ConsensusState,
    pub status: SolveStatus,
    pub residual: f64,
    pub trace: Vec<ConsensusTraceRecord>,
}

/// Runs `method` from `X⁰`. Every recorded trace row is passed to `observer`
/// as it is produced, so a caller keeps the prefix when the run diverges.
pub fn run_consensus(
    prob: &ConsensusProblem,
    method: ConsensusMethod,
    x0: DenseMatrix,
    opts: &RunOptions,
    reference: Option<&DenseMatrix>,
    observer: impl FnMut(&ConsensusTraceRecord),
) -> Result<ConsensusOutcome> {
    run_consensus_with(prob, |st| method.step(prob, st), x0, opts, reference, observer)
}

/// [`run_consensus`] with a caller-supplied step, e.g. a concurrent round.
pub fn run_consensus_with(
    prob: &ConsensusProblem,
    mut step: impl FnMut(&ConsensusState) -> Result<ConsensusState>,
    x0: DenseMatrix,
    opts: &RunOptions,
    reference: Option<&DenseMatrix>,
    mut observer: impl FnMut(&ConsensusTraceRecord),
) -> Result<ConsensusOutcome> {
    let every = opts.trace_every.max(1);
    let mut st = ConsensusState::new(prob, x0)?;
    let mut trace = Vec::new();
    let mut residual = f64::INFINITY;
    let mut status = SolveStatus::MaxIters;
    for _ in 0..opts.max_iters {
        let next = step(&st)?;
        if next.x.max_abs() > opts.divergence_norm || next.z.max_abs() > opts.divergence_norm {
            return Err(Error::Diverged { iteration: next.k });
        }
        residual = next.x.sub(&st.x)?.frobenius_norm() + next.u.sub(&st.u)?.frobenius_norm();
        st = next;
        let done = residual <= opts.tol;
        if st.k % every == 0 || done || st.k == opts.max_iters {
            let rec = ConsensusTraceRecord {
                k: st.k,
                residual,
                consensus_violation: prob.consensus_violation(&st.x),
                objective: prob.objective(&st.x),
                dist_to_opt: match reference {
                    Some(r) => Some(st.x.sub(r)?.frobenius_norm()),
                    None => None,
                },
            };
            observer(&rec);
            trace.push(rec);
        }
        if done {
            status = SolveStatus::Converged;
            break;
        }
    }
    Ok(ConsensusOutcome {
        state: st,
        status,
        residual,
        trace,
    })
}
