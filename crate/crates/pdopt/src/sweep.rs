//! Stepsize sweeps: one independent run per grid point, classic and extended
//! feasibility side by side.

use std::fmt::Write as _;
use std::thread;

use pdopt_core::consensus::{extra_amplification, run_consensus, stepsize_bound, ConsensusMethod, RunOptions, StepsizeRegime};
use pdopt_core::pdsolver::{certify_with, PdParams, PrimalDual, ThetaPolicy};
use pdopt_core::Error;

use crate::config::ExperimentConfig;
use crate::error::{PdoptError, Result};
use crate::format::{fmt_f64, fmt_opt};
use crate::generate::generate_problem;
use crate::run::Status;
use crate::threaded::default_workers;

/// EXTRA stepsizes `α` for a consensus config, or dual stepsizes `λ` (at the
/// configured `γ`) for a primal-dual config.
#[derive(Debug, Clone, PartialEq)]
pub enum Grid {
    Alpha(Vec<f64>),
    Lambda(Vec<f64>),
}

impl Grid {
    fn values(&self) -> &[f64] {
        match self {
            Grid::Alpha(v) | Grid::Lambda(v) => v,
        }
    }

    fn name(&self) -> &'static str {
        match self {
            Grid::Alpha(_) => "alpha",
            Grid::Lambda(_) => "lambda",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub value: f64,
    pub classic_feasible: bool,
    pub extended_feasible: bool,
    pub status: Status,
    pub iterations: usize,
    pub final_residual: Option<f64>,
    /// Per-iteration residual ratio, geometric mean over the second half of
    /// the run.
    pub contraction: Option<f64>,
    /// Per-mode amplification (α sweeps only).
    pub amplification: Option<f64>,
}

/// `a:b:step` (inclusive of `b` up to rounding) or a comma-separated list.
pub fn parse_grid(spec: &str) -> Result<Vec<f64>> {
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| PdoptError::config("grid", format!("not a number: `{t}`")))
    };
    let parts: Vec<&str> = spec.split(':').collect();
    match parts.as_slice() {
        [a, b, step] => {
            let (a, b, step) = (num(a)?, num(b)?, num(step)?);
            if !(step > 0.0) || !(b >= a) || !a.is_finite() || !b.is_finite() {
                return Err(PdoptError::config("grid", format!("invalid range `{spec}`")));
            }
            let count = ((b - a) / step + 1e-9).floor() as usize;
            Ok((0..=count).map(|i| a + i as f64 * step).collect())
        }
        [_] => spec.split(',').map(num).collect(),
        _ => Err(PdoptError::config("grid", format!("expected `a:b:step` or a list, got `{spec}`"))),
    }
}

fn check_grid(values: &[f64]) -> Result<()> {
    if values.is_empty() {
        return Err(PdoptError::config("grid", "empty grid"));
    }
    if values.iter().any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(PdoptError::config("grid", "values must be positive and finite"));
    }
    if values.windows(2).any(|w| w[1] <= w[0]) {
        return Err(PdoptError::config("grid", "values must be strictly ascending"));
    }
    Ok(())
}

/// Geometric mean of `r_{k+1}/r_k` over the second half of `(k, r)` rows.
pub fn measured_contraction(rows: &[(usize, f64)]) -> Option<f64> {
    let rows: Vec<(usize, f64)> = rows.iter().copied().filter(|(_, r)| *r > 0.0 && r.is_finite()).collect();
    if rows.len() < 2 {
        return None;
    }
    let (k0, r0) = rows[(rows.len() - 1) / 2];
    let (k1, r1) = rows[rows.len() - 1];
    (k1 > k0).then(|| (r1 / r0).powf(1.0 / (k1 - k0) as f64))
}

/// Runs the config once per grid point, in parallel, rows in grid order.
pub fn sweep_stepsize(cfg: &ExperimentConfig, grid: &Grid) -> Result<Vec<SweepRow>> {
    check_grid(grid.values())?;
    match (grid, cfg.is_consensus()) {
        (Grid::Alpha(_), false) => return Err(PdoptError::config("problem.family", "an α grid needs a consensus family")),
        (Grid::Lambda(_), true) => return Err(PdoptError::config("problem.family", "a λ grid needs a primal-dual family")),
        _ => {}
    }
    let values = grid.values();
    let workers = default_workers().min(values.len());
    let chunk = values.len().div_ceil(workers);
    thread::scope(|s| {
        let handles: Vec<_> = values
            .chunks(chunk)
            .map(|part| {
                s.spawn(move || {
                    part.iter()
                        .map(|&v| match grid {
                            Grid::Alpha(_) => alpha_point(cfg, v),
                            Grid::Lambda(_) => lambda_point(cfg, v),
                        })
                        .collect::<Result<Vec<_>>>()
                })
            })
            .collect();
        let mut rows = Vec::with_capacity(values.len());
        for h in handles {
            rows.extend(h.join().expect("sweep worker panicked")?);
        }
        Ok(rows)
    })
}

fn finish(rows: &[(usize, f64)], result: std::result::Result<(Status, usize), Error>) -> Result<(Status, usize)> {
    match result {
        Ok(r) => Ok(r),
        Err(Error::Diverged { iteration }) => Ok((Status::Diverged, iteration)),
        Err(e) => Err(e.into()),
    }
    .map(|(s, k)| (s, k.max(rows.last().map_or(0, |r| r.0))))
}

fn alpha_point(cfg: &ExperimentConfig, alpha: f64) -> Result<SweepRow> {
    let inst = generate_problem(&cfg.problem, &cfg.base_dir, cfg.seed)?
        .into_consensus()
        .expect("consensus family");
    let prob = &inst.problem;
    let w = prob.mixing().matrix();
    let l = prob.lipschitz();
    let opts = RunOptions {
        max_iters: cfg.params.max_iters,
        tol: cfg.params.tol,
        trace_every: 1,
        divergence_norm: cfg.params.divergence_norm,
    };
    let mut rows = Vec::new();
    let result = run_consensus(
        prob,
        ConsensusMethod::PgExtra { alpha },
        inst.x0,
        &opts,
        inst.reference.as_ref(),
        |r| rows.push((r.k, r.residual)),
    )
    .map(|o| (o.status.into(), o.state.k));
    let (status, iterations) = finish(&rows, result)?;
    Ok(SweepRow {
        value: alpha,
        classic_feasible: alpha < stepsize_bound(w, l, StepsizeRegime::Classic)?,
        extended_feasible: alpha < stepsize_bound(w, l, StepsizeRegime::Extended)?,
        status,
        iterations,
        final_residual: rows.last().map(|r| r.1),
        contraction: measured_contraction(&rows),
        amplification: Some(extra_amplification(w, alpha, l)?),
    })
}

fn lambda_point(cfg: &ExperimentConfig, lambda: f64) -> Result<SweepRow> {
    let inst = generate_problem(&cfg.problem, &cfg.base_dir, cfg.seed)?
        .into_pd()
        .expect("primal-dual family");
    let gamma = cfg.params.gamma()?;
    let cert = certify_with(&inst.spec, gamma, lambda, ThetaPolicy::Auto, true)?;
    let classic_feasible = cert.scaled_lambda() < 1.0 && cert.feasibility.primal_step_admissible;
    let extended_feasible = cert.feasibility.is_feasible();
    let params = PdParams {
        gamma,
        lambda,
        theta: ThetaPolicy::Auto,
        max_iters: cfg.params.max_iters,
        tol: cfg.params.tol,
        trace_every: 1,
        allow_infeasible: true,
        divergence_norm: cfg.params.divergence_norm,
    };
    let solver = PrimalDual::new(&inst.spec, params)?;
    let mut rows = Vec::new();
    let result = solver
        .solve_observed(inst.x0, inst.s0, None, &mut |r| rows.push((r.k, r.residual)))
        .map(|o| (o.status.into(), o.state.k));
    let (status, iterations) = finish(&rows, result)?;
    Ok(SweepRow {
        value: lambda,
        classic_feasible,
        extended_feasible,
        status,
        iterations,
        final_residual: rows.last().map(|r| r.1),
        contraction: measured_contraction(&rows),
        amplification: None,
    })
}

pub fn render_sweep(grid: &Grid, rows: &[SweepRow]) -> String {
    let mut out = format!(
        "{},classic_feasible,extended_feasible,status,iterations,final_residual,contraction,amplification\n",
        grid.name()
    );
    for r in rows {
        let status = serde_json::to_value(r.status).expect("status serializes");
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{}",
            fmt_f64(r.value),
            r.classic_feasible,
            r.extended_feasible,
            status.as_str().unwrap_or_default(),
            r.iterations,
            fmt_opt(r.final_residual),
            fmt_opt(r.contraction),
            fmt_opt(r.amplification)
        );
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grids() {
        assert_eq!(parse_grid("0.1:0.3:0.1").unwrap().len(), 3);
        assert_eq!(parse_grid("0.49,0.51").unwrap(), vec![0.49, 0.51]);
        assert!(parse_grid("1:0:0.1").is_err());
        assert!(parse_grid("a:b").is_err());
        assert!(check_grid(&[]).is_err());
        assert!(check_grid(&[0.2, 0.1]).is_err());
        assert!(check_grid(&[0.1, 0.2]).is_ok());
    }

    #[test]
    fn contraction_of_geometric_sequence() {
        let rows: Vec<(usize, f64)> = (1..=20).map(|k| (k, 0.5f64.powi(k as i32))).collect();
        assert!((measured_contraction(&rows).unwrap() - 0.5).abs() < 1e-12);
        assert_eq!(measured_contraction(&rows[..1]), None);
    }
}
