use std::path::Path;

use pdopt::config::{ExperimentConfig, GraphSpec, Mode, ProblemBlock};
use pdopt::generate::{generate_problem, random_connected_graph};
use pdopt::run::{run, Status, CONSENSUS_HEADER, PD_HEADER};
use pdopt::sweep::{sweep_stepsize, Grid};
use pdopt::threaded::threaded_round;
use pdopt_core::consensus::{simulate_round, ConsensusState};
use pdopt_core::pdsolver::{PdParams, PrimalDual};
use pdopt_core::rng::seeded;

fn configs() -> std::path::PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

/// Loads an example config with its outputs redirected into `out`.
fn load(name: &str, out: &Path) -> ExperimentConfig {
    let text = std::fs::read_to_string(configs().join(name)).unwrap();
    let mut cfg = ExperimentConfig::from_json(&text, configs()).unwrap();
    let stem = name.trim_end_matches(".json");
    cfg.output.trace = Some(out.join(format!("{stem}.csv")));
    cfg.output.report = Some(out.join(format!("{stem}.report.json")));
    cfg
}

fn family(name: &str) -> ProblemBlock {
    ProblemBlock {
        family: name.into(),
        size: Some(6),
        ..Default::default()
    }
}

#[test]
fn all_example_configs_run_within_budget() {
    let out = tempfile::tempdir().unwrap();
    let started = std::time::Instant::now();
    let mut names: Vec<String> = std::fs::read_dir(configs())
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .filter(|n| n.ends_with(".json"))
        .collect();
    names.sort();
    assert!(names.len() >= 8);
    for name in &names {
        let report = run(&load(name, out.path())).unwrap_or_else(|e| panic!("{name}: {e}"));
        let expected = match name.as_str() {
            "swap_diverge.json" | "swap_probe.json" => Status::Diverged,
            "swap_certify.json" | "papc_certify.json" => Status::Certified,
            _ => Status::Converged,
        };
        assert_eq!(report.status, expected, "{name}");
    }
    let secs = started.elapsed().as_secs_f64();
    assert!(secs < 60.0, "example configs took {secs} s");
}

#[test]
fn traces_are_byte_identical_across_runs() {
    for name in ["lasso_identity.json", "random_threaded.json", "ring_lasso_nodes.json", "swap_diverge.json"] {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        let ra = run(&load(name, a.path())).unwrap();
        let rb = run(&load(name, b.path())).unwrap();
        let stem = name.trim_end_matches(".json");
        let ta = std::fs::read(a.path().join(format!("{stem}.csv"))).unwrap();
        let tb = std::fs::read(b.path().join(format!("{stem}.csv"))).unwrap();
        assert!(!ta.is_empty());
        assert_eq!(ta, tb, "{name}");
        assert_eq!(ra.iterations, rb.iterations);
    }
}

#[test]
fn report_matches_trace_tail() {
    for name in ["scalar_lasso.json", "least_squares.json", "swap_converge.json", "swap_diverge.json", "file_graph.json"] {
        let out = tempfile::tempdir().unwrap();
        let report = run(&load(name, out.path())).unwrap();
        let stem = name.trim_end_matches(".json");
        let trace = std::fs::read_to_string(out.path().join(format!("{stem}.csv"))).unwrap();
        let header = trace.lines().next().unwrap();
        assert!(header == PD_HEADER || header == CONSENSUS_HEADER);
        let last: Vec<&str> = trace.lines().last().unwrap().split(',').collect();
        let residual: f64 = last[1].parse().unwrap();
        assert_eq!(report.final_residual.unwrap().to_bits(), residual.to_bits(), "{name}");
        let k: usize = last[0].parse().unwrap();
        match report.status {
            Status::Diverged => assert_eq!(k + 1, report.iterations),
            _ => assert_eq!(k, report.iterations),
        }
        let json = std::fs::read_to_string(out.path().join(format!("{stem}.report.json"))).unwrap();
        let back: pdopt::RunReport = serde_json::from_str(&json).unwrap();
        assert_eq!(back.status, report.status);
        assert_eq!(back.final_residual, report.final_residual);
    }
}

#[test]
fn scalar_lasso_hits_the_saddle_in_two_steps() {
    let out = tempfile::tempdir().unwrap();
    let report = run(&load("scalar_lasso.json", out.path())).unwrap();
    assert_eq!(report.status, Status::Converged);
    assert!(report.iterations <= 2);
}

#[test]
fn swap_consensus_optimum_is_the_mean_target() {
    let mut block = family("consensus-quadratic");
    block.graph = Some(GraphSpec::Swap);
    let inst = generate_problem(&block, Path::new(""), 7).unwrap().into_consensus().unwrap();
    let mean = inst.reference.unwrap()[(0, 0)];
    // targets are the centers of the node terms; their gradients at the mean cancel
    let g = inst.problem.gradient(&pdopt_core::DenseMatrix::from_rows(&[&[mean], &[mean]]));
    assert!((g[(0, 0)] + g[(1, 0)]).abs() < 1e-15);
    let again = generate_problem(&block, Path::new(""), 7).unwrap().into_consensus().unwrap();
    assert_eq!(again.reference.unwrap()[(0, 0)], mean);
}

#[test]
fn identity_lasso_matches_soft_threshold() {
    let mut block = family("lasso");
    block.identity_operator = true;
    block.weight = Some(0.5);
    let inst = generate_problem(&block, Path::new(""), 11).unwrap().into_pd().unwrap();
    let reference = inst.reference.clone().unwrap();
    // independent check: coordinatewise grid minimization of ½(x−y)² + w|x|
    let y = inst.spec.f().gradient(&[0.0; 6]).scaled(-1.0);
    for (i, yi) in y.iter().enumerate() {
        let best = (-40_000..=40_000)
            .map(|j| j as f64 * 1e-4)
            .min_by(|a, b| {
                let obj = |x: f64| 0.5 * (x - yi).powi(2) + 0.5 * x.abs();
                obj(*a).total_cmp(&obj(*b))
            })
            .unwrap();
        assert!((best - reference.x[i]).abs() <= 1e-4, "coordinate {i}");
    }
    let solver = PrimalDual::new(&inst.spec, PdParams { tol: 1e-13, ..PdParams::new(1.0, 1.0) }).unwrap();
    let outcome = solver.solve(inst.x0, inst.s0).unwrap();
    for i in 0..6 {
        assert!((outcome.state.x[i] - reference.x[i]).abs() < 1e-10);
        assert!((outcome.state.s[i] - reference.s[i]).abs() < 1e-10);
    }
}

#[test]
fn generator_errors() {
    let mut b = family("lasso");
    b.size = Some(0);
    assert!(generate_problem(&b, Path::new(""), 0).is_err());
    assert!(matches!(
        generate_problem(&family("ridge"), Path::new(""), 0),
        Err(pdopt::PdoptError::UnknownFamily(_))
    ));
    let mut c = family("consensus-quadratic");
    c.graph = Some(GraphSpec::Path { nodes: 0 });
    assert!(generate_problem(&c, Path::new(""), 0).is_err());
}

#[test]
fn threaded_round_is_bitwise_equal_to_simulation() {
    for seed in 0..5u64 {
        let mut rng = seeded(seed);
        let g = random_connected_graph(&mut rng, 9).unwrap();
        assert!(g.is_connected());
        let mut block = family("consensus-lasso");
        block.graph = Some(GraphSpec::Random { nodes: 9 });
        block.dim = Some(3);
        let inst = generate_problem(&block, Path::new(""), seed).unwrap().into_consensus().unwrap();
        let alpha = 0.05;
        let mut a = ConsensusState::new(&inst.problem, inst.x0.clone()).unwrap();
        let mut b = a.clone();
        for _ in 0..50 {
            a = simulate_round(&inst.problem, alpha, &a).unwrap();
            b = threaded_round(&inst.problem, alpha, &b, 4).unwrap();
        }
        assert_eq!(a, b);
    }
}

#[test]
fn alpha_sweep_on_swap_graph() {
    let out = tempfile::tempdir().unwrap();
    let cfg = load("swap_converge.json", out.path());
    let grid: Vec<f64> = vec![0.1, 0.2, 0.3, 0.4, 0.45, 0.49, 0.51];
    let rows = sweep_stepsize(&cfg, &Grid::Alpha(grid.clone())).unwrap();
    assert_eq!(rows.iter().map(|r| r.value).collect::<Vec<_>>(), grid);
    for r in &rows {
        if r.value <= 0.49 {
            assert_eq!(r.status, Status::Converged, "α = {}", r.value);
            assert!(r.extended_feasible && !r.classic_feasible);
            assert!(r.amplification.unwrap() < 1.0);
        } else {
            assert_eq!(r.status, Status::Diverged);
            assert!(!r.extended_feasible);
            assert!(r.contraction.unwrap() > 1.0);
        }
    }
    assert!(sweep_stepsize(&cfg, &Grid::Alpha(vec![])).is_err());
}

#[test]
fn lambda_sweep_between_the_two_bounds() {
    let out = tempfile::tempdir().unwrap();
    let cfg = load("papc_sweep.json", out.path());
    let inst = generate_problem(&cfg.problem, &cfg.base_dir, cfg.seed).unwrap().into_pd().unwrap();
    let lmax = pdopt_core::linalg::sym_eigs(inst.spec.gram()).unwrap().max();
    let classic = 1.0 / lmax;
    let extended = 4.0 / (3.0 * lmax);
    let grid = vec![
        0.5 * classic,
        0.95 * classic,
        classic + 0.25 * (extended - classic),
        classic + 0.75 * (extended - classic),
        0.99 * extended,
        1.5 * extended,
        2.0 * extended,
    ];
    let rows = sweep_stepsize(&cfg, &Grid::Lambda(grid)).unwrap();
    for r in &rows[..2] {
        assert!(r.classic_feasible && r.extended_feasible);
        assert_eq!(r.status, Status::Converged);
    }
    for r in &rows[2..5] {
        assert!(!r.classic_feasible && r.extended_feasible, "λ = {}", r.value);
        assert_eq!(r.status, Status::Converged, "λ = {}", r.value);
    }
    for r in &rows[5..] {
        assert!(!r.extended_feasible);
        assert_eq!(r.status, Status::Diverged, "λ = {}", r.value);
    }
}

#[test]
fn infeasible_solve_reports_status() {
    let out = tempfile::tempdir().unwrap();
    let mut cfg = load("scalar_lasso.json", out.path());
    cfg.params.lambda = Some(1.5);
    let report = run(&cfg).unwrap();
    assert_eq!(report.status, Status::Infeasible);
    assert_eq!(report.exit_code(), 4);
    assert!(!report.certificate.unwrap().dual_within_bound);
    assert_eq!(cfg.mode, Mode::Solve);
}
