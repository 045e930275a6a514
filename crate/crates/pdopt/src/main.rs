use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use pdopt::config::{ExperimentConfig, Mode};
use pdopt::format::{fmt_f64, read_edge_list, read_matrix, write_text};
use pdopt::sweep::{parse_grid, render_sweep, sweep_stepsize, Grid};
use pdopt::run::amplification_verdict;
use pdopt::{run, PdoptError, Status};
use pdopt_core::consensus::{
    extra_amplification, metropolis_weights, stepsize_bound, MixingMatrix, MixingMode, StepsizeRegime,
};

const USAGE_EXIT: u8 = 1;

#[derive(Parser)]
#[command(name = "pdopt", version, about = "Primal-dual splitting and decentralized EXTRA experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the primal-dual iteration on a configured problem.
    Solve(ConfigArgs),
    /// Run PG-EXTRA (or its dual form) on a configured network.
    Consensus(ConfigArgs),
    /// Evaluate the rate certificate without iterating.
    Certify(ConfigArgs),
    /// Tabulate the EXTRA amplification factor over a stepsize grid.
    Probe(ProbeArgs),
    /// Run a configured experiment once per grid point.
    Sweep(SweepArgs),
}

#[derive(Args)]
struct ConfigArgs {
    #[arg(short, long)]
    config: PathBuf,
    /// Also print the JSON report to stdout.
    #[arg(long)]
    json: bool,
}

#[derive(Args)]
struct ProbeArgs {
    /// Probe-mode config, evaluated at its `params.alpha`.
    #[arg(short, long, conflicts_with_all = ["graph", "mixing", "alpha_grid"], required_unless_present = "graph")]
    config: Option<PathBuf>,
    #[arg(long)]
    json: bool,
    /// Edge list; Metropolis weights unless `--mixing` is given.
    #[arg(long, requires = "alpha_grid")]
    graph: Option<PathBuf>,
    #[arg(long)]
    mixing: Option<PathBuf>,
    /// `a:b:step` or a comma-separated list.
    #[arg(long)]
    alpha_grid: Option<String>,
    /// Curvature `L` of the node terms.
    #[arg(long, default_value_t = 1.0)]
    lipschitz: f64,
    /// Write the table here instead of stdout.
    #[arg(short, long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
#[group(required = true, multiple = false, id = "grid")]
struct GridArgs {
    #[arg(long)]
    alpha_grid: Option<String>,
    #[arg(long)]
    lambda_grid: Option<String>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(short, long)]
    config: PathBuf,
    #[command(flatten)]
    grid: GridArgs,
    #[arg(short, long)]
    out: Option<PathBuf>,
}

fn run_config(args: &ConfigArgs, mode: Mode) -> Result<u8, PdoptError> {
    run_config_file(&args.config, args.json, mode)
}

fn run_config_file(path: &Path, json: bool, mode: Mode) -> Result<u8, PdoptError> {
    let cfg = ExperimentConfig::load(path)?;
    if cfg.mode != mode {
        return Err(PdoptError::Config {
            field: "mode".into(),
            message: format!("config declares {:?} but the {mode:?} command was used", cfg.mode),
        });
    }
    let report = run(&cfg)?;
    if json {
        println!("{}", report.to_json());
    } else {
        let status = serde_json::to_value(report.status).expect("status serializes");
        println!(
            "status={} iterations={} final_residual={}",
            status.as_str().unwrap_or_default(),
            report.iterations,
            report.final_residual.map(fmt_f64).unwrap_or_else(|| "-".into())
        );
        if let Some(m) = &report.message {
            println!("{m}");
        }
    }
    Ok(report.exit_code() as u8)
}

fn probe(args: &ProbeArgs) -> Result<u8, PdoptError> {
    let (Some(graph), Some(grid)) = (&args.graph, &args.alpha_grid) else {
        let config = args.config.as_deref().expect("clap requires a config or a graph");
        return run_config_file(config, args.json, Mode::Probe);
    };
    let graph = read_edge_list(graph)?;
    let w = match &args.mixing {
        Some(path) => MixingMatrix::new(read_matrix(path)?, MixingMode::Relaxed)?,
        None => metropolis_weights(&graph)?,
    };
    if !w.conforms_to(&graph) {
        return Err(pdopt_core::Error::InvalidMixing("weights outside the graph's edges").into());
    }
    let alphas = parse_grid(grid)?;
    let l = args.lipschitz;
    let classic = stepsize_bound(w.matrix(), l, StepsizeRegime::Classic)?;
    let extended = stepsize_bound(w.matrix(), l, StepsizeRegime::Extended)?;
    let mut out = String::from("alpha,amplification,classic_bound,extended_bound,prediction\n");
    for a in alphas {
        let amp = extra_amplification(w.matrix(), a, l)?;
        let prediction = match amplification_verdict(amp) {
            Status::Converged => "converged",
            Status::Diverged => "diverged",
            _ => "marginal",
        };
        out.push_str(&format!(
            "{},{},{},{},{prediction}\n",
            fmt_f64(a),
            fmt_f64(amp),
            fmt_f64(classic),
            fmt_f64(extended)
        ));
    }
    emit(args.out.as_ref(), &out)?;
    Ok(0)
}

fn sweep(args: &SweepArgs) -> Result<u8, PdoptError> {
    let cfg = ExperimentConfig::load(&args.config)?;
    let grid = match (&args.grid.alpha_grid, &args.grid.lambda_grid) {
        (Some(a), _) => Grid::Alpha(parse_grid(a)?),
        (_, Some(l)) => Grid::Lambda(parse_grid(l)?),
        _ => unreachable!("clap requires one grid"),
    };
    let rows = sweep_stepsize(&cfg, &grid)?;
    emit(args.out.as_ref(), &render_sweep(&grid, &rows))?;
    Ok(0)
}

fn emit(path: Option<&PathBuf>, text: &str) -> Result<(), PdoptError> {
    match path {
        Some(p) => write_text(p, text),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if e.use_stderr() => {
            let _ = e.print();
            return ExitCode::from(USAGE_EXIT);
        }
        Err(e) => e.exit(),
    };
    let result = match &cli.command {
        Command::Solve(a) => run_config(a, Mode::Solve),
        Command::Consensus(a) => run_config(a, Mode::Consensus),
        Command::Certify(a) => run_config(a, Mode::Certify),
        Command::Probe(a) => probe(a),
        Command::Sweep(a) => sweep(a),
    };
    match result {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(USAGE_EXIT)
        }
    }
}
