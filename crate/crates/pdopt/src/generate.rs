//! Deterministic problem instances. All randomness comes from the seed
//! through `Xoshiro256PlusPlus`; declared constants (`L`, `τ`) are computed
//! from the generated data by the oracles themselves.

use std::path::Path;

use pdopt_core::consensus::{metropolis_weights, ConsensusProblem, Graph, MixingMatrix, MixingMode};
use pdopt_core::linalg::Cholesky;
use pdopt_core::operators::{
    linear_oracle, BoxIndicator, IndicatorZero, L1Norm, LinearOperator, ProxOracle, Quadratic, ScaledDistance,
    SmoothOracle, SquaredNorm, ZeroProx, ZeroSmooth,
};
use pdopt_core::pdsolver::{FixedPoint, ProblemSpec};
use pdopt_core::rng::{index, seeded, uniform, Xoshiro256PlusPlus};
use pdopt_core::{DenseMatrix, DenseVector};

use crate::config::{GraphSpec, MatrixSource, MixingSpec, ProblemBlock, ProxSpec, SmoothSpec};
use crate::error::{PdoptError, Result};
use crate::format::{read_edge_list, read_matrix};

pub const FAMILIES: [&str; 6] = [
    "lasso",
    "least-squares",
    "papc",
    "explicit",
    "consensus-quadratic",
    "consensus-lasso",
];

pub struct PdInstance {
    pub spec: ProblemSpec,
    pub x0: DenseVector,
    pub s0: DenseVector,
    /// Saddle point when it has a closed form.
    pub reference: Option<FixedPoint>,
}

pub struct ConsensusInstance {
    pub problem: ConsensusProblem,
    pub x0: DenseMatrix,
    /// `X*` when it has a closed form.
    pub reference: Option<DenseMatrix>,
}

pub enum Generated {
    Pd(PdInstance),
    Consensus(ConsensusInstance),
}

impl Generated {
    pub fn into_pd(self) -> Option<PdInstance> {
        match self {
            Generated::Pd(p) => Some(p),
            Generated::Consensus(_) => None,
        }
    }

    pub fn into_consensus(self) -> Option<ConsensusInstance> {
        match self {
            Generated::Consensus(c) => Some(c),
            Generated::Pd(_) => None,
        }
    }
}

pub fn random_vector(rng: &mut Xoshiro256PlusPlus, n: usize, lo: f64, hi: f64) -> DenseVector {
    (0..n).map(|_| uniform(rng, lo, hi)).collect()
}

/// Entries uniform in `[−1, 1]`.
pub fn random_matrix(rng: &mut Xoshiro256PlusPlus, rows: usize, cols: usize) -> DenseMatrix {
    let data = (0..rows * cols).map(|_| uniform(rng, -1.0, 1.0)).collect();
    DenseMatrix::from_row_major(rows, cols, data).expect("sized")
}

/// Random spanning tree plus up to `n` extra chords.
pub fn random_connected_graph(rng: &mut Xoshiro256PlusPlus, n: usize) -> Result<Graph> {
    let mut edges: Vec<(usize, usize)> = (1..n).map(|i| (index(rng, i), i)).collect();
    for _ in 0..n {
        let (a, b) = (index(rng, n), index(rng, n));
        let e = (a.min(b), a.max(b));
        if a != b && !edges.iter().any(|&(x, y)| (x.min(y), x.max(y)) == e) {
            edges.push(e);
        }
    }
    Ok(Graph::new(n, &edges)?)
}

pub fn swap_mixing() -> MixingMatrix {
    let w = DenseMatrix::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
    MixingMatrix::new(w, MixingMode::Relaxed).expect("valid in relaxed mode")
}

fn size_of(field: &str, v: Option<usize>) -> Result<usize> {
    match v {
        Some(0) => Err(PdoptError::config(format!("problem.{field}"), "must be at least 1")),
        Some(n) => Ok(n),
        None => Err(PdoptError::config(format!("problem.{field}"), "required for this family")),
    }
}

fn load_matrix(src: &MatrixSource, base: &Path) -> Result<DenseMatrix> {
    match src {
        MatrixSource::Rows(rows) => {
            let cols = rows.first().map_or(0, Vec::len);
            if rows.iter().any(|r| r.len() != cols) {
                return Err(PdoptError::config("problem", "ragged matrix rows"));
            }
            Ok(DenseMatrix::from_row_major(rows.len(), cols, rows.concat())?)
        }
        MatrixSource::File { file } => read_matrix(&resolve(base, file)),
    }
}

fn resolve(base: &Path, p: &Path) -> std::path::PathBuf {
    if p.is_absolute() {
        p.to_path_buf()
    } else {
        base.join(p)
    }
}

fn build_smooth(spec: &SmoothSpec, base: &Path) -> Result<Box<dyn SmoothOracle>> {
    Ok(match spec {
        SmoothSpec::Zero { dim } => Box::new(ZeroSmooth::new(*dim)),
        SmoothSpec::Linear { b } => Box::new(linear_oracle(b.clone().into())),
        SmoothSpec::Quadratic { k, y } => Box::new(Quadratic::new(load_matrix(k, base)?, y.clone().into())?),
        SmoothSpec::Distance { weight, center } => Box::new(ScaledDistance::new(*weight, center.clone().into())?),
    })
}

fn build_prox(spec: &ProxSpec) -> Result<Box<dyn ProxOracle>> {
    Ok(match spec {
        ProxSpec::Zero { dim } => Box::new(ZeroProx::new(*dim)),
        ProxSpec::L1 { dim, weight } => Box::new(L1Norm::new(*dim, *weight)),
        ProxSpec::Box { lo, hi } => Box::new(BoxIndicator::new(lo.clone().into(), hi.clone().into())?),
        ProxSpec::SquaredNorm { dim, scale } => Box::new(SquaredNorm::new(*dim, *scale)?),
        ProxSpec::IndicatorZero { dim } => Box::new(IndicatorZero::new(*dim)),
    })
}

fn start(v: &Option<Vec<f64>>, n: usize, field: &str) -> Result<DenseVector> {
    match v {
        None => Ok(DenseVector::zeros(n)),
        Some(v) if v.len() == n => Ok(v.clone().into()),
        Some(v) => Err(PdoptError::config(
            format!("problem.{field}"),
            format!("expected length {n}, found {}", v.len()),
        )),
    }
}

/// Builds the instance named by `block.family`. `base` anchors relative file
/// paths.
pub fn generate_problem(block: &ProblemBlock, base: &Path, seed: u64) -> Result<Generated> {
    let mut rng = seeded(seed);
    let weight = block.weight.unwrap_or(0.5);
    match block.family.as_str() {
        "lasso" => {
            let n = size_of("size", block.size)?;
            let k = if block.identity_operator {
                DenseMatrix::identity(n)
            } else {
                random_matrix(&mut rng, n + 2, n)
            };
            let y = random_vector(&mut rng, k.rows(), -2.0, 2.0);
            let reference = block.identity_operator.then(|| {
                // x* = soft-threshold(y, w), s* = y − x*
                let x: DenseVector = y.iter().map(|v| v.signum() * (v.abs() - weight).max(0.0)).collect();
                let s = y.sub(&x);
                FixedPoint { x, s }
            });
            let spec = ProblemSpec::new(
                Quadratic::new(k, y)?,
                L1Norm::new(n, weight),
                ZeroSmooth::new(n),
                LinearOperator::identity(n),
            )?;
            pd_instance(spec, block, reference)
        }
        "least-squares" => {
            let n = size_of("size", block.size)?;
            let k = random_matrix(&mut rng, n + 2, n);
            let y = random_vector(&mut rng, n + 2, -2.0, 2.0);
            let normal = k.transpose().matmul(&k)?;
            let reference = Cholesky::new(&normal).ok().map(|c| FixedPoint {
                x: c.solve(&k.matvec_t(&y)),
                s: DenseVector::zeros(n),
            });
            let spec = ProblemSpec::new(
                Quadratic::new(k, y)?,
                ZeroProx::new(n),
                ZeroSmooth::new(n),
                LinearOperator::identity(n),
            )?;
            pd_instance(spec, block, reference)
        }
        "papc" => {
            let n = size_of("size", block.size)?;
            let m = size_of("dual_size", block.dual_size.or(Some(n)))?;
            let k = random_matrix(&mut rng, n + 2, n);
            let y = random_vector(&mut rng, n + 2, -2.0, 2.0);
            let a = random_matrix(&mut rng, m, n);
            let h: Box<dyn ProxOracle> = match &block.h {
                Some(h) => build_prox(h)?,
                None => Box::new(L1Norm::new(m, weight)),
            };
            let spec = ProblemSpec::from_boxed(
                Box::new(Quadratic::new(k, y)?),
                h,
                Box::new(ZeroSmooth::new(m)),
                a.into(),
            )?;
            pd_instance(spec, block, None)
        }
        "explicit" => {
            let need = |name: &str| PdoptError::config(format!("problem.{name}"), "required for the explicit family");
            let f = build_smooth(block.f.as_ref().ok_or_else(|| need("f"))?, base)?;
            let h = build_prox(block.h.as_ref().ok_or_else(|| need("h"))?)?;
            let a = load_matrix(block.a.as_ref().ok_or_else(|| need("a"))?, base)?;
            let lstar = match &block.lstar {
                Some(l) => build_smooth(l, base)?,
                None => Box::new(ZeroSmooth::new(a.rows())),
            };
            let spec = ProblemSpec::from_boxed(f, h, lstar, a.into())?;
            pd_instance(spec, block, None)
        }
        "consensus-quadratic" | "consensus-lasso" => consensus_instance(block, base, &mut rng, weight),
        other => Err(PdoptError::UnknownFamily(other.to_string())),
    }
}

fn pd_instance(spec: ProblemSpec, block: &ProblemBlock, reference: Option<FixedPoint>) -> Result<Generated> {
    let x0 = start(&block.x0, spec.primal_dim(), "x0")?;
    let s0 = start(&block.s0, spec.dual_dim(), "s0")?;
    Ok(Generated::Pd(PdInstance {
        spec,
        x0,
        s0,
        reference,
    }))
}

fn build_graph(block: &ProblemBlock, base: &Path, rng: &mut Xoshiro256PlusPlus) -> Result<(Graph, Option<MixingMatrix>)> {
    let spec = block
        .graph
        .as_ref()
        .ok_or_else(|| PdoptError::config("problem.graph", "required for consensus families"))?;
    let nodes = |n: usize| size_of("graph.nodes", Some(n));
    Ok(match spec {
        GraphSpec::Path { nodes: n } => (Graph::path(nodes(*n)?)?, None),
        GraphSpec::Ring { nodes: n } => (Graph::ring(nodes(*n)?)?, None),
        GraphSpec::Complete { nodes: n } => (Graph::complete(nodes(*n)?)?, None),
        GraphSpec::Star { nodes: n } => (Graph::star(nodes(*n)?)?, None),
        GraphSpec::Swap => (Graph::path(2)?, Some(swap_mixing())),
        GraphSpec::Random { nodes: n } => (random_connected_graph(rng, nodes(*n)?)?, None),
        GraphSpec::File { path } => (read_edge_list(&resolve(base, path))?, None),
    })
}

fn consensus_instance(block: &ProblemBlock, base: &Path, rng: &mut Xoshiro256PlusPlus, weight: f64) -> Result<Generated> {
    let (graph, preset) = build_graph(block, base, rng)?;
    let w = match (&block.mixing, preset) {
        (Some(MixingSpec::File { path, relaxed }), _) => {
            let mode = if *relaxed { MixingMode::Relaxed } else { MixingMode::Classic };
            MixingMatrix::new(read_matrix(&resolve(base, path))?, mode)?
        }
        (Some(MixingSpec::Metropolis), _) | (None, None) => metropolis_weights(&graph)?,
        (None, Some(w)) => w,
    };
    let n = graph.node_count();
    let p = size_of("dim", block.dim.or(Some(1)))?;
    let mut smooth: Vec<Box<dyn SmoothOracle>> = Vec::with_capacity(n);
    let mut prox: Vec<Box<dyn ProxOracle>> = Vec::with_capacity(n);
    let mut targets = DenseMatrix::zeros(n, p);
    let lasso = block.family == "consensus-lasso";
    for i in 0..n {
        let y = random_vector(rng, p, -2.0, 2.0);
        targets.row_mut(i).copy_from_slice(&y);
        if lasso {
            let k = random_matrix(rng, p + 2, p);
            let yk = random_vector(rng, p + 2, -2.0, 2.0);
            smooth.push(Box::new(Quadratic::new(k, yk)?));
            prox.push(Box::new(L1Norm::new(p, weight)));
        } else {
            smooth.push(Box::new(ScaledDistance::new(1.0, y)?));
            prox.push(Box::new(ZeroProx::new(p)));
        }
    }
    // the optimum of Σ ½‖x − yᵢ‖² is the mean target
    let reference = (!lasso).then(|| {
        let mut mean = DenseMatrix::zeros(n, p);
        for c in 0..p {
            let m = targets.column(c).iter().sum::<f64>() / n as f64;
            for i in 0..n {
                mean[(i, c)] = m;
            }
        }
        mean
    });
    let x0 = match &block.x0 {
        None => DenseMatrix::zeros(n, p),
        Some(v) if v.len() == n * p => DenseMatrix::from_row_major(n, p, v.clone())?,
        Some(v) => {
            return Err(PdoptError::config(
                "problem.x0",
                format!("expected {} entries (n·p), found {}", n * p, v.len()),
            ))
        }
    };
    let problem = ConsensusProblem::new(graph, w, smooth, prox)?;
    Ok(Generated::Consensus(ConsensusInstance { problem, x0, reference }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn block(family: &str) -> ProblemBlock {
        ProblemBlock {
            family: family.into(),
            size: Some(4),
            ..Default::default()
        }
    }

    #[test]
    fn unknown_and_empty() {
        assert!(matches!(
            generate_problem(&block("nope"), Path::new(""), 0),
            Err(PdoptError::UnknownFamily(_))
        ));
        let mut b = block("lasso");
        b.size = Some(0);
        assert!(generate_problem(&b, Path::new(""), 0).is_err());
    }

    #[test]
    fn deterministic_from_seed() {
        let x = |seed| {
            let g = generate_problem(&block("papc"), Path::new(""), seed).unwrap().into_pd().unwrap();
            g.spec.a().matrix().clone()
        };
        assert_eq!(x(5), x(5));
        assert_ne!(x(5), x(6));
    }

    #[test]
    fn swap_consensus_reference_is_mean() {
        let mut b = block("consensus-quadratic");
        b.graph = Some(GraphSpec::Swap);
        let c = generate_problem(&b, Path::new(""), 7).unwrap().into_consensus().unwrap();
        let r = c.reference.unwrap();
        assert_eq!(r[(0, 0)], r[(1, 0)]);
        assert!((c.problem.mixing().min_eig() + 1.0).abs() < 1e-12);
        assert_eq!(c.problem.lipschitz(), 1.0);
    }
}
