#![allow(dead_code)]

use pdopt_core::consensus::{metropolis_weights, ConsensusProblem, Graph, MixingMatrix, MixingMode};
use pdopt_core::operators::{L1Norm, ProxOracle, Quadratic, ScaledDistance, SmoothOracle, ZeroProx};
use pdopt_core::rng::{index, seeded, uniform, Xoshiro256PlusPlus};
use pdopt_core::{DenseMatrix, DenseVector};

pub fn random_vector(rng: &mut Xoshiro256PlusPlus, n: usize, lo: f64, hi: f64) -> DenseVector {
    (0..n).map(|_| uniform(rng, lo, hi)).collect()
}

pub fn random_matrix(rng: &mut Xoshiro256PlusPlus, rows: usize, cols: usize) -> DenseMatrix {
    let data = (0..rows * cols).map(|_| uniform(rng, -1.0, 1.0)).collect();
    DenseMatrix::from_row_major(rows, cols, data).unwrap()
}

/// Spanning tree plus a few random chords.
pub fn random_connected_graph(rng: &mut Xoshiro256PlusPlus, n: usize) -> Graph {
    let mut edges = Vec::new();
    for i in 1..n {
        edges.push((index(rng, i), i));
    }
    for _ in 0..n {
        let (a, b) = (index(rng, n), index(rng, n));
        let e = (a.min(b), a.max(b));
        if a != b && !edges.iter().any(|&(x, y)| (x.min(y), x.max(y)) == e) {
            edges.push(e);
        }
    }
    Graph::new(n, &edges).unwrap()
}

pub fn swap_mixing() -> MixingMatrix {
    MixingMatrix::new(DenseMatrix::from_rows(&[&[0.0, 1.0], &[1.0, 0.0]]), MixingMode::Relaxed).unwrap()
}

/// `sᵢ = ½‖xᵢ − yᵢ‖²`, `rᵢ = 0`.
pub fn distance_problem(graph: Graph, w: MixingMatrix, targets: &DenseMatrix) -> ConsensusProblem {
    let n = graph.node_count();
    let p = targets.cols();
    let smooth: Vec<Box<dyn SmoothOracle>> = (0..n)
        .map(|i| Box::new(ScaledDistance::new(1.0, DenseVector::from(targets.row(i))).unwrap()) as Box<dyn SmoothOracle>)
        .collect();
    let prox: Vec<Box<dyn ProxOracle>> = (0..n).map(|_| Box::new(ZeroProx::new(p)) as Box<dyn ProxOracle>).collect();
    ConsensusProblem::new(graph, w, smooth, prox).unwrap()
}

pub fn swap_problem() -> ConsensusProblem {
    let targets = DenseMatrix::from_rows(&[&[1.0], &[3.0]]);
    distance_problem(Graph::path(2).unwrap(), swap_mixing(), &targets)
}

/// Random quadratic `sᵢ = ½‖Kᵢx − yᵢ‖²` and `rᵢ = wᵢ‖x‖₁` on a random
/// connected graph with Metropolis weights.
pub fn random_lasso_consensus(seed: u64, l1: bool) -> (ConsensusProblem, DenseMatrix) {
    let mut rng = seeded(seed);
    let n = 2 + index(&mut rng, 11);
    let p = 1 + index(&mut rng, 4);
    let g = random_connected_graph(&mut rng, n);
    let w = metropolis_weights(&g).unwrap();
    let mut smooth: Vec<Box<dyn SmoothOracle>> = Vec::new();
    let mut prox: Vec<Box<dyn ProxOracle>> = Vec::new();
    for _ in 0..n {
        let k = random_matrix(&mut rng, p + 1, p);
        let y = random_vector(&mut rng, p + 1, -2.0, 2.0);
        smooth.push(Box::new(Quadratic::new(k, y).unwrap()));
        if l1 {
            prox.push(Box::new(L1Norm::new(p, uniform(&mut rng, 0.01, 0.3))));
        } else {
            prox.push(Box::new(ZeroProx::new(p)));
        }
    }
    let x0 = random_matrix(&mut rng, n, p);
    (ConsensusProblem::new(g, w, smooth, prox).unwrap(), x0)
}

pub fn max_abs_diff(a: &DenseMatrix, b: &DenseMatrix) -> f64 {
    a.sub(b).unwrap().max_abs()
}
