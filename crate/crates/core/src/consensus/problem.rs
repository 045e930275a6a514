use alloc::boxed::Box;
use alloc::vec::Vec;

use super::{Graph, MixingMatrix};
use crate::error::{Error, Result};
use crate::linalg::DenseMatrix;
use crate::operators::{ProxOracle, ProxStructure, SmoothOracle};

/// `min Σᵢ sᵢ(xᵢ) + rᵢ(xᵢ)` subject to `x₁ = ⋯ = xₙ`, each `xᵢ ∈ ℝᵖ`.
pub struct ConsensusProblem {
    graph: Graph,
    w: MixingMatrix,
    smooth: Vec<Box<dyn SmoothOracle>>,
    prox: Vec<Box<dyn ProxOracle>>,
    p: usize,
    lipschitz: f64,
    strong_convexity: f64,
}

impl ConsensusProblem {
    pub fn new(
        graph: Graph,
        w: MixingMatrix,
        smooth: Vec<Box<dyn SmoothOracle>>,
        prox: Vec<Box<dyn ProxOracle>>,
    ) -> Result<Self> {
        let n = graph.node_count();
        if !graph.is_connected() {
            return Err(Error::Disconnected);
        }
        if w.n() != n || smooth.len() != n || prox.len() != n {
            return Err(Error::DimensionMismatch {
                op: "consensus nodes",
                expected: n,
                found: if w.n() != n { w.n() } else if smooth.len() != n { smooth.len() } else { prox.len() },
            });
        }
        if !w.conforms_to(&graph) {
            return Err(Error::InvalidMixing("weights outside the graph's edges"));
        }
        let p = smooth[0].dim();
        for (s, r) in smooth.iter().zip(&prox) {
            if s.dim() != p || r.dim() != p {
                return Err(Error::DimensionMismatch {
                    op: "node dimension",
                    expected: p,
                    found: if s.dim() != p { s.dim() } else { r.dim() },
                });
            }
        }
        let lipschitz = smooth.iter().map(|s| s.lipschitz()).fold(0.0, f64::max);
        if !(lipschitz > 0.0) {
            return Err(Error::InvalidParameter {
                name: "lipschitz",
                value: lipschitz,
            });
        }
        let strong_convexity = smooth.iter().map(|s| s.strong_convexity()).fold(f64::INFINITY, f64::min);
        Ok(ConsensusProblem {
            graph,
            w,
            smooth,
            prox,
            p,
            lipschitz,
            strong_convexity,
        })
    }

    pub fn graph(&self) -> &Graph {
        &self.graph
    }

    pub fn mixing(&self) -> &MixingMatrix {
        &self.w
    }

    pub fn nodes(&self) -> usize {
        self.graph.node_count()
    }

    pub fn dim(&self) -> usize {
        self.p
    }

    /// `L = maxᵢ Lᵢ`
    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    /// `minᵢ μᵢ`
    pub fn strong_convexity(&self) -> f64 {
        self.strong_convexity
    }

    pub fn smooth(&self, i: usize) -> &dyn SmoothOracle {
        self.smooth[i].as_ref()
    }

    pub fn prox(&self, i: usize) -> &dyn ProxOracle {
        self.prox[i].as_ref()
    }

    pub fn prox_is_zero(&self) -> bool {
        self.prox.iter().all(|r| r.structure() == ProxStructure::Zero)
    }

    /// Row `i` of the result is `∇sᵢ(xᵢ)`.
    pub fn gradient(&self, x: &DenseMatrix) -> DenseMatrix {
        let mut g = DenseMatrix::zeros(x.rows(), x.cols());
        for i in 0..x.rows() {
            self.smooth[i].gradient_into(x.row(i), g.row_mut(i));
        }
        g
    }

    /// Row-wise `prox_{σ rᵢ}`.
    pub fn prox_rows(&self, z: &DenseMatrix, sigma: f64) -> DenseMatrix {
        let mut x = DenseMatrix::zeros(z.rows(), z.cols());
        for i in 0..z.rows() {
            self.prox[i].prox_into(z.row(i), sigma, x.row_mut(i));
        }
        x
    }

    /// `‖(I − W)X‖_F`
    pub fn consensus_violation(&self, x: &DenseMatrix) -> f64 {
        self.w.laplacian().matmul(x).expect("node count").frobenius_norm()
    }

    /// `Σᵢ sᵢ(xᵢ) + rᵢ(xᵢ)` when every value map exists.
    pub fn objective(&self, x: &DenseMatrix) -> Option<f64> {
        let mut total = 0.0;
        for i in 0..x.rows() {
            total += self.smooth[i].value(x.row(i))? + self.prox[i].value(x.row(i))?;
        }
        Some(total)
    }

    pub(crate) fn check_block(&self, x: &DenseMatrix, op: &'static str) -> Result<()> {
        if x.rows() != self.nodes() {
            return Err(Error::DimensionMismatch {
                op,
                expected: self.nodes(),
                found: x.rows(),
            });
        }
        if x.cols() != self.p {
            return Err(Error::DimensionMismatch {
                op,
                expected: self.p,
                found: x.cols(),
            });
        }
        Ok(())
    }
}
