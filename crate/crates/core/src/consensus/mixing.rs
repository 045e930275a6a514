use super::Graph;
use crate::error::{Error, Result};
use crate::linalg::{sym_eigs, DenseMatrix, DEFAULT_RANK_TOL};

const ROW_SUM_TOL: f64 = 1e-12;
const SPECTRUM_TOL: f64 = 1e-12;

/// Admissible spectrum of `W`: `(−1, 1]` classically, `(−5/3, 1]` relaxed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MixingMode {
    Classic,
    Relaxed,
}

impl MixingMode {
    pub fn lower_bound(self) -> f64 {
        match self {
            MixingMode::Classic => -1.0,
            MixingMode::Relaxed => -5.0 / 3.0,
        }
    }
}

/// Stepsize regime: `λ_min(I+W)/L` or `((3/4)λ_min(I+W) + 1/2)/L`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepsizeRegime {
    Classic,
    Extended,
}

#[derive(Debug, Clone, PartialEq)]
pub struct MixingReport {
    pub mode: MixingMode,
    pub square: bool,
    pub symmetric: bool,
    pub max_row_sum_error: f64,
    /// `Null(I − W) = span(1)`: exactly one unit eigenvalue and unit row sums.
    pub null_space_ok: bool,
    pub min_eig: f64,
    pub max_eig: f64,
    pub spectrum_ok: bool,
}

impl MixingReport {
    pub fn rows_sum_to_one(&self) -> bool {
        self.max_row_sum_error <= ROW_SUM_TOL
    }

    pub fn structural_ok(&self) -> bool {
        self.square && self.symmetric && self.rows_sum_to_one() && self.null_space_ok
    }

    pub fn passes(&self) -> bool {
        self.structural_ok() && self.spectrum_ok
    }
}

pub fn validate_mixing(w: &DenseMatrix, mode: MixingMode) -> MixingReport {
    let mut report = MixingReport {
        mode,
        square: w.is_square(),
        symmetric: false,
        max_row_sum_error: f64::INFINITY,
        null_space_ok: false,
        min_eig: f64::NAN,
        max_eig: f64::NAN,
        spectrum_ok: false,
    };
    if !report.square {
        return report;
    }
    report.symmetric = w.check_symmetric().is_ok();
    let n = w.rows();
    report.max_row_sum_error = (0..n)
        .map(|i| (w.row(i).iter().sum::<f64>() - 1.0).abs())
        .fold(0.0, f64::max);
    if !report.symmetric {
        return report;
    }
    let Ok(spec) = sym_eigs(&w.symmetrized()) else {
        return report;
    };
    report.min_eig = spec.min();
    report.max_eig = spec.max();
    // eigenvalues of I − W near zero
    let lap_scale = (1.0 - spec.min()).abs().max(1.0);
    let unit_modes = spec
        .eigenvalues
        .iter()
        .filter(|&&l| (1.0 - l).abs() <= DEFAULT_RANK_TOL * lap_scale)
        .count();
    report.null_space_ok = unit_modes == 1 && report.rows_sum_to_one();
    report.spectrum_ok = spec.min() > mode.lower_bound() + SPECTRUM_TOL && spec.max() <= 1.0 + SPECTRUM_TOL;
    report
}

/// A validated symmetric mixing matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct MixingMatrix {
    w: DenseMatrix,
    min_eig: f64,
    max_eig: f64,
}

impl MixingMatrix {
    /// Accepts `w` when it passes [`validate_mixing`] in `mode`.
    pub fn new(w: DenseMatrix, mode: MixingMode) -> Result<Self> {
        let r = validate_mixing(&w, mode);
        if !r.square {
            return Err(Error::NotSquare {
                rows: w.rows(),
                cols: w.cols(),
            });
        }
        if !r.symmetric {
            return Err(Error::InvalidMixing("not symmetric"));
        }
        if !r.rows_sum_to_one() {
            return Err(Error::InvalidMixing("rows do not sum to one"));
        }
        if !r.null_space_ok {
            return Err(Error::InvalidMixing("null space of I − W is not span(1)"));
        }
        if !r.spectrum_ok {
            return Err(Error::InvalidMixing("spectrum outside the admissible range"));
        }
        Ok(MixingMatrix {
            w: w.symmetrized(),
            min_eig: r.min_eig,
            max_eig: r.max_eig,
        })
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.w
    }

    pub fn n(&self) -> usize {
        self.w.rows()
    }

    pub fn min_eig(&self) -> f64 {
        self.min_eig
    }

    pub fn max_eig(&self) -> f64 {
        self.max_eig
    }

    /// `I − W`
    pub fn laplacian(&self) -> DenseMatrix {
        DenseMatrix::identity(self.n()).sub(&self.w).expect("square").symmetrized()
    }

    /// `I − λ(I − W)`
    pub fn damped(&self, lambda: f64) -> DenseMatrix {
        DenseMatrix::identity(self.n()).add_scaled(-lambda, &self.laplacian()).expect("square")
    }

    /// Nonzero pattern contained in the graph's edges plus the diagonal.
    pub fn conforms_to(&self, g: &Graph) -> bool {
        let n = self.n();
        if g.node_count() != n {
            return false;
        }
        (0..n).all(|i| (0..n).all(|j| i == j || self.w[(i, j)] == 0.0 || g.has_edge(i, j)))
    }
}

/// `W_ij = 1/(1 + max(deg i, deg j))` on edges, diagonal fills each row to 1.
pub fn metropolis_weights(g: &Graph) -> Result<MixingMatrix> {
    if !g.is_connected() {
        return Err(Error::Disconnected);
    }
    let n = g.node_count();
    let mut w = DenseMatrix::zeros(n, n);
    for &(i, j) in g.edges() {
        let v = 1.0 / (1.0 + g.degree(i).max(g.degree(j)) as f64);
        w[(i, j)] = v;
        w[(j, i)] = v;
    }
    for i in 0..n {
        let off: f64 = (0..n).filter(|&j| j != i).map(|j| w[(i, j)]).sum();
        w[(i, i)] = 1.0 - off;
    }
    MixingMatrix::new(w, MixingMode::Classic)
}

/// Strict upper bound on the EXTRA stepsize `α`. Returns `0` when the
/// classic regime admits no stepsize (`λ_min(W) = −1`).
pub fn stepsize_bound(w: &DenseMatrix, lipschitz: f64, regime: StepsizeRegime) -> Result<f64> {
    if !(lipschitz > 0.0 && lipschitz.is_finite()) {
        return Err(Error::InvalidParameter {
            name: "lipschitz",
            value: lipschitz,
        });
    }
    let mode = match regime {
        StepsizeRegime::Classic => MixingMode::Classic,
        StepsizeRegime::Extended => MixingMode::Relaxed,
    };
    let r = validate_mixing(w, mode);
    if !r.structural_ok() {
        return Err(Error::InvalidMixing("structurally invalid mixing matrix"));
    }
    let lmin = 1.0 + r.min_eig;
    let bound = match regime {
        StepsizeRegime::Classic => lmin / lipschitz,
        StepsizeRegime::Extended => (0.75 * lmin + 0.5) / lipschitz,
    };
    // rounding of a λ_min(W) = −1 spectrum should read as exactly zero
    if bound.abs() <= SPECTRUM_TOL / lipschitz {
        return Ok(0.0);
    }
    if bound < 0.0 {
        return Err(Error::InvalidMixing("spectrum outside the admissible range"));
    }
    Ok(bound)
}
