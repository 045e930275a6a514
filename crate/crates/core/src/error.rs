use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    DimensionMismatch {
        op: &'static str,
        expected: usize,
        found: usize,
    },
    NotSquare {
        rows: usize,
        cols: usize,
    },
    NotSymmetric {
        max_asymmetry: f64,
    },
    /// Cholesky hit a non-positive pivot.
    NotPositiveDefinite {
        pivot: usize,
    },
    NoNonzeroEigenvalue,
    InvalidParameter {
        name: &'static str,
        value: f64,
    },
    /// `λ·λ_max(G)` reached the 4/3 bound.
    DualStepBeyondBound {
        scaled_lambda: f64,
    },
    /// `γ ≥ 2β`.
    PrimalStepTooLarge {
        gamma: f64,
        two_beta: f64,
    },
    /// The resolvent is only evaluated for `D = c·I`.
    UnsupportedDualScaling,
    Diverged {
        iteration: usize,
    },
    InvalidGraph(&'static str),
    Disconnected,
    InvalidMixing(&'static str),
    MissingMessage {
        node: usize,
        neighbor: usize,
    },
    UnexpectedMessage {
        node: usize,
        sender: usize,
    },
    StepsizeOutOfRange {
        alpha: f64,
        bound: f64,
    },
    NoLinearCertificate(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::DimensionMismatch { op, expected, found } => {
                write!(f, "{op}: dimension mismatch (expected {expected}, found {found})")
            }
            Error::NotSquare { rows, cols } => write!(f, "matrix is not square ({rows}x{cols})"),
            Error::NotSymmetric { max_asymmetry } => {
                write!(f, "matrix is not symmetric (max |S_ij - S_ji| = {max_asymmetry:e})")
            }
            Error::NotPositiveDefinite { pivot } => {
                write!(f, "matrix is not positive definite (failing pivot {pivot})")
            }
            Error::NoNonzeroEigenvalue => write!(f, "no nonzero eigenvalue"),
            Error::InvalidParameter { name, value } => write!(f, "invalid {name}: {value}"),
            Error::DualStepBeyondBound { scaled_lambda } => write!(
                f,
                "dual stepsize beyond optimal bound (lambda * lambda_max = {scaled_lambda}, must be < 4/3)"
            ),
            Error::PrimalStepTooLarge { gamma, two_beta } => {
                write!(f, "primal stepsize too large (gamma = {gamma}, 2*beta = {two_beta})")
            }
            Error::UnsupportedDualScaling => {
                write!(f, "resolvent evaluation requires D to be a positive multiple of the identity")
            }
            Error::Diverged { iteration } => write!(f, "numerical divergence at iteration {iteration}"),
            Error::InvalidGraph(why) => write!(f, "invalid graph: {why}"),
            Error::Disconnected => write!(f, "graph is disconnected"),
            Error::InvalidMixing(why) => write!(f, "invalid mixing matrix: {why}"),
            Error::MissingMessage { node, neighbor } => {
                write!(f, "node {node}: missing message from neighbor {neighbor}")
            }
            Error::UnexpectedMessage { node, sender } => {
                write!(f, "node {node}: message from non-neighbor {sender}")
            }
            Error::StepsizeOutOfRange { alpha, bound } => {
                write!(f, "stepsize {alpha} is not below the bound {bound}")
            }
            Error::NoLinearCertificate(why) => write!(f, "no linear certificate: {why}"),
        }
    }
}

impl core::error::Error for Error {}
