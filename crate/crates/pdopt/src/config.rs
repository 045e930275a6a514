//! Experiment configuration, read from JSON.
//!
//! ```json
//! {
//!   "mode": "solve",
//!   "seed": 7,
//!   "problem": { "family": "lasso", "size": 8, "weight": 0.5 },
//!   "params": { "gamma": 1.0, "lambda": 0.5, "tol": 1e-10 },
//!   "output": { "trace": "lasso.csv", "trace_every": 1 }
//! }
//! ```
//!
//! Relative file paths inside the config resolve against the config's own
//! directory.

use std::path::{Path, PathBuf};

use pdopt_core::pdsolver::ThetaPolicy;
use serde::{Deserialize, Serialize};

use crate::error::{PdoptError, Result};
use crate::format::read_text;

pub const SEED_ENV: &str = "PDOPT_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Solve,
    Consensus,
    Probe,
    Certify,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub mode: Mode,
    #[serde(default)]
    pub seed: u64,
    pub problem: ProblemBlock,
    #[serde(default)]
    pub params: ParamsBlock,
    #[serde(default)]
    pub output: OutputBlock,
    /// Directory relative paths resolve against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProblemBlock {
    /// `lasso`, `least-squares`, `papc`, `explicit`, `consensus-quadratic`
    /// or `consensus-lasso`.
    pub family: String,
    /// Primal dimension, or node count for generated graphs.
    pub size: Option<usize>,
    pub dual_size: Option<usize>,
    /// Per-node copy dimension in consensus families.
    pub dim: Option<usize>,
    /// `ℓ1` weight.
    pub weight: Option<f64>,
    /// Use `K = I` in the lasso family.
    #[serde(default)]
    pub identity_operator: bool,
    pub graph: Option<GraphSpec>,
    pub mixing: Option<MixingSpec>,
    pub f: Option<SmoothSpec>,
    pub h: Option<ProxSpec>,
    pub lstar: Option<SmoothSpec>,
    pub a: Option<MatrixSource>,
    pub x0: Option<Vec<f64>>,
    pub s0: Option<Vec<f64>>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GraphSpec {
    Path { nodes: usize },
    Ring { nodes: usize },
    Complete { nodes: usize },
    Star { nodes: usize },
    /// Two nodes mixed by `[[0, 1], [1, 0]]`.
    Swap,
    /// Spanning tree plus random chords, drawn from the seed.
    Random { nodes: usize },
    File { path: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum MixingSpec {
    Metropolis,
    File {
        path: PathBuf,
        #[serde(default)]
        relaxed: bool,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum MatrixSource {
    Rows(Vec<Vec<f64>>),
    File { file: PathBuf },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SmoothSpec {
    Zero { dim: usize },
    Linear { b: Vec<f64> },
    /// `½‖Kx − y‖²`
    Quadratic { k: MatrixSource, y: Vec<f64> },
    /// `(w/2)‖x − c‖²`
    Distance { weight: f64, center: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ProxSpec {
    Zero { dim: usize },
    L1 { dim: usize, weight: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
    /// `(c/2)‖x‖²`
    SquaredNorm { dim: usize, scale: f64 },
    IndicatorZero { dim: usize },
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConsensusMethodSpec {
    #[default]
    PgExtra,
    Dual,
    NodeLocal,
    Threaded,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ThetaSpec {
    Fixed(f64),
    Named(ThetaName),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ThetaName {
    Auto,
}

impl Default for ThetaSpec {
    fn default() -> Self {
        ThetaSpec::Named(ThetaName::Auto)
    }
}

impl From<ThetaSpec> for ThetaPolicy {
    fn from(t: ThetaSpec) -> Self {
        match t {
            ThetaSpec::Fixed(v) => ThetaPolicy::Fixed(v),
            ThetaSpec::Named(ThetaName::Auto) => ThetaPolicy::Auto,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ParamsBlock {
    pub gamma: Option<f64>,
    pub lambda: Option<f64>,
    /// EXTRA stepsize.
    pub alpha: Option<f64>,
    pub tol: f64,
    pub max_iters: usize,
    pub theta: ThetaSpec,
    /// Run even when the certificate fails.
    pub allow_infeasible: bool,
    pub divergence_norm: f64,
    pub method: ConsensusMethodSpec,
}

impl Default for ParamsBlock {
    fn default() -> Self {
        ParamsBlock {
            gamma: None,
            lambda: None,
            alpha: None,
            tol: 1e-10,
            max_iters: 10_000,
            theta: ThetaSpec::default(),
            allow_infeasible: false,
            divergence_norm: 1e12,
            method: ConsensusMethodSpec::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputBlock {
    pub trace: Option<PathBuf>,
    pub report: Option<PathBuf>,
    /// Keep every n-th trace row; the last row is always kept.
    pub trace_every: usize,
}

impl Default for OutputBlock {
    fn default() -> Self {
        OutputBlock {
            trace: None,
            report: None,
            trace_every: 1,
        }
    }
}

fn positive(field: &str, v: f64) -> Result<f64> {
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(PdoptError::config(field, format!("must be positive and finite, got {v}")))
    }
}

impl ParamsBlock {
    pub fn require(&self, field: &'static str, v: Option<f64>) -> Result<f64> {
        let v = v.ok_or_else(|| PdoptError::config(format!("params.{field}"), "required for this mode"))?;
        positive(&format!("params.{field}"), v)
    }

    pub fn gamma(&self) -> Result<f64> {
        self.require("gamma", self.gamma)
    }

    pub fn lambda(&self) -> Result<f64> {
        self.require("lambda", self.lambda)
    }

    pub fn alpha(&self) -> Result<f64> {
        self.require("alpha", self.alpha)
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str, base_dir: impl Into<PathBuf>) -> Result<Self> {
        let mut cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.base_dir = base_dir.into();
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads `path` and applies the `PDOPT_SEED` override.
    pub fn load(path: &Path) -> Result<Self> {
        let text = read_text(path)?;
        let base = path.parent().map(Path::to_path_buf).unwrap_or_default();
        let mut cfg = Self::from_json(&text, base)?;
        if let Ok(seed) = std::env::var(SEED_ENV) {
            cfg.seed = seed
                .trim()
                .parse()
                .map_err(|_| PdoptError::config(SEED_ENV, format!("not an unsigned integer: `{seed}`")))?;
        }
        Ok(cfg)
    }

    pub fn resolve(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn validate(&self) -> Result<()> {
        let p = &self.params;
        for (name, v) in [("gamma", p.gamma), ("lambda", p.lambda), ("alpha", p.alpha)] {
            if let Some(v) = v {
                positive(&format!("params.{name}"), v)?;
            }
        }
        if !(p.tol >= 0.0) {
            return Err(PdoptError::config("params.tol", "must be nonnegative"));
        }
        positive("params.divergence_norm", p.divergence_norm)?;
        if self.output.trace_every == 0 {
            return Err(PdoptError::config("output.trace_every", "must be at least 1"));
        }
        if let ThetaSpec::Fixed(t) = p.theta {
            if !(t > 0.75 && t <= 1.0) {
                return Err(PdoptError::config("params.theta", "must lie in (3/4, 1]"));
            }
        }
        match self.mode {
            Mode::Solve | Mode::Certify if !self.is_consensus() => {
                p.gamma()?;
                p.lambda()?;
            }
            Mode::Consensus if p.method == ConsensusMethodSpec::Dual && p.alpha.is_none() => {
                p.gamma()?;
                p.lambda()?;
            }
            Mode::Consensus | Mode::Probe | Mode::Certify => {
                p.alpha()?;
            }
            Mode::Solve => {
                return Err(PdoptError::config("mode", "solve needs a non-consensus problem family"));
            }
        }
        if matches!(self.mode, Mode::Consensus | Mode::Probe) && !self.is_consensus() {
            return Err(PdoptError::config("problem.family", "this mode needs a consensus family"));
        }
        Ok(())
    }

    pub fn is_consensus(&self) -> bool {
        self.problem.family.starts_with("consensus")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const LASSO: &str = r#"{
        "mode": "solve",
        "seed": 3,
        "problem": { "family": "lasso", "size": 4 },
        "params": { "gamma": 1.0, "lambda": 0.5, "theta": "auto" }
    }"#;

    #[test]
    fn parses_minimal() {
        let cfg = ExperimentConfig::from_json(LASSO, "").unwrap();
        assert_eq!(cfg.mode, Mode::Solve);
        assert_eq!(cfg.params.max_iters, 10_000);
        assert_eq!(ThetaPolicy::from(cfg.params.theta), ThetaPolicy::Auto);
    }

    #[test]
    fn missing_gamma_names_the_field() {
        let text = LASSO.replace(r#""gamma": 1.0, "#, "");
        let err = ExperimentConfig::from_json(&text, "").unwrap_err();
        assert!(err.to_string().contains("params.gamma"), "{err}");
    }

    #[test]
    fn syntax_errors_report_line() {
        let err = ExperimentConfig::from_json("{\n \"mode\": \"solve\",\n oops }", "").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
        let err = ExperimentConfig::from_json(&LASSO.replace("solve", "dance"), "").unwrap_err();
        assert!(err.to_string().contains("dance"), "{err}");
    }

    #[test]
    fn fixed_theta_and_ranges() {
        let text = LASSO.replace(r#""auto""#, "0.9");
        let cfg = ExperimentConfig::from_json(&text, "").unwrap();
        assert_eq!(ThetaPolicy::from(cfg.params.theta), ThetaPolicy::Fixed(0.9));
        assert!(ExperimentConfig::from_json(&LASSO.replace(r#""auto""#, "0.5"), "").is_err());
        assert!(ExperimentConfig::from_json(&LASSO.replace("1.0", "-1.0"), "").is_err());
    }
}
