//! Experiment front end for `pdopt-core`: JSON configuration, deterministic
//! problem generators, trace and report emission, stepsize sweeps, and a
//! threaded node-local consensus round.

// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod config;
pub mod error;
pub mod format;
pub mod generate;
pub mod run;
pub mod sweep;
pub mod threaded;

pub use config::{ExperimentConfig, Mode};
pub use error::{PdoptError, Result};
pub use run::{run, RunReport, Status};
pub use sweep::{parse_grid, sweep_stepsize, Grid, SweepRow};
