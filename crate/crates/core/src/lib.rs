//! Primal-dual splitting for `f(x) + (h □ l)(Ax)` with the relaxed dual
//! stepsize `λ < 4 / (3 λ_max(D^{-1/2} A P^{-1} Aᵀ D^{-1/2}))`, linear-rate
//! certificates, and the decentralized EXTRA / PG-EXTRA iteration viewed as
//! the same method applied to the consensus dual.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, configuration and
//! the command-line front end live in the `pdopt` crate.
//!
//! Module map:
//!
//! - [`linalg`]: dense vectors and matrices, Jacobi eigensolver, Cholesky,
//!   weighted norms and generalized eigenvalues.
//! - [`operators`]: gradient and proximal oracles with their declared
//!   constants, plus a small catalog.
//! - [`pdsolver`]: the iteration, its certificate algebra, Lyapunov
//!   diagnostics and the linearized-ALM form.
//! - [`consensus`]: graphs, mixing matrices, PG-EXTRA in its two forms, a
//!   node-local message-passing step, stepsize bounds and the divergence probe.
#![cfg_attr(not(test), no_std)]
// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

mod error;
pub mod rng;

pub mod consensus;
pub mod linalg;
pub mod operators;
pub mod pdsolver;

pub use error::{Error, Result};
pub use linalg::{DenseMatrix, DenseVector};
