//! Decentralized consensus: graphs, mixing matrices, PG-EXTRA and its
//! primal-dual reading, node-local message passing, and the stepsize probe.
//!
//! Node copies are stacked as the rows of an `n × p` matrix `X`.

mod graph;
mod iteration;
mod mixing;
mod node;
mod probe;
mod problem;
mod run;

pub use graph::Graph;
pub use iteration::{dual_form_step, eliminated_step, pg_extra_step, ConsensusState};
pub use mixing::{
    metropolis_weights, stepsize_bound, validate_mixing, MixingMatrix, MixingMode, MixingReport, StepsizeRegime,
};
pub use node::{assemble_round, node_local_step, round_messages, simulate_round, NeighborMessage, NodeUpdate};
pub use probe::{
    consensus_rate_certificate, explicit_incidence, extra_amplification, composite_lyapunov, ConsensusCertificate,
    ConsensusReference,
};
pub use problem::ConsensusProblem;
pub use run::{run_consensus, run_consensus_with, ConsensusMethod, ConsensusOutcome, ConsensusTraceRecord, RunOptions};
