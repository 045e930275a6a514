//! One synchronous consensus round with the nodes split across OS threads.
//!
//! Each node reads only its own row and its neighbors' messages, so the
//! result is bitwise identical to [`simulate_round`](pdopt_core::consensus::simulate_round).

use std::num::NonZeroUsize;
use std::thread;

use pdopt_core::consensus::{
    assemble_round, node_local_step, round_messages, ConsensusProblem, ConsensusState, NodeUpdate,
};
use pdopt_core::Result;

pub fn threaded_round(prob: &ConsensusProblem, alpha: f64, st: &ConsensusState, workers: usize) -> Result<ConsensusState> {
    let n = prob.nodes();
    let workers = workers.clamp(1, n);
    let chunk = n.div_ceil(workers);
    let updates: Vec<NodeUpdate> = thread::scope(|s| {
        let handles: Vec<_> = (0..n)
            .step_by(chunk)
            .map(|start| {
                s.spawn(move || {
                    (start..(start + chunk).min(n))
                        .map(|i| node_local_step(prob, alpha, st, i, &round_messages(prob, st, i)))
                        .collect::<Result<Vec<_>>>()
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("node worker panicked"))
            .collect::<Result<Vec<Vec<_>>>>()
    })?
    .into_iter()
    .flatten()
    .collect();
    assemble_round(prob, alpha, st, &updates)
}

pub fn default_workers() -> usize {
    thread::available_parallelism().map_or(1, NonZeroUsize::get)
}
