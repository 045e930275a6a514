use alloc::vec::Vec;

use super::iteration::assemble;
use super::{ConsensusProblem, ConsensusState};
use crate::error::{Error, Result};
use crate::linalg::{DenseMatrix, DenseVector};

/// What node `from` broadcasts before a round: its current and previous copy.
#[derive(Debug, Clone, PartialEq)]
pub struct NeighborMessage {
    pub from: usize,
    pub current: DenseVector,
    pub previous: DenseVector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NodeUpdate {
    pub node: usize,
    pub z: DenseVector,
    pub x: DenseVector,
}

/// Messages node `i` receives in the round leaving `st`.
pub fn round_messages(prob: &ConsensusProblem, st: &ConsensusState, i: usize) -> Vec<NeighborMessage> {
    prob.graph()
        .neighbors(i)
        .iter()
        .map(|&j| NeighborMessage {
            from: j,
            current: DenseVector::from(st.x.row(j)),
            previous: DenseVector::from(st.x_prev.row(j)),
        })
        .collect()
}

/// One PG-EXTRA update of node `i` from its own history and one message per
/// neighbor. Accumulates in ascending node order, the same order as the
/// matrix form, so the two agree bit for bit.
pub fn node_local_step(
    prob: &ConsensusProblem,
    alpha: f64,
    st: &ConsensusState,
    i: usize,
    messages: &[NeighborMessage],
) -> Result<NodeUpdate> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(Error::InvalidParameter { name: "alpha", value: alpha });
    }
    let neighbors = prob.graph().neighbors(i);
    for m in messages {
        if neighbors.binary_search(&m.from).is_err() {
            return Err(Error::UnexpectedMessage { node: i, sender: m.from });
        }
    }
    let p = prob.dim();
    let w = prob.mixing().matrix();
    let own_two_step: DenseVector = st.x.row(i).iter().zip(st.x_prev.row(i)).map(|(a, b)| 2.0 * a - b).collect();

    let mut participants: Vec<(usize, DenseVector)> = Vec::with_capacity(neighbors.len() + 1);
    participants.push((i, own_two_step));
    for &j in neighbors {
        let msg = messages
            .iter()
            .find(|m| m.from == j)
            .ok_or(Error::MissingMessage { node: i, neighbor: j })?;
        if msg.current.len() != p || msg.previous.len() != p {
            return Err(Error::DimensionMismatch {
                op: "neighbor message",
                expected: p,
                found: msg.current.len(),
            });
        }
        let two_step = msg.current.iter().zip(msg.previous.iter()).map(|(a, b)| 2.0 * a - b).collect();
        participants.push((j, two_step));
    }
    participants.sort_by_key(|(j, _)| *j);

    let mut mixed = DenseVector::zeros(p);
    for (j, v) in &participants {
        let weight = 0.5 * (if *j == i { 1.0 } else { 0.0 } + w[(i, *j)]);
        if weight == 0.0 {
            continue;
        }
        for (o, b) in mixed.iter_mut().zip(v.iter()) {
            *o += weight * b;
        }
    }

    let z: DenseVector = (0..p)
        .map(|c| {
            let base = st.z[(i, c)] - st.x[(i, c)] + mixed[c];
            base + -alpha * st.grad[(i, c)] + alpha * st.grad_prev[(i, c)]
        })
        .collect();
    let x = prob.prox(i).prox(&z, alpha);
    Ok(NodeUpdate { node: i, z, x })
}

/// Stacks node updates into the next state. `U` is refreshed centrally for
/// bookkeeping only; no node reads it.
pub fn assemble_round(
    prob: &ConsensusProblem,
    alpha: f64,
    st: &ConsensusState,
    updates: &[NodeUpdate],
) -> Result<ConsensusState> {
    let n = prob.nodes();
    let p = prob.dim();
    let mut z = DenseMatrix::zeros(n, p);
    let mut x = DenseMatrix::zeros(n, p);
    let mut filled = alloc::vec![false; n];
    for u in updates {
        z.row_mut(u.node).copy_from_slice(&u.z);
        x.row_mut(u.node).copy_from_slice(&u.x);
        filled[u.node] = true;
    }
    if let Some(missing) = filled.iter().position(|f| !f) {
        return Err(Error::MissingMessage {
            node: missing,
            neighbor: missing,
        });
    }
    assemble(prob, st, z, x, 1.0 / (2.0 * alpha))
}

/// One synchronous round with every node computed in turn.
pub fn simulate_round(prob: &ConsensusProblem, alpha: f64, st: &ConsensusState) -> Result<ConsensusState> {
    let updates = (0..prob.nodes())
        .map(|i| node_local_step(prob, alpha, st, i, &round_messages(prob, st, i)))
        .collect::<Result<Vec<_>>>()?;
    assemble_round(prob, alpha, st, &updates)
}
