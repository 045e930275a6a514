use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Undirected simple graph on nodes `0..n`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
}

impl Graph {
    /// Edges are stored as `(min, max)`; self-loops and duplicates are rejected.
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if n == 0 {
            return Err(Error::InvalidGraph("graph needs at least one node"));
        }
        let mut adjacency = vec![Vec::new(); n];
        let mut stored = Vec::with_capacity(edges.len());
        for &(i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::InvalidGraph("edge endpoint out of range"));
            }
            if i == j {
                return Err(Error::InvalidGraph("self-loop"));
            }
            if adjacency[i].contains(&j) {
                return Err(Error::InvalidGraph("duplicate edge"));
            }
            adjacency[i].push(j);
            adjacency[j].push(i);
            stored.push((i.min(j), i.max(j)));
        }
        for nb in &mut adjacency {
            nb.sort_unstable();
        }
        Ok(Graph {
            n,
            edges: stored,
            adjacency,
        })
    }

    pub fn path(n: usize) -> Result<Self> {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::new(n, &edges)
    }

    pub fn ring(n: usize) -> Result<Self> {
        if n < 3 {
            return Self::path(n);
        }
        let edges: Vec<_> = (0..n).map(|i| (i, (i + 1) % n)).collect();
        Self::new(n, &edges)
    }

    pub fn complete(n: usize) -> Result<Self> {
        let mut edges = Vec::new();
        for i in 0..n {
            for j in (i + 1)..n {
                edges.push((i, j));
            }
        }
        Self::new(n, &edges)
    }

    /// Node 0 is the center.
    pub fn star(n: usize) -> Result<Self> {
        let edges: Vec<_> = (1..n).map(|i| (0, i)).collect();
        Self::new(n, &edges)
    }

    pub fn node_count(&self) -> usize {
        self.n
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Sorted neighbor list.
    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adjacency[i].binary_search(&j).is_ok()
    }

    pub fn is_connected(&self) -> bool {
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(i) = stack.pop() {
            for &j in &self.adjacency[i] {
                if !seen[j] {
                    seen[j] = true;
                    count += 1;
                    stack.push(j);
                }
            }
        }
        count == self.n
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn construction() {
        assert!(Graph::new(0, &[]).is_err());
        assert!(Graph::new(2, &[(0, 0)]).is_err());
        assert!(Graph::new(2, &[(0, 1), (1, 0)]).is_err());
        assert!(Graph::new(2, &[(0, 2)]).is_err());
        assert!(Graph::new(1, &[]).unwrap().is_connected());
        assert!(!Graph::new(3, &[(0, 1)]).unwrap().is_connected());
        let s = Graph::star(4).unwrap();
        assert_eq!(s.neighbors(0), &[1, 2, 3]);
        assert_eq!(s.degree(2), 1);
        assert!(Graph::ring(5).unwrap().is_connected());
        assert_eq!(Graph::complete(4).unwrap().edges().len(), 6);
    }
}
