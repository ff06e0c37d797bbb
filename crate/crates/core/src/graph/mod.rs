//! Simple undirected graphs stored as dense adjacency, plus the canonical
//! enumeration of unordered node pairs.
//!
//! Nodes are 0-based everywhere in the API. The edge-list file format is
//! 1-based (see [`io`]).

mod features;
mod generators;
pub mod io;

pub use features::{graph_from_features, ThresholdRule};
pub use generators::{
    gen_complete, gen_erdos_renyi, gen_regular, gen_regular_with_restarts, gen_two_cluster,
    gen_union_cliques, DEFAULT_REGULAR_RESTARTS,
};

use ndarray::Array2;

use crate::error::{Error, Result};

/// A simple undirected graph on nodes `0..n`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Graph {
    n: usize,
    adj: Vec<bool>,
}

impl Graph {
    /// The graph on `n` nodes with no edges.
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            adj: vec![false; n * n],
        }
    }

    /// Build from an edge list. Self-loops, out-of-range endpoints and
    /// repeated edges (in either orientation) are rejected.
    pub fn from_edges(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut g = Graph::empty(n);
        for &(i, j) in edges {
            if i >= n || j >= n {
                return Err(Error::invalid(format!(
                    "edge ({i}, {j}) out of range for n = {n}"
                )));
            }
            if i == j {
                return Err(Error::invalid(format!("self-loop at node {i}")));
            }
            if g.has_edge(i, j) {
                return Err(Error::invalid(format!("duplicate edge ({i}, {j})")));
            }
            g.set_edge(i, j);
        }
        Ok(g)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn has_edge(&self, i: usize, j: usize) -> bool {
        self.adj[i * self.n + j]
    }

    pub(crate) fn set_edge(&mut self, i: usize, j: usize) {
        debug_assert_ne!(i, j);
        self.adj[i * self.n + j] = true;
        self.adj[j * self.n + i] = true;
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().filter(|&&a| a).count() / 2
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adj[i * self.n..(i + 1) * self.n]
            .iter()
            .filter(|&&a| a)
            .count()
    }

    pub fn degrees(&self) -> Vec<usize> {
        (0..self.n).map(|i| self.degree(i)).collect()
    }

    /// Edges `(i, j)` with `i < j`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        let n = self.n;
        (0..n).flat_map(move |i| ((i + 1)..n).filter(move |&j| self.has_edge(i, j)).map(move |j| (i, j)))
    }

    /// 0/1 adjacency as a dense real matrix.
    pub fn adjacency_matrix(&self) -> Array2<f64> {
        Array2::from_shape_fn((self.n, self.n), |(i, j)| {
            if self.has_edge(i, j) {
                1.0
            } else {
                0.0
            }
        })
    }

    pub fn complement(&self) -> Graph {
        let mut g = Graph::empty(self.n);
        for i in 0..self.n {
            for j in (i + 1)..self.n {
                if !self.has_edge(i, j) {
                    g.set_edge(i, j);
                }
            }
        }
        g
    }

    /// Sub-graph induced by `nodes`, relabelled `0..nodes.len()` in the given order.
    pub fn induced(&self, nodes: &[usize]) -> Graph {
        let mut g = Graph::empty(nodes.len());
        for (a, &i) in nodes.iter().enumerate() {
            for (b, &j) in nodes.iter().enumerate().skip(a + 1) {
                if self.has_edge(i, j) {
                    g.set_edge(a, b);
                }
            }
        }
        g
    }
}

/// Canonical enumeration of the `N = n(n-1)/2` unordered node pairs.
///
/// Pair `k` is `(i_k, j_k)` with `i_k < j_k`, ordered lexicographically:
/// `(0,1), (0,2), ..., (0,n-1), (1,2), ..., (n-2,n-1)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PairIndex {
    n: usize,
    pairs: Vec<(u32, u32)>,
}

impl PairIndex {
    pub fn new(n: usize) -> Self {
        let mut pairs = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for i in 0..n {
            for j in (i + 1)..n {
                pairs.push((i as u32, j as u32));
            }
        }
        PairIndex { n, pairs }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of pairs `N`.
    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    #[inline]
    pub fn pair(&self, k: usize) -> (usize, usize) {
        let (i, j) = self.pairs[k];
        (i as usize, j as usize)
    }

    /// Index of the unordered pair `{i, j}`; `None` when `i == j` or out of range.
    #[inline]
    pub fn index(&self, i: usize, j: usize) -> Option<usize> {
        let (i, j) = if i < j { (i, j) } else { (j, i) };
        if i == j || j >= self.n {
            return None;
        }
        // pairs before row i: sum_{r<i} (n-1-r)
        Some(i * (2 * self.n - i - 1) / 2 + (j - i - 1))
    }

    pub fn iter(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.pairs.iter().map(|&(i, j)| (i as usize, j as usize))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn pair_index_is_lexicographic() {
        let idx = PairIndex::new(4);
        let pairs: Vec<_> = idx.iter().collect();
        assert_eq!(pairs, vec![(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]);
        assert_eq!(idx.len(), 6);
        assert_eq!(idx.index(2, 1), Some(3));
        assert_eq!(idx.index(1, 1), None);
        assert_eq!(idx.index(1, 4), None);
    }

    #[test]
    fn from_edges_rejects_bad_input() {
        assert!(Graph::from_edges(3, &[(0, 0)]).is_err());
        assert!(Graph::from_edges(3, &[(0, 1), (1, 0)]).is_err());
        assert!(Graph::from_edges(3, &[(0, 3)]).is_err());
        let g = Graph::from_edges(3, &[(0, 1), (2, 1)]).unwrap();
        assert_eq!(g.edge_count(), 2);
        assert_eq!(g.degrees(), vec![1, 2, 1]);
        assert_eq!(g.edges().collect::<Vec<_>>(), vec![(0, 1), (1, 2)]);
    }

    #[test]
    fn complement_and_induced() {
        let g = gen_complete(4);
        assert_eq!(g.complement().edge_count(), 0);
        let h = Graph::from_edges(4, &[(0, 2), (2, 3)]).unwrap();
        let sub = h.induced(&[3, 2, 0]);
        assert!(sub.has_edge(0, 1) && sub.has_edge(1, 2) && !sub.has_edge(0, 2));
    }

    proptest! {
        #[test]
        fn pair_index_round_trips(n in 2usize..60) {
            let idx = PairIndex::new(n);
            prop_assert_eq!(idx.len(), n * (n - 1) / 2);
            for k in 0..idx.len() {
                let (i, j) = idx.pair(k);
                prop_assert!(i < j);
                prop_assert_eq!(idx.index(i, j), Some(k));
                prop_assert_eq!(idx.index(j, i), Some(k));
            }
        }
    }
}
