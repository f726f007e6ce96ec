//! Lazily built homogeneous graphs and ordered graphs.
//!
//! The store only grows: an edge or position, once decided, never changes.
//! Undecided pairs are settled by a seeded hash of the unordered pair.

use std::collections::{BTreeMap, BTreeSet};

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Signature {
    Graph,
    OrderedGraph,
}

pub type NodeId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GenericError {
    #[error("node {0} required both adjacent and non-adjacent")]
    Contradiction(NodeId),
    #[error("node {0} does not exist")]
    UnknownNode(NodeId),
    #[error("interval is empty or its bounds are out of order")]
    EmptyInterval,
    #[error("position intervals apply to ordered graphs only")]
    Unordered,
}

/// Extension request for a fresh node. Interval ends are given by existing
/// nodes; `None` is an infinite end.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct NodeConstraint {
    pub adjacent_to: BTreeSet<NodeId>,
    pub non_adjacent_to: BTreeSet<NodeId>,
    pub above: Option<NodeId>,
    pub below: Option<NodeId>,
}

impl NodeConstraint {
    pub fn new(adjacent_to: impl IntoIterator<Item = NodeId>, non_adjacent_to: impl IntoIterator<Item = NodeId>) -> Self {
        NodeConstraint {
            adjacent_to: adjacent_to.into_iter().collect(),
            non_adjacent_to: non_adjacent_to.into_iter().collect(),
            above: None,
            below: None,
        }
    }

    pub fn between(mut self, above: Option<NodeId>, below: Option<NodeId>) -> Self {
        self.above = above;
        self.below = below;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GenericStructure {
    signature: Signature,
    seed: u64,
    nodes: usize,
    edges: BTreeMap<(NodeId, NodeId), bool>,
    positions: Vec<BigRational>,
}

fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

fn key(a: NodeId, b: NodeId) -> (NodeId, NodeId) {
    (a.min(b), a.max(b))
}

impl GenericStructure {
    pub fn new(signature: Signature, seed: u64) -> Self {
        GenericStructure {
            signature,
            seed,
            nodes: 0,
            edges: BTreeMap::new(),
            positions: Vec::new(),
        }
    }

    pub fn signature(&self) -> Signature {
        self.signature
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn len(&self) -> usize {
        self.nodes
    }

    pub fn is_empty(&self) -> bool {
        self.nodes == 0
    }

    /// The default decision for an undecided pair.
    fn hashed_edge(&self, a: NodeId, b: NodeId) -> bool {
        let (lo, hi) = key(a, b);
        splitmix(self.seed ^ splitmix((lo as u64) << 32 ^ hi as u64)) & 1 == 1
    }

    fn check(&self, n: NodeId) -> Result<(), GenericError> {
        if n < self.nodes {
            Ok(())
        } else {
            Err(GenericError::UnknownNode(n))
        }
    }

    fn position_in(&self, above: Option<NodeId>, below: Option<NodeId>) -> Result<BigRational, GenericError> {
        let lo = above.map(|n| self.positions[n].clone());
        let hi = below.map(|n| self.positions[n].clone());
        let one = BigInt::one();
        Ok(match (lo, hi) {
            (Some(lo), Some(hi)) => {
                if lo >= hi {
                    return Err(GenericError::EmptyInterval);
                }
                // mediant of reduced fractions lies strictly between them
                BigRational::new(lo.numer() + hi.numer(), lo.denom() + hi.denom())
            }
            // mediant with +∞ = 1/0 and −∞ = −1/0
            (Some(lo), None) => BigRational::new(lo.numer() + &one, lo.denom().clone()),
            (None, Some(hi)) => BigRational::new(hi.numer() - &one, hi.denom().clone()),
            (None, None) => {
                if self.positions.is_empty() {
                    BigRational::zero()
                } else {
                    let max = self.positions.iter().max().expect("nonempty");
                    BigRational::new(max.numer() + &one, max.denom().clone())
                }
            }
        })
    }

    /// Appends a node satisfying `c`. Adjacency to every other existing node
    /// is decided now by the seeded rule and recorded.
    pub fn fresh_node(&mut self, c: &NodeConstraint) -> Result<NodeId, GenericError> {
        for n in c.adjacent_to.iter().chain(&c.non_adjacent_to).chain(c.above.iter()).chain(c.below.iter()) {
            self.check(*n)?;
        }
        if let Some(n) = c.adjacent_to.intersection(&c.non_adjacent_to).next() {
            return Err(GenericError::Contradiction(*n));
        }
        let position = match self.signature {
            Signature::OrderedGraph => Some(self.position_in(c.above, c.below)?),
            Signature::Graph if c.above.is_some() || c.below.is_some() => return Err(GenericError::Unordered),
            Signature::Graph => None,
        };
        let id = self.nodes;
        self.nodes += 1;
        for other in 0..id {
            let value = if c.adjacent_to.contains(&other) {
                true
            } else if c.non_adjacent_to.contains(&other) {
                false
            } else {
                self.hashed_edge(id, other)
            };
            self.edges.insert(key(id, other), value);
        }
        if let Some(p) = position {
            self.positions.push(p);
        }
        Ok(id)
    }

    /// Recorded adjacency; pairs are recorded when a node is created, so this
    /// only settles pairs never seen before through the seeded rule.
    pub fn query_edge(&mut self, a: NodeId, b: NodeId) -> Result<bool, GenericError> {
        self.check(a)?;
        self.check(b)?;
        if a == b {
            return Ok(false);
        }
        let default = self.hashed_edge(a, b);
        Ok(*self.edges.entry(key(a, b)).or_insert(default))
    }

    /// Read-only adjacency that does not record undecided pairs.
    pub fn peek_edge(&self, a: NodeId, b: NodeId) -> bool {
        a != b && self.edges.get(&key(a, b)).copied().unwrap_or_else(|| self.hashed_edge(a, b))
    }

    pub fn query_before(&self, a: NodeId, b: NodeId) -> Result<bool, GenericError> {
        self.check(a)?;
        self.check(b)?;
        if self.signature != Signature::OrderedGraph {
            return Err(GenericError::Unordered);
        }
        Ok(self.positions[a] < self.positions[b])
    }

    pub fn position(&self, n: NodeId) -> Option<&BigRational> {
        self.positions.get(n)
    }

    /// Nodes sorted by position (creation order for plain graphs).
    pub fn nodes_in_order(&self) -> Vec<NodeId> {
        let mut ids: Vec<NodeId> = (0..self.nodes).collect();
        if self.signature == Signature::OrderedGraph {
            ids.sort_by(|&a, &b| self.positions[a].cmp(&self.positions[b]));
        }
        ids
    }

    /// The induced graph on `nodes` with vertex `i` of the result standing for
    /// `nodes[i]`.
    pub fn induced(&self, nodes: &[NodeId]) -> crate::FiniteGraph {
        crate::FiniteGraph::from_fn(nodes.len(), |i, j| self.peek_edge(nodes[i], nodes[j]))
    }

    pub fn snapshot(&self) -> Snapshot {
        let mut edges = Vec::new();
        for a in 0..self.nodes {
            for b in a + 1..self.nodes {
                if self.peek_edge(a, b) {
                    edges.push((a, b));
                }
            }
        }
        Snapshot {
            nodes: self.nodes,
            edges,
            positions: self.positions.iter().map(|p| format!("{}/{}", p.numer(), p.denom())).collect(),
        }
    }
}

/// Exported view of a structure.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Snapshot {
    pub nodes: usize,
    pub edges: Vec<(NodeId, NodeId)>,
    pub positions: Vec<String>,
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn first_node_is_zero() {
        let mut g = GenericStructure::new(Signature::Graph, 1);
        assert_eq!(g.fresh_node(&NodeConstraint::default()).unwrap(), 0);
        assert!(g.snapshot().edges.is_empty());
    }

    #[test]
    fn constrained_node_between_positions() {
        let mut g = GenericStructure::new(Signature::OrderedGraph, 3);
        let a = g.fresh_node(&NodeConstraint::default()).unwrap();
        let b = g.fresh_node(&NodeConstraint::default().between(Some(a), None)).unwrap();
        let c = g.fresh_node(&NodeConstraint::new([a], [b]).between(Some(a), Some(b))).unwrap();
        assert!(g.query_edge(c, a).unwrap());
        assert!(!g.query_edge(c, b).unwrap());
        assert!(g.query_before(a, c).unwrap() && g.query_before(c, b).unwrap());
        assert!(!g.query_edge(c, c).unwrap());
    }

    #[test]
    fn contradiction_is_an_error() {
        let mut g = GenericStructure::new(Signature::Graph, 0);
        g.fresh_node(&NodeConstraint::default()).unwrap();
        assert_eq!(g.fresh_node(&NodeConstraint::new([0], [0])), Err(GenericError::Contradiction(0)));
        assert_eq!(g.len(), 1);
    }

    #[test]
    fn positions_stay_distinct_under_repeated_bisection() {
        let mut g = GenericStructure::new(Signature::OrderedGraph, 9);
        let lo = g.fresh_node(&NodeConstraint::default()).unwrap();
        let mut hi = g.fresh_node(&NodeConstraint::default().between(None, Some(lo))).unwrap();
        for _ in 0..40 {
            hi = g.fresh_node(&NodeConstraint::default().between(Some(hi), Some(lo))).unwrap();
        }
        let order = g.nodes_in_order();
        for w in order.windows(2) {
            assert!(g.position(w[0]).unwrap() < g.position(w[1]).unwrap());
        }
    }
}
