//! Undirected simple graph of users and relationships.
//!
//! Nodes are opaque integer identifiers; edges are stored normalized so that
//! `Edge::new(a, b) == Edge::new(b, a)`. Adjacency uses ordered sets so every
//! traversal, and therefore every downstream algorithm, is deterministic.

use std::collections::{BTreeMap, BTreeSet, HashSet};
use std::fmt;
use std::io::{self, Write};
use std::path::Path;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("I/O error: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("self-loop on node {node}{}", line.map(|l| format!(" (line {l})")).unwrap_or_default())]
    SelfLoop { node: NodeId, line: Option<usize> },
    #[error("unknown node {0}")]
    UnknownNode(NodeId),
    #[error("cannot place {edges} edges on {nodes} nodes (at most {max})")]
    Infeasible { nodes: usize, edges: usize, max: usize },
}

/// Opaque user identifier.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct NodeId(pub u32);

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl From<u32> for NodeId {
    fn from(v: u32) -> Self {
        NodeId(v)
    }
}

/// Undirected edge, always stored with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Edge {
    a: NodeId,
    b: NodeId,
}

impl Edge {
    pub fn new(a: impl Into<NodeId>, b: impl Into<NodeId>) -> Result<Self, GraphError> {
        let (a, b) = (a.into(), b.into());
        if a == b {
            return Err(GraphError::SelfLoop { node: a, line: None });
        }
        Ok(if a < b { Edge { a, b } } else { Edge { a: b, b: a } })
    }

    pub fn a(&self) -> NodeId {
        self.a
    }

    pub fn b(&self) -> NodeId {
        self.b
    }

    pub fn endpoints(&self) -> [NodeId; 2] {
        [self.a, self.b]
    }

    pub fn contains(&self, n: NodeId) -> bool {
        self.a == n || self.b == n
    }

    /// The endpoint that is not `n`, if `n` is an endpoint.
    pub fn other(&self, n: NodeId) -> Option<NodeId> {
        if self.a == n {
            Some(self.b)
        } else if self.b == n {
            Some(self.a)
        } else {
            None
        }
    }

    /// The single endpoint shared with `other`, if exactly one is shared.
    pub fn shared_node(&self, other: &Edge) -> Option<NodeId> {
        let shared: Vec<NodeId> = self
            .endpoints()
            .into_iter()
            .filter(|n| other.contains(*n))
            .collect();
        match shared.as_slice() {
            [n] => Some(*n),
            _ => None,
        }
    }
}

impl fmt::Display for Edge {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}-{}", self.a, self.b)
    }
}

/// The network `G`: users, relationships, symmetric adjacency.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct HealthGraph {
    adjacency: BTreeMap<NodeId, BTreeSet<NodeId>>,
    edges: BTreeSet<Edge>,
}

impl HealthGraph {
    pub fn new() -> Self {
        Self::default()
    }

    /// Builds a graph from `(a, b)` pairs, collapsing duplicates.
    pub fn from_edges<I, N>(edges: I) -> Result<Self, GraphError>
    where
        I: IntoIterator<Item = (N, N)>,
        N: Into<NodeId>,
    {
        let mut g = Self::new();
        for (a, b) in edges {
            g.add_edge(a, b)?;
        }
        Ok(g)
    }

    pub fn add_node(&mut self, n: impl Into<NodeId>) {
        self.adjacency.entry(n.into()).or_default();
    }

    /// Inserts an edge. Returns `false` if it was already present.
    pub fn add_edge(&mut self, a: impl Into<NodeId>, b: impl Into<NodeId>) -> Result<bool, GraphError> {
        let e = Edge::new(a, b)?;
        if !self.edges.insert(e) {
            return Ok(false);
        }
        self.adjacency.entry(e.a).or_default().insert(e.b);
        self.adjacency.entry(e.b).or_default().insert(e.a);
        Ok(true)
    }

    pub fn node_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn nodes(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.adjacency.keys().copied()
    }

    /// Edges in lexicographic `(a, b)` order.
    pub fn edges(&self) -> impl Iterator<Item = &Edge> + '_ {
        self.edges.iter()
    }

    pub fn contains_node(&self, n: NodeId) -> bool {
        self.adjacency.contains_key(&n)
    }

    pub fn contains_edge(&self, e: &Edge) -> bool {
        self.edges.contains(e)
    }

    pub fn neighbors(&self, n: NodeId) -> Result<&BTreeSet<NodeId>, GraphError> {
        self.adjacency.get(&n).ok_or(GraphError::UnknownNode(n))
    }

    pub fn degree(&self, n: NodeId) -> Result<usize, GraphError> {
        self.neighbors(n).map(BTreeSet::len)
    }

    pub fn average_degree(&self) -> f64 {
        if self.adjacency.is_empty() {
            return 0.0;
        }
        2.0 * self.edges.len() as f64 / self.adjacency.len() as f64
    }

    /// `n_+(u)`: the node together with all of its neighbours.
    pub fn inclusive_neighborhood(&self, u: NodeId) -> Result<BTreeSet<NodeId>, GraphError> {
        let mut set = self.neighbors(u)?.clone();
        set.insert(u);
        Ok(set)
    }

    /// Parses the edge-list text format.
    ///
    /// Lines starting with `#` and blank lines are skipped. A line with two
    /// integers declares an edge, a line with one integer declares a node.
    pub fn parse_edge_list(text: &str) -> Result<Self, GraphError> {
        let mut g = Self::new();
        for (idx, raw) in text.lines().enumerate() {
            let line_no = idx + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let ids = line
                .split_whitespace()
                .map(|tok| {
                    tok.parse::<u32>().map_err(|_| GraphError::Parse {
                        line: line_no,
                        message: format!("invalid node id `{tok}`"),
                    })
                })
                .collect::<Result<Vec<_>, _>>()?;
            match ids.as_slice() {
                [n] => g.add_node(*n),
                [a, b] if a == b => {
                    return Err(GraphError::SelfLoop { node: NodeId(*a), line: Some(line_no) })
                }
                [a, b] => {
                    g.add_edge(*a, *b)?;
                }
                _ => {
                    return Err(GraphError::Parse {
                        line: line_no,
                        message: format!("expected 1 or 2 node ids, found {}", ids.len()),
                    })
                }
            }
        }
        Ok(g)
    }

    pub fn load_edge_list(path: impl AsRef<Path>) -> Result<Self, GraphError> {
        let text = std::fs::read_to_string(path)?;
        Self::parse_edge_list(&text)
    }

    /// Canonical writer: isolated nodes as single-token lines, then one
    /// `a b` line per edge with `a < b` in lexicographic order.
    pub fn write_edge_list<W: Write>(&self, mut w: W) -> io::Result<()> {
        for (n, adj) in &self.adjacency {
            if adj.is_empty() {
                writeln!(w, "{n}")?;
            }
        }
        for e in &self.edges {
            writeln!(w, "{} {}", e.a, e.b)?;
        }
        Ok(())
    }

    pub fn to_edge_list_string(&self) -> String {
        let mut buf = Vec::new();
        self.write_edge_list(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("edge list is ASCII")
    }

    /// Uniform random simple graph with exactly `n` nodes (ids `0..n`) and
    /// `m` edges. A pure function of `(n, m, seed)`.
    pub fn generate_synthetic(n: usize, m: usize, seed: u64) -> Result<Self, GraphError> {
        let max = n.saturating_mul(n.saturating_sub(1)) / 2;
        if m > max || n > u32::MAX as usize {
            return Err(GraphError::Infeasible { nodes: n, edges: m, max });
        }
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let mut g = Self::new();
        for i in 0..n {
            g.add_node(i as u32);
        }
        if m * 2 <= max {
            let mut chosen = HashSet::with_capacity(m);
            let mut order = Vec::with_capacity(m);
            while order.len() < m {
                let a = rng.gen_range(0..n as u32);
                let b = rng.gen_range(0..n as u32);
                if a == b {
                    continue;
                }
                let e = Edge::new(a, b)?;
                if chosen.insert(e) {
                    order.push(e);
                }
            }
            for e in order {
                g.add_edge(e.a, e.b)?;
            }
        } else {
            // Dense regime: shuffle the full pair list and keep a prefix.
            let mut all: Vec<(u32, u32)> = (0..n as u32)
                .flat_map(|a| (a + 1..n as u32).map(move |b| (a, b)))
                .collect();
            all.shuffle(&mut rng);
            for &(a, b) in &all[..m] {
                g.add_edge(a, b)?;
            }
        }
        Ok(g)
    }

    /// Same generator parameterized by a target average degree `2m/n`.
    pub fn generate_with_average_degree(n: usize, avg_degree: f64, seed: u64) -> Result<Self, GraphError> {
        let m = (avg_degree * n as f64 / 2.0).round().max(0.0) as usize;
        Self::generate_synthetic(n, m, seed)
    }
}
