//! Edge-pair link-community detection.
//!
//! Every edge starts as its own community. Adjacent edge pairs are ranked by
//! the Jaccard similarity of their non-shared endpoints' inclusive
//! neighbourhoods and merged in descending order, pairs of equal similarity in
//! one round. The resulting dendrogram is cut where the partition density
//! `D = (1/M) Σ m_c D_c` is largest, unless an explicit similarity threshold is
//! supplied. Nodes that end up in several link communities are then resolved to
//! exactly one by an [`AssignmentPolicy`].

mod detect;
mod export;
mod similarity;

use std::collections::{BTreeMap, BTreeSet};
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::graph::{Edge, GraphError, NodeId};

pub use detect::{detect_communities, detect_communities_with, CutLevel, Dendrogram, DetectOptions, MergeStep};
pub use export::{read_partition, write_dendrogram_csv, write_partition, PartitionRecord};
pub use similarity::{all_pair_similarities, edge_similarity, EdgePairSimilarity, Similarity};

#[derive(Debug, Error)]
pub enum CommunityError {
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error("graph has no edges")]
    EmptyGraph,
    #[error("edges {0} and {1} do not share exactly one node")]
    NotAdjacent(Edge, Edge),
    #[error("edge {0} paired with itself")]
    IdenticalEdges(Edge),
    #[error("edge {0} is not in the graph")]
    UnknownEdge(Edge),
    #[error("no connected simple graph has {edges} edges on {nodes} nodes")]
    InvalidCounts { edges: usize, nodes: usize },
    #[error("invalid partition file, line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),
}

/// How a node belonging to several link communities is resolved to one.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AssignmentPolicy {
    /// Lowest density among incident communities (strongest protection).
    #[default]
    MinDensity,
    /// Highest density among incident communities.
    MaxDensity,
}

impl FromStr for AssignmentPolicy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "min-density" | "min" => Ok(Self::MinDensity),
            "max-density" | "max" => Ok(Self::MaxDensity),
            other => Err(format!("unknown assignment policy `{other}`")),
        }
    }
}

/// A link community `P_c`: a connected set of edges and the nodes they touch.
#[derive(Debug, Clone, PartialEq)]
pub struct Community {
    pub id: usize,
    pub edges: Vec<Edge>,
    pub nodes: BTreeSet<NodeId>,
    pub density: f64,
}

impl Community {
    pub(crate) fn from_edges(id: usize, mut edges: Vec<Edge>) -> Self {
        edges.sort();
        let nodes: BTreeSet<NodeId> = edges.iter().flat_map(Edge::endpoints).collect();
        let density = community_density(edges.len(), nodes.len()).expect("merged edges form a connected set");
        Community { id, edges, nodes, density }
    }

    pub(crate) fn singleton(id: usize, node: NodeId) -> Self {
        Community { id, edges: Vec::new(), nodes: BTreeSet::from([node]), density: 0.0 }
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }
}

/// Final communities at the chosen cut plus the single-community node map.
#[derive(Debug, Clone, PartialEq)]
pub struct CommunityPartition {
    pub communities: Vec<Community>,
    pub node_assignment: BTreeMap<NodeId, usize>,
    pub network_density: f64,
    /// Similarity height of the cut; `None` when no merge was applied.
    pub cut_similarity: Option<f64>,
    pub policy: AssignmentPolicy,
}

impl CommunityPartition {
    pub fn community(&self, id: usize) -> Option<&Community> {
        self.communities.get(id).filter(|c| c.id == id)
    }

    /// Every community each node touches, ids ascending.
    pub fn memberships(&self) -> BTreeMap<NodeId, Vec<usize>> {
        let mut out: BTreeMap<NodeId, Vec<usize>> = BTreeMap::new();
        for c in &self.communities {
            for &n in &c.nodes {
                out.entry(n).or_default().push(c.id);
            }
        }
        out
    }

    pub fn assigned_community(&self, node: NodeId) -> Option<&Community> {
        self.node_assignment.get(&node).and_then(|&id| self.community(id))
    }

    pub fn total_edges(&self) -> usize {
        self.communities.iter().map(Community::edge_count).sum()
    }
}

/// Normalized density `D_c = (m − (n−1)) / (n(n−1)/2 − (n−1))`, with
/// `D_c = 0` for a two-node community.
pub fn community_density(edges: usize, nodes: usize) -> Result<f64, CommunityError> {
    let invalid = CommunityError::InvalidCounts { edges, nodes };
    if nodes < 2 || edges + 1 < nodes || edges > nodes * (nodes - 1) / 2 {
        return Err(invalid);
    }
    if nodes == 2 {
        return Ok(0.0);
    }
    let excess = (edges + 1 - nodes) as f64;
    let span = ((nodes - 1) * (nodes - 2) / 2) as f64;
    Ok(excess / span)
}

/// `D = (1/M) Σ_c m_c D_c` with `M` the total edge count.
pub fn network_density(communities: &[Community]) -> f64 {
    let total: usize = communities.iter().map(Community::edge_count).sum();
    if total == 0 {
        return 0.0;
    }
    let weighted: f64 = communities.iter().map(|c| c.edge_count() as f64 * c.density).sum();
    weighted / total as f64
}

/// Resolves each node to exactly one incident community.
///
/// Ties go to the smallest community id. Nodes from `universe` that appear in
/// no community get a fresh singleton community of density 0 appended to
/// `communities`.
pub fn assign_nodes(
    universe: impl IntoIterator<Item = NodeId>,
    communities: &mut Vec<Community>,
    policy: AssignmentPolicy,
) -> BTreeMap<NodeId, usize> {
    let mut best: BTreeMap<NodeId, (f64, usize)> = BTreeMap::new();
    for c in communities.iter() {
        for &n in &c.nodes {
            best.entry(n)
                .and_modify(|cur| {
                    let better = match policy {
                        AssignmentPolicy::MinDensity => c.density < cur.0,
                        AssignmentPolicy::MaxDensity => c.density > cur.0,
                    };
                    if better || (c.density == cur.0 && c.id < cur.1) {
                        *cur = (c.density, c.id);
                    }
                })
                .or_insert((c.density, c.id));
        }
    }
    let mut assignment: BTreeMap<NodeId, usize> = best.into_iter().map(|(n, (_, id))| (n, id)).collect();
    for n in universe {
        assignment.entry(n).or_insert_with(|| {
            let id = communities.len();
            communities.push(Community::singleton(id, n));
            id
        });
    }
    assignment
}
