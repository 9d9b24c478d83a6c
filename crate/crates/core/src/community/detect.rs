use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet};

use super::{
    all_pair_similarities, assign_nodes, network_density, AssignmentPolicy, Community, CommunityError,
    CommunityPartition, Similarity,
};
use crate::graph::{Edge, HealthGraph, NodeId};

/// Densities equal within this margin are treated as a tie; the finer cut wins.
const DENSITY_TIE: f64 = 1e-12;

/// One agglomeration: clusters `left` and `right` join into `id`.
///
/// Leaves are numbered `0..E` in edge order; merged clusters continue from `E`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MergeStep {
    pub id: usize,
    pub left: usize,
    pub right: usize,
    pub similarity: Similarity,
}

/// State of the hierarchy after all merges of one similarity value.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CutLevel {
    pub similarity: Similarity,
    /// Number of merge steps applied once this level is complete.
    pub steps_end: usize,
    pub community_count: usize,
    pub partition_density: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dendrogram {
    pub leaves: Vec<Edge>,
    pub steps: Vec<MergeStep>,
    pub levels: Vec<CutLevel>,
}

impl Dendrogram {
    /// Edge clusters after the first `steps` merges, each sorted, ordered by
    /// their smallest edge.
    pub fn clusters_after(&self, steps: usize) -> Vec<Vec<Edge>> {
        let mut uf = UnionFind::new(self.leaves.len() + steps);
        for s in &self.steps[..steps] {
            uf.union_into(s.left, s.id);
            uf.union_into(s.right, s.id);
        }
        let mut groups: BTreeMap<usize, Vec<Edge>> = BTreeMap::new();
        for (i, e) in self.leaves.iter().enumerate() {
            groups.entry(uf.find(i)).or_default().push(*e);
        }
        let mut out: Vec<Vec<Edge>> = groups.into_values().collect();
        for g in &mut out {
            g.sort();
        }
        out.sort_by(|a, b| a[0].cmp(&b[0]));
        out
    }

    /// Partition density of the leaves-only cut followed by every level.
    pub fn density_profile(&self) -> Vec<(Option<Similarity>, f64)> {
        std::iter::once((None, 0.0))
            .chain(self.levels.iter().map(|l| (Some(l.similarity), l.partition_density)))
            .collect()
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct DetectOptions {
    /// Similarity cut height; `None` selects the density-maximizing cut.
    pub threshold: Option<f64>,
    pub policy: AssignmentPolicy,
}

pub fn detect_communities(
    g: &HealthGraph,
    threshold: Option<f64>,
) -> Result<(Dendrogram, CommunityPartition), CommunityError> {
    detect_communities_with(g, &DetectOptions { threshold, ..Default::default() })
}

pub fn detect_communities_with(
    g: &HealthGraph,
    opts: &DetectOptions,
) -> Result<(Dendrogram, CommunityPartition), CommunityError> {
    if g.edge_count() == 0 {
        return Err(CommunityError::EmptyGraph);
    }
    let leaves: Vec<Edge> = g.edges().copied().collect();
    let index: HashMap<Edge, usize> = leaves.iter().enumerate().map(|(i, e)| (*e, i)).collect();
    let total_edges = leaves.len() as f64;

    let mut pairs = all_pair_similarities(g);
    // descending similarity, lexicographic edge order within a tie
    pairs.sort_by(|p, q| q.score.cmp(&p.score).then((p.e1, p.e2).cmp(&(q.e1, q.e2))));

    let capacity = 2 * leaves.len();
    let mut uf = UnionFind::new(capacity);
    let mut label: Vec<usize> = (0..leaves.len()).collect(); // root -> cluster id
    let mut members: Vec<ClusterStats> = leaves.iter().map(ClusterStats::leaf).collect();
    let mut dense_roots: BTreeSet<usize> = BTreeSet::new();
    let mut clusters = leaves.len();
    let mut steps = Vec::new();
    let mut levels = Vec::new();

    let mut start = 0;
    while start < pairs.len() {
        let score = pairs[start].score;
        let mut end = start;
        while end < pairs.len() && pairs[end].score == score {
            let (i, j) = (index[&pairs[end].e1], index[&pairs[end].e2]);
            let (ri, rj) = (uf.find(i), uf.find(j));
            if ri != rj {
                let id = leaves.len() + steps.len();
                steps.push(MergeStep { id, left: label[ri], right: label[rj], similarity: score });
                // keep the larger member set as the survivor
                let (keep, drop) = if members[ri].nodes.len() >= members[rj].nodes.len() { (ri, rj) } else { (rj, ri) };
                let absorbed = std::mem::take(&mut members[drop]);
                members[keep].absorb(absorbed);
                uf.link(drop, keep);
                label[keep] = id;
                dense_roots.remove(&drop);
                if members[keep].nodes.len() > 2 {
                    dense_roots.insert(keep);
                }
                clusters -= 1;
            }
            end += 1;
        }
        let weighted: f64 = dense_roots.iter().map(|&r| members[r].weighted_density()).sum();
        levels.push(CutLevel {
            similarity: score,
            steps_end: steps.len(),
            community_count: clusters,
            partition_density: weighted / total_edges,
        });
        start = end;
    }

    let dendrogram = Dendrogram { leaves, steps, levels };
    let chosen = match opts.threshold {
        Some(t) => dendrogram.levels.iter().rposition(|l| l.similarity.value() >= t),
        None => best_level(&dendrogram.levels),
    };
    let (steps_end, cut_similarity) = match chosen {
        Some(i) => (dendrogram.levels[i].steps_end, Some(dendrogram.levels[i].similarity.value())),
        None => (0, None),
    };

    let mut communities: Vec<Community> = dendrogram
        .clusters_after(steps_end)
        .into_iter()
        .enumerate()
        .map(|(id, edges)| Community::from_edges(id, edges))
        .collect();
    let node_assignment = assign_nodes(g.nodes(), &mut communities, opts.policy);
    let partition = CommunityPartition {
        network_density: network_density(&communities),
        communities,
        node_assignment,
        cut_similarity,
        policy: opts.policy,
    };
    Ok((dendrogram, partition))
}

/// Index of the first level attaining the maximum density, or `None` when no
/// level beats the leaves-only cut (density 0).
fn best_level(levels: &[CutLevel]) -> Option<usize> {
    let max = levels.iter().map(|l| l.partition_density).fold(0.0, f64::max);
    if max <= DENSITY_TIE {
        return None;
    }
    levels.iter().position(|l| l.partition_density >= max - DENSITY_TIE)
}

#[derive(Debug, Default)]
struct ClusterStats {
    edges: usize,
    nodes: HashSet<NodeId>,
}

impl ClusterStats {
    fn leaf(e: &Edge) -> Self {
        ClusterStats { edges: 1, nodes: e.endpoints().into_iter().collect() }
    }

    fn absorb(&mut self, other: ClusterStats) {
        self.edges += other.edges;
        self.nodes.extend(other.nodes);
    }

    fn weighted_density(&self) -> f64 {
        let n = self.nodes.len() as f64;
        let m = self.edges as f64;
        if self.nodes.len() <= 2 {
            return 0.0;
        }
        m * (m - (n - 1.0)) / ((n - 1.0) * (n - 2.0) / 2.0)
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn link(&mut self, child_root: usize, root: usize) {
        self.parent[child_root] = root;
    }

    fn union_into(&mut self, x: usize, target: usize) {
        let r = self.find(x);
        if r != target {
            self.parent[r] = target;
        }
    }
}
