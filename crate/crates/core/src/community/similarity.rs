use std::cmp::Ordering;
use std::collections::BTreeMap;
use std::fmt;

use rayon::prelude::*;

use super::CommunityError;
use crate::graph::{Edge, HealthGraph, NodeId};

/// Jaccard ratio kept as an exact fraction so that equal similarities compare
/// equal regardless of how they were reduced.
#[derive(Debug, Clone, Copy)]
pub struct Similarity {
    num: u32,
    den: u32,
}

impl Similarity {
    pub fn new(num: u32, den: u32) -> Self {
        assert!(den > 0 && num <= den, "similarity must lie in [0, 1]");
        Similarity { num, den }
    }

    pub fn numerator(&self) -> u32 {
        self.num
    }

    pub fn denominator(&self) -> u32 {
        self.den
    }

    pub fn value(&self) -> f64 {
        f64::from(self.num) / f64::from(self.den)
    }
}

impl PartialEq for Similarity {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Similarity {}

impl PartialOrd for Similarity {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Similarity {
    fn cmp(&self, other: &Self) -> Ordering {
        (u64::from(self.num) * u64::from(other.den)).cmp(&(u64::from(other.num) * u64::from(self.den)))
    }
}

impl fmt::Display for Similarity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

/// Similarity of two edges sharing exactly one endpoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EdgePairSimilarity {
    pub e1: Edge,
    pub e2: Edge,
    pub shared: NodeId,
    pub score: Similarity,
}

fn jaccard(a: &[NodeId], b: &[NodeId]) -> Similarity {
    // both inputs sorted
    let (mut i, mut j, mut inter) = (0, 0, 0u32);
    while i < a.len() && j < b.len() {
        match a[i].cmp(&b[j]) {
            Ordering::Less => i += 1,
            Ordering::Greater => j += 1,
            Ordering::Equal => {
                inter += 1;
                i += 1;
                j += 1;
            }
        }
    }
    let union = (a.len() + b.len()) as u32 - inter;
    Similarity::new(inter, union)
}

fn inclusive_sorted(g: &HealthGraph, n: NodeId) -> Result<Vec<NodeId>, CommunityError> {
    Ok(g.inclusive_neighborhood(n)?.into_iter().collect())
}

/// `S(e_ij, e_ik) = |n+(j) ∩ n+(k)| / |n+(j) ∪ n+(k)|` for edges sharing node `i`.
pub fn edge_similarity(g: &HealthGraph, e1: &Edge, e2: &Edge) -> Result<Similarity, CommunityError> {
    if e1 == e2 {
        return Err(CommunityError::IdenticalEdges(*e1));
    }
    for e in [e1, e2] {
        if !g.contains_edge(e) {
            return Err(CommunityError::UnknownEdge(*e));
        }
    }
    let shared = e1.shared_node(e2).ok_or(CommunityError::NotAdjacent(*e1, *e2))?;
    let j = e1.other(shared).expect("shared node is an endpoint");
    let k = e2.other(shared).expect("shared node is an endpoint");
    Ok(jaccard(&inclusive_sorted(g, j)?, &inclusive_sorted(g, k)?))
}

/// Similarities of every adjacent edge pair, each pair reported once with
/// `e1 < e2`, ordered by `(e1, e2)`.
pub fn all_pair_similarities(g: &HealthGraph) -> Vec<EdgePairSimilarity> {
    let hoods: BTreeMap<NodeId, Vec<NodeId>> = g
        .nodes()
        .map(|n| (n, inclusive_sorted(g, n).expect("node from graph")))
        .collect();
    let centers: Vec<NodeId> = g.nodes().collect();
    let mut pairs: Vec<EdgePairSimilarity> = centers
        .par_iter()
        .flat_map_iter(|&k| {
            let nb: Vec<NodeId> = g.neighbors(k).expect("node from graph").iter().copied().collect();
            let hoods = &hoods;
            let mut out = Vec::with_capacity(nb.len() * nb.len().saturating_sub(1) / 2);
            for (x, &i) in nb.iter().enumerate() {
                for &j in &nb[x + 1..] {
                    let ei = Edge::new(k, i).expect("no self-loops");
                    let ej = Edge::new(k, j).expect("no self-loops");
                    let (e1, e2) = if ei < ej { (ei, ej) } else { (ej, ei) };
                    out.push(EdgePairSimilarity {
                        e1,
                        e2,
                        shared: k,
                        score: jaccard(&hoods[&i], &hoods[&j]),
                    });
                }
            }
            out
        })
        .collect();
    pairs.sort_by_key(|p| (p.e1, p.e2));
    pairs
}

#[cfg(test)]
mod tests {
    use super::*;

    fn e(a: u32, b: u32) -> Edge {
        Edge::new(a, b).unwrap()
    }

    #[test]
    fn triangle_pair_is_one() {
        let g = HealthGraph::from_edges([(1u32, 2u32), (2, 3), (1, 3)]).unwrap();
        let s = edge_similarity(&g, &e(1, 2), &e(1, 3)).unwrap();
        assert_eq!(s, Similarity::new(1, 1));
    }

    #[test]
    fn path_pair_is_one_third() {
        let g = HealthGraph::from_edges([(2u32, 1u32), (1, 3)]).unwrap();
        let s = edge_similarity(&g, &e(1, 2), &e(1, 3)).unwrap();
        assert_eq!(s, Similarity::new(1, 3));
        assert!((s.value() - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn star_leaves_one_third() {
        let g = HealthGraph::from_edges((1u32..=4).map(|l| (0u32, l))).unwrap();
        assert_eq!(edge_similarity(&g, &e(0, 1), &e(0, 2)).unwrap(), Similarity::new(2, 6));
    }

    #[test]
    fn rejects_bad_pairs() {
        let g = HealthGraph::from_edges([(1u32, 2u32), (3, 4), (2, 3)]).unwrap();
        assert!(matches!(
            edge_similarity(&g, &e(1, 2), &e(3, 4)),
            Err(CommunityError::NotAdjacent(..))
        ));
        assert!(matches!(
            edge_similarity(&g, &e(1, 2), &e(1, 2)),
            Err(CommunityError::IdenticalEdges(_))
        ));
        assert!(matches!(
            edge_similarity(&g, &e(1, 2), &e(1, 9)),
            Err(CommunityError::UnknownEdge(_))
        ));
    }

    #[test]
    fn fraction_equality_is_exact() {
        assert_eq!(Similarity::new(1, 3), Similarity::new(2, 6));
        assert!(Similarity::new(3, 4) > Similarity::new(2, 3));
    }

    #[test]
    fn pair_enumeration_counts() {
        // star with 4 leaves: C(4,2) pairs all through the centre
        let g = HealthGraph::from_edges((1u32..=4).map(|l| (0u32, l))).unwrap();
        let pairs = all_pair_similarities(&g);
        assert_eq!(pairs.len(), 6);
        assert!(pairs.iter().all(|p| p.shared == NodeId(0)));
        let tri = HealthGraph::from_edges([(1u32, 2u32), (2, 3), (1, 3)]).unwrap();
        assert_eq!(all_pair_similarities(&tri).len(), 3);
    }
}
