use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::{exponential_select, laplace_release, DpError, EpsilonMapping, Mechanism, Payload, SanitizedRelease};
use crate::community::{detect_communities_with, AssignmentPolicy, CommunityPartition, DetectOptions};
use crate::coupling::{coupled_release, NoiseSource};
use crate::graph::{HealthGraph, NodeId};
use crate::rng::derived;

/// Raw data a node shares: numeric values or one item from a candidate set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub enum SensitiveRecord {
    Numeric(Vec<f64>),
    Categorical { value: String, candidates: Vec<String> },
}

impl SensitiveRecord {
    fn validate(&self, node: NodeId) -> Result<(), DpError> {
        match self {
            SensitiveRecord::Numeric(v) => {
                if v.is_empty() {
                    return Err(DpError::InvalidRecord { node, reason: "empty numeric record".into() });
                }
                if let Some(bad) = v.iter().find(|x| !x.is_finite()) {
                    return Err(DpError::NonFinite(*bad));
                }
            }
            SensitiveRecord::Categorical { value, candidates } => {
                if !candidates.contains(value) {
                    return Err(DpError::InvalidRecord { node, reason: format!("`{value}` is not a candidate") });
                }
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PipelineConfig {
    pub mapping: EpsilonMapping,
    pub policy: AssignmentPolicy,
    pub noise_source: NoiseSource,
    /// Global sensitivity `δ` of numeric records.
    pub sensitivity: f64,
    /// Explicit dendrogram cut; `None` maximizes partition density.
    pub threshold: Option<f64>,
}

impl Default for PipelineConfig {
    fn default() -> Self {
        PipelineConfig {
            mapping: EpsilonMapping::default(),
            policy: AssignmentPolicy::MinDensity,
            noise_source: NoiseSource::Coupled,
            sensitivity: 1.0,
            threshold: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutput {
    pub partition: CommunityPartition,
    /// ε of every community, keyed by community id.
    pub community_epsilon: BTreeMap<usize, f64>,
    /// Personal level of each node: ε of the community it is assigned to.
    pub node_epsilon: BTreeMap<NodeId, f64>,
    pub releases: Vec<SanitizedRelease>,
}

/// Personalized sanitization of every node's record.
///
/// Communities and densities are detected first, then each node's personal ε
/// comes from its single assigned community (the policy resolves overlaps).
/// A record is released once to every community its owner belongs to, at that
/// community's ε: numeric records with Laplace noise (independent or drawn
/// from one shared ladder), categorical ones with the exponential mechanism.
/// Each record draws from its own stream derived from `(seed, node)`.
pub fn sanitize_pipeline(
    graph: &HealthGraph,
    records: &BTreeMap<NodeId, SensitiveRecord>,
    config: &PipelineConfig,
    seed: u64,
) -> Result<PipelineOutput, DpError> {
    super::mechanisms::require_positive("sensitivity", config.sensitivity)?;
    let (_, partition) = detect_communities_with(
        graph,
        &DetectOptions { threshold: config.threshold, policy: config.policy },
    )?;
    let community_epsilon: BTreeMap<usize, f64> = partition
        .communities
        .iter()
        .map(|c| config.mapping.epsilon(c.density).map(|e| (c.id, e)))
        .collect::<Result<_, _>>()?;
    let node_epsilon: BTreeMap<NodeId, f64> = partition
        .node_assignment
        .iter()
        .map(|(&n, cid)| (n, community_epsilon[cid]))
        .collect();
    let memberships = partition.memberships();

    let mut releases = Vec::new();
    for (&node, record) in records {
        if !graph.contains_node(node) {
            return Err(DpError::Community(crate::graph::GraphError::UnknownNode(node).into()));
        }
        record.validate(node)?;
        let targets: Vec<usize> = match memberships.get(&node) {
            Some(ids) => ids.clone(),
            None => vec![partition.node_assignment[&node]],
        };
        let epsilons: Vec<f64> = targets.iter().map(|c| community_epsilon[c]).collect();
        let mut rng = derived(seed, u64::from(node.0));
        match record {
            SensitiveRecord::Numeric(values) => {
                let payloads = match config.noise_source {
                    NoiseSource::Independent => epsilons
                        .iter()
                        .map(|&e| laplace_release(values, config.sensitivity, e, &mut rng))
                        .collect::<Result<Vec<_>, _>>()?,
                    NoiseSource::Coupled => coupled_release(values, &epsilons, config.sensitivity, &mut rng)?,
                };
                for ((&cid, &eps), payload) in targets.iter().zip(&epsilons).zip(payloads) {
                    releases.push(SanitizedRelease {
                        releaser: node,
                        community_id: cid,
                        epsilon: eps,
                        payload: Payload::Numeric(payload),
                        mechanism: Mechanism::Laplace,
                        noise_source: config.noise_source,
                    });
                }
            }
            SensitiveRecord::Categorical { value, candidates } => {
                let utilities: Vec<f64> = candidates.iter().map(|c| if c == value { 1.0 } else { 0.0 }).collect();
                for (&cid, &eps) in targets.iter().zip(&epsilons) {
                    let pick = exponential_select(&utilities, 1.0, eps, &mut rng)?;
                    releases.push(SanitizedRelease {
                        releaser: node,
                        community_id: cid,
                        epsilon: eps,
                        payload: Payload::Item(candidates[pick].clone()),
                        mechanism: Mechanism::Exponential,
                        noise_source: NoiseSource::Independent,
                    });
                }
            }
        }
    }
    Ok(PipelineOutput { partition, community_epsilon, node_epsilon, releases })
}
