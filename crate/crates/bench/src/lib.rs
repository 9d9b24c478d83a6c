//! Shared fixtures for the criterion benches.

use trustdp::ledger::Transaction;
use trustdp::{HealthGraph, NodeId};

/// Synthetic graph with the given size, seeded for repeatable runs.
pub fn graph(nodes: usize, edges: usize) -> HealthGraph {
    HealthGraph::generate_synthetic(nodes, edges, 42).expect("feasible size")
}

/// `n` distinct single-community transactions.
pub fn transactions(n: u32) -> Vec<Transaction> {
    (0..n)
        .map(|i| Transaction::new(NodeId(i), 0, 1000, i, i.to_le_bytes().to_vec()).expect("valid tx"))
        .collect()
}
