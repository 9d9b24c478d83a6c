use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{merkle_root, LedgerError, Transaction};
use crate::graph::NodeId;
use crate::rng::par_trials;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PoisoningConfig {
    /// Community size N; every member validates.
    pub validators: usize,
    /// Fraction f of validators controlled by the adversary.
    pub adversary_fraction: f64,
    /// Fraction q of each proposed block's payloads that are falsified.
    pub poison_fraction: f64,
    pub rounds: usize,
    /// Sanitized records per proposed block.
    pub records: usize,
}

impl PoisoningConfig {
    pub fn new(validators: usize, adversary_fraction: f64, poison_fraction: f64, rounds: usize) -> Self {
        PoisoningConfig { validators, adversary_fraction, poison_fraction, rounds, records: 50 }
    }

    pub fn validate(&self) -> Result<(), LedgerError> {
        let unit = |x: f64| (0.0..=1.0).contains(&x);
        if self.validators == 0 || self.rounds == 0 || self.records == 0 {
            return Err(LedgerError::InvalidParams("validators, rounds and records must be positive".into()));
        }
        if !unit(self.adversary_fraction) || !unit(self.poison_fraction) {
            return Err(LedgerError::InvalidParams("fractions must lie in [0, 1]".into()));
        }
        Ok(())
    }

    /// `round(f·N)`.
    pub fn adversaries(&self) -> usize {
        (self.adversary_fraction * self.validators as f64).round() as usize
    }

    fn falsified(&self) -> usize {
        (self.poison_fraction * self.records as f64).round() as usize
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PoisoningReport {
    pub validators: usize,
    pub adversaries: usize,
    pub rounds: usize,
    pub committed: usize,
    pub acceptance_rate: f64,
    /// Mean over rounds of the mean absolute error of the committed data.
    pub aae: f64,
}

fn block_txs(values: &[f64], round: u32) -> Vec<Transaction> {
    values
        .iter()
        .enumerate()
        .map(|(i, v)| Transaction {
            releaser: NodeId(i as u32),
            community_id: 0,
            epsilon_milli: 1000,
            timestamp: round,
            payload: v.to_le_bytes().to_vec(),
        })
        .collect()
}

/// Honest-majority vote on adversarial block proposals.
///
/// Each round the adversary proposes the round's sanitized records with a
/// q-fraction shifted away from their true values. Honest validators compare
/// the proposal's Merkle root with the root of their own copy and accept only
/// on a match; adversarial validators always accept. The proposal commits
/// when acceptances exceed N/2, otherwise the honest block stands.
pub fn simulate_poisoning(config: &PoisoningConfig, seed: u64) -> Result<PoisoningReport, LedgerError> {
    config.validate()?;
    let adversaries = config.adversaries();
    let honest = config.validators - adversaries;
    let falsified = config.falsified();
    let chunks = par_trials(config.rounds, seed, |rng, n| -> Result<(usize, f64), LedgerError> {
        let (mut committed, mut err_sum) = (0usize, 0.0);
        for r in 0..n {
            let truth: Vec<f64> = (0..config.records).map(|_| rng.gen_range(-100.0..100.0)).collect();
            let mut proposal = truth.clone();
            for i in sample(rng, config.records, falsified) {
                let shift: f64 = rng.gen_range(1.0..10.0);
                proposal[i] += if rng.gen::<bool>() { shift } else { -shift };
            }
            let honest_root = merkle_root(&block_txs(&truth, r as u32))?;
            let proposal_root = merkle_root(&block_txs(&proposal, r as u32))?;
            let honest_votes = if proposal_root == honest_root { honest } else { 0 };
            if 2 * (adversaries + honest_votes) > config.validators {
                committed += 1;
                err_sum += proposal.iter().zip(&truth).map(|(p, t)| (p - t).abs()).sum::<f64>() / config.records as f64;
            }
        }
        Ok((committed, err_sum))
    });
    let (mut committed, mut err_sum) = (0, 0.0);
    for c in chunks {
        let (k, e) = c?;
        committed += k;
        err_sum += e;
    }
    Ok(PoisoningReport {
        validators: config.validators,
        adversaries,
        rounds: config.rounds,
        committed,
        acceptance_rate: committed as f64 / config.rounds as f64,
        aae: err_sum / config.rounds as f64,
    })
}
