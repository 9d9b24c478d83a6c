use serde::{Deserialize, Serialize};

use super::LedgerError;
use crate::dp::SanitizedRelease;
use crate::graph::NodeId;

/// One sanitized release as stored on a sub-chain.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Transaction {
    pub releaser: NodeId,
    pub community_id: u32,
    /// ε × 1000, fixed point.
    pub epsilon_milli: u32,
    pub timestamp: u32,
    pub payload: Vec<u8>,
}

/// Fixed-size prefix of the canonical encoding.
pub(crate) const TX_PREFIX_LEN: usize = 20;

impl Transaction {
    pub fn new(
        releaser: NodeId,
        community_id: u32,
        epsilon_milli: u32,
        timestamp: u32,
        payload: Vec<u8>,
    ) -> Result<Self, LedgerError> {
        if payload.is_empty() {
            return Err(LedgerError::EmptyPayload);
        }
        if epsilon_milli == 0 {
            return Err(LedgerError::ZeroEpsilon);
        }
        if u32::try_from(payload.len()).is_err() {
            return Err(LedgerError::PayloadTooLarge(payload.len()));
        }
        Ok(Transaction { releaser, community_id, epsilon_milli, timestamp, payload })
    }

    /// Rounds ε to the nearest thousandth, never below one thousandth.
    pub fn epsilon_to_milli(epsilon: f64) -> Result<u32, LedgerError> {
        if !(epsilon.is_finite() && epsilon > 0.0) || epsilon * 1000.0 > f64::from(u32::MAX) {
            return Err(LedgerError::InvalidEpsilon(epsilon));
        }
        Ok(((epsilon * 1000.0).round() as u32).max(1))
    }

    pub fn from_release(release: &SanitizedRelease, timestamp: u32) -> Result<Self, LedgerError> {
        let community_id =
            u32::try_from(release.community_id).map_err(|_| LedgerError::CommunityOutOfRange(release.community_id))?;
        Transaction::new(
            release.releaser,
            community_id,
            Transaction::epsilon_to_milli(release.epsilon)?,
            timestamp,
            release.payload.to_bytes(),
        )
    }

    pub fn epsilon(&self) -> f64 {
        f64::from(self.epsilon_milli) / 1000.0
    }

    /// `releaser ‖ community ‖ ε_milli ‖ timestamp ‖ len ‖ payload`, integers LE.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(TX_PREFIX_LEN + self.payload.len());
        self.write_bytes(&mut out);
        out
    }

    pub(crate) fn write_bytes(&self, out: &mut Vec<u8>) {
        for field in [self.releaser.0, self.community_id, self.epsilon_milli, self.timestamp, self.payload.len() as u32] {
            out.extend_from_slice(&field.to_le_bytes());
        }
        out.extend_from_slice(&self.payload);
    }

    /// Decodes one transaction from the front of `bytes`, returning it and
    /// the number of bytes consumed.
    pub fn decode(bytes: &[u8]) -> Result<(Self, usize), LedgerError> {
        if bytes.len() < TX_PREFIX_LEN {
            return Err(LedgerError::Decode("truncated transaction".into()));
        }
        let word = |i: usize| u32::from_le_bytes(bytes[4 * i..4 * i + 4].try_into().expect("4 bytes"));
        let len = word(4) as usize;
        let end = TX_PREFIX_LEN
            .checked_add(len)
            .filter(|&e| e <= bytes.len())
            .ok_or_else(|| LedgerError::Decode("transaction payload overruns input".into()))?;
        let tx = Transaction::new(NodeId(word(0)), word(1), word(2), word(3), bytes[TX_PREFIX_LEN..end].to_vec())
            .map_err(|e| LedgerError::Decode(e.to_string()))?;
        Ok((tx, end))
    }
}
