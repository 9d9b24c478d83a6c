use num_bigint::BigUint;

use super::{DifficultyRule, LedgerError};

/// Ramp whose cumulative cost passes 10¹³ at 30 blocks: 32 leading zero bits,
/// one more every 3 blocks.
pub const DOCUMENTED_RAMP: DifficultyRule = DifficultyRule::Ramp { base: 32, every: 3 };

/// Expected hash evaluations to re-mine `blocks` blocks at fixed difficulty:
/// `k · 2^nbits`.
pub fn required_hashrate(blocks: usize, nbits: u32) -> Result<BigUint, LedgerError> {
    required_hashrate_with(blocks, &DifficultyRule::Fixed { nbits })
}

/// Expected hash evaluations to re-mine the first `blocks` blocks under
/// `rule`: `Σ 2^{nbits_i}`.
pub fn required_hashrate_with(blocks: usize, rule: &DifficultyRule) -> Result<BigUint, LedgerError> {
    if blocks == 0 {
        return Err(LedgerError::InvalidParams("block count must be at least 1".into()));
    }
    rule.validate()?;
    Ok((0..blocks).map(|i| BigUint::from(1u8) << rule.nbits_at(i)).sum())
}
