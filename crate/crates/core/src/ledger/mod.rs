//! Per-community proof-of-work sub-chains of sanitized releases.

mod chain;
mod hashrate;
mod header;
mod merkle;
mod poisoning;
mod tx;

use sha2::{Digest, Sha256};
use thiserror::Error;

pub use chain::{
    mine_block, Block, DifficultyRule, FailureKind, MinedBlock, SubChain, ValidationFailure, ValidationReport,
    MAX_NBITS,
};
pub use hashrate::{required_hashrate, required_hashrate_with, DOCUMENTED_RAMP};
pub use header::{leading_zero_bits, BlockHeader, BLOCK_VERSION, HEADER_LEN};
pub use merkle::merkle_root;
pub use poisoning::{simulate_poisoning, PoisoningConfig, PoisoningReport};
pub use tx::Transaction;

pub type Hash = [u8; 32];

pub const ZERO_HASH: Hash = [0; 32];

#[derive(Debug, Error)]
pub enum LedgerError {
    #[error("transaction payload is empty")]
    EmptyPayload,
    #[error("payload of {0} bytes exceeds the u32 length field")]
    PayloadTooLarge(usize),
    #[error("epsilon_milli must be positive")]
    ZeroEpsilon,
    #[error("epsilon {0} cannot be stored as a positive fixed-point value")]
    InvalidEpsilon(f64),
    #[error("community id {0} does not fit in u32")]
    CommunityOutOfRange(usize),
    #[error("a block needs at least one transaction")]
    EmptyTransactions,
    #[error("nbits {0} exceeds 255")]
    NbitsTooLarge(u32),
    #[error("no qualifying nonce after {attempts} attempts")]
    Exhausted { attempts: u64 },
    #[error("transaction for community {tx} offered to chain {chain}")]
    WrongCommunity { chain: u32, tx: u32 },
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("malformed chain data: {0}")]
    Decode(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub fn sha256(bytes: &[u8]) -> Hash {
    Sha256::digest(bytes).into()
}

pub fn hash_hex(hash: &Hash) -> String {
    hex::encode(hash)
}

pub fn double_sha256(bytes: &[u8]) -> Hash {
    sha256(&sha256(bytes))
}
