use std::fmt;
use std::fs::{File, OpenOptions};
use std::io::{Read, Write};
use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::header::{leading_zero_bits, BLOCK_VERSION, HEADER_LEN};
use super::{merkle_root, BlockHeader, Hash, LedgerError, Transaction, ZERO_HASH};

pub const MAX_NBITS: u32 = 255;
const FILE_MAGIC: &[u8; 8] = b"SHNCHAIN";
const FILE_HEADER_LEN: usize = 8 + 4 + 1 + 4 + 4;
/// Attempts tried serially before mining fans out across threads.
const SERIAL_ATTEMPTS: u64 = 4096;
const PARALLEL_BATCH: u64 = 1 << 16;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Block {
    pub header: BlockHeader,
    pub transactions: Vec<Transaction>,
}

impl Block {
    pub fn hash(&self) -> Hash {
        self.header.hash()
    }

    /// `header ‖ tx count (u32 LE) ‖ transactions`.
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + 4 + 64 * self.transactions.len());
        out.extend_from_slice(&self.header.to_bytes());
        out.extend_from_slice(&(self.transactions.len() as u32).to_le_bytes());
        for tx in &self.transactions {
            tx.write_bytes(&mut out);
        }
        out
    }

    /// Strict inverse of [`Block::to_bytes`]; trailing bytes are an error.
    pub fn from_bytes(bytes: &[u8]) -> Result<Self, LedgerError> {
        if bytes.len() < HEADER_LEN + 4 {
            return Err(LedgerError::Decode("truncated block".into()));
        }
        let header = BlockHeader::from_bytes(&bytes[..HEADER_LEN])?;
        let count = u32::from_le_bytes(bytes[HEADER_LEN..HEADER_LEN + 4].try_into().expect("4 bytes")) as usize;
        let mut at = HEADER_LEN + 4;
        let mut transactions = Vec::with_capacity(count.min(bytes.len() / 21));
        for _ in 0..count {
            let (tx, used) = Transaction::decode(&bytes[at..])?;
            transactions.push(tx);
            at += used;
        }
        if at != bytes.len() {
            return Err(LedgerError::Decode(format!("{} trailing bytes after block", bytes.len() - at)));
        }
        Ok(Block { header, transactions })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MinedBlock {
    pub block: Block,
    pub attempts: u64,
}

/// Searches for the smallest nonce `≥ nonce_start` whose header hash has at
/// least `nbits` leading zero bits. Later batches are split across threads;
/// the lowest qualifying nonce always wins.
pub fn mine_block(
    parent_hash: Hash,
    transactions: Vec<Transaction>,
    timestamp: u32,
    nbits: u32,
    nonce_start: u32,
    max_attempts: u64,
) -> Result<MinedBlock, LedgerError> {
    if nbits > MAX_NBITS {
        return Err(LedgerError::NbitsTooLarge(nbits));
    }
    let merkle_root = merkle_root(&transactions)?;
    let template = BlockHeader { version: BLOCK_VERSION, parent_hash, merkle_root, timestamp, nbits, nonce: 0 };
    let limit = max_attempts.min(u64::from(u32::MAX) - u64::from(nonce_start) + 1);
    let try_offset = |offset: u64| {
        let mut h = template;
        h.nonce = nonce_start + offset as u32;
        leading_zero_bits(&h.hash()) >= nbits
    };

    let serial_end = limit.min(SERIAL_ATTEMPTS);
    let mut found = (0..serial_end).find(|&o| try_offset(o));
    let mut start = serial_end;
    while found.is_none() && start < limit {
        let end = limit.min(start + PARALLEL_BATCH);
        found = (start..end).into_par_iter().find_first(|&o| try_offset(o));
        start = end;
    }
    match found {
        Some(offset) => {
            let header = BlockHeader { nonce: nonce_start + offset as u32, ..template };
            Ok(MinedBlock { block: Block { header, transactions }, attempts: offset + 1 })
        }
        None => Err(LedgerError::Exhausted { attempts: limit }),
    }
}

/// Difficulty expected at each height of a sub-chain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum DifficultyRule {
    Fixed { nbits: u32 },
    /// `nbits` grows by one every `every` blocks.
    Ramp { base: u32, every: u32 },
}

impl DifficultyRule {
    pub fn validate(&self) -> Result<(), LedgerError> {
        match *self {
            DifficultyRule::Fixed { nbits } if nbits > MAX_NBITS => Err(LedgerError::NbitsTooLarge(nbits)),
            DifficultyRule::Ramp { every: 0, .. } => Err(LedgerError::InvalidParams("ramp interval must be positive".into())),
            DifficultyRule::Ramp { base, .. } if base > MAX_NBITS => Err(LedgerError::NbitsTooLarge(base)),
            _ => Ok(()),
        }
    }

    pub fn nbits_at(&self, height: usize) -> u32 {
        match *self {
            DifficultyRule::Fixed { nbits } => nbits,
            DifficultyRule::Ramp { base, every } => {
                let step = u32::try_from(height / every as usize).unwrap_or(u32::MAX);
                base.saturating_add(step)
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FailureKind {
    UnsupportedVersion(u32),
    ParentMismatch,
    EmptyBlock,
    CommunityMismatch { found: u32 },
    MerkleMismatch,
    DifficultyMismatch { expected: u32, found: u32 },
    TargetNotMet,
    TimestampRegression,
}

impl fmt::Display for FailureKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FailureKind::UnsupportedVersion(v) => write!(f, "unsupported-version ({v})"),
            FailureKind::ParentMismatch => f.write_str("parent-mismatch"),
            FailureKind::EmptyBlock => f.write_str("empty-block"),
            FailureKind::CommunityMismatch { found } => write!(f, "community-mismatch (tx community {found})"),
            FailureKind::MerkleMismatch => f.write_str("merkle-mismatch"),
            FailureKind::DifficultyMismatch { expected, found } => {
                write!(f, "difficulty-mismatch (expected {expected}, found {found})")
            }
            FailureKind::TargetNotMet => f.write_str("target-not-met"),
            FailureKind::TimestampRegression => f.write_str("timestamp-regression"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValidationFailure {
    /// Zero-based block height.
    pub block: usize,
    pub kind: FailureKind,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValidationReport {
    pub blocks: usize,
    pub failure: Option<ValidationFailure>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.failure.is_none()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.failure {
            None => write!(f, "valid ({} blocks)", self.blocks),
            Some(ValidationFailure { block, kind }) => write!(f, "invalid at block {block}: {kind}"),
        }
    }
}

/// Per-community chain of blocks whose transactions are sanitized releases.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SubChain {
    pub community_id: u32,
    pub rule: DifficultyRule,
    pub blocks: Vec<Block>,
}

impl SubChain {
    pub fn new(community_id: u32, rule: DifficultyRule) -> Result<Self, LedgerError> {
        rule.validate()?;
        Ok(SubChain { community_id, rule, blocks: Vec::new() })
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn tip_hash(&self) -> Hash {
        self.blocks.last().map_or(ZERO_HASH, Block::hash)
    }

    /// Mines and appends the next block; returns the attempts spent.
    pub fn mine_next(
        &mut self,
        transactions: Vec<Transaction>,
        timestamp: u32,
        max_attempts: u64,
    ) -> Result<u64, LedgerError> {
        if let Some(tx) = transactions.iter().find(|t| t.community_id != self.community_id) {
            return Err(LedgerError::WrongCommunity { chain: self.community_id, tx: tx.community_id });
        }
        let nbits = self.rule.nbits_at(self.blocks.len());
        let mined = mine_block(self.tip_hash(), transactions, timestamp, nbits, 0, max_attempts)?;
        self.blocks.push(mined.block);
        Ok(mined.attempts)
    }

    /// Checks every block in parallel and reports the lowest failing height.
    pub fn validate(&self) -> ValidationReport {
        let failure = (0..self.blocks.len())
            .into_par_iter()
            .find_map_first(|i| self.check_block(i).map(|kind| ValidationFailure { block: i, kind }));
        ValidationReport { blocks: self.blocks.len(), failure }
    }

    fn check_block(&self, i: usize) -> Option<FailureKind> {
        let block = &self.blocks[i];
        let h = &block.header;
        if h.version != BLOCK_VERSION {
            return Some(FailureKind::UnsupportedVersion(h.version));
        }
        let parent = if i == 0 { ZERO_HASH } else { self.blocks[i - 1].hash() };
        if h.parent_hash != parent {
            return Some(FailureKind::ParentMismatch);
        }
        if block.transactions.is_empty() {
            return Some(FailureKind::EmptyBlock);
        }
        if let Some(tx) = block.transactions.iter().find(|t| t.community_id != self.community_id) {
            return Some(FailureKind::CommunityMismatch { found: tx.community_id });
        }
        if merkle_root(&block.transactions).ok() != Some(h.merkle_root) {
            return Some(FailureKind::MerkleMismatch);
        }
        let expected = self.rule.nbits_at(i);
        if h.nbits != expected {
            return Some(FailureKind::DifficultyMismatch { expected, found: h.nbits });
        }
        if !h.meets_target() {
            return Some(FailureKind::TargetNotMet);
        }
        if i > 0 && h.timestamp < self.blocks[i - 1].header.timestamp {
            return Some(FailureKind::TimestampRegression);
        }
        None
    }

    fn file_header(&self) -> Vec<u8> {
        let (kind, a, b) = match self.rule {
            DifficultyRule::Fixed { nbits } => (0u8, nbits, 0),
            DifficultyRule::Ramp { base, every } => (1u8, base, every),
        };
        let mut out = Vec::with_capacity(FILE_HEADER_LEN);
        out.extend_from_slice(FILE_MAGIC);
        out.extend_from_slice(&self.community_id.to_le_bytes());
        out.push(kind);
        out.extend_from_slice(&a.to_le_bytes());
        out.extend_from_slice(&b.to_le_bytes());
        out
    }

    /// File image: magic, community, difficulty rule, then each block
    /// prefixed by its byte length (u32 LE).
    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = self.file_header();
        for block in &self.blocks {
            let b = block.to_bytes();
            out.extend_from_slice(&(b.len() as u32).to_le_bytes());
            out.extend_from_slice(&b);
        }
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, LedgerError> {
        if bytes.len() < FILE_HEADER_LEN || &bytes[..8] != FILE_MAGIC {
            return Err(LedgerError::Decode("not a chain file".into()));
        }
        let word = |at: usize| u32::from_le_bytes(bytes[at..at + 4].try_into().expect("4 bytes"));
        let community_id = word(8);
        let rule = match (bytes[12], word(13), word(17)) {
            (0, nbits, 0) => DifficultyRule::Fixed { nbits },
            (1, base, every) => DifficultyRule::Ramp { base, every },
            _ => return Err(LedgerError::Decode("unknown difficulty rule".into())),
        };
        rule.validate().map_err(|e| LedgerError::Decode(e.to_string()))?;
        let mut blocks = Vec::new();
        let mut at = FILE_HEADER_LEN;
        while at < bytes.len() {
            if bytes.len() - at < 4 {
                return Err(LedgerError::Decode("truncated length prefix".into()));
            }
            let len = word(at) as usize;
            at += 4;
            if bytes.len() - at < len {
                return Err(LedgerError::Decode(format!("block {} overruns file", blocks.len())));
            }
            blocks.push(Block::from_bytes(&bytes[at..at + len])?);
            at += len;
        }
        Ok(SubChain { community_id, rule, blocks })
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<(), LedgerError> {
        std::fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self, LedgerError> {
        let mut bytes = Vec::new();
        File::open(path)?.read_to_end(&mut bytes)?;
        SubChain::from_bytes(&bytes)
    }

    /// Appends the newest block to an existing chain file, creating the file
    /// with its header first when absent.
    pub fn append_last(&self, path: impl AsRef<Path>) -> Result<(), LedgerError> {
        let path = path.as_ref();
        let Some(block) = self.blocks.last() else {
            return Err(LedgerError::InvalidParams("chain has no blocks".into()));
        };
        let fresh = !path.exists();
        let mut f = OpenOptions::new().create(true).append(true).open(path)?;
        if fresh {
            f.write_all(&self.file_header())?;
        }
        let b = block.to_bytes();
        f.write_all(&(b.len() as u32).to_le_bytes())?;
        f.write_all(&b)?;
        Ok(())
    }

    /// Hex dump of every header, fields in layout order.
    pub fn dump_headers<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        writeln!(w, "community {} ({} blocks)", self.community_id, self.blocks.len())?;
        for (i, block) in self.blocks.iter().enumerate() {
            writeln!(w, "block {i} hash {} txs {}", hex::encode(block.hash()), block.transactions.len())?;
            for (name, value) in block.header.hex_fields() {
                writeln!(w, "  {name:<12} {value}")?;
            }
        }
        Ok(())
    }
}
