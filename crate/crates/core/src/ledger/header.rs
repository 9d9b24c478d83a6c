use serde::{Deserialize, Serialize};

use super::{double_sha256, Hash, LedgerError};

pub const HEADER_LEN: usize = 80;
pub const BLOCK_VERSION: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BlockHeader {
    pub version: u32,
    pub parent_hash: Hash,
    pub merkle_root: Hash,
    pub timestamp: u32,
    /// Required count of leading zero bits in the block hash.
    pub nbits: u32,
    pub nonce: u32,
}

impl BlockHeader {
    pub fn to_bytes(&self) -> [u8; HEADER_LEN] {
        let mut out = [0u8; HEADER_LEN];
        out[0..4].copy_from_slice(&self.version.to_le_bytes());
        out[4..36].copy_from_slice(&self.parent_hash);
        out[36..68].copy_from_slice(&self.merkle_root);
        out[68..72].copy_from_slice(&self.timestamp.to_le_bytes());
        out[72..76].copy_from_slice(&self.nbits.to_le_bytes());
        out[76..80].copy_from_slice(&self.nonce.to_le_bytes());
        out
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self, LedgerError> {
        let b: &[u8; HEADER_LEN] = bytes
            .try_into()
            .map_err(|_| LedgerError::Decode(format!("header must be {HEADER_LEN} bytes, got {}", bytes.len())))?;
        let word = |at: usize| u32::from_le_bytes(b[at..at + 4].try_into().expect("4 bytes"));
        Ok(BlockHeader {
            version: word(0),
            parent_hash: b[4..36].try_into().expect("32 bytes"),
            merkle_root: b[36..68].try_into().expect("32 bytes"),
            timestamp: word(68),
            nbits: word(72),
            nonce: word(76),
        })
    }

    pub fn hash(&self) -> Hash {
        double_sha256(&self.to_bytes())
    }

    pub fn meets_target(&self) -> bool {
        leading_zero_bits(&self.hash()) >= self.nbits
    }

    /// Header fields in layout order, each as hex of its serialized bytes.
    pub fn hex_fields(&self) -> [(&'static str, String); 6] {
        [
            ("version", hex::encode(self.version.to_le_bytes())),
            ("parent_hash", hex::encode(self.parent_hash)),
            ("merkle_root", hex::encode(self.merkle_root)),
            ("timestamp", hex::encode(self.timestamp.to_le_bytes())),
            ("nbits", hex::encode(self.nbits.to_le_bytes())),
            ("nonce", hex::encode(self.nonce.to_le_bytes())),
        ]
    }
}

pub fn leading_zero_bits(hash: &Hash) -> u32 {
    let mut n = 0;
    for byte in hash {
        if *byte == 0 {
            n += 8;
        } else {
            return n + byte.leading_zeros();
        }
    }
    n
}
