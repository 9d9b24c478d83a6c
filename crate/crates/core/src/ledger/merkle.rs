use super::{sha256, Hash, LedgerError, Transaction};

/// Root of the binary Merkle tree over `txs`, leaves in order.
///
/// Leaves are `SHA-256(tx bytes)`, parents `SHA-256(left ‖ right)`. An odd
/// level pairs its last node with itself; a single leaf is the root.
pub fn merkle_root(txs: &[Transaction]) -> Result<Hash, LedgerError> {
    if txs.is_empty() {
        return Err(LedgerError::EmptyTransactions);
    }
    let mut level: Vec<Hash> = txs.iter().map(|t| sha256(&t.to_bytes())).collect();
    let mut buf = [0u8; 64];
    while level.len() > 1 {
        level = level
            .chunks(2)
            .map(|pair| {
                let right = pair.get(1).unwrap_or(&pair[0]);
                buf[..32].copy_from_slice(&pair[0]);
                buf[32..].copy_from_slice(right);
                sha256(&buf)
            })
            .collect();
    }
    Ok(level[0])
}
