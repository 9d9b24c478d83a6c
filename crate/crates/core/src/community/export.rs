use std::io::{BufRead, Write};

use super::{CommunityError, CommunityPartition, Dendrogram};
use crate::graph::NodeId;

/// One line of the partition export: `node_id community_id density`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PartitionRecord {
    pub node: NodeId,
    pub community: usize,
    pub density: f64,
}

pub fn write_partition<W: Write>(p: &CommunityPartition, mut w: W) -> std::io::Result<()> {
    writeln!(w, "# node_id community_id density")?;
    for (node, &cid) in &p.node_assignment {
        let density = p.community(cid).map_or(0.0, |c| c.density);
        writeln!(w, "{node} {cid} {density}")?;
    }
    Ok(())
}

pub fn read_partition<R: BufRead>(r: R) -> Result<Vec<PartitionRecord>, CommunityError> {
    let mut out = Vec::new();
    for (idx, line) in r.lines().enumerate() {
        let line = line?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let bad = |message: String| CommunityError::Format { line: idx + 1, message };
        let fields: Vec<&str> = line.split_whitespace().collect();
        let [node, community, density] = fields.as_slice() else {
            return Err(bad(format!("expected 3 fields, found {}", fields.len())));
        };
        let density: f64 = density.parse().map_err(|_| bad(format!("bad density `{density}`")))?;
        if !(0.0..=1.0).contains(&density) {
            return Err(bad(format!("density {density} outside [0, 1]")));
        }
        out.push(PartitionRecord {
            node: NodeId(node.parse().map_err(|_| bad(format!("bad node id `{node}`")))?),
            community: community.parse().map_err(|_| bad(format!("bad community id `{community}`")))?,
            density,
        });
    }
    Ok(out)
}

/// Merge steps as CSV: `step,left_id,right_id,similarity`.
pub fn write_dendrogram_csv<W: Write>(d: &Dendrogram, mut w: W) -> std::io::Result<()> {
    writeln!(w, "step,left_id,right_id,similarity")?;
    for (i, s) in d.steps.iter().enumerate() {
        writeln!(w, "{},{},{},{}", i, s.left, s.right, s.similarity.value())?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::community::detect_communities;
    use crate::graph::HealthGraph;

    #[test]
    fn partition_round_trip() {
        let g = HealthGraph::from_edges([(1u32, 2u32), (1, 3), (2, 3), (3, 4)]).unwrap();
        let (d, p) = detect_communities(&g, None).unwrap();
        let mut buf = Vec::new();
        write_partition(&p, &mut buf).unwrap();
        let recs = read_partition(buf.as_slice()).unwrap();
        assert_eq!(recs.len(), 4);
        for r in &recs {
            assert_eq!(p.node_assignment[&r.node], r.community);
            assert_eq!(p.communities[r.community].density, r.density);
        }
        let mut csv = Vec::new();
        write_dendrogram_csv(&d, &mut csv).unwrap();
        let text = String::from_utf8(csv).unwrap();
        assert!(text.starts_with("step,left_id,right_id,similarity\n"));
        assert_eq!(text.lines().count(), d.steps.len() + 1);
    }

    #[test]
    fn partition_format_errors() {
        assert!(matches!(read_partition("1 2\n".as_bytes()), Err(CommunityError::Format { line: 1, .. })));
        assert!(matches!(read_partition("# h\n1 0 1.5\n".as_bytes()), Err(CommunityError::Format { line: 2, .. })));
    }
}
