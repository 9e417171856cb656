use super::Graph;
use crate::error::{Error, Result};
use crate::partition::Partition;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum PruneMode {
    /// Remove the degree-1 nodes of the input graph once.
    #[default]
    SinglePass,
    /// Keep removing nodes that become degree-1 until none remain.
    Recursive,
}

/// What `prune_leaves` removed, in original node indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct LeafRecord {
    /// `(leaf, neighbour)` pairs in removal order.
    pub removed: Vec<(usize, usize)>,
    /// Original index of each node of the pruned graph.
    pub kept: Vec<usize>,
    pub original_n: usize,
}

pub fn prune_leaves<T: Scalar>(g: &Graph<T>) -> (Graph<T>, LeafRecord) {
    prune_leaves_with(g, PruneMode::SinglePass)
}

/// Removes nodes with exactly one neighbour. The pruned graph may be empty.
pub fn prune_leaves_with<T: Scalar>(g: &Graph<T>, mode: PruneMode) -> (Graph<T>, LeafRecord) {
    let n = g.node_count();
    let mut alive = vec![true; n];
    let mut removed = Vec::new();
    loop {
        let leaves: Vec<(usize, usize)> = (0..n)
            .filter(|&u| alive[u])
            .filter_map(|u| {
                let mut nb = g.neighbours(u).filter(|&v| alive[v]);
                match (nb.next(), nb.next()) {
                    (Some(v), None) => Some((u, v)),
                    _ => None,
                }
            })
            .collect();
        if leaves.is_empty() {
            break;
        }
        for &(u, _) in &leaves {
            alive[u] = false;
        }
        removed.extend(leaves);
        if mode == PruneMode::SinglePass {
            break;
        }
    }
    let kept: Vec<usize> = (0..n).filter(|&u| alive[u]).collect();
    let pruned = g.induced(&kept);
    (
        pruned,
        LeafRecord {
            removed,
            kept,
            original_n: n,
        },
    )
}

/// Extends a partition of the pruned graph to the original graph: every
/// removed leaf joins its neighbour's community. Leaves whose neighbour was
/// removed as well (isolated edges) start a community of their own.
pub fn reattach_leaves(p: &Partition, record: &LeafRecord) -> Result<Partition> {
    if p.len() != record.kept.len() {
        return Err(Error::domain(format!(
            "partition covers {} nodes but the pruned graph has {}",
            p.len(),
            record.kept.len()
        )));
    }
    let mut assignment = vec![usize::MAX; record.original_n];
    for (i, &u) in record.kept.iter().enumerate() {
        if u >= record.original_n {
            return Err(Error::domain("leaf record references a node out of range"));
        }
        assignment[u] = p.community_of(i);
    }
    let mut next = p.community_count();
    for &(leaf, nb) in record.removed.iter().rev() {
        if leaf >= record.original_n || nb >= record.original_n {
            return Err(Error::domain("leaf record references a node out of range"));
        }
        assignment[leaf] = if assignment[nb] != usize::MAX {
            assignment[nb]
        } else {
            next += 1;
            next - 1
        };
    }
    if assignment.contains(&usize::MAX) {
        return Err(Error::domain("leaf record does not cover every original node"));
    }
    Ok(Partition::from_assignment(assignment))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;

    #[test]
    fn path_core_is_middle_node() {
        let (core, rec) = prune_leaves(&path3());
        assert_eq!(core.labels(), &["b"]);
        assert_eq!(rec.removed, vec![(0, 1), (2, 1)]);
        let p = reattach_leaves(&Partition::whole(1), &rec).unwrap();
        assert_eq!(p.assignment(), &[0, 0, 0]);
    }

    #[test]
    fn triangle_untouched() {
        let (core, rec) = prune_leaves(&triangle());
        assert_eq!(core.node_count(), 3);
        assert!(rec.removed.is_empty());
        let p = Partition::from_assignment(vec![0, 1, 0]);
        assert_eq!(reattach_leaves(&p, &rec).unwrap(), p);
    }

    #[test]
    fn star_collapses_to_hub() {
        let (core, rec) = prune_leaves(&star3());
        assert_eq!(core.node_count(), 1);
        assert_eq!(rec.removed.len(), 3);
        let p = reattach_leaves(&Partition::whole(1), &rec).unwrap();
        assert_eq!(p.community_count(), 1);
        assert_eq!(p.len(), 4);
    }

    #[test]
    fn single_pass_versus_recursive() {
        // 0-1-2-3 plus triangle 3-4-5: single pass removes only node 0.
        let g = Graph::from_index_edges(
            6,
            &[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0), (3, 4, 1.0), (4, 5, 1.0), (3, 5, 1.0)],
        )
        .unwrap();
        let (once, rec) = prune_leaves(&g);
        assert_eq!(once.node_count(), 5);
        assert_eq!(rec.removed, vec![(0, 1)]);
        let (all, rec) = prune_leaves_with(&g, PruneMode::Recursive);
        assert_eq!(all.node_count(), 3);
        assert_eq!(rec.removed, vec![(0, 1), (1, 2), (2, 3)]);
        let p = reattach_leaves(&Partition::whole(3), &rec).unwrap();
        assert_eq!(p.assignment(), &[0; 6]);
    }

    #[test]
    fn isolated_edge_gets_its_own_community() {
        let g = Graph::from_index_edges(5, &[(0, 1, 1.0), (2, 3, 1.0), (3, 4, 1.0), (2, 4, 1.0)])
            .unwrap();
        let (core, rec) = prune_leaves(&g);
        assert_eq!(core.node_count(), 3);
        let p = reattach_leaves(&Partition::whole(3), &rec).unwrap();
        assert_eq!(p.community_count(), 2);
        assert_eq!(p.community_of(0), p.community_of(1));
        assert_ne!(p.community_of(0), p.community_of(2));
    }

    #[test]
    fn mismatched_partition_rejected() {
        let (_, rec) = prune_leaves(&path3());
        assert!(reattach_leaves(&Partition::whole(2), &rec).is_err());
    }
}
