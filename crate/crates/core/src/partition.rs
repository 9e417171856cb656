use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Assignment of every node to one of `community_count` communities.
///
/// Community ids are always the contiguous range `0..community_count` and
/// every community is non-empty. Constructors canonicalise arbitrary labels
/// into that form by order of first appearance.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Partition {
    assignment: Vec<usize>,
    community_count: usize,
}

impl Partition {
    /// Every node in its own community.
    pub fn singletons(n: usize) -> Self {
        Partition {
            assignment: (0..n).collect(),
            community_count: n,
        }
    }

    /// All nodes in a single community (empty partition when `n == 0`).
    pub fn whole(n: usize) -> Self {
        Partition {
            assignment: vec![0; n],
            community_count: usize::from(n > 0),
        }
    }

    /// Relabels arbitrary community tags to `0..c` by first appearance.
    pub fn from_labels<L: Eq + std::hash::Hash + Clone>(labels: &[L]) -> Self {
        let mut ids = std::collections::HashMap::new();
        let assignment = labels
            .iter()
            .map(|l| {
                let next = ids.len();
                *ids.entry(l.clone()).or_insert(next)
            })
            .collect();
        Partition {
            assignment,
            community_count: ids.len(),
        }
    }

    /// Builds a partition from an assignment that must already be canonical
    /// up to relabelling; ids are compacted.
    pub fn from_assignment(mut assignment: Vec<usize>) -> Self {
        let bound = assignment.iter().max().map_or(0, |&c| c + 1);
        if bound > 4 * assignment.len() {
            return Self::from_labels(&assignment);
        }
        let mut ids = vec![usize::MAX; bound];
        let mut count = 0;
        for c in assignment.iter_mut() {
            if ids[*c] == usize::MAX {
                ids[*c] = count;
                count += 1;
            }
            *c = ids[*c];
        }
        Partition {
            assignment,
            community_count: count,
        }
    }

    /// Builds a partition from a list of disjoint node groups covering `0..n`.
    pub fn from_groups(n: usize, groups: &[Vec<usize>]) -> Result<Self> {
        let mut assignment = vec![usize::MAX; n];
        for (c, group) in groups.iter().enumerate() {
            for &u in group {
                if u >= n {
                    return Err(Error::domain(format!("node {u} out of range for {n} nodes")));
                }
                if assignment[u] != usize::MAX {
                    return Err(Error::domain(format!("node {u} appears in two groups")));
                }
                assignment[u] = c;
            }
        }
        if let Some(u) = assignment.iter().position(|&c| c == usize::MAX) {
            return Err(Error::domain(format!("node {u} is not covered by any group")));
        }
        Ok(Self::from_assignment(assignment))
    }

    pub fn len(&self) -> usize {
        self.assignment.len()
    }

    pub fn is_empty(&self) -> bool {
        self.assignment.is_empty()
    }

    pub fn community_count(&self) -> usize {
        self.community_count
    }

    pub fn assignment(&self) -> &[usize] {
        &self.assignment
    }

    pub fn community_of(&self, node: usize) -> usize {
        self.assignment[node]
    }

    /// Node lists per community, each sorted ascending.
    pub fn groups(&self) -> Vec<Vec<usize>> {
        let mut groups = vec![Vec::new(); self.community_count];
        for (u, &c) in self.assignment.iter().enumerate() {
            groups[c].push(u);
        }
        groups
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.community_count];
        for &c in &self.assignment {
            sizes[c] += 1;
        }
        sizes
    }

    pub(crate) fn check_len(&self, n: usize) -> Result<()> {
        if self.len() != n {
            return Err(Error::domain(format!(
                "partition covers {} nodes but the graph has {n}",
                self.len()
            )));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn labels_are_compacted_by_first_appearance() {
        let p = Partition::from_labels(&["x", "y", "x", "z"]);
        assert_eq!(p.assignment(), &[0, 1, 0, 2]);
        assert_eq!(p.community_count(), 3);
    }

    #[test]
    fn groups_roundtrip() {
        let p = Partition::from_groups(4, &[vec![1, 3], vec![0, 2]]).unwrap();
        assert_eq!(p.assignment(), &[0, 1, 0, 1]);
        assert_eq!(p.groups(), vec![vec![0, 2], vec![1, 3]]);
        assert_eq!(p.sizes(), vec![2, 2]);
    }

    #[test]
    fn groups_must_cover_and_be_disjoint() {
        assert!(Partition::from_groups(3, &[vec![0, 1]]).is_err());
        assert!(Partition::from_groups(2, &[vec![0, 1], vec![1]]).is_err());
        assert!(Partition::from_groups(2, &[vec![0, 5]]).is_err());
    }

    #[test]
    fn whole_and_singletons() {
        assert_eq!(Partition::whole(3).community_count(), 1);
        assert_eq!(Partition::whole(0).community_count(), 0);
        assert_eq!(Partition::singletons(3).community_count(), 3);
    }
}
