//! Synthetic hierarchical benchmark graphs.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RBParams {
    pub steps: u32,
}

impl Default for RBParams {
    fn default() -> Self {
        RBParams { steps: 3 }
    }
}

/// Deterministic Ravasz-Barabasi hierarchical graph with `5^steps` nodes.
///
/// Node `u` is read as `steps` base-5 digits. The level-1 motif is a centre
/// (digit 0) joined to four corners that form a 4-cycle. Level `l` places
/// four replicas (leading digit 1..4) around the level `l-1` block and links
/// node 0 to every node whose lowest `l` digits are all non-zero, the
/// corner descendants of the replicas.
pub fn ravasz_barabasi<T: Scalar>(params: RBParams) -> Result<Graph<T>> {
    let steps = params.steps;
    if steps < 1 {
        return Err(Error::domain("ravasz_barabasi needs at least one step"));
    }
    if steps > 8 {
        return Err(Error::domain("ravasz_barabasi supports at most 8 steps"));
    }
    let mut edges: Vec<(usize, usize)> = vec![(1, 2), (2, 3), (3, 4), (1, 4)];
    edges.extend((1..5).map(|v| (0, v)));
    let mut size = 5usize;
    let mut corners: Vec<usize> = (1..5).collect();
    for _ in 1..steps {
        let block = edges.clone();
        for r in 1..5 {
            edges.extend(block.iter().map(|&(u, v)| (u + r * size, v + r * size)));
        }
        corners = (1..5).flat_map(|r| corners.iter().map(move |&c| c + r * size)).collect();
        edges.extend(corners.iter().map(|&c| (0, c)));
        size *= 5;
    }
    let weighted: Vec<(usize, usize, T)> = edges.into_iter().map(|(u, v)| (u, v, T::one())).collect();
    Graph::from_index_edges(size, &weighted)
}

/// Two-level hierarchical random graph with per-node degree quotas.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct HParams {
    /// Nodes per level-1 group.
    pub group_size: usize,
    /// Level-1 groups per level-2 group.
    pub groups_per_block: usize,
    /// Level-2 groups.
    pub blocks: usize,
    pub z_in1: usize,
    pub z_in2: usize,
    pub z_out: usize,
    pub seed: u64,
}

impl Default for HParams {
    fn default() -> Self {
        HParams {
            group_size: 16,
            groups_per_block: 4,
            blocks: 4,
            z_in1: 13,
            z_in2: 4,
            z_out: 1,
            seed: 0,
        }
    }
}

impl HParams {
    pub fn node_count(&self) -> usize {
        self.group_size * self.groups_per_block * self.blocks
    }

    pub fn group_of(&self, u: usize) -> usize {
        u / self.group_size
    }

    pub fn block_of(&self, u: usize) -> usize {
        u / (self.group_size * self.groups_per_block)
    }
}

const RESTARTS: usize = 200;

/// Random simple graph in which every node has exactly `z_in1` links inside
/// its level-1 group, `z_in2` inside its level-2 group but outside its
/// level-1 group, and `z_out` outside its level-2 group.
pub fn arenas_h<T: Scalar>(params: HParams) -> Result<Graph<T>> {
    let p = params;
    let n = p.node_count();
    let block_size = p.group_size * p.groups_per_block;
    let complement = p.group_size.checked_sub(p.z_in1 + 1);
    let checks = [
        (n > 0, "sizes must be positive"),
        (complement.is_some(), "z_in1 must be below the group size"),
        (complement.map_or(true, |r| (r * p.group_size) % 2 == 0), "group size times missing links must be even"),
        (p.z_in2 <= block_size - p.group_size, "z_in2 exceeds the rest of the level-2 group"),
        (p.z_in2 == 0 || p.groups_per_block > 1, "z_in2 needs two or more groups per level-2 group"),
        ((p.z_in2 * block_size) % 2 == 0, "level-2 stub count must be even"),
        (p.z_out <= n - block_size, "z_out exceeds the nodes outside the level-2 group"),
        (p.z_out == 0 || p.blocks > 1, "z_out needs two or more level-2 groups"),
        ((p.z_out * n) % 2 == 0, "outer stub count must be even"),
    ];
    if let Some((_, msg)) = checks.iter().find(|(ok, _)| !ok) {
        return Err(Error::domain(format!("infeasible H parameters: {msg}")));
    }
    let complement = complement.unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(p.seed);
    let mut edges: HashSet<(usize, usize)> = HashSet::new();

    for g in 0..n / p.group_size {
        let nodes: Vec<usize> = (g * p.group_size..(g + 1) * p.group_size).collect();
        let missing = regular_pairing(&nodes, complement, |_, _| true, &HashSet::new(), &mut rng)
            .ok_or_else(|| Error::Generation(format!("no {complement}-regular complement for group {g}")))?;
        for (a, &u) in nodes.iter().enumerate() {
            for &v in &nodes[a + 1..] {
                if !missing.contains(&(u, v)) {
                    edges.insert((u, v));
                }
            }
        }
    }
    for b in 0..p.blocks {
        let nodes: Vec<usize> = (b * block_size..(b + 1) * block_size).collect();
        let found = regular_pairing(&nodes, p.z_in2, |u, v| p.group_of(u) != p.group_of(v), &edges, &mut rng)
            .ok_or_else(|| Error::Generation(format!("level-2 pairing failed in block {b}")))?;
        edges.extend(found);
    }
    let all: Vec<usize> = (0..n).collect();
    let found = regular_pairing(&all, p.z_out, |u, v| p.block_of(u) != p.block_of(v), &edges, &mut rng)
        .ok_or_else(|| Error::Generation("outer pairing failed".into()))?;
    edges.extend(found);

    let mut list: Vec<(usize, usize, T)> = edges.into_iter().map(|(u, v)| (u, v, T::one())).collect();
    list.sort_by_key(|&(u, v, _)| (u, v));
    Graph::from_index_edges(n, &list)
}

fn norm(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

/// Random pairing giving every node of `nodes` exactly `degree` new links
/// that satisfy `allowed`, avoid `taken` and each other. Invalid pairs are
/// repaired by random partner swaps that never increase the defect count;
/// the whole pairing restarts a bounded number of times.
fn regular_pairing(
    nodes: &[usize],
    degree: usize,
    allowed: impl Fn(usize, usize) -> bool,
    taken: &HashSet<(usize, usize)>,
    rng: &mut ChaCha8Rng,
) -> Option<HashSet<(usize, usize)>> {
    if degree == 0 {
        return Some(HashSet::new());
    }
    let bad = |pairs: &[(usize, usize)]| -> usize {
        let mut seen = HashSet::new();
        pairs
            .iter()
            .filter(|&&(u, v)| u == v || !allowed(u, v) || taken.contains(&norm(u, v)) || !seen.insert(norm(u, v)))
            .count()
    };
    let mut stubs: Vec<usize> = nodes.iter().flat_map(|&u| std::iter::repeat(u).take(degree)).collect();
    for _ in 0..RESTARTS {
        stubs.shuffle(rng);
        let mut pairs: Vec<(usize, usize)> = stubs.chunks(2).map(|c| (c[0], c[1])).collect();
        let mut defects = bad(&pairs);
        let mut budget = 200 * pairs.len();
        while defects > 0 && budget > 0 {
            budget -= 1;
            let i = rng.gen_range(0..pairs.len());
            let j = rng.gen_range(0..pairs.len());
            if i == j {
                continue;
            }
            let ((a, b), (c, d)) = (pairs[i], pairs[j]);
            let (x, y) = if rng.gen_bool(0.5) { ((a, d), (c, b)) } else { ((a, c), (b, d)) };
            pairs[i] = x;
            pairs[j] = y;
            let after = bad(&pairs);
            if after <= defects {
                defects = after;
            } else {
                pairs[i] = (a, b);
                pairs[j] = (c, d);
            }
        }
        if defects == 0 {
            return Some(pairs.into_iter().map(|(u, v)| norm(u, v)).collect());
        }
    }
    None
}
