use super::OptimizerConfig;
use crate::error::Result;
use crate::graph::Graph;
use crate::markov::{scaled_adjacencies, ScaledAdjacency};
use crate::partition::Partition;
use crate::scalar::Scalar;
use crate::stability::CommunityMatrixSet;

/// Moves single nodes to neighbouring communities while the stability over
/// `cfg.grid` strictly improves.
///
/// Nodes are visited in index order; each visited node takes its best
/// improving move, if any. Stops after a sweep without moves or after
/// `cfg.refine_passes` sweeps. Community ids are compacted on return.
pub fn refine_vertex_mover<T: Scalar>(g: &Graph<T>, p: &Partition, cfg: &OptimizerConfig<T>) -> Result<Partition> {
    let scales = scaled_adjacencies(g, &cfg.grid, cfg.model)?;
    refine_with_scales(g, p, &scales, cfg.refine_passes)
}

pub(crate) fn refine_with_scales<T: Scalar>(
    g: &Graph<T>,
    p: &Partition,
    scales: &[ScaledAdjacency<T>],
    max_passes: usize,
) -> Result<Partition> {
    let n = g.node_count();
    let s = scales.len();
    let mut qv = CommunityMatrixSet::from_scales(g, p, scales)?.stability_vector().values;
    let m = g.total_weight();
    let two_m = T::two() * m;
    let pi: Vec<T> = g.strengths().iter().map(|&d| d / two_m).collect();
    let mut comm = p.assignment().to_vec();
    let mut a = vec![T::zero(); p.community_count()];
    for u in 0..n {
        a[comm[u]] += pi[u];
    }
    let eps = T::epsilon() * T::of(64.0);

    // Per-time link weight from the visited node to each candidate community.
    let mut slot = vec![usize::MAX; a.len()];
    let mut cands: Vec<usize> = Vec::new();
    let mut w: Vec<T> = Vec::new();
    for _ in 0..max_passes {
        let mut moved = false;
        for u in 0..n {
            let cu = comm[u];
            cands.clear();
            for v in g.neighbours(u) {
                let cv = comm[v];
                if cv != cu && slot[cv] == usize::MAX {
                    slot[cv] = cands.len();
                    cands.push(cv);
                }
            }
            if cands.is_empty() {
                continue;
            }
            slot[cu] = cands.len();
            cands.push(cu);
            w.clear();
            w.resize(cands.len() * s, T::zero());
            for (k, sa) in scales.iter().enumerate() {
                for (v, &x) in sa.matrix.row(u).iter().enumerate() {
                    let at = slot[comm[v]];
                    if v != u && at != usize::MAX && x != T::zero() {
                        w[at * s + k] += x;
                    }
                }
            }
            let own = cands.len() - 1;
            let current = qv.iter().copied().fold(T::infinity(), T::min);
            let mut best: Option<(T, usize)> = None;
            for (ci, &cd) in cands[..own].iter().enumerate() {
                let fixed = T::two() * pi[u] * (a[cu] - a[cd]) - T::two() * pi[u] * pi[u];
                let q = (0..s)
                    .map(|k| qv[k] + (w[ci * s + k] - w[own * s + k]) / m + fixed)
                    .fold(T::infinity(), T::min);
                if q > current + eps && best.map_or(true, |b| q > b.0) {
                    best = Some((q, ci));
                }
            }
            if let Some((_, ci)) = best {
                let cd = cands[ci];
                let fixed = T::two() * pi[u] * (a[cu] - a[cd]) - T::two() * pi[u] * pi[u];
                for k in 0..s {
                    qv[k] += (w[ci * s + k] - w[own * s + k]) / m + fixed;
                }
                a[cu] -= pi[u];
                a[cd] += pi[u];
                comm[u] = cd;
                moved = true;
            }
            for &c in &cands {
                slot[c] = usize::MAX;
            }
        }
        if !moved {
            break;
        }
    }
    Ok(Partition::from_assignment(comm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::markov::{MarkovModel, MarkovTimeGrid};
    use crate::stability::evaluate_partition;

    fn cfg() -> OptimizerConfig {
        OptimizerConfig::new(MarkovTimeGrid::new(vec![1.0]).unwrap())
    }

    fn score(g: &Graph, p: &Partition) -> f64 {
        let grid = MarkovTimeGrid::new(vec![1.0]).unwrap();
        evaluate_partition(g, p, &grid, MarkovModel::Discrete, 1.0, 1.0).unwrap().1.value
    }

    #[test]
    fn optimal_partition_unchanged() {
        let p = Partition::from_assignment(vec![0, 0, 0, 1, 1, 1]);
        assert_eq!(refine_vertex_mover(&barbell(), &p, &cfg()).unwrap(), p);
    }

    #[test]
    fn misplaced_node_moves_back() {
        let g = barbell();
        let p = Partition::from_assignment(vec![0, 0, 1, 1, 1, 1]);
        let r = refine_vertex_mover(&g, &p, &cfg()).unwrap();
        assert_eq!(r.assignment(), &[0, 0, 0, 1, 1, 1]);
        assert!(score(&g, &r) > score(&g, &p));
    }

    #[test]
    fn isolated_singleton_absorbed() {
        let g = barbell();
        let p = Partition::from_assignment(vec![0, 0, 1, 2, 2, 2]);
        let r = refine_vertex_mover(&g, &p, &cfg()).unwrap();
        assert_eq!(r.community_count(), 2);
        assert!(score(&g, &r) >= score(&g, &p));
    }

    #[test]
    fn zero_passes_is_identity() {
        let p = Partition::from_assignment(vec![0, 0, 1, 1, 1, 1]);
        let mut c = cfg();
        c.refine_passes = 0;
        assert_eq!(refine_vertex_mover(&barbell(), &p, &c).unwrap(), p);
    }
}
