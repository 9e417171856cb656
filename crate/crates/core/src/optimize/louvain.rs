use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{check_input, OptimizationResult};
use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::markov::{scaled_adjacency, MarkovModel, ScaledAdjacency};
use crate::matrix::Matrix;
use crate::partition::Partition;
use crate::scalar::Scalar;
use crate::stability::{CommunityMatrixSet, StabilityScore};

/// Louvain modularity optimisation on the weighted adjacency of `g`,
/// self-loops included. Returns the coarsest level.
pub fn louvain<T: Scalar>(g: &Graph<T>, seed: u64) -> Result<Partition> {
    if g.edge_count() == 0 {
        return Err(Error::domain("louvain needs at least one edge between distinct nodes"));
    }
    Ok(louvain_matrix(g.adjacency(), seed))
}

/// Louvain run on the graph with adjacency `A_t`, scored by stability at `t`.
pub fn lso<T: Scalar>(g: &Graph<T>, t: T, model: MarkovModel, seed: u64) -> Result<OptimizationResult<T>> {
    check_input(g)?;
    let sa = scaled_adjacency(g, t, model)?;
    lso_with_scale(g, &sa, seed)
}

pub(crate) fn lso_with_scale<T: Scalar>(
    g: &Graph<T>,
    sa: &ScaledAdjacency<T>,
    seed: u64,
) -> Result<OptimizationResult<T>> {
    let n = g.node_count();
    let has_links = (0..n).any(|u| (0..n).any(|v| u != v && sa.matrix[(u, v)] > T::zero()));
    // A_0 = D has no links at all; every node is then on its own.
    let p = if has_links {
        louvain_matrix(&sa.matrix, seed)
    } else {
        Partition::singletons(n)
    };
    let v = CommunityMatrixSet::from_scales(g, &p, std::slice::from_ref(sa))?.stability_vector();
    Ok(OptimizationResult {
        communities_at_best: p.community_count(),
        best_partition: p,
        best_score: StabilityScore { value: v.min() },
        best_vector: v,
        merge_history: Vec::new(),
        passes: 0,
    })
}

fn louvain_matrix<T: Scalar>(adjacency: &Matrix<T>, seed: u64) -> Partition {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = adjacency.clone();
    let mut node_of: Vec<usize> = (0..w.rows()).collect();
    loop {
        let Some(comm) = one_level(&w, &mut rng) else { break };
        let c = comm.iter().max().map_or(0, |&x| x + 1);
        for x in node_of.iter_mut() {
            *x = comm[*x];
        }
        w = aggregate(&w, &comm, c);
        if c == 1 {
            break;
        }
    }
    Partition::from_assignment(node_of)
}

/// Local moving phase. Returns compacted community ids, or `None` when no
/// node moved.
fn one_level<T: Scalar>(w: &Matrix<T>, rng: &mut ChaCha8Rng) -> Option<Vec<usize>> {
    let n = w.rows();
    let k = w.row_sums();
    let m2: T = k.iter().copied().sum();
    let eps = T::epsilon() * T::of(64.0) * m2;
    let mut comm: Vec<usize> = (0..n).collect();
    let mut tot = k.clone();
    let mut links = vec![T::zero(); n];
    let mut touched = Vec::new();
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut moved_any = false;
    loop {
        let mut moved = false;
        for &u in &order {
            let cu = comm[u];
            for v in 0..n {
                let x = w[(u, v)];
                if v != u && x > T::zero() {
                    if links[comm[v]] == T::zero() {
                        touched.push(comm[v]);
                    }
                    links[comm[v]] += x;
                }
            }
            tot[cu] -= k[u];
            let gain = |c: usize, links: &[T], tot: &[T]| links[c] - tot[c] * k[u] / m2;
            let mut best = (gain(cu, &links, &tot), cu);
            touched.sort_unstable();
            for &c in &touched {
                let gc = gain(c, &links, &tot);
                if gc > best.0 + eps {
                    best = (gc, c);
                }
            }
            tot[best.1] += k[u];
            if best.1 != cu {
                comm[u] = best.1;
                moved = true;
            }
            for c in touched.drain(..) {
                links[c] = T::zero();
            }
        }
        if !moved {
            break;
        }
        moved_any = true;
    }
    moved_any.then(|| Partition::from_assignment(comm).assignment().to_vec())
}

fn aggregate<T: Scalar>(w: &Matrix<T>, comm: &[usize], c: usize) -> Matrix<T> {
    let mut out = Matrix::zeros(c, c);
    for (u, &cu) in comm.iter().enumerate() {
        for (v, &x) in w.row(u).iter().enumerate() {
            if x != T::zero() {
                out[(cu, comm[v])] += x;
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::fixtures::*;
    use crate::stability::modularity;

    #[test]
    fn barbell_two_communities() {
        let p = louvain(&barbell(), 1).unwrap();
        assert_eq!(p.assignment(), &[0, 0, 0, 1, 1, 1]);
    }

    #[test]
    fn triangle_one_community() {
        assert_eq!(louvain(&triangle(), 5).unwrap().community_count(), 1);
    }

    #[test]
    fn self_loops_only_rejected() {
        let g = Graph::from_index_edges(2, &[(0, 0, 1.0), (1, 1, 1.0)]).unwrap();
        assert!(louvain(&g, 0).is_err());
    }

    #[test]
    fn self_loops_keep_nodes_apart() {
        // Heavy loops make singletons better than any merge.
        let g = Graph::from_index_edges(2, &[(0, 0, 10.0), (1, 1, 10.0), (0, 1, 1.0)]).unwrap();
        let p = louvain(&g, 0).unwrap();
        assert_eq!(p.community_count(), 2);
        assert!(modularity(&g, &p).unwrap() > modularity(&g, &Partition::whole(2)).unwrap());
    }

    #[test]
    fn lso_at_one_is_louvain() {
        let g = barbell();
        let r = lso(&g, 1.0, MarkovModel::Discrete, 1).unwrap();
        assert_eq!(r.best_partition, louvain(&g, 1).unwrap());
        assert!((r.best_score.value - modularity(&g, &r.best_partition).unwrap()).abs() < 1e-12);
        assert!(r.merge_history.is_empty());
    }

    #[test]
    fn lso_at_zero_is_singletons() {
        let r = lso(&barbell(), 0.0, MarkovModel::Discrete, 1).unwrap();
        assert_eq!(r.best_partition.community_count(), 6);
    }
}
